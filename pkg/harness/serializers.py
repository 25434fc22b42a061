from rest_framework import serializers

from circuits.simkernel import parse_time
from .models import SweepRun, SweepRow


class TimeField(serializers.Field):
    """A time written as integer ps or a string with a unit ("10ns", "500ps")."""

    default_error_messages = {
        'invalid': 'Enter a time as integer picoseconds or a string such as "10ns".',
    }

    def __init__(self, allow_negative=False, **kwargs):
        self.allow_negative = allow_negative
        super().__init__(**kwargs)

    def to_internal_value(self, data):
        try:
            return parse_time(data, allow_negative=self.allow_negative)
        except ValueError:
            self.fail('invalid')

    def to_representation(self, value):
        return value


class TimingSerializer(serializers.Serializer):
    pattern_delay_min = TimeField(required=False)
    latency = TimeField(required=False)
    output_width = TimeField(required=False)
    mode_latch_delay = TimeField(required=False)
    a_path_delay = TimeField(required=False)
    b_path_delay = TimeField(required=False)


class TapsSerializer(serializers.Serializer):
    ref_tap_delay = TimeField(required=False)
    tap_pitch = TimeField(required=False)
    tap_count = serializers.IntegerField(required=False, min_value=1)
    initial_tap_delay = TimeField(required=False)


class DetectorSerializer(serializers.Serializer):
    stages_per_side = serializers.IntegerField(required=False, min_value=1)
    stage_delay = TimeField(required=False)
    min_overlap = TimeField(required=False)
    clock_period = TimeField(required=False)


class BiasSerializer(serializers.Serializer):
    near_nodes = serializers.ListField(child=serializers.IntegerField(), required=False, min_length=1)
    far_nodes = serializers.ListField(child=serializers.IntegerField(), required=False, min_length=1)
    mirrored = serializers.BooleanField(required=False)


class CalibrationPointSerializer(serializers.Serializer):
    bias_mV = serializers.IntegerField(min_value=0)
    line_delay = TimeField()


class StimulusSerializer(serializers.Serializer):
    LABEL_CHOICES = ['A', 'B', 'RESET']

    label = serializers.ChoiceField(choices=LABEL_CHOICES)
    rise = TimeField()
    width = TimeField(required=False)


class SequenceSerializer(serializers.Serializer):
    symbols = serializers.RegexField(r'^[AB]+$')
    width = TimeField(required=False, default=10_000)
    inter_pulse_delay = TimeField(required=False, default=10_000)
    pattern_delay = TimeField(required=False, default=15_000)
    start = TimeField(required=False, default=0)

    def validate_symbols(self, value):
        if len(value) % 2:
            raise serializers.ValidationError("A sequence must contain whole pairs of symbols.")
        return value


class ScenarioSerializer(serializers.Serializer):
    """
    Schema of a scenario file.

    Exactly one of ``stimuli`` and ``sequence`` describes the input; an empty
    ``stimuli`` list is a valid scenario with no presentations.
    """
    DESIGN_CHOICES = ['A', 'B']

    design = serializers.ChoiceField(choices=DESIGN_CHOICES)
    timing = TimingSerializer(required=False)
    taps = TapsSerializer(required=False)
    cd = DetectorSerializer(required=False)
    bias = BiasSerializer(required=False)
    calibration = CalibrationPointSerializer(many=True, required=False)
    stimuli = StimulusSerializer(many=True, required=False)
    sequence = SequenceSerializer(required=False)
    seed = serializers.IntegerField(required=False, default=0)
    jitter = TimeField(required=False, default=0)
    allow_violation = serializers.BooleanField(required=False, default=False)

    def validate_design(self, value):
        return value.upper()

    def validate_calibration(self, value):
        if value and len(value) < 2:
            raise serializers.ValidationError("A calibration needs at least two points.")
        return value

    def validate(self, data):
        if ('stimuli' in data) == ('sequence' in data):
            raise serializers.ValidationError("Give exactly one of 'stimuli' or 'sequence'.")
        if data['design'] == 'A' and 'bias' in data:
            raise serializers.ValidationError({'bias': "Bias settings only apply to Design B."})
        if data['design'] == 'B' and 'taps' in data:
            raise serializers.ValidationError({'taps': "Tap settings only apply to Design A."})
        return data


class SweepRowSerializer(serializers.ModelSerializer):
    class Meta:
        model = SweepRow
        fields = ['offset_ps', 'decision', 'bias_mV', 'trained_delay_ps', 'detect_ok', 'suppressed_20ns']


class SweepRunSerializer(serializers.ModelSerializer):
    rows = SweepRowSerializer(many=True, read_only=True)

    class Meta:
        model = SweepRun
        fields = ['id', 'design', 'start_ps', 'end_ps', 'step_ps', 'width_ps', 'mirrored',
                  'count_set_20ns', 'count_set_40ns', 'count_keep_default', 'count_failed',
                  'created_at', 'rows']
        read_only_fields = fields
