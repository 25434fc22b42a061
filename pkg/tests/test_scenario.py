import json

import pytest

from circuits.simkernel import NS
from harness.exceptions import SchemaError
from harness.scenario import (
    Presentation, ResetEvent, Stimulus, apply_jitter, build_config, expand_sequence, load_scenario,
    pair_stimuli, scenario_from_dict,
)

pytestmark = pytest.mark.harness


def pairs(*starts, offset=10 * NS):
    stimuli = []
    for start in starts:
        stimuli.append({'label': 'A', 'rise': start})
        stimuli.append({'label': 'B', 'rise': start + offset})
    return stimuli


def test_expand_sequence_frames_pairs():
    stimuli = expand_sequence('ABBA')
    assert stimuli == [
        Stimulus('A', 0), Stimulus('B', 10 * NS), Stimulus('B', 35 * NS), Stimulus('A', 45 * NS),
    ]


@pytest.mark.parametrize('symbols', ['ABA', 'AABB'])
def test_expand_sequence_rejects_bad_frames(symbols):
    with pytest.raises(SchemaError):
        expand_sequence(symbols)


def test_pair_stimuli_builds_presentations_and_resets():
    stimuli = [
        Stimulus('B', 10 * NS), Stimulus('A', 0), Stimulus('RESET', 50 * NS, 2 * NS),
        Stimulus('A', 100 * NS), Stimulus('B', 90 * NS),
    ]
    assert pair_stimuli(stimuli) == [
        Presentation(0, 10 * NS, 10 * NS),
        ResetEvent(50 * NS, 2 * NS),
        Presentation(100 * NS, 90 * NS, 10 * NS),
    ]


@pytest.mark.parametrize('stimuli', [
    [Stimulus('A', 0), Stimulus('A', 5 * NS), Stimulus('B', 10 * NS)],
    [Stimulus('A', 0), Stimulus('B', 10 * NS, 12 * NS)],
    [Stimulus('A', 0), Stimulus('RESET', 5 * NS), Stimulus('B', 10 * NS)],
    [Stimulus('A', 0), Stimulus('B', 10 * NS), Stimulus('A', 50 * NS)],
])
def test_pair_stimuli_rejects_broken_pairs(stimuli):
    with pytest.raises(SchemaError):
        pair_stimuli(stimuli)


def test_scenario_accepts_times_with_units():
    scenario = scenario_from_dict({
        'design': 'A',
        'stimuli': [{'label': 'A', 'rise': '0ns', 'width': '11ns'}, {'label': 'B', 'rise': '10ns', 'width': 11_000}],
    })
    assert scenario.design == 'A'
    assert scenario.events() == [Presentation(0, 10 * NS, 11 * NS)]


def test_scenario_from_sequence():
    scenario = scenario_from_dict({'design': 'A', 'sequence': {'symbols': 'ABBA', 'pattern_delay': '20ns'}})
    assert [s.rise for s in scenario.stimuli] == [0, 10 * NS, 40 * NS, 50 * NS]


def test_empty_stimuli_is_a_valid_scenario():
    scenario = scenario_from_dict({'design': 'B', 'stimuli': []})
    assert scenario.events() == []


@pytest.mark.parametrize('raw, field', [
    ({'stimuli': []}, 'design'),
    ({'design': 'C', 'stimuli': []}, 'design'),
    ({'design': 'A', 'stimuli': [{'label': 'X', 'rise': 0}]}, 'stimuli'),
    ({'design': 'A', 'stimuli': [{'label': 'A', 'rise': '-5ns'}]}, 'stimuli'),
    ({'design': 'A', 'stimuli': [], 'bias': {'mirrored': True}}, 'bias'),
    ({'design': 'B', 'stimuli': [], 'taps': {'tap_count': 10}}, 'taps'),
    ({'design': 'A', 'sequence': {'symbols': 'ABC'}}, 'sequence'),
    ({'design': 'A', 'stimuli': [], 'calibration': [{'bias_mV': 700, 'line_delay': '60ns'}]}, 'calibration'),
])
def test_schema_errors_name_the_field(raw, field):
    with pytest.raises(SchemaError) as excinfo:
        scenario_from_dict(raw)
    assert field in excinfo.value.detail


def test_stimuli_and_sequence_are_exclusive():
    with pytest.raises(SchemaError):
        scenario_from_dict({'design': 'A', 'stimuli': [], 'sequence': {'symbols': 'AB'}})
    with pytest.raises(SchemaError):
        scenario_from_dict({'design': 'A'})


def test_design_b_has_no_reset():
    with pytest.raises(SchemaError) as excinfo:
        scenario_from_dict({'design': 'B', 'stimuli': [{'label': 'RESET', 'rise': 0}]})
    assert 'stimuli' in excinfo.value.detail


def test_timing_keys_are_checked_per_design():
    with pytest.raises(SchemaError) as excinfo:
        scenario_from_dict({'design': 'B', 'stimuli': [], 'timing': {'latency': '65ns'}})
    assert excinfo.value.detail == {'timing': ['latency']}


def test_build_config_applies_overrides():
    config = build_config({
        'design': 'A',
        'timing': {'pattern_delay_min': 20 * NS},
        'taps': {'ref_tap_delay': 20 * NS},
        'cd': {'stages_per_side': 5},
    })
    assert config.pattern_delay_min == 20 * NS
    assert config.ref_tap_delay == 20 * NS
    assert config.initial_tap_delay == 25 * NS
    assert config.cd.stages_per_side == 5


def test_build_config_custom_calibration():
    config = build_config({
        'design': 'B',
        'calibration': [{'bias_mV': 500, 'line_delay': 80 * NS}, {'bias_mV': 1800, 'line_delay': 10 * NS}],
        'bias': {'near_nodes': [-5], 'far_nodes': [-3], 'mirrored': True},
    })
    assert config.calibration.min_bias == 500
    assert config.near_nodes == (-5,)
    assert config.mirrored


def test_invalid_config_becomes_schema_error():
    with pytest.raises(SchemaError) as excinfo:
        build_config({'design': 'B', 'bias': {'near_nodes': (-2,), 'far_nodes': (-2,)}})
    assert 'config' in excinfo.value.detail


def test_jitter_is_reproducible():
    raw = {'design': 'A', 'stimuli': pairs(100 * NS), 'jitter': '300ps', 'seed': 5, 'allow_violation': True}
    first = scenario_from_dict(raw).stimuli
    assert first == scenario_from_dict(raw).stimuli
    assert all(abs(s.rise - o) <= 300 for s, o in zip(first, [100 * NS, 110 * NS]))


def test_apply_jitter_never_moves_before_zero():
    moved = apply_jitter([Stimulus('A', 0), Stimulus('B', 100)], 1_000, seed=3)
    assert all(s.rise >= 0 for s in moved)
    assert moved == sorted(moved, key=lambda s: s.rise)


def test_jitter_that_breaks_the_envelope_is_rejected():
    raw = {'design': 'A', 'stimuli': pairs(*(n * 100 * NS for n in range(1, 6))), 'jitter': '5ns'}
    with pytest.raises(SchemaError) as excinfo:
        scenario_from_dict(raw)
    assert 'jitter' in excinfo.value.detail
    raw['allow_violation'] = True
    assert len(scenario_from_dict(raw).events()) == 5


def test_load_scenario(tmp_path):
    path = tmp_path / 'scenario.json'
    path.write_text(json.dumps({'design': 'A', 'stimuli': pairs(0)}))
    scenario = load_scenario(path)
    assert scenario.source == str(path)
    assert len(scenario.events()) == 1


def test_load_scenario_errors(tmp_path):
    with pytest.raises(SchemaError):
        load_scenario(tmp_path / 'missing.json')
    broken = tmp_path / 'broken.json'
    broken.write_text('{"design": ')
    with pytest.raises(SchemaError):
        load_scenario(broken)
