from django.db import models
from django.utils import timezone


class SweepRun(models.Model):
    """One Design B offset sweep, stored when a sweep is run with --save."""
    DESIGN_CHOICES = [
        ('A', 'Design A'),
        ('B', 'Design B'),
    ]

    design = models.CharField(max_length=1, choices=DESIGN_CHOICES, default='B', db_index=True)
    start_ps = models.BigIntegerField(help_text="First offset of the sweep, in ps")
    end_ps = models.BigIntegerField(help_text="Last offset of the sweep (inclusive), in ps")
    step_ps = models.BigIntegerField(help_text="Offset step, in ps")
    width_ps = models.BigIntegerField(default=10_000, help_text="Pulse width used for every row, in ps")
    mirrored = models.BooleanField(default=False)
    count_set_20ns = models.PositiveIntegerField(default=0)
    count_set_40ns = models.PositiveIntegerField(default=0)
    count_keep_default = models.PositiveIntegerField(default=0)
    count_failed = models.PositiveIntegerField(default=0)
    created_at = models.DateTimeField(default=timezone.now, db_index=True)

    def __str__(self):
        return f"Design {self.design} sweep {self.start_ps}-{self.end_ps} ps step {self.step_ps} ps"

    class Meta:
        ordering = ['-created_at']


class SweepRow(models.Model):
    """Result for a single offset of a sweep."""
    run = models.ForeignKey(SweepRun, on_delete=models.CASCADE, related_name='rows')
    offset_ps = models.BigIntegerField(db_index=True)
    decision = models.CharField(max_length=16, db_index=True)
    bias_mV = models.PositiveIntegerField()
    trained_delay_ps = models.BigIntegerField(null=True, blank=True)
    detect_ok = models.BooleanField(default=False)
    suppressed_20ns = models.BooleanField(default=False,
                                          help_text="The 20 ns branch was suppressed by the 40 ns branch")

    def __str__(self):
        return f"{self.offset_ps} ps: {self.decision}"

    class Meta:
        ordering = ['run', 'offset_ps']
        unique_together = ('run', 'offset_ps')
