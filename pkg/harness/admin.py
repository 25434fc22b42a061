from django.contrib import admin
from .models import SweepRun, SweepRow


class SweepRowInline(admin.TabularInline):
    model = SweepRow
    extra = 0
    readonly_fields = ('offset_ps', 'decision', 'bias_mV', 'trained_delay_ps', 'detect_ok', 'suppressed_20ns')


@admin.register(SweepRun)
class SweepRunAdmin(admin.ModelAdmin):
    list_display = ('id', 'design', 'start_ps', 'end_ps', 'step_ps', 'count_set_20ns',
                    'count_set_40ns', 'count_failed', 'created_at')
    list_filter = ('design', 'mirrored', 'created_at')
    date_hierarchy = 'created_at'
    inlines = [SweepRowInline]


@admin.register(SweepRow)
class SweepRowAdmin(admin.ModelAdmin):
    list_display = ('run', 'offset_ps', 'decision', 'bias_mV', 'detect_ok', 'suppressed_20ns')
    list_filter = ('decision', 'detect_ok')
    search_fields = ('decision',)
