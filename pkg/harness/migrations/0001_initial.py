import django.db.models.deletion
import django.utils.timezone
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='SweepRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('design', models.CharField(choices=[('A', 'Design A'), ('B', 'Design B')], db_index=True, default='B', max_length=1)),
                ('start_ps', models.BigIntegerField(help_text='First offset of the sweep, in ps')),
                ('end_ps', models.BigIntegerField(help_text='Last offset of the sweep (inclusive), in ps')),
                ('step_ps', models.BigIntegerField(help_text='Offset step, in ps')),
                ('width_ps', models.BigIntegerField(default=10000, help_text='Pulse width used for every row, in ps')),
                ('mirrored', models.BooleanField(default=False)),
                ('count_set_20ns', models.PositiveIntegerField(default=0)),
                ('count_set_40ns', models.PositiveIntegerField(default=0)),
                ('count_keep_default', models.PositiveIntegerField(default=0)),
                ('count_failed', models.PositiveIntegerField(default=0)),
                ('created_at', models.DateTimeField(db_index=True, default=django.utils.timezone.now)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='SweepRow',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('offset_ps', models.BigIntegerField(db_index=True)),
                ('decision', models.CharField(db_index=True, max_length=16)),
                ('bias_mV', models.PositiveIntegerField()),
                ('trained_delay_ps', models.BigIntegerField(blank=True, null=True)),
                ('detect_ok', models.BooleanField(default=False)),
                ('suppressed_20ns', models.BooleanField(default=False, help_text='The 20 ns branch was suppressed by the 40 ns branch')),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='rows', to='harness.sweeprun')),
            ],
            options={
                'ordering': ['run', 'offset_ps'],
                'unique_together': {('run', 'offset_ps')},
            },
        ),
    ]
