import json
from io import StringIO

import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from circuits.design_a import DesignA
from circuits.exceptions import InvariantViolation, NotOneHot
from harness.models import SweepRun

pytestmark = pytest.mark.harness


def run(*args):
    out = StringIO()
    call_command(*args, stdout=out)
    return out.getvalue()


@pytest.fixture
def scenario_file(tmp_path):
    path = tmp_path / 'learn.json'
    path.write_text(json.dumps({
        'design': 'A',
        'stimuli': [
            {'label': 'A', 'rise': '0ns'}, {'label': 'B', 'rise': '10ns'},
            {'label': 'A', 'rise': '200ns'}, {'label': 'B', 'rise': '210ns'},
            {'label': 'A', 'rise': '400ns'}, {'label': 'B', 'rise': '410ns'},
        ],
    }))
    return path


def test_run_prints_outcomes(scenario_file, tmp_path):
    vcd = tmp_path / 'learn.vcd'
    output = run('run', str(scenario_file), '--vcd', str(vcd), '--csv', str(tmp_path / 'learn.csv'))
    assert 'TRAINED' in output
    assert 'RECOGNIZED  Vout at 475000 ps' in output
    assert vcd.exists()
    assert (tmp_path / 'learn.csv').exists()


def test_run_json_report(scenario_file):
    report = json.loads(run('run', str(scenario_file), '--json'))
    assert [o['outcome'] for o in report['outcomes']] == ['TRAINED', 'ENTERED_ACTIVE', 'RECOGNIZED']


def test_run_missing_scenario_exits_with_one(tmp_path):
    with pytest.raises(CommandError) as excinfo:
        run('run', str(tmp_path / 'nope.json'))
    assert excinfo.value.returncode == 1


def test_run_invalid_scenario_exits_with_one(tmp_path):
    path = tmp_path / 'bad.json'
    path.write_text(json.dumps({'design': 'B', 'stimuli': [{'label': 'RESET', 'rise': 0}]}))
    with pytest.raises(CommandError) as excinfo:
        run('run', str(path))
    assert excinfo.value.returncode == 1


def test_invariant_violation_exits_with_two(scenario_file, monkeypatch):
    def broken(scenario):
        raise InvariantViolation("Vtraining equals Vactive at 0 ps")

    monkeypatch.setattr('harness.management.commands.run.run_scenario', broken)
    with pytest.raises(CommandError) as excinfo:
        run('run', str(scenario_file))
    assert excinfo.value.returncode == 2


def test_broken_tap_latches_exit_with_two(scenario_file, monkeypatch):
    def no_tap_selected(device):
        raise NotOneHot(f"Tap latches [] are not one-hot at {device.sim.now} ps")

    monkeypatch.setattr(DesignA, 'selected_tap', no_tap_selected)
    with pytest.raises(CommandError) as excinfo:
        run('run', str(scenario_file))
    assert excinfo.value.returncode == 2


@pytest.mark.django_db
def test_sweep_command_saves_run(tmp_path):
    output = run(
        'sweep', '--start', '45ns', '--end', '50ns', '--step', '10ns', '--csv', str(tmp_path / 's.csv'), '--save',
    )
    assert 'SET_40NS' in output
    assert 'Swept 1 offsets' in output
    assert SweepRun.objects.get().count_set_40ns == 1


def test_sweep_only_supports_design_b():
    with pytest.raises(CommandError) as excinfo:
        run('sweep', '--design', 'a')
    assert excinfo.value.returncode == 1


def test_decode_command():
    output = run('decode', '--train-offset', '10ns', '--stream', 'ABABBAAB')
    assert output.splitlines()[0] == '1101'
    assert '10.00 Mbit/s' in output


def test_decode_negative_offset_and_odd_stream():
    assert run('decode', '--train-offset=-10ns', '--stream', 'baab').splitlines()[0] == '10'
    with pytest.raises(CommandError) as excinfo:
        run('decode', '--stream', 'ABA')
    assert excinfo.value.returncode == 1


def test_fom_command():
    output = run('fom', '--design', 'a', '--mode', 'overlapped', '--repetitions', '3')
    assert 'detect period:  35000 ps' in output
