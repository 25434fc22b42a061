from fractions import Fraction

import pytest

from circuits.simkernel import NS
from harness.fom import FomMode, FomReport, estimate_fom

pytestmark = pytest.mark.harness


def test_design_a_sequential_period():
    """Test that sequential detects are spaced by the 65 ns latency plus the 2 ns re-arm and 10 ns input"""
    report = estimate_fom('a', 'sequential', repetitions=4)
    assert report.op_period == 77 * NS
    assert report.operations == 4
    assert report.ops_per_second == Fraction(10 ** 12, 77 * NS)
    assert report.within_tolerance()


def test_design_a_overlapped_period():
    report = estimate_fom('A', FomMode.OVERLAPPED, repetitions=4)
    assert report.op_period == 35 * NS
    assert report.within_tolerance()


def test_design_a_reset_period():
    report = estimate_fom('A', 'sequential', repetitions=2)
    assert report.reset_period == 18 * NS
    assert report.reset_ops_per_second == Fraction(10 ** 12, 18 * NS)


def test_design_b_sequential_matches_reference():
    report = estimate_fom('B', 'sequential', repetitions=3)
    assert report.reset_period is None
    assert report.expected == pytest.approx(1.1e7)
    assert report.within_tolerance()


def test_design_b_overlapped_has_no_reference():
    report = estimate_fom('B', 'overlapped', repetitions=3)
    assert report.op_period == 70 * NS
    assert report.expected is None
    assert report.within_tolerance()


def test_invalid_requests():
    with pytest.raises(ValueError):
        estimate_fom('A', 'sequential', repetitions=1)
    with pytest.raises(ValueError):
        estimate_fom('C', 'sequential', repetitions=2)
    with pytest.raises(ValueError):
        estimate_fom('A', 'sideways')


def test_report_as_dict_explains_the_operation():
    report = FomReport('A', FomMode.SEQUENTIAL, 77 * NS, Fraction(10 ** 12, 77 * NS), 4, reset_period=18 * NS)
    data = report.as_dict()
    assert data['mode'] == 'sequential'
    assert data['op_period_ps'] == 77 * NS
    assert 'operation' in data['note']
    assert report.deviation < 0.25
