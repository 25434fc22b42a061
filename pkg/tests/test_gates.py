import random

import pytest

from circuits.exceptions import ArityMismatch
from circuits.gates import (
    ClockEdge, ClockGen, FixedDelay, Gate, GateKind, SampleHold, SRLatch,
    eval_gate, latch_update, sample_hold_step,
)
from circuits.simkernel import NS, Level, Pulse, Simulation

pytestmark = pytest.mark.gates

H, L = Level.HIGH, Level.LOW


@pytest.mark.parametrize('kind, levels, expected', [
    (GateKind.BUF, [H], H),
    (GateKind.INV, [H], L),
    (GateKind.AND, [H, H], H),
    (GateKind.AND, [H, L, H], L),
    (GateKind.OR, [L, L], L),
    (GateKind.OR, [L, H], H),
    (GateKind.NAND, [H, H], L),
    (GateKind.NAND, [H, L], H),
    (GateKind.NOR, [L, L], H),
    (GateKind.NOR, [L, H], L),
])
def test_eval_gate(kind, levels, expected):
    assert eval_gate(kind, levels) is expected


def test_eval_gate_arity():
    with pytest.raises(ArityMismatch):
        eval_gate(GateKind.INV, [H, L])
    with pytest.raises(ArityMismatch):
        eval_gate(GateKind.AND, [H])


def test_latch_update_is_reset_dominant():
    assert latch_update(H, L, L) is H
    assert latch_update(L, H, H) is L
    assert latch_update(L, L, H) is H
    assert latch_update(H, H, H) is L


def test_sample_hold_step():
    assert sample_hold_step(L, H, ClockEdge.RISING) == (H, None)
    assert sample_hold_step(H, L, ClockEdge.FALLING) == (H, H)


def test_gate_propagates_after_delay():
    sim = Simulation()
    Gate(sim, 'and', GateKind.AND, ['a', 'b'], 'y', delay=300)
    sim.drive_pulse('a', Pulse(1_000, 5_000))
    sim.drive_pulse('b', Pulse(2_000, 5_000))
    sim.run_until(10_000)
    assert sim.pulses_of('y') == [Pulse(2_300, 4_000)]


def test_wrong_arity_fails_at_construction():
    with pytest.raises(ArityMismatch):
        Gate(Simulation(), 'bad', GateKind.NOR, ['a'], 'y')


def test_sr_latch_set_and_reset():
    sim = Simulation()
    SRLatch(sim, 'latch', 's', 'r', 'q', qn='qn', delay=100)
    assert sim.is_high('qn')
    sim.drive_pulse('s', Pulse(1_000, 500))
    sim.run_until(2_000)
    assert sim.is_high('q') and not sim.is_high('qn')
    sim.drive_pulse('r', Pulse(3_000, 500))
    sim.drive_pulse('s', Pulse(3_100, 100))
    sim.run_until(5_000)
    assert not sim.is_high('q') and sim.is_high('qn')


def test_sr_latch_follows_last_action():
    """Test that Q equals the last asserted set/reset over random pulse sequences"""
    rng = random.Random(1234)
    sim = Simulation()
    SRLatch(sim, 'latch', 's', 'r', 'q')
    t = 1_000
    expected = L
    for _ in range(300):
        action = rng.choice(['s', 'r', 'none'])
        if action != 'none':
            sim.drive_pulse(action, Pulse(t, rng.randint(100, 800)))
            expected = H if action == 's' else L
        t += 2_000
        sim.run_until(t - 500)
        assert sim.level('q') is expected


def test_clock_falling_edges_and_bound():
    sim = Simulation()
    clock = ClockGen(sim, 'clk', 'clk', 10 * NS, until=20 * NS)
    assert clock.falling_edges(0, 30 * NS) == [5 * NS, 15 * NS, 25 * NS]
    sim.run_until(100 * NS)
    assert [p.rise for p in sim.pulses_of('clk')] == [0, 10 * NS, 20 * NS]


def test_sample_hold_changes_only_on_falling_edges():
    sim = Simulation()
    ClockGen(sim, 'clk', 'clk', 10 * NS)
    SampleHold(sim, 'sh', 'd', 'clk', 'q', delay=100)
    sim.drive_pulse('d', Pulse(1 * NS, 7 * NS))
    sim.run_until(40 * NS)
    # held from the falling edge at 5 ns to the one at 15 ns
    assert sim.pulses_of('q') == [Pulse(5 * NS + 100, 10 * NS)]


def test_fixed_delay_shifts_pulses():
    sim = Simulation()
    FixedDelay(sim, 'pad', 'a', 'b', 7 * NS)
    sim.drive_pulse('a', Pulse(1 * NS, 3 * NS))
    sim.drive_pulse('a', Pulse(5 * NS, 3 * NS))
    sim.run_until(30 * NS)
    assert sim.pulses_of('b') == [Pulse(8 * NS, 3 * NS), Pulse(12 * NS, 3 * NS)]


def test_fixed_delay_rejects_negative_delay():
    with pytest.raises(ValueError):
        FixedDelay(Simulation(), 'pad', 'a', 'b', -1)
