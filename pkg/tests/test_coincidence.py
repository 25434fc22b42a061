import random

import pytest

from circuits.coincidence import CoincidenceDetector, Detection, Variant, feed, node_label, offset_oracle
from circuits.conf import gate_delay
from circuits.exceptions import OutOfSpan, SimulationError
from circuits.simkernel import NS, Level, Pulse, Simulation

pytestmark = pytest.mark.coincidence


@pytest.fixture
def plain():
    return CoincidenceDetector(stages_per_side=7, stage_delay=5 * NS, min_overlap=1 * NS)


@pytest.fixture
def clocked():
    return CoincidenceDetector(
        stages_per_side=6, stage_delay=10 * NS, variant=Variant.CLOCKED, clock_period=10 * NS, min_overlap=0,
    )


def test_node_label():
    assert [node_label(k) for k in (-2, 0, 3)] == ['m2', '0', 'p3']


@pytest.mark.parametrize('offset, node', [
    (0, 0),
    (10 * NS, 2),
    (-10 * NS, -2),
    (12_400, 2),
    (12_500, 3),
    (-12_500, -3),
    (40 * NS, 7),
])
def test_offset_oracle(plain, offset, node):
    assert offset_oracle(plain, offset) == node


def test_offset_oracle_out_of_span(plain):
    with pytest.raises(OutOfSpan):
        plain.offset_oracle(46 * NS)


def test_detector_validation():
    with pytest.raises(ValueError):
        CoincidenceDetector(stage_delay=5_001)
    with pytest.raises(ValueError):
        CoincidenceDetector(stages_per_side=0)


def test_feed_detects_offset_at_matching_node(plain):
    """Test that a +10 ns offset is first seen at node 2, with neighbours seeing partial overlaps"""
    detections = feed(plain, Pulse(0, 10 * NS), Pulse(10 * NS, 10 * NS))
    assert detections[0].node == 2
    assert {d.node for d in detections} == {1, 2, 3}


def test_feed_without_overlap_detects_nothing(plain):
    assert feed(plain, Pulse(0, 2 * NS), Pulse(0, 500)) == []


def test_abutting_pulses_count_without_overlap_filter():
    detector = CoincidenceDetector(stages_per_side=2, stage_delay=10 * NS, min_overlap=0)
    detections = detector.feed(Pulse(0, 10 * NS), Pulse(20 * NS, 10 * NS))
    # node 1 sees the pulses 10 ns apart: they abut and still coincide
    assert detections[0].node == 2
    assert 1 in {d.node for d in detections}


def test_clocked_detector_needs_a_clock(clocked):
    with pytest.raises(SimulationError):
        clocked.build(Simulation(), 'a', 'b')


def test_node_outputs_power_up_high(plain):
    sim = Simulation()
    array = plain.build(sim, 'a', 'b')
    assert all(sim.level(array.node_net(k)) is Level.HIGH for k in plain.nodes)
    assert array.detections == []


@pytest.mark.slow
def test_plain_feed_matches_oracle():
    """Test 1000 random offsets against the oracle away from bin boundaries"""
    detector = CoincidenceDetector(stages_per_side=7, stage_delay=5 * NS, min_overlap=1 * NS)
    rng = random.Random(2024)
    checked = 0
    while checked < 1000:
        offset = rng.randint(-35 * NS, 35 * NS)
        if abs(abs(offset) % detector.stage_delay - detector.stage_delay // 2) < 200:
            continue
        width = rng.randint(10 * NS, 12 * NS)
        base = 50 * NS
        detections = detector.feed(Pulse(base, width), Pulse(base + offset, width))
        assert detections, f"offset {offset} ps was not detected"
        assert detector.detected_node(detections) == detector.offset_oracle(offset), f"offset {offset} ps"
        checked += 1


@pytest.mark.slow
def test_clocked_feed_within_one_node_of_oracle(clocked):
    rng = random.Random(99)
    for _ in range(1000):
        offset = rng.randint(-55 * NS, 55 * NS)
        width = rng.randint(10 * NS, 15 * NS)
        base = 70 * NS
        detections = clocked.feed(Pulse(base, width), Pulse(base + offset, width))
        assert detections, f"offset {offset} ps was not detected"
        assert abs(clocked.detected_node(detections) - clocked.offset_oracle(offset)) <= 1, f"offset {offset} ps"


def near_bin_boundary(detector, offset):
    return abs(abs(offset) % detector.stage_delay - detector.stage_delay // 2) < 200


@pytest.mark.parametrize('runs, node', [([-1, 0], 0), ([0, 1], 0), ([-3, -2], -2), ([2, 3], 2), ([-2, 1], 0)])
def test_clocked_reading_rounds_toward_middle_node(clocked, runs, node):
    detections = [Detection(k, 75 * NS, seq) for seq, k in enumerate(runs)]
    assert clocked.detected_node(detections) == node


@pytest.mark.slow
@pytest.mark.parametrize('detector_fixture, span, widths, seed', [
    ('plain', 35 * NS, (10 * NS, 12 * NS), 11),
    ('clocked', 55 * NS, (10 * NS, 15 * NS), 12),
])
def test_swapping_inputs_negates_the_detected_node(request, detector_fixture, span, widths, seed):
    """Test that feeding (b, a) reads the mirror node of (a, b)"""
    detector = request.getfixturevalue(detector_fixture)
    rng = random.Random(seed)
    checked = 0
    while checked < 300:
        offset = rng.randint(-span, span)
        if detector.variant is Variant.PLAIN and near_bin_boundary(detector, offset):
            continue
        width = rng.randint(*widths)
        a, b = Pulse(70 * NS, width), Pulse(70 * NS + offset, width)
        forward = detector.detected_node(detector.feed(a, b))
        backward = detector.detected_node(detector.feed(b, a))
        assert forward is not None, f"offset {offset} ps was not detected"
        assert backward == -forward, f"offset {offset} ps"
        checked += 1


@pytest.mark.slow
@pytest.mark.parametrize('detector_fixture, span', [('plain', 35 * NS), ('clocked', 50 * NS)])
def test_detected_node_never_decreases_with_offset(request, detector_fixture, span):
    detector = request.getfixturevalue(detector_fixture)
    # off the 250 ps grid, so no chain edge lands exactly on a clock edge
    base = 70_130
    readings = [
        detector.detected_node(detector.feed(Pulse(base, 12 * NS), Pulse(base + offset, 12 * NS)))
        for offset in range(-span, span + 1, 250)
    ]
    assert None not in readings
    assert readings == sorted(readings)
    assert readings[0] < 0 < readings[-1]


@pytest.mark.slow
def test_clocked_detections_land_on_falling_edges(clocked):
    """Test that sampled node outputs only change a falling edge plus two gate delays"""
    rng = random.Random(5)
    lag = clocked.clock_period // 2 + 2 * gate_delay()
    for _ in range(200):
        offset = rng.randint(-55 * NS, 55 * NS)
        width = rng.randint(10 * NS, 15 * NS)
        detections = clocked.feed(Pulse(70 * NS, width), Pulse(70 * NS + offset, width))
        assert detections
        assert all((d.time - lag) % clocked.clock_period == 0 for d in detections), f"offset {offset} ps"
