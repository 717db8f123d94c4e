import math

import numpy as np
import pytest

from mmwsched.antenna import AlignmentParams
from mmwsched.geometry import Topology, generate_topology
from mmwsched.metrics import (Schedule, link_throughput, loads_schedule, network_throughput, rate, sinr,
                              sinr_vector, solo_throughput)

NOISE = 3.4e-11
P = 2.5e-3
TIMING = AlignmentParams.from_ratio(0.01)


def pattern(theta, phi, z):
    theta = (theta + math.pi) % (2 * math.pi) - math.pi
    if abs(theta) <= phi / 2 + 1e-12:
        return (2 * math.pi - (2 * math.pi - phi) * z) / phi
    return z


def sinr_by_hand(i, active, beams, power, topo, z, noise):
    def rx_power(k):
        return (power[k] * pattern(topo.theta_t[k, i], beams[k][0], z) * topo.channel_gain[k, i]
                * pattern(topo.theta_r[k, i], beams[i][1], z))
    interference = 0.0
    for k in active:
        if k != i:
            interference += rx_power(k)
    return rx_power(i) / (interference + noise)


def test_single_link_snr_is_sixteen_times_isotropic():
    topo = generate_topology(1, seed=0)
    s = Schedule.build([(0, math.pi / 2, math.pi / 2, P)])
    expected = P * topo.channel_gain[0, 0] / NOISE * 16
    assert sinr(0, s, topo, NOISE, 0.0) == pytest.approx(expected, rel=1e-12)


def test_side_lobe_only_coupling_is_interference_free():
    # two parallel links far apart, pointing away from each other's devices
    topo = Topology.from_positions([[0, 0], [0, 8]], [[1, 0], [1, 8]])
    s = Schedule.build([(0, 0.3, 0.3, P), (1, 0.3, 0.3, P)])
    both = sinr_vector(s, topo, NOISE, 0.0)
    for i in (0, 1):
        solo = Schedule.build([(i, 0.3, 0.3, P)])
        assert both[i] == pytest.approx(sinr(i, solo, topo, NOISE, 0.0), rel=1e-15)


def test_sinr_matches_hand_expansion(rng):
    for seed in range(30):
        topo = generate_topology(3, seed=seed)
        beams = [tuple(rng.uniform(0.1, math.pi / 2, 2)) for _ in range(3)]
        power = rng.uniform(0.1, 1.0, 3) * P
        z = float(rng.uniform(0, 0.3))
        s = Schedule.build([(i, *beams[i], power[i]) for i in range(3)])
        for i in range(3):
            expected = sinr_by_hand(i, range(3), beams, power, topo, z, NOISE)
            assert sinr(i, s, topo, NOISE, z) == pytest.approx(expected, rel=1e-12)


def test_sinr_inactive_link_raises():
    topo = generate_topology(2, seed=0)
    s = Schedule.build([(0, 0.5, 0.5, P)])
    with pytest.raises(KeyError):
        sinr(1, s, topo, NOISE, 0.1)


def test_sinr_monotonicity(rng):
    topo = generate_topology(4, seed=3)
    base = [(i, 0.4, 0.4, P / 2) for i in range(4)]
    ref = sinr_vector(Schedule.build(base), topo, NOISE, 0.2)
    louder = list(base)
    louder[2] = (2, 0.4, 0.4, P)
    after = sinr_vector(Schedule.build(louder), topo, NOISE, 0.2)
    assert after[2] > ref[2]
    assert np.all(np.delete(after, 2) <= np.delete(ref, 2))


def test_rate_examples():
    assert rate(0.0, 10.0) == 0.0
    assert rate(0.7, 0.0) == 0.0
    assert rate(0.5, 1.0) == pytest.approx(0.5)


def test_link_throughput_matches_formula():
    topo = generate_topology(1, seed=1)
    s = Schedule.build([(0, math.pi / 6, math.pi / 4, P)])
    snr = sinr(0, s, topo, NOISE, 0.1)
    pilots = 3 * 2
    expected = (1 - pilots * 0.01) * math.log2(1 + snr)
    assert link_throughput(0, s, topo, TIMING, NOISE, 0.1) == pytest.approx(expected, rel=1e-12)
    cont = (1 - 3 * 2 * 0.01) * math.log2(1 + snr)
    assert link_throughput(0, s, topo, TIMING, NOISE, 0.1, continuous=True) == pytest.approx(cont, rel=1e-12)


def test_full_slot_alignment_gives_zero():
    topo = generate_topology(1, seed=1)
    beam = math.sqrt(0.01) * math.pi / 2
    s = Schedule.build([(0, beam, beam, P)])
    assert link_throughput(0, s, topo, TIMING, NOISE, 0.1, continuous=True) == pytest.approx(0.0, abs=1e-12)


def test_infeasible_beams_raise():
    topo = generate_topology(1, seed=1)
    s = Schedule.build([(0, 0.01, 0.01, P)])
    with pytest.raises(ValueError):
        network_throughput(s, topo, TIMING, NOISE, 0.1)


def test_network_throughput_basics():
    topo = generate_topology(3, seed=4)
    assert network_throughput(Schedule.empty(), topo, TIMING, NOISE, 0.1) == 0.0
    one = Schedule.build([(1, 0.5, 0.5, P)])
    assert network_throughput(one, topo, TIMING, NOISE, 0.1) == link_throughput(1, one, topo, TIMING, NOISE, 0.1)


def test_disjoint_beams_sum_of_solos():
    topo = Topology.from_positions([[0, 0], [0, 8], [8, 4]], [[1, 0], [1, 8], [9, 4]])
    entries = [(i, 0.3, 0.3, P) for i in range(3)]
    total = network_throughput(Schedule.build(entries), topo, TIMING, NOISE, 0.0)
    solos = [solo_throughput(i, 0.3, 0.3, P, topo, TIMING, NOISE, 0.0) for i in range(3)]
    assert total == pytest.approx(sum(solos), rel=1e-12)
    assert total >= max(solos)


def test_network_never_exceeds_solo_sum(rng):
    for seed in range(25):
        topo = generate_topology(6, seed=seed)
        entries = [(i, *rng.uniform(0.2, math.pi / 2, 2), P) for i in range(6)]
        total = network_throughput(Schedule.build(entries), topo, TIMING, NOISE, 0.1)
        solos = sum(solo_throughput(i, a, b, p, topo, TIMING, NOISE, 0.1) for i, a, b, p in entries)
        assert total <= solos + 1e-12


def test_schedule_sorting_and_text_round_trip():
    s = Schedule.build([(3, 0.2, 0.3, 1e-3), (1, 0.4, 0.5, 2e-3)], throughput=4.25)
    assert s.active == (1, 3)
    direct = Schedule((3, 1), (0.2, 0.4), (0.3, 0.5), (1e-3, 2e-3))
    assert direct.active == (1, 3) and direct.phi_tx == (0.4, 0.2)
    text = s.dumps()
    assert text.splitlines()[0] == "R=4.25"
    back = loads_schedule(text)
    assert back.active == s.active and back.throughput == 4.25
    assert back.phi_tx == pytest.approx(s.phi_tx)


def test_schedule_validation():
    with pytest.raises(ValueError):
        Schedule((0, 0), (1.0, 1.0), (1.0, 1.0), (1.0, 1.0))
    with pytest.raises(ValueError):
        Schedule((0,), (1.0,), (), (1.0,))
    with pytest.raises(ValueError):
        loads_schedule("0 1 1 1\n")
