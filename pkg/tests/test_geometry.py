import math

import numpy as np
import pytest

from mmwsched.geometry import (PathLossModel, Topology, free_space_intercept_db, generate_topology,
                               loads_topology, path_gain, path_gain_db, relative_angles)


def fspl_db(distance, carrier=60e9):
    lam = 299_792_458.0 / carrier
    return 20 * math.log10(4 * math.pi * distance / lam)


def test_free_space_intercept_from_first_principles():
    assert free_space_intercept_db(60e9) == pytest.approx(fspl_db(1.0), abs=1e-12)
    assert free_space_intercept_db(60e9) == pytest.approx(68.0, abs=0.05)


@pytest.mark.parametrize("d,expected_db", [(1.0, -68.0), (10.0, -88.0)])
def test_path_gain_examples(d, expected_db):
    assert path_gain_db(d) == pytest.approx(expected_db, abs=0.05)
    assert 10 * math.log10(path_gain(d)) == pytest.approx(-fspl_db(d), abs=1e-9)


def test_path_gain_custom_intercept_and_exponent():
    m = PathLossModel(intercept_db=68.0, exponent=2.0)
    assert path_gain_db(10.0, m) == pytest.approx(-88.0, abs=1e-12)
    m3 = PathLossModel(intercept_db=70.0, exponent=3.0)
    assert path_gain_db(10.0, m3) == pytest.approx(-100.0, abs=1e-12)


def test_path_gain_deterministic_without_shadowing():
    a = path_gain(1.0, PathLossModel(), np.random.default_rng(1))
    b = path_gain(1.0, PathLossModel(), np.random.default_rng(2))
    assert a == b


def test_shadowing_needs_rng_and_varies():
    m = PathLossModel(shadowing_db=4.0)
    with pytest.raises(ValueError):
        path_gain(1.0, m)
    vals = path_gain(np.full(200, 3.0), m, np.random.default_rng(0))
    db = 10 * np.log10(vals) + fspl_db(3.0)
    assert abs(db.mean()) < 1.0 and 3.0 < db.std() < 5.0


def test_path_gain_decreasing():
    d = np.linspace(0.1, 20, 500)
    g = path_gain(d)
    assert np.all(np.diff(g) < 0)


@pytest.mark.parametrize("d", [0.0, -1.0])
def test_path_gain_domain(d):
    with pytest.raises(ValueError):
        path_gain(d)


def test_single_link_alignment():
    t = generate_topology(1, 10.0, 0.1, seed=42)
    assert t.n_links == 1
    assert t.theta_t[0, 0] == 0.0 and t.theta_r[0, 0] == 0.0


def test_ten_links_positive_gains():
    t = generate_topology(10, 10.0, 0.1, seed=7)
    assert t.n_links == 10
    assert np.all(t.channel_gain > 0)
    pos = np.vstack([t.tx_positions, t.rx_positions])
    assert np.all((pos >= 0) & (pos <= 10))


def test_generation_deterministic():
    a = generate_topology(8, seed=3)
    b = generate_topology(8, seed=3)
    assert a.dumps() == b.dumps()
    assert np.array_equal(a.channel_gain, b.channel_gain)
    assert generate_topology(8, seed=4).dumps() != a.dumps()


def test_min_separation_respected():
    t = generate_topology(10, 3.0, 0.5, seed=11)
    d = np.linalg.norm(t.tx_positions[:, None] - t.rx_positions[None], axis=-1)
    assert d.min() >= 0.5


def test_generation_gives_up():
    with pytest.raises(RuntimeError):
        generate_topology(3, 0.1, 1.0, seed=0)
    with pytest.raises(ValueError):
        generate_topology(0)


def brute_angles(tx, rx):
    n = len(tx)
    tt = np.zeros((n, n))
    tr = np.zeros((n, n))
    for i in range(n):
        bore_t = math.atan2(rx[i][1] - tx[i][1], rx[i][0] - tx[i][0])
        for j in range(n):
            a = math.atan2(rx[j][1] - tx[i][1], rx[j][0] - tx[i][0]) - bore_t
            while a <= -math.pi:
                a += 2 * math.pi
            while a > math.pi:
                a -= 2 * math.pi
            tt[i, j] = a
    for j in range(n):
        bore_r = math.atan2(tx[j][1] - rx[j][1], tx[j][0] - rx[j][0])
        for i in range(n):
            a = math.atan2(tx[i][1] - rx[j][1], tx[i][0] - rx[j][0]) - bore_r
            while a <= -math.pi:
                a += 2 * math.pi
            while a > math.pi:
                a -= 2 * math.pi
            tr[i, j] = a
    return tt, tr


def test_relative_angles_match_brute_force():
    for seed in range(20):
        t = generate_topology(3, seed=seed)
        tt, tr = brute_angles(t.tx_positions.tolist(), t.rx_positions.tolist())
        assert np.allclose(t.theta_t, tt, atol=1e-9, rtol=0)
        assert np.allclose(t.theta_r, tr, atol=1e-9, rtol=0)


def test_receiver_behind_transmitter():
    tx = np.array([[0.0, 0.0], [5.0, 5.0]])
    rx = np.array([[1.0, 0.0], [-2.0, 0.0]])
    tt, tr = relative_angles(tx, rx)
    assert tt[0, 1] == pytest.approx(math.pi)
    assert tt[0, 0] == 0.0


def test_angles_in_range():
    t = generate_topology(10, seed=5)
    for m in (t.theta_t, t.theta_r):
        assert np.all(m > -math.pi) and np.all(m <= math.pi)


def test_text_round_trip():
    t = generate_topology(5, seed=9)
    text = t.dumps()
    lines = text.splitlines()
    assert lines[0] == "5"
    assert all(len(l.split()) == 5 for l in lines[1:])
    assert lines[1].split()[1].count(".") == 1 and len(lines[1].split()[1].split(".")[1]) == 6
    back = loads_topology(text)
    assert back.dumps() == text
    assert np.allclose(back.channel_gain, t.channel_gain, rtol=1e-5)


@pytest.mark.parametrize("text", ["", "2\n0 0 0 1 1\n", "1\n0 0 0 1\n", "1\n3 0 0 1 1\n", "x\n"])
def test_bad_topology_text(text):
    with pytest.raises(ValueError):
        loads_topology(text)


def test_topology_is_immutable():
    t = generate_topology(2, seed=1)
    with pytest.raises(ValueError):
        t.channel_gain[0, 0] = 1.0


def test_subset_reindexes():
    t = generate_topology(5, seed=2)
    s = t.subset([1, 3])
    assert [l.id for l in s.links] == [0, 1]
    assert s.channel_gain[0, 1] == t.channel_gain[1, 3]
    assert isinstance(s, Topology)
