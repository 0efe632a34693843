import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import edge_scan_cut
from tokq.annealing import (
    IsingModel,
    ReverseSchedule,
    energies,
    energy,
    flip_delta,
    forward_anneal,
    ising_from_maxcut,
    partition_to_spins,
    reverse_anneal,
    spins_to_partition,
)
from tokq.errors import InvalidArgumentError
from tokq.instances import brute_force_maxcut, generate_base_instance


def naive_energy(model, s):
    e = model.offset
    for (i, j), c in model.couplings.items():
        e += c * s[i] * s[j]
    for i, c in model.fields.items():
        e += c * s[i]
    return e


def test_energy_is_negative_cut(g10):
    model = ising_from_maxcut(g10)
    rng = np.random.default_rng(0)
    S = rng.choice([-1, 1], size=(10_000, 10))
    E = energies(model, S)
    for k in range(0, 10_000, 97):
        part = spins_to_partition(S[k])
        assert E[k] == pytest.approx(-edge_scan_cut(g10, part), abs=1e-9)
        assert energy(model, S[k]) == pytest.approx(naive_energy(model, S[k]), abs=1e-9)


def test_spin_partition_round_trip():
    part = (0, 1, 1, 0)
    s = partition_to_spins(part)
    assert list(s) == [1, -1, -1, 1]
    assert spins_to_partition(s) == part


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from([-1, 1]), min_size=10, max_size=10), st.integers(0, 9))
def test_flip_delta_matches_reevaluation(spins, k):
    g = generate_base_instance(10, 0.6, 42)
    model = IsingModel(10, ising_from_maxcut(g).couplings, {1: 0.3, 4: -0.7}, -2.0)
    s = np.array(spins)
    t = s.copy()
    t[k] = -t[k]
    assert flip_delta(model, s, k) == pytest.approx(energy(model, t) - energy(model, s), abs=1e-9)


def test_energy_rejects_bad_spins():
    model = IsingModel(2, {(0, 1): 1.0})
    with pytest.raises(InvalidArgumentError):
        energy(model, [1, 0])
    with pytest.raises(InvalidArgumentError):
        energy(model, [1, 1, 1])


def test_k2_optimum(k2):
    res = forward_anneal(ising_from_maxcut(k2), num_reads=10, seed=1)
    assert res.best_energy == -1.0
    s, _ = res.best
    assert s[0] != s[1]


def test_triangle_optimum(triangle):
    res = forward_anneal(ising_from_maxcut(triangle), num_reads=20, seed=2)
    assert res.best_energy == -2.0


def test_forward_deterministic(g10):
    m = ising_from_maxcut(g10)
    a = forward_anneal(m, num_reads=20, seed=5)
    b = forward_anneal(m, num_reads=20, seed=5)
    np.testing.assert_array_equal(a.spins, b.spins)
    assert a.per_read_seeds == b.per_read_seeds


def test_more_reads_never_worse(g10):
    m = ising_from_maxcut(g10)
    small = forward_anneal(m, n_sweeps=3, num_reads=5, seed=9)
    big = forward_anneal(m, n_sweeps=3, num_reads=50, seed=9)
    # reads are seeded per index so the first five coincide
    np.testing.assert_array_equal(small.spins, big.spins[:5])
    assert big.best_energy <= small.best_energy


def test_terminal_state_is_local_minimum():
    g = generate_base_instance(20, 0.5, 3)
    m = ising_from_maxcut(g)
    res = forward_anneal(m, num_reads=10, seed=4)
    for s in res.spins:
        assert all(flip_delta(m, s, k) >= -1e-9 for k in range(20))


def test_forward_finds_ten_vertex_optimum():
    # 50 seeded instances, each checked against exhaustive search
    hits = 0
    for t in range(50):
        g = generate_base_instance(10, 0.5, 1000 + t)
        best = brute_force_maxcut(g).best_value
        res = forward_anneal(ising_from_maxcut(g), num_reads=20, seed=t)
        hits += abs(-res.best_energy - best) < 1e-9
    assert hits / 50 >= 0.99


def test_schedule_shape():
    sched = ReverseSchedule(s_target=0.5, hold_time=10, ramp_slope=2.0, num_reads=1)
    s = sched.s_values()
    assert s.min() == pytest.approx(0.5)
    assert s[-1] == pytest.approx(1.0)
    assert np.sum(np.isclose(s, 0.5)) >= 10
    assert len(s) == 25 + 10 + 25


@pytest.mark.parametrize("kw", [dict(s_target=0.0), dict(s_target=1.0), dict(s_target=1.5),
                                dict(hold_time=-1), dict(ramp_slope=0.0), dict(num_reads=0)])
def test_schedule_rejects_invalid(kw):
    with pytest.raises(InvalidArgumentError):
        ReverseSchedule(**kw)


def test_reverse_near_one_returns_seed_local_minimum(g10):
    m = ising_from_maxcut(g10)
    # a local minimum seed: run a cold descent first
    seed = forward_anneal(m, n_sweeps=1, t_max=1e-9, seed=3).spins[0]
    sched = ReverseSchedule(s_target=0.999, hold_time=0, ramp_slope=1.0, num_reads=5)
    res = reverse_anneal(m, seed, sched, rng_seed=0)
    for s in res.spins:
        np.testing.assert_array_equal(s, seed)


def test_reverse_from_optimum_keeps_optimum(g10):
    m = ising_from_maxcut(g10)
    sol = brute_force_maxcut(g10)
    seed = partition_to_spins(sol.canonical())
    sched = ReverseSchedule(s_target=0.9, hold_time=20, num_reads=20)
    res = reverse_anneal(m, seed, sched, rng_seed=1)
    assert -res.best_energy == pytest.approx(sol.best_value)


def test_reverse_chained_reads_differ_from_reinit(g10):
    m = ising_from_maxcut(g10)
    seed = np.ones(10, dtype=int)
    a = reverse_anneal(m, seed, ReverseSchedule(0.3, 5, 2.0, 8, True), rng_seed=2)
    b = reverse_anneal(m, seed, ReverseSchedule(0.3, 5, 2.0, 8, False), rng_seed=2)
    np.testing.assert_array_equal(a.spins[0], b.spins[0])
    assert a.spins.shape == b.spins.shape == (8, 10)


def test_reverse_rejects_wrong_seed_length(g10):
    with pytest.raises(InvalidArgumentError):
        reverse_anneal(ising_from_maxcut(g10), np.ones(3), ReverseSchedule(num_reads=1))
