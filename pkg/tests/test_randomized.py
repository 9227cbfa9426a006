import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from agp.basic import basic_propagate
from agp.errors import ConfigError, NumericError
from agp.evaluation import largest_eigenvalue
from agp.graph import from_edges
from agp.randomized import (
    RandomizedConfig,
    RepeatedRunner,
    default_epsilon,
    randomized_propagate,
    subset_sample,
)
from agp.rng import CounterRNG
from agp.weights import WeightScheme
from helpers import K4, TRIANGLE, random_edges, star_path_edges

FIXTURE_DEGREES = (2, 2, 3, 3, 4, 5, 8, 9)


def sampler_fixture():
    """Hub 0 whose eight neighbours have the given degrees (padded with leaves)."""
    edges, nxt = [], 1 + len(FIXTURE_DEGREES)
    for j, d in enumerate(FIXTURE_DEGREES, start=1):
        edges.append((0, j))
        for _ in range(d - 1):
            edges.append((j, nxt))
            nxt += 1
    return from_edges(edges)


def schemes_for(g):
    lam = largest_eigenvalue(g)
    return [
        WeightScheme("transition", hops=3),
        WeightScheme("ppr", alpha=0.2),
        WeightScheme("hkpr", t=5.0),
        WeightScheme("katz", beta=0.5 / lam, lambda1=lam),
        WeightScheme("single_target_ppr", alpha=0.2),
        WeightScheme.gdc(3.0),
    ]


@settings(max_examples=25)
@given(n=st.integers(3, 40), p=st.floats(0.05, 0.8), seed=st.integers(0, 2**31))
def test_zero_threshold_is_bit_identical_to_basic(n, p, seed):
    g = from_edges(random_edges(np.random.default_rng(seed), n, p), n=n)
    x = np.random.default_rng(seed).random(n)
    x /= x.sum()
    for scheme in schemes_for(g):
        exact = basic_propagate(g, scheme, x, 20).pi
        got = randomized_propagate(g, scheme, x, RandomizedConfig(epsilon=0.0, L=20, seed=seed)).pi
        assert np.array_equal(got, exact), scheme.name


def test_seeded_runs_repeat_exactly():
    g = from_edges(random_edges(np.random.default_rng(0), 300, 0.03), n=300)
    s = WeightScheme("hkpr", t=5.0)
    cfg = RandomizedConfig(epsilon=1e-3, L=20, seed=11)
    a = randomized_propagate(g, s, 0, cfg)
    b = randomized_propagate(g, s, 0, cfg)
    assert np.array_equal(a.pi, b.pi) and a.push_count == b.push_count
    c = randomized_propagate(g, s, 0, RandomizedConfig(epsilon=1e-3, L=20, seed=12))
    assert not np.array_equal(a.pi, c.pi)
    runner = RepeatedRunner(g, s, 0, cfg)
    assert np.array_equal(runner.run(11).pi, a.pi)


def test_prefix_policies_agree():
    g = from_edges(random_edges(np.random.default_rng(1), 200, 0.05), n=200)
    s = WeightScheme("single_target_ppr", alpha=0.2)
    for seed in range(5):
        scan = randomized_propagate(g, s, 3, RandomizedConfig(epsilon=1e-3, L=15, seed=seed))
        bis = randomized_propagate(
            g, s, 3, RandomizedConfig(epsilon=1e-3, L=15, seed=seed, engine="bisect")
        )
        assert np.array_equal(scan.pi, bis.pi)


def test_signal_checks():
    g = from_edges(TRIANGLE)
    s = WeightScheme("ppr", alpha=0.2)
    with pytest.raises(NumericError):
        randomized_propagate(g, s, np.array([0.5, -0.1, 0]), RandomizedConfig(delta=0.1))
    with pytest.raises(ConfigError):
        randomized_propagate(g, s, np.array([1.0, 1.0, 0]), RandomizedConfig(delta=0.1))
    with pytest.raises(ConfigError):
        RandomizedConfig(epsilon=-1.0)
    with pytest.raises(ConfigError):
        RandomizedConfig(delta=2.0)
    with pytest.raises(ConfigError):
        RandomizedConfig(L=3).resolve(s)


def test_default_epsilon():
    assert default_epsilon(0.1, 4) == pytest.approx(0.1 / 1000)
    assert RandomizedConfig(delta=1e-4).resolve(WeightScheme("ppr", alpha=0.2)) == (
        55,
        1e-4 / (50 * 55 * 56),
    )


def test_subset_sample_trivial_cases():
    g = from_edges(K4 + [(4, 0)])  # node 0 has four neighbours
    lo, hi = int(g.offsets[0]), int(g.offsets[1])
    assert sorted(subset_sample(g, 0, (lo, hi), 50.0, 1.0, CounterRNG(1))) == [1, 2, 3, 4]
    assert subset_sample(g, 0, (lo, hi), 0.0, 1.0, CounterRNG(1)) == []
    assert subset_sample(g, 0, (lo, lo), 0.7, 1.0, CounterRNG(1)) == []
    with pytest.raises(IndexError):
        subset_sample(g, 0, (lo, hi + 1), 0.5, 1.0, CounterRNG(1))


def test_subset_sample_inclusion_rates():
    g = sampler_fixture()
    lo, hi = int(g.offsets[0]), int(g.offsets[1])
    trials = 20000
    hits = np.zeros(g.n)
    for t in range(trials):
        for v in subset_sample(g, 0, (lo, hi), 1.0, 1.0, CounterRNG(9, 0, t)):
            hits[v] += 1
    for v in range(1, 9):
        p = 1.0 / g.degrees[v]
        sd = np.sqrt(p * (1 - p) / trials)
        assert abs(hits[v] / trials - p) <= 4 * sd


def test_subset_sample_a_zero_single_group():
    g = sampler_fixture()
    lo, hi = int(g.offsets[0]), int(g.offsets[1])
    counts = []
    for t in range(4000):
        picked, groups = subset_sample(g, 0, (lo, hi), 0.25, 0.0, CounterRNG(3, 1, t), True)
        assert len(groups) == 1 and groups[0] == len(picked)
        counts.append(len(picked))
    assert abs(np.mean(counts) - 2.0) < 4 * np.sqrt(8 * 0.25 * 0.75 / 4000)


def test_star_path_mean_is_half():
    spokes = 2000
    g = from_edges(star_path_edges(spokes))
    runner = RepeatedRunner(g, WeightScheme("transition", hops=2), 0, RandomizedConfig(delta=0.25))
    vals = np.array([runner.run(seed).pi[1] for seed in range(300)])
    assert abs(vals.mean() - 0.5) < 4 * vals.std() / np.sqrt(vals.size)
    assert np.mean(np.abs(vals - 0.5) <= 0.15) >= 0.95


def test_triangle_relative_error_default_threshold():
    g = from_edges(TRIANGLE)
    s = WeightScheme("ppr", alpha=0.2)
    truth = basic_propagate(g, s, 0, 50).pi
    runner = RepeatedRunner(g, s, 0, RandomizedConfig(delta=1e-3))
    ok = np.zeros(3)
    for seed in range(1000):
        ok += np.abs(runner.run(seed).pi - truth) <= truth / 10
    assert np.all(ok / 1000 >= 0.95)


def test_cost_does_not_blow_up_when_threshold_doubles():
    g = from_edges(random_edges(np.random.default_rng(4), 400, 0.02), n=400)
    s = WeightScheme("hkpr", t=5.0)
    costs = []
    for eps in (1e-4, 2e-4, 4e-4):
        runner = RepeatedRunner(g, s, 0, RandomizedConfig(epsilon=eps, L=30))
        costs.append(np.mean([runner.run(k).push_count for k in range(20)]))
    assert costs[1] <= 1.5 * costs[0]
    assert costs[2] <= 1.5 * costs[1]


def test_cost_bound_against_residue_mass():
    g = from_edges(random_edges(np.random.default_rng(5), 500, 0.02), n=500)
    s = WeightScheme("ppr", alpha=0.2)
    L, eps = 30, 1e-4
    l1 = basic_propagate(g, s, 0, L).residue_l1
    runner = RepeatedRunner(g, s, 0, RandomizedConfig(epsilon=eps, L=L))
    mean_cost = np.mean([runner.run(k).push_count for k in range(20)])
    assert mean_cost <= 10 * l1.sum() / eps


def test_katz_sampling_path_is_unbiased():
    g = from_edges(K4)
    lam = largest_eigenvalue(g)
    s = WeightScheme("katz", beta=0.5 / lam, lambda1=lam)
    truth = basic_propagate(g, s, 0, 8).pi
    runner = RepeatedRunner(g, s, 0, RandomizedConfig(epsilon=0.05, L=8))
    runs = np.array([runner.run(k).pi for k in range(4000)])
    assert runs.var(axis=0).max() > 0
    se = runs.std(axis=0) / np.sqrt(len(runs))
    assert np.all(np.abs(runs.mean(axis=0) - truth) <= 4 * se)
