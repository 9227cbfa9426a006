import math

import numpy as np
import pytest

from agp.errors import CapacityError, ConfigError, ShapeError
from agp.evaluation import (
    dense_oracle,
    evaluate,
    fixed_walk_length,
    max_error,
    mc_hkpr,
    precision_at_k,
)
from agp.graph import from_edges
from agp.weights import WeightScheme
from helpers import TRIANGLE

# Heat kernel on the triangle: the walk matrix has eigenvalues 1, -1/2, -1/2, so
# pi(s) = 1/3 + 2/3 e^{-1.5t} and pi(other) = 1/3 - 1/3 e^{-1.5t}.
def triangle_hk(t):
    return 1 / 3 + 2 / 3 * math.exp(-1.5 * t), 1 / 3 - 1 / 3 * math.exp(-1.5 * t)


def test_max_error_examples():
    g = from_edges(TRIANGLE)
    assert max_error(None, [0.1, 0.2], [0.1, 0.2]) == 0.0
    assert max_error(None, [0.5, 0.5, 0], [0.4, 0.6, 0]) == pytest.approx(0.1)
    assert max_error(g, [0.4, 0.3, 0.3], [0.2, 0.3, 0.3], normalized=True) == pytest.approx(0.1)
    with pytest.raises(ShapeError):
        max_error(None, [1, 2], [1])
    with pytest.raises(ConfigError):
        max_error(None, [1], [1], normalized=True)


def test_precision_examples():
    truth = np.array([0.4, 0.3, 0.2, 0.1, 0.0])  # ranking a, b, c, d
    assert precision_at_k(truth, truth, 3) == 1.0
    assert precision_at_k([1, 1, 0, 0], [0, 0, 1, 1], 2) == 0.0
    est = np.array([0.4, 0.2, 0.3, 0.0, 0.1])  # a, c, b, e
    assert precision_at_k(truth, est, 3) == 1.0
    est = np.array([0.4, 0.1, 0.3, 0.0, 0.2])  # a, c, e, b
    assert precision_at_k(truth, est, 3) == pytest.approx(2 / 3)
    with pytest.raises(ConfigError):
        precision_at_k(truth, truth, 0)
    with pytest.raises(ConfigError):
        precision_at_k(truth, truth, 6)


def test_dense_oracle_trivial_cases():
    g = from_edges(TRIANGLE)
    x = np.array([0.2, 0.3, 0.5])
    assert np.array_equal(dense_oracle(g, WeightScheme("transition", hops=0), x, 0), x)
    loop = from_edges([(0, 0)])
    assert dense_oracle(loop, WeightScheme("ppr", alpha=0.3), 0, 200)[0] == pytest.approx(1.0)
    with pytest.raises(CapacityError):
        dense_oracle(from_edges([(0, 2500)]), WeightScheme("ppr", alpha=0.3), 0, 2)


def test_dense_oracle_triangle_heat_kernel():
    g = from_edges(TRIANGLE)
    got = dense_oracle(g, WeightScheme("hkpr", t=5.0), 0, 50)
    a, b = triangle_hk(5.0)
    assert np.allclose(got, [a, b, b], rtol=1e-13)


def test_mc_limits():
    g = from_edges(TRIANGLE)
    pi = mc_hkpr(g, 1, 1e-9, 10000, seed=1)
    assert pi[1] == pytest.approx(1.0)
    loop = from_edges([(0, 0)])
    assert mc_hkpr(loop, 0, 4.0, 1000)[0] == pytest.approx(1.0)


def test_mc_dangling_source_stays():
    g = from_edges([(1, 0)], n=2, directed=True)
    assert mc_hkpr(g, 0, 3.0, 500)[0] == pytest.approx(1.0)


def test_mc_error_shrinks_with_walks():
    g = from_edges(TRIANGLE)
    a, b = triangle_hk(2.0)
    truth = np.array([a, b, b])
    errs = []
    for walks in (10**3, 10**4, 10**5):
        runs = [np.abs(mc_hkpr(g, 0, 2.0, walks, seed=s) - truth).max() for s in range(5)]
        errs.append(np.mean(runs))
    assert errs[0] > errs[1] > errs[2]


def test_mc_fixed_length_mode():
    g = from_edges(TRIANGLE)
    L = fixed_walk_length(5.0, 1e-6)
    assert L == math.ceil(5 * math.log(1e6) / math.log(math.log(1e6)))
    pi = mc_hkpr(g, 0, 5.0, 200000, fixed_len=L, seed=3)
    a, b = triangle_hk(5.0)
    assert np.allclose(pi, [a, b, b], atol=5e-3)


def test_evaluate_report():
    g = from_edges(TRIANGLE)
    rep = evaluate(g, [0.5, 0.3, 0.2], [0.5, 0.2, 0.3], 1, normalized=True, push_count=7)
    d = rep.as_dict()
    assert d["max_error"] == pytest.approx(0.05)
    assert d["precision_at_k"] == 1.0 and d["push_count"] == 7
