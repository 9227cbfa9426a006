"""Accuracy metrics and independent reference computations.

``dense_oracle`` evaluates the propagation series by explicit dense
matrix-vector products in extended precision, and ``mc_hkpr`` estimates heat
kernel PageRank by random walks.  Neither shares code with the push engines.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass

import numpy as np
from numba import njit

from .errors import CapacityError, ConfigError, ShapeError
from .graph import Graph
from .rng import draw_uniform, stream_key
from .weights import WeightScheme, raw_weights

DENSE_LIMIT = 2000


@dataclass
class EvalReport:
    max_error: float
    precision_at_k: float
    k: int
    wall_time: float = 0.0
    push_count: int | None = None

    def as_dict(self) -> dict:
        return asdict(self)


def _check_pair(truth, est):
    truth = np.asarray(truth, dtype=float)
    est = np.asarray(est, dtype=float)
    if truth.shape != est.shape:
        raise ShapeError(f"length mismatch: {truth.shape} vs {est.shape}")
    return truth, est


def max_error(g: Graph | None, truth, est, normalized: bool = False) -> float:
    """``max_v |truth(v) - est(v)|``, divided by ``d_v`` when ``normalized``."""
    truth, est = _check_pair(truth, est)
    diff = np.abs(truth - est)
    if normalized:
        if g is None:
            raise ConfigError("normalized MaxError needs the graph degrees")
        d = g.degrees
        keep = d > 0
        diff = diff[keep] / d[keep]
    return float(diff.max()) if diff.size else 0.0


def top_k(values, k: int) -> np.ndarray:
    """Indices of the ``k`` largest values, ties broken by ascending index."""
    values = np.asarray(values, dtype=float)
    order = np.lexsort((np.arange(len(values)), -values))
    return order[:k]


def precision_at_k(truth, est, k: int) -> float:
    truth, est = _check_pair(truth, est)
    if k <= 0:
        raise ConfigError("k must be positive")
    if k > len(truth):
        raise ConfigError(f"k={k} exceeds vector length {len(truth)}")
    hits = np.intersect1d(top_k(truth, k), top_k(est, k)).size
    return hits / k


def propagation_matrix(g: Graph, a: float, b: float, dtype=np.longdouble) -> np.ndarray:
    """Dense ``D^-a A D^-b`` in the orientation the graph stores."""
    if g.n > DENSE_LIMIT:
        raise CapacityError(f"dense oracle limited to n <= {DENSE_LIMIT}, got {g.n}")
    d = g.degrees.astype(dtype)
    safe = np.where(d > 0, d, 1)

    def inv(e):
        if e == 0:
            return np.ones_like(d)
        return np.where(d > 0, safe ** -dtype(e), 0)

    A = np.zeros((g.n, g.n), dtype=dtype)
    for u in range(g.n):
        for v in g.neighbors_of(u):
            A[v, u] += 1
    return inv(a)[:, None] * A * inv(b)[None, :]


def dense_oracle(g: Graph, scheme: WeightScheme, x, L: int) -> np.ndarray:
    """``sum_{i<=L} w_i M^i x`` with raw (un-normalised) weights, longdouble."""
    a, b = scheme.laplacian
    M = propagation_matrix(g, a, b)
    if isinstance(x, (int, np.integer)):
        vec = np.zeros(g.n, dtype=np.longdouble)
        vec[x] = 1
    else:
        vec = np.asarray(x, dtype=np.longdouble).copy()
        if vec.shape != (g.n,):
            raise ShapeError(f"signal has shape {vec.shape}, graph has n={g.n}")
    w = raw_weights(scheme, L)
    acc = np.zeros(g.n, dtype=np.longdouble)
    for i in range(L + 1):
        if w[i] != 0:
            acc += w[i] * vec
        if i < L:
            vec = M @ vec
    return acc.astype(np.float64)


def largest_eigenvalue(g: Graph) -> float:
    """Largest adjacency eigenvalue (dense; symmetric graphs only)."""
    if g.directed:
        raise ConfigError("largest_eigenvalue expects an undirected graph")
    M = propagation_matrix(g, 0.0, 0.0, dtype=np.float64)
    return float(np.linalg.eigvalsh(M)[-1])


@njit(cache=True, nogil=True)
def _mc_walks(offsets, nbrs, s, t, walks, fixed_len, coef, seed, out):
    useed = np.uint64(seed)
    inv_w = 1.0 / walks
    et = math.exp(-t)
    for wk in range(walks):
        key = stream_key(useed, np.uint64(0xA1), np.uint64(wk))
        c = np.uint64(0)
        cur = s
        if fixed_len < 0:
            u = draw_uniform(key, c)
            c += np.uint64(1)
            k = 0
            p = et
            cdf = p
            while u > cdf and p > 0.0:
                k += 1
                p *= t / k
                cdf += p
            for _ in range(k):
                lo = offsets[cur]
                deg = offsets[cur + 1] - lo
                if deg == 0:
                    break
                r = draw_uniform(key, c)
                c += np.uint64(1)
                j = np.int64(r * deg)
                if j >= deg:
                    j = deg - 1
                cur = nbrs[lo + j]
            out[cur] += inv_w
        else:
            out[cur] += coef[0] * inv_w
            for k in range(1, fixed_len + 1):
                lo = offsets[cur]
                deg = offsets[cur + 1] - lo
                if deg > 0:
                    r = draw_uniform(key, c)
                    c += np.uint64(1)
                    j = np.int64(r * deg)
                    if j >= deg:
                        j = deg - 1
                    cur = nbrs[lo + j]
                out[cur] += coef[k] * inv_w


def fixed_walk_length(t: float, delta: float) -> int:
    """Common walk length ``t log(1/delta) / log log(1/delta)`` (rounded up)."""
    ld = math.log(1.0 / delta)
    return max(1, math.ceil(t * ld / math.log(ld)))


def mc_hkpr(
    g: Graph,
    s: int,
    t: float,
    walks: int,
    fixed_len: int | None = None,
    seed: int = 0,
) -> np.ndarray:
    """Monte-Carlo heat kernel PageRank from ``s``.

    Without ``fixed_len`` each walk has Poisson(t) length and deposits ``1/walks``
    at its end.  With ``fixed_len`` every walk takes that many steps and the
    visit at step ``k`` deposits ``e^-t t^k / (walks k!)``.
    """
    if walks < 1:
        raise ConfigError("walks must be >= 1")
    if g.mode == "target":
        raise ConfigError("random walks need out-adjacency (undirected or source mode)")
    if not 0 <= s < g.n:
        raise IndexError(s)
    out = np.zeros(g.n)
    if fixed_len is None:
        coef = np.zeros(1)
        fl = -1
    else:
        fl = int(fixed_len)
        coef = np.empty(fl + 1)
        coef[0] = math.exp(-t)
        for k in range(fl):
            coef[k + 1] = coef[k] * t / (k + 1)
    _mc_walks(g.offsets, g.neighbors, s, float(t), int(walks), fl, coef, np.uint64(seed), out)
    return out


def evaluate(g: Graph | None, truth, est, k: int, normalized: bool = False,
             push_count: int | None = None) -> EvalReport:
    t0 = time.perf_counter()
    truth, est = _check_pair(truth, est)
    me = max_error(g, truth, est, normalized)
    if normalized:
        from .clustering import normalize_scores

        pk = precision_at_k(normalize_scores(g, truth), normalize_scores(g, est), k)
    else:
        pk = precision_at_k(truth, est, k)
    return EvalReport(me, pk, k, time.perf_counter() - t0, push_count)
