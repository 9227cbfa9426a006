"""Randomized propagation with degree-threshold pushes and subset sampling.

For an active node ``u`` with push mass ``base = (Y_{i+1}/Y_i) r(u) / d_u^b``
the neighbor ``v`` would receive ``base / d_v^a``.  Neighbors whose share
exceeds ``eps`` get it deterministically; adjacency slices are sorted by
degree, so these form a prefix.  Every other neighbor receives exactly
``eps`` with probability ``share / eps``, drawn per degree group with one
ceiling probability and a rejection step.

Randomness comes from a counter-based stream keyed by ``(seed, level, node)``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from numba import njit

from .basic import (
    PropagationResult,
    PropagationState,
    as_signal,
    inverse_power,
    level_factors,
)
from .errors import ConfigError, NumericError
from .graph import Graph
from .rng import CounterRNG, draw_uniform, stream_key
from .weights import WeightScheme, select_level_count, truncated_total, weights_and_partials

PREFIX_POLICIES = ("scan", "bisect")


@dataclass(frozen=True)
class RandomizedConfig:
    delta: float | None = None
    epsilon: float | None = None
    L: int | None = None
    seed: int = 0
    engine: str = "scan"

    def __post_init__(self):
        if self.epsilon is not None and not self.epsilon >= 0.0:
            raise ConfigError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.delta is not None and not 0.0 < self.delta < 1.0:
            raise ConfigError(f"delta must lie in (0, 1), got {self.delta}")
        if self.engine not in PREFIX_POLICIES:
            raise ConfigError(f"unknown prefix policy {self.engine!r}")
        if self.L is not None and self.L < 0:
            raise ConfigError("L must be >= 0")

    def resolve(self, scheme: WeightScheme) -> tuple[int, float]:
        """Level count and push threshold for ``scheme``."""
        if self.L is not None:
            L = int(self.L)
        elif self.delta is not None:
            L = select_level_count(scheme, self.delta)
        else:
            raise ConfigError("need delta or an explicit L")
        if self.epsilon is not None:
            return L, float(self.epsilon)
        if self.delta is None:
            raise ConfigError("need delta or an explicit epsilon")
        return L, default_epsilon(self.delta, L)


def default_epsilon(delta: float, L: int) -> float:
    """Threshold giving relative error 1/10 for entries above ``delta``."""
    if L == 0:
        return delta
    return delta / (50.0 * L * (L + 1))


@njit(cache=True, nogil=True)
def _sample_run(key, counter, nbrs, inv_a, start, end, pbase, pstar, out, n_out):
    """Bernoulli(pstar) candidates over ``nbrs[start:end]``, each kept with
    probability ``pbase * inv_a[v] / pstar``.

    Candidates are generated with geometric gaps, so their count is
    Binomial(end - start, pstar) and, given the count, their positions are a
    uniform subset.  Returns ``(n_out, counter, n_candidates)``.
    """
    n_cand = 0
    if pstar <= 0.0 or start >= end:
        return n_out, counter, n_cand
    if pstar >= 1.0:
        pos = start
        while pos < end:
            v = nbrs[pos]
            n_cand += 1
            pv = pbase * inv_a[v]
            if pv >= 1.0:
                out[n_out] = v
                n_out += 1
            else:
                u = draw_uniform(key, counter)
                counter += 1
                if u <= pv:
                    out[n_out] = v
                    n_out += 1
            pos += 1
        return n_out, counter, n_cand
    lg = math.log1p(-pstar)
    pos = start - 1
    span = end - start
    while True:
        u = draw_uniform(key, counter)
        counter += 1
        gap = math.log(u) / lg
        if gap >= span:
            break
        pos += 1 + np.int64(gap)
        if pos >= end:
            break
        v = nbrs[pos]
        n_cand += 1
        pv = pbase * inv_a[v]
        if pv >= pstar:
            out[n_out] = v
            n_out += 1
        else:
            u = draw_uniform(key, counter)
            counter += 1
            if u * pstar <= pv:
                out[n_out] = v
                n_out += 1
    return n_out, counter, n_cand


@njit(cache=True, nogil=True)
def _subset_sample(key, nbrs, inv_a, gptr_u0, gptr_u1, gk, gs, ge, pow2k_inv_a,
                   a_zero, start, end, pbase, out, group_counts):
    """Subset-sample ``nbrs[start:end]`` with ``p_v = pbase * inv_a[v]``.

    Returns ``(n_out, groups_visited)``; candidate counts per visited group are
    written into ``group_counts``.
    """
    n_out = 0
    counter = np.uint64(0)
    visited = 0
    if start >= end:
        return n_out, visited
    if a_zero:
        pstar = pbase if pbase < 1.0 else 1.0
        n_out, counter, nc = _sample_run(key, counter, nbrs, inv_a, start, end,
                                         pbase, pstar, out, n_out)
        group_counts[0] = nc
        return n_out, 1
    for g in range(gptr_u0, gptr_u1):
        if ge[g] <= start or gs[g] >= end:
            continue
        k = gk[g]
        if k < 0:
            continue
        lo = gs[g] if gs[g] > start else start
        hi = ge[g] if ge[g] < end else end
        pstar = pbase * pow2k_inv_a[k]
        if pstar > 1.0:
            pstar = 1.0
        n_out, counter, nc = _sample_run(key, counter, nbrs, inv_a, lo, hi,
                                         pbase, pstar, out, n_out)
        group_counts[visited] = nc
        visited += 1
    return n_out, visited


@njit(cache=True, nogil=True)
def _prefix_end(nbrs, inv_a, lo, hi, base, eps, bisect):
    """First position in ``[lo, hi)`` whose share ``base*inv_a`` is ``<= eps``."""
    if not bisect:
        j = lo
        while j < hi and base * inv_a[nbrs[j]] > eps:
            j += 1
        return j
    while lo < hi:
        mid = (lo + hi) // 2
        if base * inv_a[nbrs[mid]] > eps:
            lo = mid + 1
        else:
            hi = mid
    return lo


@njit(cache=True, nogil=True)
def _random_kernel(
    offsets, nbrs, inv_a, inv_b, gptr, gk, gs, ge, pow2k_inv_a, a_zero,
    eps, seed, bisect, ratio, wy, L,
    r_cur, r_next, act_cur, n_act, act_next, marked, reserve, level_l1, scratch, gscratch,
):
    ops = 0
    dropped = 0.0
    finished = False
    useed = np.uint64(seed)
    for i in range(L):
        rt = ratio[i]
        q = wy[i]
        nn = 0
        mass = 0.0
        for idx in range(n_act):
            u = act_cur[idx]
            ru = r_cur[u]
            r_cur[u] = 0.0
            mass += abs(ru)
            reserve[u] += q * ru
            if rt == 0.0:
                continue
            base = rt * ru * inv_b[u]
            s = offsets[u]
            e = offsets[u + 1]
            if base == 0.0 or s == e:
                dropped += rt * ru
                continue
            if a_zero:
                j = e if base > eps else s
            else:
                j = s
                g0 = gptr[u]
                if gk[g0] == -1:
                    j = ge[g0]
                j = _prefix_end(nbrs, inv_a, j, e, base, eps, bisect)
            for p in range(s, j):
                v = nbrs[p]
                inc = base * inv_a[v]
                if inc == 0.0:
                    continue
                r_next[v] += inc
                ops += 1
                if not marked[v]:
                    marked[v] = True
                    act_next[nn] = v
                    nn += 1
            if j < e:
                key = stream_key(useed, np.uint64(i), np.uint64(u))
                n_out, visited = _subset_sample(
                    key, nbrs, inv_a, gptr[u], gptr[u + 1], gk, gs, ge, pow2k_inv_a,
                    a_zero, j, e, base / eps, scratch, gscratch,
                )
                ops += visited + n_out
                for p in range(n_out):
                    v = scratch[p]
                    r_next[v] += eps
                    if not marked[v]:
                        marked[v] = True
                        act_next[nn] = v
                        nn += 1
        level_l1[i] = mass
        for idx in range(nn):
            marked[act_next[idx]] = False
        act_cur, act_next = act_next, act_cur
        r_cur, r_next = r_next, r_cur
        n_act = nn
        if n_act == 0 or rt == 0.0:
            finished = True
            break
    if not finished:
        q = wy[L]
        mass = 0.0
        for idx in range(n_act):
            u = act_cur[idx]
            ru = r_cur[u]
            r_cur[u] = 0.0
            mass += abs(ru)
            reserve[u] += q * ru
        level_l1[L] = mass
    return ops, dropped


class _Prepared:
    """Per-(graph, scheme, L) arrays shared by repeated randomized runs."""

    def __init__(self, g: Graph, scheme: WeightScheme, L: int):
        self.a, self.b = scheme.laplacian
        w, Y = weights_and_partials(scheme, L)
        self.ratio, self.wy = level_factors(w, Y)
        self.rescale = truncated_total(scheme, L)
        self.inv_a = inverse_power(g.degrees, self.a)
        self.inv_b = inverse_power(g.degrees, self.b)
        self.pow2k_inv_a = inverse_power(2.0 ** np.arange(64), self.a)
        maxlen = int(np.diff(g.offsets).max()) if g.n else 0
        self.scratch = np.empty(max(maxlen, 1), dtype=np.int64)
        self.gscratch = np.empty(66, dtype=np.int64)


def randomized_propagate(
    g: Graph,
    scheme: WeightScheme,
    x,
    cfg: RandomizedConfig,
    state: PropagationState | None = None,
    _prepared: _Prepared | None = None,
) -> PropagationResult:
    """Unbiased estimate of the truncated propagation vector."""
    t0 = time.perf_counter()
    L, eps = cfg.resolve(scheme)
    sig = as_signal(g, x)
    if np.any(sig < 0):
        raise NumericError("randomized propagation needs a nonnegative signal; split signs first")
    if sig.sum() > 1.0 + 1e-9:
        raise ConfigError(f"signal has l1 norm {sig.sum():.6g} > 1; normalise it first")
    prep = _prepared or _Prepared(g, scheme, L)
    st = state or PropagationState.empty(g.n)
    n_act = st.load(sig)
    level_l1 = np.zeros(L + 1)
    ops, dropped = _random_kernel(
        g.offsets, g.neighbors, prep.inv_a, prep.inv_b,
        g.group_ptr, g.group_k, g.group_start, g.group_end, prep.pow2k_inv_a,
        prep.a == 0.0, eps, np.uint64(cfg.seed), cfg.engine == "bisect",
        prep.ratio, prep.wy, L,
        st.residue_cur, st.residue_next, st.active_cur, n_act, st.active_next,
        st.marked, st.reserve, level_l1, prep.scratch, prep.gscratch,
    )
    st.push_count = int(ops)
    return PropagationResult(
        pi=st.reserve * prep.rescale,
        engine="randomized",
        scheme=scheme.name,
        a=prep.a,
        b=prep.b,
        levels=L,
        push_count=int(ops),
        delta=cfg.delta,
        epsilon=eps,
        seed=cfg.seed,
        rescale=prep.rescale,
        dropped_mass=float(dropped),
        residue_l1=level_l1,
        wall_time=time.perf_counter() - t0,
    )


class RepeatedRunner:
    """Run the randomized engine many times on one ``(graph, scheme, signal)``
    while reusing all scratch arrays; used by the statistical harnesses."""

    def __init__(self, g: Graph, scheme: WeightScheme, x, cfg: RandomizedConfig):
        self.g, self.scheme, self.x, self.cfg = g, scheme, x, cfg
        L, _ = cfg.resolve(scheme)
        self._prep = _Prepared(g, scheme, L)
        self._state = PropagationState.empty(g.n)

    def run(self, seed: int) -> PropagationResult:
        cfg = RandomizedConfig(
            delta=self.cfg.delta, epsilon=self.cfg.epsilon, L=self.cfg.L,
            seed=seed, engine=self.cfg.engine,
        )
        return randomized_propagate(
            self.g, self.scheme, self.x, cfg, state=self._state, _prepared=self._prep
        )


def subset_sample(
    g: Graph,
    u: int,
    slice_bounds: tuple[int, int],
    base: float,
    a: float,
    rng: CounterRNG,
    return_group_counts: bool = False,
):
    """Include each neighbor ``v`` in ``neighbors[start:end]`` independently
    with probability ``min(1, base / d_v**a)``.

    ``slice_bounds`` are absolute positions inside ``u``'s adjacency slice.
    The stream ``rng`` supplies the key; its counter is not advanced, so reuse
    a fresh ``CounterRNG`` per call.
    """
    start, end = slice_bounds
    lo, hi = int(g.offsets[u]), int(g.offsets[u + 1])
    if not lo <= start <= end <= hi:
        raise IndexError("slice outside the adjacency list of u")
    inv_a = inverse_power(g.degrees, a)
    pow2k = inverse_power(2.0 ** np.arange(64), a)
    out = np.empty(max(end - start, 1), dtype=np.int64)
    counts = np.zeros(66, dtype=np.int64)
    n_out, visited = _subset_sample(
        rng.key, g.neighbors, inv_a, g.group_ptr[u], g.group_ptr[u + 1],
        g.group_k, g.group_start, g.group_end, pow2k, a == 0.0,
        start, end, float(base), out, counts,
    )
    picked = out[:n_out].tolist()
    if return_group_counts:
        return picked, counts[:visited].tolist()
    return picked
