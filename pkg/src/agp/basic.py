"""Exact level-by-level propagation.

Residue ``r`` at level ``i`` is pushed to every neighbor with the factor
``(Y_{i+1}/Y_i) / (d_v^a d_u^b)`` while ``(w_i/Y_i) r`` is banked as reserve.
Used directly for ground truth and as the reference the randomized engine
must reproduce when its threshold is zero.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import NumericError, ShapeError
from .graph import Graph
from .weights import WeightScheme, truncated_total, weights_and_partials


@dataclass
class PropagationResult:
    pi: np.ndarray
    engine: str
    scheme: str
    a: float
    b: float
    levels: int
    push_count: int
    delta: float | None = None
    epsilon: float = 0.0
    seed: int | None = None
    rescale: float = 1.0
    # Mass that reached a node with nothing to push to (dangling nodes).
    dropped_mass: float = 0.0
    # ||r^(i)||_1 per level, before rescale.
    residue_l1: np.ndarray = field(default=None, repr=False)
    wall_time: float = 0.0

    def provenance(self) -> dict:
        return {
            "engine": self.engine,
            "measure": self.scheme,
            "a": self.a,
            "b": self.b,
            "delta": self.delta,
            "epsilon": self.epsilon,
            "L": self.levels,
            "seed": self.seed,
            "push_count": self.push_count,
            "rescale": self.rescale,
            "dropped_mass": self.dropped_mass,
            "wall_time": round(self.wall_time, 6),
        }


@dataclass
class PropagationState:
    """Scratch space for one propagation; reusable across calls on one graph."""

    residue_cur: np.ndarray
    residue_next: np.ndarray
    active_cur: np.ndarray
    active_next: np.ndarray
    marked: np.ndarray
    reserve: np.ndarray
    push_count: int = 0

    @classmethod
    def empty(cls, n: int) -> PropagationState:
        return cls(
            residue_cur=np.zeros(n),
            residue_next=np.zeros(n),
            active_cur=np.empty(n, dtype=np.int64),
            active_next=np.empty(n, dtype=np.int64),
            marked=np.zeros(n, dtype=np.bool_),
            reserve=np.zeros(n),
        )

    def load(self, x: np.ndarray) -> int:
        """Seed level 0 with signal ``x``; returns the active count."""
        self.reserve[:] = 0.0
        self.residue_cur[:] = 0.0
        self.residue_next[:] = 0.0
        self.marked[:] = False
        nz = np.flatnonzero(x)
        self.residue_cur[nz] = x[nz]
        self.active_cur[: len(nz)] = nz
        self.push_count = 0
        return len(nz)


def inverse_power(degrees: np.ndarray, e: float) -> np.ndarray:
    """``d**-e`` with the pseudo-inverse convention ``0**-e = 0`` for ``e > 0``."""
    d = degrees.astype(np.float64)
    out = np.ones_like(d)
    if e != 0.0:
        pos = d > 0
        out[pos] = d[pos] ** -e
        out[~pos] = 0.0
    return out


def level_factors(w: np.ndarray, Y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``Y_{i+1}/Y_i`` (length L) and ``w_i/Y_i`` (length L+1), zero past ``Y_i = 0``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(Y[:-1] > 0, Y[1:] / Y[:-1], 0.0)
        wy = np.where(Y > 0, w / Y, 0.0)
    return ratio, wy


def as_signal(g: Graph, x) -> np.ndarray:
    """Dense float signal from a node index, a ``{node: value}`` dict or a vector."""
    if isinstance(x, (int, np.integer)):
        if not 0 <= x < g.n:
            raise IndexError(f"source {x} outside 0..{g.n - 1}")
        out = np.zeros(g.n)
        out[x] = 1.0
        return out
    if isinstance(x, dict):
        out = np.zeros(g.n)
        for k, v in x.items():
            out[k] += v
    else:
        out = np.asarray(x, dtype=np.float64)
        if out.shape != (g.n,):
            raise ShapeError(f"signal has shape {out.shape}, graph has n={g.n}")
        out = out.copy()
    if not np.all(np.isfinite(out)):
        raise NumericError("signal contains non-finite values")
    return out


def uniform_signal(g: Graph) -> np.ndarray:
    return np.full(g.n, 1.0 / g.n)


@njit(cache=True, nogil=True)
def _basic_kernel(
    offsets, nbrs, inv_a, inv_b, ratio, wy, L,
    r_cur, r_next, act_cur, n_act, act_next, marked, reserve, level_l1,
):
    ops = 0
    dropped = 0.0
    finished = False
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
            ops += 1
            if rt == 0.0:
                continue
            base = rt * ru * inv_b[u]
            s = offsets[u]
            e = offsets[u + 1]
            if base == 0.0 or s == e:
                dropped += rt * ru
                continue
            for j in range(s, e):
                v = nbrs[j]
                inc = base * inv_a[v]
                if inc == 0.0:
                    continue
                r_next[v] += inc
                ops += 1
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
            ops += 1
        level_l1[L] = mass
    return ops, dropped


def basic_propagate(
    g: Graph,
    scheme: WeightScheme,
    x,
    L: int,
    state: PropagationState | None = None,
) -> PropagationResult:
    """Exact truncated propagation ``sum_{i<=L} w_i (D^-a A D^-b)^i x``."""
    t0 = time.perf_counter()
    sig = as_signal(g, x)
    w, Y = weights_and_partials(scheme, L)
    rescale = truncated_total(scheme, L)
    ratio, wy = level_factors(w, Y)
    a, b = scheme.laplacian
    st = state or PropagationState.empty(g.n)
    n_act = st.load(sig)
    level_l1 = np.zeros(L + 1)
    ops, dropped = _basic_kernel(
        g.offsets, g.neighbors, inverse_power(g.degrees, a), inverse_power(g.degrees, b),
        ratio, wy, L,
        st.residue_cur, st.residue_next, st.active_cur, n_act, st.active_next,
        st.marked, st.reserve, level_l1,
    )
    st.push_count = int(ops)
    pi = st.reserve * rescale
    if not np.all(np.isfinite(pi)):
        raise NumericError("propagation produced non-finite values")
    return PropagationResult(
        pi=pi,
        engine="basic",
        scheme=scheme.name,
        a=a,
        b=b,
        levels=L,
        push_count=int(ops),
        rescale=rescale,
        dropped_mass=float(dropped),
        residue_l1=level_l1,
        wall_time=time.perf_counter() - t0,
    )
