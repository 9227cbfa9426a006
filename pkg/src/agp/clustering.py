"""Sweep-cut local clustering over degree-normalised scores."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ConfigError, EmptySweepError, ShapeError
from .graph import Graph


@dataclass
class SweepResult:
    order: np.ndarray
    best_prefix_len: int
    best_conductance: float
    curve: np.ndarray

    @property
    def best_set(self) -> np.ndarray:
        return self.order[: self.best_prefix_len]


def normalize_scores(g: Graph, pi) -> np.ndarray:
    """``pi(v) / d_v``; zero where ``d_v = 0``."""
    pi = np.asarray(pi, dtype=float)
    if pi.shape != (g.n,):
        raise ShapeError(f"score vector has shape {pi.shape}, graph has n={g.n}")
    out = np.zeros(g.n)
    pos = g.degrees > 0
    out[pos] = pi[pos] / g.degrees[pos]
    return out


def sweep_order(scores) -> np.ndarray:
    """Positive-score nodes by descending score, ties by ascending id."""
    scores = np.asarray(scores, dtype=float)
    cand = np.flatnonzero(scores > 0)
    return cand[np.lexsort((cand, -scores[cand]))]


@njit(cache=True)
def _sweep_curve(offsets, nbrs, degrees, order, upto, total_vol):
    n = offsets.shape[0] - 1
    inside = np.zeros(n, dtype=np.bool_)
    curve = np.empty(upto)
    vol = 0
    cut = 0
    for i in range(upto):
        v = order[i]
        c_in = 0
        loops = 0
        for j in range(offsets[v], offsets[v + 1]):
            w = nbrs[j]
            if w == v:
                loops += 1
            elif inside[w]:
                c_in += 1
        inside[v] = True
        vol += degrees[v]
        cut += degrees[v] - 2 * c_in - loops
        denom = min(vol, total_vol - vol)
        curve[i] = cut / denom if denom > 0 else 1.0
    return curve


def conductance(g: Graph, nodes) -> float:
    """Conductance of ``nodes`` computed from scratch."""
    inside = np.zeros(g.n, dtype=bool)
    inside[np.asarray(nodes, dtype=np.int64)] = True
    vol = int(g.degrees[inside].sum())
    rows = np.repeat(np.arange(g.n), np.diff(g.offsets))
    cut = int(np.count_nonzero(inside[rows] & ~inside[g.neighbors]))
    denom = min(vol, int(g.degrees.sum()) - vol)
    return cut / denom if denom > 0 else 1.0


def sweep_cut(g: Graph, scores, max_prefix: int | None = None) -> SweepResult:
    """Minimum-conductance prefix of the descending score order.

    Prefixes ``S_1 .. S_k`` are scanned with ``k = min(max_prefix, #positive,
    n - 1)``; the first minimum wins.
    """
    if g.directed:
        raise ConfigError("sweep cut needs an undirected graph")
    scores = np.asarray(scores, dtype=float)
    if scores.shape != (g.n,):
        raise ShapeError(f"score vector has shape {scores.shape}, graph has n={g.n}")
    order = sweep_order(scores)
    if order.size == 0:
        raise EmptySweepError("no node has a positive score")
    cap = g.n - 1 if max_prefix is None else int(max_prefix)
    upto = min(cap, order.size, g.n - 1)
    if upto < 1:
        raise EmptySweepError("sweep range is empty")
    curve = _sweep_curve(
        g.offsets, g.neighbors, g.degrees, order, upto, int(g.degrees.sum())
    )
    best = int(np.argmin(curve))
    return SweepResult(order, best + 1, float(curve[best]), curve)
