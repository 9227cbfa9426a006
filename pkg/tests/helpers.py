"""Graph fixtures and a reference implementation independent of the package
kernels: plain float64 numpy matrix powers over an edge list."""

from __future__ import annotations

import numpy as np

from agp.graph import from_edges
from agp.weights import raw_weights

TRIANGLE = [(0, 1), (1, 2), (2, 0)]
K4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
# two triangles {0,1,2} and {3,4,5} joined by the bridge 2-3
TWO_TRIANGLES = [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)]


def star_path_edges(spokes: int) -> list[tuple[int, int]]:
    """s = 0, v = 1, u_i = 2..spokes+1; edges s-u_i and u_i-v."""
    out = []
    for i in range(2, spokes + 2):
        out.append((0, i))
        out.append((i, 1))
    return out


def random_edges(rng: np.random.Generator, n: int, p: float) -> np.ndarray:
    """G(n, p) plus a spanning path so every node has an edge."""
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    e = np.stack([iu[keep], ju[keep]], axis=1)
    path = np.stack([np.arange(n - 1), np.arange(1, n)], axis=1)
    return np.concatenate([e, path])


def random_graph(seed: int, n: int, p: float, **kw):
    rng = np.random.default_rng(seed)
    return from_edges(random_edges(rng, n, p), n=n, **kw)


def adjacency(edges, n, directed=False) -> np.ndarray:
    A = np.zeros((n, n))
    for u, v in edges:
        A[u, v] += 1
        if not directed and u != v:
            A[v, u] += 1
    return A


def reference_propagation(edges, n, scheme, x, L, directed=False) -> np.ndarray:
    """sum_{i<=L} w_i M^i x with M[v, u] = A[u, v] d_v^-a d_u^-b, float64.

    For undirected graphs A is symmetric; for directed graphs ``u`` pushes to
    its out-neighbors, so M is the transpose of the row-oriented A scaled by
    out-degrees."""
    A = adjacency(edges, n, directed)
    d = A.sum(axis=1)
    a, b = scheme.laplacian

    def inv(e):
        out = np.ones(n)
        if e != 0:
            out = np.where(d > 0, np.where(d > 0, d, 1.0) ** -e, 0.0)
        return out

    M = inv(a)[:, None] * A.T * inv(b)[None, :]
    w = np.asarray(raw_weights(scheme, L), dtype=np.float64)
    acc = np.zeros(n)
    r = np.asarray(x, dtype=np.float64)
    for i in range(L + 1):
        acc += w[i] * r
        r = M @ r
    return acc
