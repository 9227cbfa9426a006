"""CSR graph storage with degree-sorted adjacency lists.

Each node's adjacency slice is the list the push kernels scatter into, sorted
ascending by the neighbor's normalisation degree.  Neighbors are further
partitioned into degree groups ``[2**k, 2**(k+1))`` so the subset sampler can
use a single acceptance ceiling per group.

Orientation:

* ``"undirected"``: both ``(u, v)`` and ``(v, u)`` are stored; a self-loop line
  contributes one entry.
* ``"source"`` (directed, used by PPR/HKPR/Katz/transition): the slice of ``u``
  holds its out-neighbors, i.e. the nodes ``u`` pushes mass to.
* ``"target"`` (directed, single-target PPR): the slice of ``u`` holds its
  in-neighbors.

In both directed modes ``degrees`` is the out-degree.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numba import njit

from .errors import CapacityError, EmptyGraphError, ParseError

MAX_NODE_ID = 2**32
CSR_MAGIC = b"AGPCSR1\x00"

_FLAG_DIRECTED = 1
_FLAG_TARGET = 2
_FLAG_IDS = 4
_MODES = ("undirected", "source", "target")


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    m: int
    offsets: np.ndarray
    neighbors: np.ndarray
    degrees: np.ndarray
    group_ptr: np.ndarray
    group_k: np.ndarray
    group_start: np.ndarray
    group_end: np.ndarray
    directed: bool = False
    mode: str = "undirected"
    node_ids: np.ndarray | None = field(default=None, repr=False)
    build_ops: int = field(default=0, repr=False)

    def neighbors_of(self, u: int) -> np.ndarray:
        return self.neighbors[self.offsets[u]:self.offsets[u + 1]]

    def groups_of(self, u: int) -> list[tuple[int, int, int]]:
        """Degree groups of ``u`` as ``(k, start, end)`` absolute positions."""
        lo, hi = self.group_ptr[u], self.group_ptr[u + 1]
        return [
            (int(self.group_k[j]), int(self.group_start[j]), int(self.group_end[j]))
            for j in range(lo, hi)
        ]

    def original_id(self, u: int) -> int:
        return int(self.node_ids[u]) if self.node_ids is not None else int(u)

    def index_of(self, original: int) -> int:
        """Dense index of an original node id."""
        if self.node_ids is None:
            if not 0 <= original < self.n:
                raise KeyError(original)
            return int(original)
        j = int(np.searchsorted(self.node_ids, original))
        if j >= self.n or self.node_ids[j] != original:
            raise KeyError(original)
        return j

    def digest(self) -> str:
        h = hashlib.sha256()
        h.update(self.mode.encode())
        for arr in (self.offsets, self.neighbors, self.degrees):
            h.update(np.ascontiguousarray(arr, dtype="<i8").tobytes())
        return h.hexdigest()[:16]


@njit(cache=True)
def _counting_sort_csr(rows, cols, keys, n, max_key):
    """Two stable counting-sort passes: by key, then by row.

    Returns offsets, neighbors and the number of elementary operations.
    """
    m = rows.shape[0]
    ops = 0
    cnt = np.zeros(max_key + 2, dtype=np.int64)
    for e in range(m):
        cnt[keys[e] + 1] += 1
        ops += 1
    for k in range(max_key + 1):
        cnt[k + 1] += cnt[k]
        ops += 1
    by_key = np.empty(m, dtype=np.int64)
    for e in range(m):
        k = keys[e]
        by_key[cnt[k]] = e
        cnt[k] += 1
        ops += 1

    offsets = np.zeros(n + 1, dtype=np.int64)
    for e in range(m):
        offsets[rows[e] + 1] += 1
        ops += 1
    for u in range(n):
        offsets[u + 1] += offsets[u]
        ops += 1
    fill = offsets[:n].copy()
    neighbors = np.empty(m, dtype=np.int64)
    for t in range(m):
        e = by_key[t]
        u = rows[e]
        neighbors[fill[u]] = cols[e]
        fill[u] += 1
        ops += 1
    return offsets, neighbors, ops


@njit(cache=True)
def _degree_groups(offsets, neighbors, degrees):
    n = offsets.shape[0] - 1
    # Upper bound on groups: one per entry.
    gk = np.empty(neighbors.shape[0], dtype=np.int64)
    gs = np.empty(neighbors.shape[0], dtype=np.int64)
    ge = np.empty(neighbors.shape[0], dtype=np.int64)
    gptr = np.zeros(n + 1, dtype=np.int64)
    g = 0
    for u in range(n):
        cur = -2
        for j in range(offsets[u], offsets[u + 1]):
            d = degrees[neighbors[j]]
            k = -1
            while d > 0:
                d >>= 1
                k += 1
            if k != cur:
                if cur != -2:
                    ge[g - 1] = j
                gk[g] = k
                gs[g] = j
                g += 1
                cur = k
        if cur != -2:
            ge[g - 1] = offsets[u + 1]
        gptr[u + 1] = g
    return gptr, gk[:g].copy(), gs[:g].copy(), ge[:g].copy()


def _assemble(n, offsets, neighbors, degrees, directed, mode, node_ids, ops):
    gptr, gk, gs, ge = _degree_groups(offsets, neighbors, degrees)
    for arr in (offsets, neighbors, degrees, gptr, gk, gs, ge):
        arr.flags.writeable = False
    return Graph(
        n=int(n),
        m=int(neighbors.shape[0]),
        offsets=offsets,
        neighbors=neighbors,
        degrees=degrees,
        group_ptr=gptr,
        group_k=gk,
        group_start=gs,
        group_end=ge,
        directed=directed,
        mode=mode,
        node_ids=node_ids,
        build_ops=int(ops),
    )


def from_edges(
    edges,
    n: int | None = None,
    directed: bool = False,
    add_self_loops: bool = False,
    mode: str | None = None,
    node_ids: np.ndarray | None = None,
) -> Graph:
    """Build a graph from an ``(E, 2)`` array of dense node indices.

    ``n`` defaults to ``max id + 1``; pass it explicitly to keep isolated nodes.
    """
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if n is None:
        if edges.size == 0:
            raise EmptyGraphError("graph has no edges")
        n = int(edges.max()) + 1
    if edges.size and (edges.min() < 0 or edges.max() >= n):
        raise ValueError("edge endpoint outside 0..n-1")
    if mode is None:
        mode = "source" if directed else "undirected"
    if mode not in _MODES or (mode == "undirected") == directed:
        raise ValueError(f"mode {mode!r} inconsistent with directed={directed}")

    src, dst = edges[:, 0], edges[:, 1]
    if add_self_loops:
        loops = np.arange(n, dtype=np.int64)
        src = np.concatenate([src, loops])
        dst = np.concatenate([dst, loops])

    if not directed:
        off_diag = src != dst
        rows = np.concatenate([src, dst[off_diag]])
        cols = np.concatenate([dst, src[off_diag]])
        degrees = np.bincount(rows, minlength=n).astype(np.int64)
    else:
        degrees = np.bincount(src, minlength=n).astype(np.int64)
        rows, cols = (src, dst) if mode == "source" else (dst, src)

    keys = degrees[cols]
    max_key = int(degrees.max()) if n else 0
    offsets, neighbors, ops = _counting_sort_csr(rows, cols, keys, n, max_key)
    return _assemble(n, offsets, neighbors, degrees, directed, mode, node_ids, ops)


def parse_edge_list(path) -> np.ndarray:
    """Read whitespace-separated id pairs; ``#`` lines and blank lines skipped."""
    pairs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split()
            if len(parts) < 2:
                raise ParseError(f"expected two node ids, got {s!r}", lineno)
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(f"non-integer node id in {s!r}", lineno) from None
            if u < 0 or v < 0:
                raise ParseError(f"negative node id in {s!r}", lineno)
            if u >= MAX_NODE_ID or v >= MAX_NODE_ID:
                raise CapacityError(f"line {lineno}: node id exceeds 2^32 - 1")
            pairs.append((u, v))
    if not pairs:
        raise EmptyGraphError(f"{path}: no edges")
    return np.array(pairs, dtype=np.int64)


def load_edge_list(
    path, directed: bool = False, add_self_loops: bool = False, mode: str | None = None
) -> Graph:
    """Load an edge-list file, remapping ids to ``0..n-1`` in ascending order.

    Original ids are kept in ``Graph.node_ids``.  When the file already uses
    every id in ``0..n-1`` the mapping is the identity.
    """
    raw = parse_edge_list(path)
    ids, inverse = np.unique(raw, return_inverse=True)
    dense = inverse.reshape(raw.shape).astype(np.int64)
    return from_edges(
        dense,
        n=len(ids),
        directed=directed,
        add_self_loops=add_self_loops,
        mode=mode,
        node_ids=ids.astype(np.int64),
    )


def neighbor_prefix_below(g: Graph, u: int, degree_cap: float) -> tuple[int, int]:
    """Maximal prefix ``[offsets[u], j)`` whose neighbor degrees are ``<= degree_cap``."""
    if not 0 <= u < g.n:
        raise IndexError(u)
    start, end = int(g.offsets[u]), int(g.offsets[u + 1])
    j = start
    while j < end and g.degrees[g.neighbors[j]] <= degree_cap:
        j += 1
    return start, j


def write_mapping(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write("# dense original\n")
        for u in range(g.n):
            fh.write(f"{u} {g.original_id(u)}\n")


def save_csr(g: Graph, path) -> None:
    """Binary cache: magic, then little-endian u64 n, m, flags and i64 arrays
    offsets[n+1], neighbors[m], degrees[n] (and node_ids[n] when flag 4 is set)."""
    flags = 0
    if g.directed:
        flags |= _FLAG_DIRECTED
    if g.mode == "target":
        flags |= _FLAG_TARGET
    if g.node_ids is not None:
        flags |= _FLAG_IDS
    with open(path, "wb") as fh:
        fh.write(CSR_MAGIC)
        fh.write(struct.pack("<QQQ", g.n, g.m, flags))
        for arr in (g.offsets, g.neighbors, g.degrees):
            fh.write(np.ascontiguousarray(arr, dtype="<i8").tobytes())
        if g.node_ids is not None:
            fh.write(np.ascontiguousarray(g.node_ids, dtype="<i8").tobytes())


def load_csr(path) -> Graph:
    data = Path(path).read_bytes()
    if data[:8] != CSR_MAGIC:
        raise ParseError(f"{path}: not an AGPCSR1 file")
    n, m, flags = struct.unpack_from("<QQQ", data, 8)
    pos = 32

    def take(count):
        nonlocal pos
        arr = np.frombuffer(data, dtype="<i8", count=count, offset=pos).astype(np.int64)
        pos += 8 * count
        return arr

    try:
        offsets, neighbors, degrees = take(n + 1), take(m), take(n)
        node_ids = take(n) if flags & _FLAG_IDS else None
    except ValueError as exc:
        raise ParseError(f"{path}: truncated CSR file") from exc
    directed = bool(flags & _FLAG_DIRECTED)
    mode = ("target" if flags & _FLAG_TARGET else "source") if directed else "undirected"
    return _assemble(n, offsets, neighbors, degrees, directed, mode, node_ids, 0)


def load_graph(path, directed=False, add_self_loops=False, mode=None) -> Graph:
    """Load either format, sniffing the CSR magic."""
    with open(path, "rb") as fh:
        head = fh.read(8)
    if head == CSR_MAGIC:
        return load_csr(path)
    return load_edge_list(path, directed=directed, add_self_loops=add_self_loops, mode=mode)


def edge_array(g: Graph) -> np.ndarray:
    """Dense-index edge list ``(src, dst)`` recovered from the CSR arrays."""
    rows = np.repeat(np.arange(g.n, dtype=np.int64), np.diff(g.offsets))
    cols = g.neighbors
    if g.mode == "undirected":
        keep = rows <= cols
        return np.stack([rows[keep], cols[keep]], axis=1)
    if g.mode == "source":
        return np.stack([rows, cols], axis=1)
    return np.stack([cols, rows], axis=1)


def reorient(g: Graph, mode: str) -> Graph:
    """Same directed graph stored for the other push direction."""
    if g.mode == mode:
        return g
    if not g.directed:
        raise ValueError("only directed graphs can be reoriented")
    return from_edges(edge_array(g), n=g.n, directed=True, mode=mode, node_ids=g.node_ids)
