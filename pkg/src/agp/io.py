"""``node value`` vector files with ``#``-prefixed provenance headers."""

from __future__ import annotations

import numpy as np

from .errors import ParseError
from .graph import Graph


def format_value(x: float) -> str:
    return f"{x:.17g}"


def write_vector(path_or_fh, g: Graph, pi: np.ndarray, header: dict | None = None,
                 skip_zeros: bool = True) -> None:
    """One ``original_id value`` line per node (nonzero entries by default),
    sorted by original id."""
    lines = []
    for key, val in (header or {}).items():
        lines.append(f"# {key}={val}")
    ids = g.node_ids if g.node_ids is not None else np.arange(g.n)
    for u in np.argsort(ids, kind="stable"):
        if skip_zeros and pi[u] == 0.0:
            continue
        lines.append(f"{int(ids[u])} {format_value(float(pi[u]))}")
    text = "\n".join(lines) + "\n"
    if hasattr(path_or_fh, "write"):
        path_or_fh.write(text)
    else:
        with open(path_or_fh, "w") as fh:
            fh.write(text)


def read_vector(path) -> tuple[dict[int, float], dict[str, str]]:
    values: dict[int, float] = {}
    header: dict[str, str] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s:
                continue
            if s.startswith("#"):
                body = s[1:].strip()
                if "=" in body:
                    k, v = body.split("=", 1)
                    header[k.strip()] = v.strip()
                continue
            parts = s.split()
            if len(parts) != 2:
                raise ParseError(f"expected 'node value', got {s!r}", lineno)
            try:
                values[int(parts[0])] = values.get(int(parts[0]), 0.0) + float(parts[1])
            except ValueError:
                raise ParseError(f"bad entry {s!r}", lineno) from None
    return values, header


def dense_from_map(g: Graph, values: dict[int, float]) -> np.ndarray:
    out = np.zeros(g.n)
    for node, val in values.items():
        out[g.index_of(node)] = val
    return out
