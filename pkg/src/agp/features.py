"""Column-wise propagation of a node feature matrix.

Each column is split into its positive and negative parts, each part is
L1-normalised and propagated on its own, and the results are recombined
with the stored scales.  Columns are independent and may run on a thread
pool; every (column, part) pair gets its own seed so the output does not
depend on the worker count.
"""

from __future__ import annotations

import csv
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .basic import PropagationState, basic_propagate
from .errors import ConfigError, NumericError, ParseError, ShapeError
from .graph import Graph
from .randomized import RandomizedConfig, _Prepared, randomized_propagate
from .rng import derive_seed
from .weights import WeightScheme

MAT_MAGIC = b"AGPMAT1\x00"


@dataclass
class FeatureMatrix:
    values: np.ndarray
    col_scale: np.ndarray | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2:
            raise ShapeError(f"feature matrix must be 2-D, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise NumericError("feature matrix contains non-finite values")
        self.values = np.asfortranarray(v)
        if self.col_scale is None:
            self.col_scale = np.zeros((v.shape[1], 2))

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


def split_signs(x: np.ndarray) -> tuple[np.ndarray, float, np.ndarray, float]:
    """``x = s_pos * pos - s_neg * neg`` with ``pos``, ``neg`` >= 0 of unit L1 norm."""
    pos = np.where(x > 0, x, 0.0)
    neg = np.where(x < 0, -x, 0.0)
    s_pos, s_neg = float(pos.sum()), float(neg.sum())
    if s_pos > 0:
        pos /= s_pos
    if s_neg > 0:
        neg /= s_neg
    return pos, s_pos, neg, s_neg


def _propagate_part(g, scheme, part, cfg, L, eps, seed):
    if eps == 0.0:
        return basic_propagate(g, scheme, part, L).pi
    run_cfg = RandomizedConfig(delta=cfg.delta, epsilon=eps, L=L, seed=seed, engine=cfg.engine)
    return randomized_propagate(
        g, scheme, part, run_cfg,
        state=PropagationState.empty(g.n), _prepared=_Prepared(g, scheme, L),
    ).pi


def propagate_features(
    g: Graph,
    scheme: WeightScheme,
    X: FeatureMatrix,
    cfg: RandomizedConfig,
    workers: int = 1,
) -> FeatureMatrix:
    """``Z = sum_i w_i (D^-a A D^-b)^i X``, one column at a time.

    ``epsilon == 0`` selects the exact engine.  ``delta`` applies to each
    normalised part, so the absolute error of a column scales with its
    ``col_scale`` entries.
    """
    if X.n != g.n:
        raise ShapeError(f"feature matrix has {X.n} rows, graph has {g.n} nodes")
    if workers < 1:
        raise ConfigError("workers must be >= 1")
    L, eps = cfg.resolve(scheme)
    Z = np.zeros((X.n, X.d), order="F")
    scales = np.zeros((X.d, 2))

    def column(j):
        pos, s_pos, neg, s_neg = split_signs(X.values[:, j])
        out = np.zeros(X.n)
        if s_pos > 0:
            out += s_pos * _propagate_part(g, scheme, pos, cfg, L, eps, derive_seed(cfg.seed, 2 * j))
        if s_neg > 0:
            out -= s_neg * _propagate_part(g, scheme, neg, cfg, L, eps, derive_seed(cfg.seed, 2 * j + 1))
        Z[:, j] = out
        scales[j] = (s_pos, s_neg)

    if workers == 1:
        for j in range(X.d):
            column(j)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(column, range(X.d)))
    return FeatureMatrix(Z, scales)


def write_matrix(path, M: FeatureMatrix) -> None:
    """AGPMAT1: magic, little-endian u64 n, d, then column-major float64."""
    if str(path).endswith(".csv"):
        np.savetxt(path, M.values, delimiter=",", fmt="%.17g")
        return
    with open(path, "wb") as fh:
        fh.write(MAT_MAGIC)
        fh.write(struct.pack("<QQ", M.n, M.d))
        fh.write(np.asarray(M.values, dtype="<f8").tobytes(order="F"))


def read_matrix(path) -> FeatureMatrix:
    data = Path(path).read_bytes()
    if data[:8] == MAT_MAGIC:
        n, d = struct.unpack_from("<QQ", data, 8)
        if len(data) != 24 + 8 * n * d:
            raise ParseError(f"{path}: size does not match header n={n}, d={d}")
        vals = np.frombuffer(data, dtype="<f8", offset=24).reshape((n, d), order="F")
        return FeatureMatrix(vals.astype(np.float64))
    rows = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                rows.append([float(c) for c in row])
            except ValueError:
                raise ParseError(f"non-numeric CSV entry in {row!r}", lineno) from None
    if not rows or len({len(r) for r in rows}) != 1:
        raise ParseError(f"{path}: empty or ragged CSV matrix")
    return FeatureMatrix(np.array(rows))
