"""Weight sequences, tail sums and level-count selection.

All engines consume the *normalised, truncated* sequence: raw weights
``w_0..w_L`` divided by their sum, with ``rescale`` carrying that sum so the
engines reproduce ``sum_{i<=L} raw_w_i M^i x`` exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

KINDS = ("transition", "pagerank", "ppr", "single_target_ppr", "hkpr", "katz", "custom")

# (a, b) defaults per measure; override through WeightScheme.a / .b
_DEFAULT_AB = {
    "transition": (0.0, 1.0),
    "pagerank": (0.0, 1.0),
    "ppr": (0.0, 1.0),
    "single_target_ppr": (1.0, 0.0),
    "hkpr": (0.0, 1.0),
    "katz": (0.0, 0.0),
    "custom": (0.0, 1.0),
}

# Tail-bound divisor used by the level-count rules.
_TAIL_DIV = 19.0


@dataclass(frozen=True)
class WeightScheme:
    kind: str
    alpha: float | None = None
    t: float | None = None
    beta: float | None = None
    lambda1: float | None = None
    hops: int | None = None
    weights: tuple[float, ...] | None = None
    a: float | None = None
    b: float | None = None

    def __post_init__(self):
        k = self.kind
        if k not in KINDS:
            raise ConfigError(f"unknown measure {k!r}; expected one of {', '.join(KINDS)}")
        if k in ("pagerank", "ppr", "single_target_ppr"):
            if self.alpha is None or not 0.0 < self.alpha < 1.0:
                raise ConfigError(f"{k} needs 0 < alpha < 1, got {self.alpha}")
        elif k == "hkpr":
            if self.t is None or not self.t > 0.0:
                raise ConfigError(f"hkpr needs t > 0, got {self.t}")
        elif k == "katz":
            if self.beta is None or not self.beta > 0.0:
                raise ConfigError(f"katz needs beta > 0, got {self.beta}")
            if self.lambda1 is not None:
                if not self.lambda1 > 0:
                    raise ConfigError("lambda1 must be positive")
                if self.beta * self.lambda1 >= 1.0:
                    raise ConfigError(
                        f"katz diverges: beta*lambda1 = {self.beta * self.lambda1:.4g} >= 1"
                    )
        elif k == "transition":
            if self.hops is None or int(self.hops) != self.hops or self.hops < 0:
                raise ConfigError(f"transition needs integer hops >= 0, got {self.hops}")
        elif k == "custom":
            if not self.weights:
                raise ConfigError("custom measure needs a non-empty weight list")
            w = np.asarray(self.weights, dtype=float)
            if not np.all(np.isfinite(w)) or np.any(w < 0) or w.sum() <= 0:
                raise ConfigError("custom weights must be finite, nonnegative, not all zero")
        for name in ("a", "b"):
            v = getattr(self, name)
            if v is not None and not 0.0 <= v <= 1.0:
                raise ConfigError(f"Laplacian exponent {name} must lie in [0, 1], got {v}")

    @property
    def laplacian(self) -> tuple[float, float]:
        da, db = _DEFAULT_AB[self.kind]
        return (da if self.a is None else float(self.a), db if self.b is None else float(self.b))

    @property
    def name(self) -> str:
        param = {
            "transition": f"hops={self.hops}",
            "pagerank": f"alpha={self.alpha}",
            "ppr": f"alpha={self.alpha}",
            "single_target_ppr": f"alpha={self.alpha}",
            "hkpr": f"t={self.t}",
            "katz": f"beta={self.beta}",
            "custom": f"len={len(self.weights or ())}",
        }[self.kind]
        return f"{self.kind}({param})"

    # GNN instantiations (SGC, APPNP, GDC) use a = b = 1/2.
    @classmethod
    def sgc(cls, hops: int) -> WeightScheme:
        return cls("transition", hops=hops, a=0.5, b=0.5)

    @classmethod
    def appnp(cls, alpha: float) -> WeightScheme:
        return cls("ppr", alpha=alpha, a=0.5, b=0.5)

    @classmethod
    def gdc(cls, t: float) -> WeightScheme:
        return cls("hkpr", t=t, a=0.5, b=0.5)


def raw_weights(scheme: WeightScheme, L: int) -> np.ndarray:
    """Un-normalised ``w_0..w_L`` in extended precision."""
    if L < 0:
        raise ConfigError("level count must be >= 0")
    i = np.arange(L + 1)
    k = scheme.kind
    if k == "transition":
        if scheme.hops > L:
            raise ConfigError(f"transition hops={scheme.hops} exceeds level count L={L}")
        w = np.zeros(L + 1, dtype=np.longdouble)
        w[scheme.hops] = 1
        return w
    if k in ("pagerank", "ppr", "single_target_ppr"):
        al = np.longdouble(scheme.alpha)
        return al * (1 - al) ** i.astype(np.longdouble)
    if k == "hkpr":
        w = np.empty(L + 1, dtype=np.longdouble)
        t = np.longdouble(scheme.t)
        w[0] = np.exp(-t)
        for j in range(L):
            w[j + 1] = w[j] * t / (j + 1)
        return w
    if k == "katz":
        return np.longdouble(scheme.beta) ** i.astype(np.longdouble)
    w = np.zeros(L + 1, dtype=np.longdouble)
    given = np.asarray(scheme.weights, dtype=np.longdouble)[: L + 1]
    w[: len(given)] = given
    return w


def truncated_total(scheme: WeightScheme, L: int) -> float:
    """``sum_{i<=L} raw w_i``: the factor that undoes normalisation."""
    total = raw_weights(scheme, L).sum()
    if total <= 0:
        raise ConfigError(f"{scheme.name}: weights w_0..w_{L} sum to zero")
    return float(total)


def weights_and_partials(scheme: WeightScheme, L: int) -> tuple[np.ndarray, np.ndarray]:
    """Normalised weights ``w`` and tail sums ``Y`` over levels ``0..L``.

    ``Y`` is the backward tail sum of the normalised sequence (``Y_0 = 1``,
    ``Y_L = w_L``) and ``w`` is then taken as ``Y_i - Y_{i+1}`` so the
    telescoping identity holds bit-for-bit in float64.
    """
    raw = raw_weights(scheme, L)
    total = raw.sum()
    if total <= 0:
        raise ConfigError(f"{scheme.name}: weights w_0..w_{L} sum to zero")
    tails = np.cumsum((raw / total)[::-1])[::-1]
    Y = (tails / tails[0]).astype(np.float64)
    Y[0] = 1.0
    w = np.empty_like(Y)
    w[:-1] = Y[:-1] - Y[1:]
    w[-1] = Y[-1]
    return w, Y


def select_level_count(scheme: WeightScheme, delta: float) -> int:
    """Smallest ``L`` whose neglected weight tail is at most ``delta / 19``."""
    if not 0.0 < delta < 1.0:
        raise ConfigError(f"delta must lie in (0, 1), got {delta}")
    k = scheme.kind
    if k == "transition":
        return int(scheme.hops)
    if k in ("pagerank", "ppr", "single_target_ppr"):
        return max(0, math.ceil(math.log(delta / _TAIL_DIV) / math.log(1.0 - scheme.alpha)))
    if k == "hkpr":
        return math.ceil(max(2.0 * math.e * scheme.t, math.log2(_TAIL_DIV / delta)))
    if k == "katz":
        if scheme.lambda1 is None:
            raise ConfigError("katz level count needs lambda1 (or pass an explicit L)")
        q = scheme.beta * scheme.lambda1
        return max(0, math.ceil(math.log((1.0 - q) * delta / _TAIL_DIV) / math.log(q)))
    raise ConfigError("custom weights need an explicit level count")


def parse_weight_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise ConfigError(f"cannot parse weight list {text!r}") from None


def scheme_from_options(
    measure: str,
    alpha=None,
    t=None,
    beta=None,
    lambda1=None,
    hops=None,
    weights=None,
    a=None,
    b=None,
) -> WeightScheme:
    measure = measure.replace("-", "_")
    if isinstance(weights, str):
        weights = parse_weight_list(weights)
    # Unused parameters are dropped so the scheme carries only what its kind reads.
    keep = {
        "transition": {"hops": hops},
        "pagerank": {"alpha": alpha},
        "ppr": {"alpha": alpha},
        "single_target_ppr": {"alpha": alpha},
        "hkpr": {"t": t},
        "katz": {"beta": beta, "lambda1": lambda1},
        "custom": {"weights": weights},
    }
    if measure not in keep:
        raise ConfigError(f"unknown measure {measure!r}")
    return WeightScheme(measure, a=a, b=b, **keep[measure])
