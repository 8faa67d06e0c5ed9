"""Scaling to a common range and removal of isolated low-density points.

Scaling conventions are pinned so results are bit-stable:

* ``normalize`` maps min to 0 and max to 1.
* ``standardize`` subtracts the sample mean and divides by the sample
  standard deviation with the ``1/(n-1)`` variance convention.

Low-density filtering estimates a 2-D Gaussian-kernel density on normalized
coordinates and drops rows whose density falls below a fraction of the
maximum estimated density.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import DegenerateRange, TooFewPointsRemain
from .pairs import CauseEffectPair

MIN_SURVIVORS = 10


class ScalingKind(Enum):
    NORMALIZE = "normalize"
    STANDARDIZE = "standardize"


def normalize(v: np.ndarray) -> np.ndarray:
    """Affine map of ``v`` onto [0, 1]; min maps to 0 and max to 1."""
    v = np.asarray(v, dtype=float)
    if len(v) < 2:
        raise ValueError("need at least 2 values")
    lo, hi = float(v.min()), float(v.max())
    if hi == lo:
        raise DegenerateRange("max equals min; cannot normalize")
    return (v - lo) / (hi - lo)


def standardize(v: np.ndarray) -> np.ndarray:
    """Center to sample mean 0 and scale to sample variance 1 (1/(n-1) convention)."""
    v = np.asarray(v, dtype=float)
    if len(v) < 2:
        raise ValueError("need at least 2 values")
    sd = float(v.std(ddof=1))
    if sd == 0.0:
        raise DegenerateRange("zero variance; cannot standardize")
    return (v - v.mean()) / sd


def scale(v: np.ndarray, kind: ScalingKind) -> np.ndarray:
    if kind is ScalingKind.NORMALIZE:
        return normalize(v)
    return standardize(v)


@dataclass(frozen=True)
class BandwidthRule:
    """Kernel bandwidth choice: Silverman's per-axis rule, or a fixed value."""

    kind: str = "silverman"  # "silverman" | "fixed"
    h: float | None = None

    @classmethod
    def silverman(cls) -> "BandwidthRule":
        return cls("silverman", None)

    @classmethod
    def fixed(cls, h: float) -> "BandwidthRule":
        if not (h > 0):
            raise ValueError("fixed bandwidth must be > 0")
        return cls("fixed", h)

    def per_axis(self, values: np.ndarray) -> float:
        if self.kind == "fixed":
            return float(self.h)
        n = len(values)
        sd = float(values.std(ddof=1))
        if sd == 0.0:
            raise DegenerateRange("zero variance; Silverman bandwidth undefined")
        # Silverman's rule in two dimensions: h_j = sigma_j * n^(-1/6).
        return sd * n ** (-1.0 / 6.0)


def kde_density_2d(
    x: np.ndarray, y: np.ndarray, hx: float, hy: float, block: int = 512
) -> np.ndarray:
    """Gaussian product-kernel density of each (x_i, y_i) under all samples.

    Evaluated in row blocks to bound memory on large inputs.
    """
    n = len(x)
    out = np.empty(n)
    norm = 1.0 / (n * 2.0 * np.pi * hx * hy)
    for start in range(0, n, block):
        stop = min(start + block, n)
        dx = (x[start:stop, None] - x[None, :]) / hx
        dy = (y[start:stop, None] - y[None, :]) / hy
        out[start:stop] = np.exp(-0.5 * (dx * dx + dy * dy)).sum(axis=1)
    return out * norm


def remove_low_density(
    pair: CauseEffectPair,
    threshold: float = 0.1,
    bandwidth: BandwidthRule = BandwidthRule.silverman(),
) -> CauseEffectPair:
    """Drop rows whose estimated 2-D density falls below ``threshold * max``.

    Density is estimated on normalized coordinates so the result is unit
    free. Inputs with at most MIN_SURVIVORS rows pass through unchanged;
    otherwise at least MIN_SURVIVORS rows must survive or
    TooFewPointsRemain is raised.
    """
    if not (0.0 < threshold < 1.0):
        raise ValueError("threshold must lie in (0, 1)")
    if len(pair) <= MIN_SURVIVORS:
        return pair
    xs = normalize(pair.x)
    ys = normalize(pair.y)
    hx = bandwidth.per_axis(xs)
    hy = bandwidth.per_axis(ys)
    density = kde_density_2d(xs, ys, hx, hy)
    keep = density >= threshold * density.max()
    if keep.sum() < MIN_SURVIVORS:
        raise TooFewPointsRemain(
            f"{int(keep.sum())} of {len(pair)} rows survive; need >= {MIN_SURVIVORS}"
        )
    return replace(pair, x=pair.x[keep], y=pair.y[keep])
