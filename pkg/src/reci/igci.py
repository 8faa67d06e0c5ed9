"""Information-geometric baseline for deterministic-ish monotone relations.

Scores both orientations after mapping the variables to a reference scale
(uniform reference -> min/max normalization, Gaussian reference ->
standardization) and picks the orientation with the smaller score:

* slope estimator: mean of log |dy/dx| over consecutive points sorted by x
  (and symmetrically for the other orientation);
* entropy estimator: nearest-neighbor spacing entropies of the scaled
  marginals; the orientation whose *output* variable has the smaller
  entropy wins.

Returned decisions reuse the shared Decision type: the two error fields
carry ``exp(score)`` for each orientation, so ranking and confidence work
exactly like the regression-error path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import psi

from .errors import DegenerateSpacing
from .pairs import CauseEffectPair, Decision, Direction
from .preprocess import ScalingKind, scale

TIE_TOL = 1e-9
SCORE_CLIP = 500.0  # keeps exp(score) finite


@dataclass(frozen=True)
class IgciConfig:
    reference: str = "uniform"  # "uniform" | "gaussian"
    estimator: str = "slope"  # "slope" | "entropy"

    def __post_init__(self):
        if self.reference not in ("uniform", "gaussian"):
            raise ValueError("reference must be 'uniform' or 'gaussian'")
        if self.estimator not in ("slope", "entropy"):
            raise ValueError("estimator must be 'slope' or 'entropy'")


def _check_spacing(sorted_values: np.ndarray) -> None:
    diffs = np.diff(sorted_values)
    if len(diffs) and np.mean(diffs == 0.0) > 0.5:
        raise DegenerateSpacing(
            f"{np.mean(diffs == 0.0):.0%} of consecutive differences are zero"
        )


def _collapse_duplicates(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Sort by x and average y over tied x values."""
    order = np.argsort(x, kind="stable")
    xs, ys = x[order], y[order]
    ux, start = np.unique(xs, return_index=True)
    if len(ux) == len(xs):
        return xs, ys
    sums = np.add.reduceat(ys, start)
    counts = np.diff(np.append(start, len(ys)))
    return ux, sums / counts


def slope_score(x: np.ndarray, y: np.ndarray) -> float:
    """Mean log absolute slope over consecutive x-sorted points.

    Duplicate x values are collapsed by averaging their partners first; pairs
    with zero y difference are skipped.
    """
    xs = np.sort(x)
    _check_spacing(xs)
    ux, uy = _collapse_duplicates(x, y)
    dx = np.diff(ux)
    dy = np.diff(uy)
    valid = dy != 0.0
    if not valid.any():
        raise DegenerateSpacing("no nonzero slopes between consecutive points")
    return float(np.mean(np.log(np.abs(dy[valid] / dx[valid]))))


def spacing_entropy(v: np.ndarray) -> float:
    """Nearest-neighbor spacing entropy estimate of a scalar sample."""
    sv = np.sort(v)
    _check_spacing(sv)
    diffs = np.diff(sv)
    nz = diffs[diffs > 0.0]
    if len(nz) == 0:
        raise DegenerateSpacing("all consecutive values are tied")
    n = len(v)
    return float(np.sum(np.log(nz)) / (n - 1) + psi(n) - psi(1))


def igci_decide(pair: CauseEffectPair, cfg: IgciConfig = IgciConfig()) -> Decision:
    """Decide the orientation of a pair from slope or entropy asymmetry.

    Needs at least 20 samples. Scores within TIE_TOL of each other give no
    decision. The Decision's error fields hold exp(score) per orientation.
    """
    if len(pair) < 20:
        raise ValueError("need at least 20 samples")
    kind = (
        ScalingKind.NORMALIZE if cfg.reference == "uniform" else ScalingKind.STANDARDIZE
    )
    xs = scale(pair.x, kind)
    ys = scale(pair.y, kind)
    if cfg.estimator == "slope":
        score_xy = slope_score(xs, ys)
        score_yx = slope_score(ys, xs)
    else:
        # orientation score is the entropy of its output variable
        score_xy = spacing_entropy(ys)
        score_yx = spacing_entropy(xs)
    value_xy = float(np.exp(np.clip(score_xy, -SCORE_CLIP, SCORE_CLIP)))
    value_yx = float(np.exp(np.clip(score_yx, -SCORE_CLIP, SCORE_CLIP)))
    if abs(score_xy - score_yx) <= TIE_TOL:
        return Decision(None, value_xy, value_yx, 0.0)
    direction = Direction.X_TO_Y if score_xy < score_yx else Direction.Y_TO_X
    conf = 1.0 - min(value_xy, value_yx) / max(value_xy, value_yx)
    return Decision(direction, value_xy, value_yx, conf)
