"""Direction decisions from the asymmetry of regression errors.

The decision rule: scale both variables to a common range, fit the same
regression class in both directions on a shared train split, compare the
test mean squared errors, and pick the direction with the smaller error.
The error ratio ``1 - min/max`` serves as a confidence score; a threshold
turns it into a rejection criterion (threshold 0 keeps every decision).

Multiple seeded runs can be aggregated either by averaging the per-direction
errors before the single final comparison, or by a per-run majority vote.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import BothZero
from .pairs import CauseEffectPair, Decision, Direction
from .preprocess import ScalingKind, scale
from .regress import ModelSpec, SplitConfig, fit, mse, split


class Aggregation(Enum):
    AVERAGED_MSE = "averaged-mse"
    PER_RUN = "per-run"


@dataclass(frozen=True)
class InferenceConfig:
    """Everything a decision depends on besides the data itself."""

    spec: ModelSpec
    scaling: ScalingKind = ScalingKind.NORMALIZE
    split: SplitConfig = SplitConfig()
    runs: int = 1
    aggregation: Aggregation = Aggregation.AVERAGED_MSE
    threshold: float = 0.0

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if not (0.0 <= self.threshold <= 1.0):
            raise ValueError("threshold must lie in [0, 1]")


def confidence(mse_a: float, mse_b: float) -> float:
    """Error-ratio confidence ``1 - min/max`` in [0, 1]; equal errors give 0."""
    if not (mse_a >= 0.0 and mse_b >= 0.0):
        raise ValueError("errors must be >= 0")
    hi = max(mse_a, mse_b)
    if hi == 0.0:
        raise BothZero("both errors are exactly zero")
    return 1.0 - min(mse_a, mse_b) / hi


def derive_run_seed(master_seed: int, run_index: int) -> int:
    """Stable per-run seed fan-out from a master seed.

    Uses numpy's SeedSequence hashing, which is documented as stable across
    platforms and releases; run 0 is what single-shot decisions use.
    """
    ss = np.random.SeedSequence((int(master_seed) & 0xFFFFFFFF, int(run_index)))
    return int(ss.generate_state(1)[0])


def decide_from_errors(
    mse_y_given_x: float, mse_x_given_y: float, threshold: float = 0.0
) -> Decision:
    """Build a Decision from the two directional errors and a threshold.

    Exactly equal errors (including both zero) give no decision with
    confidence 0; otherwise the smaller-error direction is returned when the
    confidence reaches the threshold, and no decision below it.
    """
    myx = float(mse_y_given_x)
    mxy = float(mse_x_given_y)
    if myx == mxy:
        return Decision(None, myx, mxy, 0.0)
    xi = confidence(myx, mxy)
    if xi < threshold:
        return Decision(None, myx, mxy, xi)
    direction = Direction.X_TO_Y if myx < mxy else Direction.Y_TO_X
    return Decision(direction, myx, mxy, xi)


def directional_mses(
    pair: CauseEffectPair, cfg: InferenceConfig, run_seed: int
) -> tuple[float, float]:
    """Test MSEs of fitting cfg.spec in both directions on a shared split."""
    if len(pair) < 4:
        raise ValueError("need at least 4 samples")
    xs = scale(pair.x, cfg.scaling)
    ys = scale(pair.y, cfg.scaling)
    train, test = split(len(pair), SplitConfig(cfg.split.train_fraction, run_seed))
    forward = fit(cfg.spec, xs[train], ys[train], seed=run_seed)
    backward = fit(cfg.spec, ys[train], xs[train], seed=run_seed)
    return (
        mse(forward, xs[test], ys[test]),
        mse(backward, ys[test], xs[test]),
    )


def reci_decide(pair: CauseEffectPair, cfg: InferenceConfig) -> Decision:
    """Single-run decision with no rejection: smaller test MSE wins."""
    return reci_decide_threshold(pair, replace(cfg, threshold=0.0))


def reci_decide_threshold(pair: CauseEffectPair, cfg: InferenceConfig) -> Decision:
    """Single-run decision; rejects when confidence falls below cfg.threshold."""
    run_seed = derive_run_seed(cfg.split.seed, 0)
    myx, mxy = directional_mses(pair, cfg, run_seed)
    return decide_from_errors(myx, mxy, cfg.threshold)


def reci_aggregate(pair: CauseEffectPair, cfg: InferenceConfig) -> Decision:
    """Aggregate cfg.runs seeded runs into one decision.

    AVERAGED_MSE averages the per-direction errors across runs and applies
    the threshold comparison once. PER_RUN decides each run independently
    and returns the majority direction (vote ties give no decision); the
    returned errors and confidence are still the across-run averages.
    """
    seeds = [derive_run_seed(cfg.split.seed, i) for i in range(cfg.runs)]
    results = [directional_mses(pair, cfg, s) for s in seeds]
    sum_yx = 0.0
    sum_xy = 0.0
    for myx, mxy in results:  # fixed index order keeps the sum bit-stable
        sum_yx += myx
        sum_xy += mxy
    avg_yx = sum_yx / cfg.runs
    avg_xy = sum_xy / cfg.runs

    if cfg.aggregation is Aggregation.AVERAGED_MSE:
        return decide_from_errors(avg_yx, avg_xy, cfg.threshold)

    votes = [decide_from_errors(myx, mxy, cfg.threshold).direction for myx, mxy in results]
    n_xy = sum(1 for v in votes if v is Direction.X_TO_Y)
    n_yx = sum(1 for v in votes if v is Direction.Y_TO_X)
    if n_xy == n_yx:
        direction = None
    else:
        direction = Direction.X_TO_Y if n_xy > n_yx else Direction.Y_TO_X
    if avg_yx == avg_xy:
        return Decision(direction, avg_yx, avg_xy, 0.0)
    return Decision(direction, avg_yx, avg_xy, confidence(avg_yx, avg_xy))
