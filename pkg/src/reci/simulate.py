"""Synthetic cause-effect pairs with strongly dependent cause and noise.

Both the cause and the noise are built from the same two hidden sources, so
the usual independent-noise assumption is deliberately violated::

    w1, w2 ~ U(0, 1)
    S1, S2 ~ p_S   (centered by their analytic means)
    C' = w1*f1(S1) + (1 - w1)*f2(S2)
    N' = w2*f3(S1) + (1 - w2)*f4(S2)
    C  = normalize(C')
    N  = alpha * standardize(N')
    E  = phi(C) + N

The source distributions, the mixing functions f1..f4 (identity, exp, or a
random increasing sigmoid mixture), and the link phi are drawn per pair.
Three pair families differ only in phi: identity (``linear``), a random
increasing sigmoid mixture (``invertible``), and squared / quartic / sine
shapes on a rescaled domain (``noninvertible``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.special import ndtr

from .errors import DegenerateRange
from .pairs import CauseEffectPair, Direction, save_pair
from .preprocess import normalize, standardize

SIGMA_MIN = 1e-3  # lower sigma bound keeps mixture components continuous
GAUSS_SIGMA_RANGE = (0.1, 1.0)
MAX_REDRAWS = 10

KINDS = ("linear", "invertible", "noninvertible")
DEFAULT_ALPHA_STEP = {"linear": 0.1, "invertible": 0.025, "noninvertible": 0.1}
DEFAULT_PAIRS_PER_ALPHA = 100


# ---------------------------------------------------------------------------
# source distributions


@dataclass(frozen=True)
class Uniform01:
    label: str = "uniform01"
    mean: float = 0.5

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.random(n)


@dataclass(frozen=True)
class Gauss:
    mu: float
    sigma: float
    label: str = "gauss"

    @property
    def mean(self) -> float:
        return self.mu

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.normal(self.mu, self.sigma, n)


@dataclass(frozen=True)
class GaussMixture:
    """Equal-weight two-component mixture with fixed means 0.3/0.7 and sd 0.1."""

    means: tuple[float, float] = (0.3, 0.7)
    sigmas: tuple[float, float] = (0.1, 0.1)
    label: str = "gauss-mixture"

    @property
    def mean(self) -> float:
        return 0.5 * (self.means[0] + self.means[1])

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        comp = rng.integers(0, 2, n)
        mus = np.where(comp == 0, self.means[0], self.means[1])
        sds = np.where(comp == 0, self.sigmas[0], self.sigmas[1])
        return rng.normal(mus, sds)


SourceDist = Uniform01 | Gauss | GaussMixture


def draw_source(rng: np.random.Generator) -> SourceDist:
    """Draw one source distribution; Gaussian rows get sigma ~ U(0.1, 1)."""
    row = int(rng.integers(0, 5))
    if row == 0:
        return Uniform01()
    if row == 4:
        return GaussMixture()
    sigma = float(rng.uniform(*GAUSS_SIGMA_RANGE))
    mu = {1: 0.0, 2: 0.5, 3: 1.0}[row]
    return Gauss(mu, sigma)


def describe_source(src: SourceDist) -> dict:
    if isinstance(src, Gauss):
        return {"dist": "gauss", "mu": src.mu, "sigma": src.sigma}
    if isinstance(src, GaussMixture):
        return {"dist": "gauss-mixture", "means": list(src.means), "sigmas": list(src.sigmas)}
    return {"dist": "uniform01"}


# ---------------------------------------------------------------------------
# increasing sigmoid mixtures


@dataclass(frozen=True)
class SigmoidMixture:
    """Convex-style combination of Gaussian CDFs; non-decreasing everywhere."""

    beta: tuple[float, ...]
    mu: tuple[float, ...]
    sigma: tuple[float, ...]

    def __post_init__(self):
        if not len(self.beta) == len(self.mu) == len(self.sigma):
            raise ValueError("beta, mu, sigma must have equal length")
        if any(b < 0 for b in self.beta) or any(s <= 0 for s in self.sigma):
            raise ValueError("beta must be >= 0 and sigma > 0")

    def __call__(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        acc = np.zeros_like(v)
        for b, m, s in zip(self.beta, self.mu, self.sigma):
            acc += b * ndtr((v - m) / s)
        return acc

    def derivative(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        acc = np.zeros_like(v)
        for b, m, s in zip(self.beta, self.mu, self.sigma):
            z = (v - m) / s
            acc += b * np.exp(-0.5 * z * z) / (s * np.sqrt(2.0 * np.pi))
        return acc

    def to_dict(self) -> dict:
        return {"beta": list(self.beta), "mu": list(self.mu), "sigma": list(self.sigma)}


def sample_sigmoid_mixture(
    n: int, rng: np.random.Generator | int
) -> SigmoidMixture:
    """Draw mixture parameters uniformly: beta, mu in [0,1], sigma in [SIGMA_MIN, 0.1]."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    return SigmoidMixture(
        beta=tuple(rng.uniform(0.0, 1.0, n)),
        mu=tuple(rng.uniform(0.0, 1.0, n)),
        sigma=tuple(rng.uniform(SIGMA_MIN, 0.1, n)),
    )


def rescale_interval(v: np.ndarray, a: float, b: float) -> np.ndarray:
    """Affine map sending min(v) to a and max(v) to b."""
    v = np.asarray(v, dtype=float)
    lo, hi = float(v.min()), float(v.max())
    if hi == lo:
        raise DegenerateRange("max equals min; cannot rescale")
    return a + (v - lo) * (b - a) / (hi - lo)


# ---------------------------------------------------------------------------
# pair generation


class Shape(Enum):
    SQUARE = "square"
    QUARTIC = "quartic"
    SINE = "sine"


@dataclass(frozen=True)
class GenConfig:
    kind: str
    alpha: float
    n_samples: int
    seed: int
    shape: Shape | None = None  # noninvertible only; None draws one per pair

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if not (0.0 <= self.alpha <= 1.0):
            raise ValueError("alpha must lie in [0, 1]")
        if self.n_samples < 10:
            raise ValueError("n_samples must be >= 10")


@dataclass(frozen=True)
class GenRecord:
    """The realized draw behind one generated pair (for manifests and tests)."""

    kind: str
    alpha: float
    n_samples: int
    seed: int
    w1: float
    w2: float
    source1: dict
    source2: dict
    mix_funcs: tuple[dict, dict, dict, dict]
    phi_desc: dict
    attempts: int
    phi: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "alpha": self.alpha,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "w1": self.w1,
            "w2": self.w2,
            "source1": self.source1,
            "source2": self.source2,
            "mix_funcs": list(self.mix_funcs),
            "phi": self.phi_desc,
            "attempts": self.attempts,
        }


def _draw_mix_func(rng: np.random.Generator) -> tuple[str, Callable, dict]:
    k = int(rng.integers(0, 3))
    if k == 0:
        return "identity", (lambda v: v), {"f": "identity"}
    if k == 1:
        return "exp", np.exp, {"f": "exp"}
    mix = sample_sigmoid_mixture(5, rng)
    return "sigmoid-mixture", mix, {"f": "sigmoid-mixture", **mix.to_dict()}


def _draw_phi(
    cfg: GenConfig, rng: np.random.Generator
) -> tuple[Callable[[np.ndarray], np.ndarray], dict]:
    if cfg.kind == "linear":
        return (lambda c: c), {"form": "identity"}
    if cfg.kind == "invertible":
        mix = sample_sigmoid_mixture(5, rng)
        return mix, {"form": "sigmoid-mixture", **mix.to_dict()}
    shape = cfg.shape if cfg.shape is not None else list(Shape)[int(rng.integers(0, 3))]
    if shape is Shape.SQUARE:
        return (lambda c: rescale_interval(c, -2.0, 2.0) ** 2), {"form": "square"}
    if shape is Shape.QUARTIC:
        return (lambda c: rescale_interval(c, -2.0, 2.0) ** 4), {"form": "quartic"}
    return (
        lambda c: np.sin(rescale_interval(c, -2.0 * np.pi, 2.0 * np.pi))
    ), {"form": "sine"}


def generate_pair(cfg: GenConfig) -> tuple[CauseEffectPair, GenRecord]:
    """Generate one labeled pair plus the realized model description.

    Deterministic given cfg. Degenerate draws (constant cause or noise) are
    re-drawn up to MAX_REDRAWS times before DegenerateRange is raised.
    """
    rng = np.random.default_rng(cfg.seed)
    last_error: Exception | None = None
    for attempt in range(1, MAX_REDRAWS + 1):
        w1 = float(rng.uniform())
        w2 = float(rng.uniform())
        src1 = draw_source(rng)
        src2 = draw_source(rng)
        s1 = src1.sample(rng, cfg.n_samples) - src1.mean
        s2 = src2.sample(rng, cfg.n_samples) - src2.mean
        funcs = tuple(_draw_mix_func(rng) for _ in range(4))
        (f1, f2, f3, f4) = (f for _, f, _ in funcs)
        c_raw = w1 * f1(s1) + (1.0 - w1) * f2(s2)
        n_raw = w2 * f3(s1) + (1.0 - w2) * f4(s2)
        phi, phi_desc = _draw_phi(cfg, rng)
        try:
            c = normalize(c_raw)
            noise = (
                cfg.alpha * standardize(n_raw)
                if cfg.alpha > 0.0
                else np.zeros(cfg.n_samples)
            )
            e = phi(c) + noise
            if float(e.max()) == float(e.min()):
                raise DegenerateRange("constant effect")
        except DegenerateRange as err:
            last_error = err
            continue
        pair = CauseEffectPair(
            id=f"{cfg.kind}-a{cfg.alpha:g}-s{cfg.seed}",
            x=c,
            y=e,
            truth=Direction.X_TO_Y,
        )
        record = GenRecord(
            kind=cfg.kind,
            alpha=cfg.alpha,
            n_samples=cfg.n_samples,
            seed=cfg.seed,
            w1=w1,
            w2=w2,
            source1=describe_source(src1),
            source2=describe_source(src2),
            mix_funcs=tuple(d for _, _, d in funcs),
            phi_desc=phi_desc,
            attempts=attempt,
            phi=phi,
        )
        return pair, record
    raise DegenerateRange(f"no valid draw in {MAX_REDRAWS} attempts: {last_error}")


def default_alpha_grid(kind: str) -> list[float]:
    step = DEFAULT_ALPHA_STEP[kind]
    count = int(round(1.0 / step)) + 1
    return [round(i * step, 10) for i in range(count)]


def generate_corpus(
    kind: str,
    alphas: list[float],
    pairs_per_alpha: int,
    n_samples: int,
    seed: int,
    out_dir: str | Path,
) -> dict:
    """Write pair files plus a manifest.json; returns the manifest dict.

    Every pair gets a seed derived from (seed, alpha index, pair index), so
    the corpus is reproducible from the manifest alone.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for ai, alpha in enumerate(alphas):
        for j in range(pairs_per_alpha):
            pair_seed = int(
                np.random.SeedSequence((int(seed) & 0xFFFFFFFF, ai, j)).generate_state(1)[0]
            )
            cfg = GenConfig(kind=kind, alpha=alpha, n_samples=n_samples, seed=pair_seed)
            pair, record = generate_pair(cfg)
            pair_id = f"{kind}-a{alpha:0.3f}-{j:04d}"
            file_name = f"{pair_id}.txt"
            save_pair(pair, out_dir / file_name)
            entries.append(
                {
                    "id": pair_id,
                    "file": file_name,
                    "alpha": alpha,
                    "truth": Direction.X_TO_Y.value,
                    "weight": 1.0,
                    "model": record.to_dict(),
                }
            )
    manifest = {
        "kind": kind,
        "seed": seed,
        "n_samples": n_samples,
        "pairs_per_alpha": pairs_per_alpha,
        "alphas": list(alphas),
        "pairs": entries,
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return manifest


def load_manifest_corpus(directory: str | Path) -> tuple[list[CauseEffectPair], dict]:
    """Load a generated corpus back: pairs (with truth and weight) and the manifest."""
    directory = Path(directory)
    with open(directory / "manifest.json", "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    pairs = []
    from .pairs import load_pair  # local import avoids a cycle at module load

    for entry in manifest["pairs"]:
        loaded = load_pair(directory / entry["file"])
        truth = Direction(entry["truth"])
        pairs.append(
            CauseEffectPair(
                id=entry["id"],
                x=loaded.x,
                y=loaded.y,
                weight=float(entry.get("weight", 1.0)),
                truth=truth,
            )
        )
    return pairs, manifest
