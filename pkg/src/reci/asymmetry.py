"""Numerical checks of the small-noise variance-ratio asymmetry.

For a monotone link ``phi`` on [0, 1], cause density ``p_C``, conditional
noise variance ``v(c) = Var[N|c]`` normalized so that its expectation is 1,
and effect ``E = phi(C) + alpha*N``, the ratio of expected conditional
variances converges (as alpha -> 0) to::

    integral_0^1  v(c) * p_C(c) / phi'(c)**2  dc

which is >= 1 whenever phi' and ``v * p_C`` are uncorrelated over the unit
interval, with equality only for linear phi. This module computes the
integral by adaptive quadrature, estimates the finite-noise ratio by Monte
Carlo with nonparametric conditional-variance estimators, and checks the
uncorrelatedness condition and its implied unit-integral identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Literal, Sequence

import numpy as np
from scipy.integrate import quad

from .errors import InsufficientSamples, NonIntegrable
from .simulate import SigmoidMixture, sample_sigmoid_mixture

CondVarEstimator = Literal["binning", "knn"]

MIN_CELL_POINTS = 5
KNN_DEFAULT_K = 50
PHI_PRIME_FLOOR = 1e-9
VALIDATION_TOL = 1e-6


# ---------------------------------------------------------------------------
# compactly supported unit-variance noise samplers


@dataclass(frozen=True)
class NoiseSampler:
    """Unit-variance noise with known support bounds ``[n_minus, n_plus]``."""

    label: str
    n_minus: float
    n_plus: float
    sample: Callable[[np.random.Generator, int], np.ndarray] = field(
        repr=False, compare=False
    )


def uniform_noise() -> NoiseSampler:
    half = float(np.sqrt(3.0))
    return NoiseSampler(
        "uniform", -half, half, lambda rng, n: rng.uniform(-half, half, n)
    )


def beta_noise(a: float = 0.2) -> NoiseSampler:
    """Centered symmetric Beta(a, a) scaled to unit variance.

    Small ``a`` concentrates mass near the endpoints, which keeps the support
    width close to its unit-variance minimum; useful when the support
    rescaling at finite alpha must stay small.
    """
    sd = float(np.sqrt(1.0 / (4.0 * (2.0 * a + 1.0))))
    half = 0.5 / sd
    return NoiseSampler(
        f"beta{a:g}", -half, half, lambda rng, n: (rng.beta(a, a, n) - 0.5) / sd
    )


def gaussian_noise(clip: float = 8.0) -> NoiseSampler:
    """Assumption-violating mode: a clipped standard normal.

    The underlying distribution has unbounded support; clipping at
    ``clip`` standard deviations makes the support technically compact while
    leaving the distribution essentially Gaussian.
    """
    return NoiseSampler(
        f"gaussian-clip{clip:g}",
        -clip,
        clip,
        lambda rng, n: np.clip(rng.standard_normal(n), -clip, clip),
    )


# ---------------------------------------------------------------------------
# closed-form model descriptions


@dataclass(frozen=True)
class SyntheticModel:
    """Closed-form (phi, p_C, conditional-noise-variance) description.

    Invariants (checked on construction unless ``strict=False``): phi maps
    0 to 0 and 1 to 1 with nonnegative derivative, p_c integrates to 1, and
    the expected conditional noise variance is 1.
    """

    phi: Callable[[np.ndarray], np.ndarray]
    phi_prime: Callable[[np.ndarray], np.ndarray]
    p_c: Callable[[np.ndarray], np.ndarray]
    sample_c: Callable[[np.random.Generator, int], np.ndarray] = field(
        repr=False, compare=False
    )
    var_n_given_c: Callable[[np.ndarray], np.ndarray] = None
    alpha: float = 0.01
    label: str = ""
    breakpoints: tuple[float, ...] = ()  # interior quadrature hints
    strict: bool = True

    def __post_init__(self):
        if self.var_n_given_c is None:
            object.__setattr__(self, "var_n_given_c", lambda c: np.ones_like(c))
        if not (self.alpha >= 0.0):
            raise ValueError("alpha must be >= 0")
        if self.strict:
            validate_model(self)


def validate_model(model: SyntheticModel, tol: float = VALIDATION_TOL) -> None:
    """Check endpoint, monotonicity, and normalization invariants."""
    p0 = float(model.phi(np.array([0.0]))[0])
    p1 = float(model.phi(np.array([1.0]))[0])
    if abs(p0) > 1e-9 or abs(p1 - 1.0) > 1e-9:
        raise ValueError(f"phi endpoints are ({p0}, {p1}), need (0, 1)")
    grid = np.linspace(0.0, 1.0, 2001)
    if np.any(model.phi_prime(grid) < 0.0):
        raise ValueError("phi_prime must be nonnegative on [0, 1]")
    mass, _ = quad(lambda c: model.p_c(np.array([c]))[0], 0.0, 1.0,
                   points=list(model.breakpoints) or None, limit=200)
    if abs(mass - 1.0) > tol:
        raise ValueError(f"p_c integrates to {mass}, need 1 within {tol}")
    ev, _ = quad(
        lambda c: float(model.var_n_given_c(np.array([c]))[0] * model.p_c(np.array([c]))[0]),
        0.0, 1.0, points=list(model.breakpoints) or None, limit=200,
    )
    if abs(ev - 1.0) > tol:
        raise ValueError(f"expected conditional variance is {ev}, need 1 within {tol}")


def _uniform_density(c: np.ndarray) -> np.ndarray:
    return np.ones_like(c)


def _uniform_sampler(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.random(n)


def make_model(
    phi: Callable,
    phi_prime: Callable,
    alpha: float = 0.01,
    p_c: Callable | None = None,
    sample_c: Callable | None = None,
    var_n_given_c: Callable | None = None,
    label: str = "",
    breakpoints: Sequence[float] = (),
    strict: bool = True,
) -> SyntheticModel:
    """Model with uniform cause and unit conditional variance by default."""
    return SyntheticModel(
        phi=phi,
        phi_prime=phi_prime,
        p_c=p_c if p_c is not None else _uniform_density,
        sample_c=sample_c if sample_c is not None else _uniform_sampler,
        var_n_given_c=var_n_given_c,
        alpha=alpha,
        label=label,
        breakpoints=tuple(breakpoints),
        strict=strict,
    )


def linear_model(alpha: float = 0.01) -> SyntheticModel:
    return make_model(
        phi=lambda c: c, phi_prime=lambda c: np.ones_like(c), alpha=alpha, label="linear"
    )


def from_sigmoid_mixture(
    mix: SigmoidMixture, alpha: float = 0.01, linear_blend: float = 0.0, label: str = ""
) -> SyntheticModel:
    """Endpoint-normalized mixture link, optionally blended with the identity.

    ``linear_blend > 0`` bounds the derivative away from zero, which the
    quadrature limit needs; the raw mixture (blend 0) is fine for Monte
    Carlo estimates.
    """
    s0 = float(mix(np.array([0.0]))[0])
    s1 = float(mix(np.array([1.0]))[0])
    span = s1 - s0
    if span <= 0.0:
        raise ValueError("mixture is flat on [0, 1]; cannot normalize endpoints")
    lam = float(linear_blend)

    def phi(c, mix=mix, s0=s0, span=span, lam=lam):
        c = np.asarray(c, dtype=float)
        base = (mix(c) - s0) / span
        return (1.0 - lam) * base + lam * c

    def phi_prime(c, mix=mix, span=span, lam=lam):
        c = np.asarray(c, dtype=float)
        return (1.0 - lam) * mix.derivative(c) / span + lam

    return make_model(
        phi=phi,
        phi_prime=phi_prime,
        alpha=alpha,
        label=label or "sigmoid-mixture",
        breakpoints=tuple(sorted(m for m in mix.mu if 0.0 < m < 1.0)),
    )


def random_mixture_models(
    count: int,
    alpha: float = 0.01,
    seed: int = 0,
    n_components: int = 5,
    linear_blend: float = 0.0,
) -> list[SyntheticModel]:
    """Independent random sigmoid-mixture models with constant unit noise variance."""
    rng = np.random.default_rng(seed)
    models = []
    for i in range(count):
        mix = sample_sigmoid_mixture(n_components, rng)
        models.append(
            from_sigmoid_mixture(mix, alpha=alpha, linear_blend=linear_blend,
                                 label=f"mixture-{i:03d}")
        )
    return models


# ---------------------------------------------------------------------------
# quadrature side


def variance_ratio_limit(model: SyntheticModel, epsabs: float = 1e-8) -> float:
    """Small-noise limit of the variance ratio, by adaptive quadrature.

    Raises NonIntegrable when phi' falls below PHI_PRIME_FLOOR anywhere on a
    dense grid, since the integrand then blows up.
    """
    grid = np.linspace(0.0, 1.0, 2001)
    dmin = float(model.phi_prime(grid).min())
    if dmin < PHI_PRIME_FLOOR:
        raise NonIntegrable(f"phi' reaches {dmin:.3e} on the grid; integrand blows up")

    def integrand(c):
        arr = np.array([c])
        d = float(model.phi_prime(arr)[0])
        return float(model.var_n_given_c(arr)[0] * model.p_c(arr)[0]) / (d * d)

    value, _ = quad(
        integrand, 0.0, 1.0, epsabs=epsabs, epsrel=0.0,
        points=list(model.breakpoints) or None, limit=500,
    )
    return float(value)


def independence_covariance(
    model: SyntheticModel, epsabs: float = 1e-10
) -> tuple[float, float]:
    """Covariance of phi' with v*p_C over the unit interval, plus the weighted integral.

    Returns ``(cov, weighted)`` where ``weighted = integral(phi' * v * p_C)``;
    when the covariance vanishes the weighted integral must equal 1.
    """
    pts = list(model.breakpoints) or None

    def vp(c):
        arr = np.array([c])
        return float(model.var_n_given_c(arr)[0] * model.p_c(arr)[0])

    def dphi(c):
        return float(model.phi_prime(np.array([c]))[0])

    weighted, _ = quad(lambda c: dphi(c) * vp(c), 0.0, 1.0,
                       epsabs=epsabs, epsrel=0.0, points=pts, limit=500)
    int_dphi, _ = quad(dphi, 0.0, 1.0, epsabs=epsabs, epsrel=0.0, points=pts, limit=500)
    int_vp, _ = quad(vp, 0.0, 1.0, epsabs=epsabs, epsrel=0.0, points=pts, limit=500)
    return float(weighted - int_dphi * int_vp), float(weighted)


# ---------------------------------------------------------------------------
# Monte Carlo side


def expected_conditional_variance(
    cond: np.ndarray,
    target: np.ndarray,
    estimator: CondVarEstimator = "binning",
    bins: int | None = None,
    k: int = KNN_DEFAULT_K,
) -> float:
    """Nonparametric estimate of E[Var[target | cond]].

    ``binning`` splits the data into ceil(n**(1/3)) equal-count cells along
    the conditioning variable and averages within-cell variances; ``knn``
    averages the variance over a sliding window of k+1 rank-neighbors.
    """
    cond = np.asarray(cond, dtype=float)
    target = np.asarray(target, dtype=float)
    n = len(cond)
    if len(target) != n:
        raise ValueError("cond and target must be aligned")
    order = np.argsort(cond, kind="stable")
    sorted_target = target[order]
    if estimator == "binning":
        n_bins = bins if bins is not None else int(np.ceil(n ** (1.0 / 3.0)))
        total = 0.0
        count = 0
        for cell in np.array_split(sorted_target, n_bins):
            if len(cell) < MIN_CELL_POINTS:
                raise InsufficientSamples(
                    f"a conditioning cell holds {len(cell)} < {MIN_CELL_POINTS} points"
                )
            total += len(cell) * float(np.var(cell, ddof=1))
            count += len(cell)
        return total / count
    if estimator == "knn":
        window = k + 1
        if n < window:
            raise InsufficientSamples(f"need at least {window} samples for k={k}")
        views = np.lib.stride_tricks.sliding_window_view(sorted_target, window)
        return float(views.var(axis=1, ddof=1).mean())
    raise ValueError(f"unknown estimator {estimator!r}")


def rescaled_effect(
    e: np.ndarray, alpha: float, noise: NoiseSampler
) -> np.ndarray:
    """Shift and rescale the effect so its support is [0, 1] like the cause."""
    return (e - alpha * noise.n_minus) / (
        1.0 + alpha * noise.n_plus - alpha * noise.n_minus
    )


def mc_variance_ratio(
    model: SyntheticModel,
    noise: NoiseSampler,
    n_samples: int,
    estimator: CondVarEstimator = "binning",
    seed: int = 0,
) -> float:
    """Monte Carlo estimate of E[Var[C|E~]] / E[Var[E~|C]] at model.alpha.

    ``E~`` is the effect shifted and rescaled back onto [0, 1]. Deterministic
    given the seed.
    """
    if not (model.alpha > 0.0):
        raise ValueError("model.alpha must be > 0 for the Monte Carlo ratio")
    rng = np.random.default_rng(seed)
    c = model.sample_c(rng, n_samples)
    base = noise.sample(rng, n_samples)
    scale_c = np.sqrt(model.var_n_given_c(c))
    e = model.phi(c) + model.alpha * scale_c * base
    e_tilde = rescaled_effect(e, model.alpha, noise)
    num = expected_conditional_variance(e_tilde, c, estimator)
    den = expected_conditional_variance(c, e_tilde, estimator)
    return num / den


# ---------------------------------------------------------------------------
# campaign driver


@dataclass(frozen=True)
class RatioCheck:
    """One (model, alpha) Monte Carlo ratio next to its quadrature limit."""

    model: str
    alpha: float
    mc_ratio: float
    limit: float | None
    covariance: float
    weighted_integral: float

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "alpha": self.alpha,
            "mc_ratio": self.mc_ratio,
            "limit": self.limit,
            "covariance": self.covariance,
            "weighted_integral": self.weighted_integral,
        }


@dataclass(frozen=True)
class TheoremReport:
    rows: tuple[RatioCheck, ...]
    violations: tuple[str, ...]
    tol: float

    def to_dict(self) -> dict:
        return {
            "tol": self.tol,
            "violations": list(self.violations),
            "rows": [r.to_dict() for r in self.rows],
        }


def verify_theorem(
    models: Sequence[SyntheticModel],
    alphas: Sequence[float],
    noise: NoiseSampler | None = None,
    n_samples: int = 200_000,
    estimator: CondVarEstimator = "binning",
    seed: int = 0,
    tol: float = 0.02,
    covariance_tol: float = 1e-6,
) -> TheoremReport:
    """Monte Carlo campaign over models and noise levels.

    Every model must satisfy the uncorrelatedness precondition
    (|covariance| < covariance_tol). A model is flagged when its ratio at
    the smallest alpha falls below ``1 - tol``.
    """
    noise = noise if noise is not None else beta_noise()
    rows: list[RatioCheck] = []
    violations: list[str] = []
    alphas = sorted(alphas, reverse=True)
    for mi, model in enumerate(models):
        cov, weighted = independence_covariance(model)
        if abs(cov) >= covariance_tol:
            raise ValueError(
                f"model {model.label or mi} violates the uncorrelatedness "
                f"precondition: cov = {cov:.3e}"
            )
        try:
            limit = variance_ratio_limit(model)
        except NonIntegrable:
            limit = None
        name = model.label or f"model-{mi:03d}"
        for ai, alpha in enumerate(alphas):
            run = replace(model, alpha=alpha, strict=False)
            ratio = mc_variance_ratio(
                run, noise, n_samples, estimator,
                seed=int(np.random.SeedSequence((seed, mi, ai)).generate_state(1)[0]),
            )
            rows.append(RatioCheck(name, alpha, ratio, limit, cov, weighted))
        smallest = rows[-1]
        if smallest.mc_ratio < 1.0 - tol:
            violations.append(
                f"{name}: ratio {smallest.mc_ratio:.4f} < {1.0 - tol} at alpha={smallest.alpha}"
            )
    return TheoremReport(tuple(rows), tuple(violations), tol)
