"""Least-squares regression classes and train/test splitting.

All model classes predict a scalar from a scalar and are fitted by
minimizing mean squared residuals on data that has already been scaled to a
common range:

* ``Poly(k)``   polynomial of degree k, solved by orthogonal-decomposition
  least squares.
* ``Mon(n)``    shifted monomial ``a*x**n + b`` (linear in a, b).
* ``Log``       logistic ``a + (b - a) / (1 + exp(c*(d - x)))``, fitted by
  Levenberg-Marquardt with deterministic multi-starts.
* ``Nn(layers)``  small fully connected network, tanh hidden units, linear
  output, trained full batch with Adam steps and a monotonicity safeguard.
* ``Svr``       linear model under epsilon-insensitive loss with an L2
  penalty, solved by deterministic subgradient descent.

Fits are deterministic given (spec, data, seed). Iterative fits never fail
on slow convergence: they return the best parameters found and set
``converged=False`` (with a NonConvergenceWarning), because the caller
always needs an error value in both directions.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

from .errors import NonConvergenceWarning, SingularSystem

TRAIN_FRACTIONS = (0.3, 0.5, 0.7)
DEFAULT_NN_LAYERS = ((2,), (5,), (10,), (20,), (2, 4), (4, 8))
NN_EPOCHS = 2000
NN_LEARNING_RATE = 0.01
SVR_ITERATIONS = 5000
LOG_MAX_ITER = 200
LOG_SLOPE_STARTS = (1.0, -1.0, 5.0, -5.0)


@dataclass(frozen=True)
class Log:
    pass


@dataclass(frozen=True)
class Mon:
    exponent: int

    def __post_init__(self):
        if not 2 <= self.exponent <= 9:
            raise ValueError("monomial exponent must lie in [2, 9]")


@dataclass(frozen=True)
class Poly:
    degree: int

    def __post_init__(self):
        if not 1 <= self.degree <= 9:
            raise ValueError("polynomial degree must lie in [1, 9]")


@dataclass(frozen=True)
class Svr:
    pass


@dataclass(frozen=True)
class Nn:
    layers: tuple[int, ...]

    def __post_init__(self):
        if not 1 <= len(self.layers) <= 2 or any(h < 1 for h in self.layers):
            raise ValueError("layers must be 1 or 2 positive hidden widths")
        object.__setattr__(self, "layers", tuple(int(h) for h in self.layers))


ModelSpec = Union[Log, Mon, Poly, Svr, Nn]


def spec_name(spec: ModelSpec) -> str:
    if isinstance(spec, Log):
        return "log"
    if isinstance(spec, Mon):
        return f"mon{spec.exponent}"
    if isinstance(spec, Poly):
        return f"poly{spec.degree}"
    if isinstance(spec, Svr):
        return "svr"
    return "nn" + "-".join(str(h) for h in spec.layers)


def parse_model_spec(text: str) -> ModelSpec:
    """Parse a spec name such as ``log``, ``mon2``, ``poly3``, ``svr``, ``nn4-8``."""
    t = text.strip().lower()
    if t == "log":
        return Log()
    if t == "svr":
        return Svr()
    if t.startswith("mon"):
        return Mon(int(t[3:]))
    if t.startswith("poly"):
        return Poly(int(t[4:]))
    if t.startswith("nn"):
        return Nn(tuple(int(p) for p in t[2:].split("-")))
    raise ValueError(f"unknown model spec {text!r}")


def param_count(spec: ModelSpec) -> int:
    if isinstance(spec, Log):
        return 4
    if isinstance(spec, Mon):
        return 2
    if isinstance(spec, Poly):
        return spec.degree + 1
    if isinstance(spec, Svr):
        return 2
    sizes = (1,) + spec.layers + (1,)
    return sum((sizes[i] + 1) * sizes[i + 1] for i in range(len(sizes) - 1))


@dataclass
class FittedModel:
    """A fitted predictor: a spec, its parameter vector, and a callable map."""

    spec: ModelSpec
    params: np.ndarray
    predict: Callable[[np.ndarray], np.ndarray]
    converged: bool = True
    loss_history: np.ndarray | None = field(default=None, repr=False)


def mse(model: FittedModel, x: np.ndarray, y: np.ndarray) -> float:
    """Mean squared prediction error of ``model`` on (x, y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y) or len(x) < 1:
        raise ValueError("x and y must be non-empty and aligned")
    r = y - model.predict(x)
    return float(np.mean(r * r))


@dataclass(frozen=True)
class SplitConfig:
    """Train fraction (one of 0.3 / 0.5 / 0.7) and the split seed."""

    train_fraction: float = 0.7
    seed: int = 0

    def __post_init__(self):
        if not any(abs(self.train_fraction - f) < 1e-12 for f in TRAIN_FRACTIONS):
            raise ValueError(f"train_fraction must be one of {TRAIN_FRACTIONS}")


def split(pair_len: int, cfg: SplitConfig) -> tuple[np.ndarray, np.ndarray]:
    """Disjoint covering train/test index split, deterministic given the seed."""
    if pair_len < 4:
        raise ValueError("need at least 4 samples to split")
    rng = np.random.default_rng(cfg.seed)
    perm = rng.permutation(pair_len)
    n_train = round(cfg.train_fraction * pair_len)
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


# ---------------------------------------------------------------------------
# linear-in-parameters fits (Poly, Mon)


def _fit_linear_basis(design: np.ndarray, y: np.ndarray) -> np.ndarray:
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < design.shape[1]:
        raise SingularSystem(
            f"design matrix rank {rank} < {design.shape[1]} parameters"
        )
    return coef


def _fit_poly(spec: Poly, x: np.ndarray, y: np.ndarray) -> FittedModel:
    design = np.vander(x, spec.degree + 1, increasing=True)
    coef = _fit_linear_basis(design, y)

    def predict(v, coef=coef, k=spec.degree):
        return np.vander(np.asarray(v, dtype=float), k + 1, increasing=True) @ coef

    return FittedModel(spec, coef, predict)


def _fit_mon(spec: Mon, x: np.ndarray, y: np.ndarray) -> FittedModel:
    design = np.column_stack([x ** spec.exponent, np.ones_like(x)])
    coef = _fit_linear_basis(design, y)

    def predict(v, coef=coef, n=spec.exponent):
        v = np.asarray(v, dtype=float)
        return coef[0] * v ** n + coef[1]

    return FittedModel(spec, coef, predict)


# ---------------------------------------------------------------------------
# logistic fit via Levenberg-Marquardt with multi-starts


def _logistic(params: np.ndarray, x: np.ndarray) -> np.ndarray:
    a, b, c, d = params
    z = np.clip(c * (d - x), -500.0, 500.0)
    return a + (b - a) / (1.0 + np.exp(z))


def _logistic_jacobian(params: np.ndarray, x: np.ndarray) -> np.ndarray:
    a, b, c, d = params
    z = np.clip(c * (d - x), -500.0, 500.0)
    s = 1.0 / (1.0 + np.exp(z))
    ds_dz = -s * (1.0 - s)
    return np.column_stack(
        [1.0 - s, s, (b - a) * ds_dz * (d - x), (b - a) * ds_dz * c]
    )


def levenberg_marquardt(
    residual: Callable[[np.ndarray], np.ndarray],
    jacobian: Callable[[np.ndarray], np.ndarray],
    p0: np.ndarray,
    max_iter: int = LOG_MAX_ITER,
    cost_tol: float = 1e-14,
    grad_tol: float = 1e-12,
) -> tuple[np.ndarray, float, bool, list[float]]:
    """Damped least squares with Marquardt scaling.

    Returns ``(params, cost, converged, accepted_cost_history)``; the history
    holds the cost after every accepted step, so it is non-increasing by
    construction. ``converged`` is False when the iteration cap was reached
    while progress was still being made.
    """
    p = np.asarray(p0, dtype=float).copy()
    r = residual(p)
    cost = 0.5 * float(r @ r)
    lam = 1e-3
    history = [cost]
    converged = False
    for _ in range(max_iter):
        jac = jacobian(p)
        grad = jac.T @ r
        if np.max(np.abs(grad)) < grad_tol:
            converged = True
            break
        hess = jac.T @ jac
        diag = np.diag(hess).copy()
        diag[diag < 1e-12] = 1e-12
        accepted = False
        for _ in range(60):
            try:
                step = np.linalg.solve(hess + lam * np.diag(diag), -grad)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            p_new = p + step
            r_new = residual(p_new)
            cost_new = 0.5 * float(r_new @ r_new)
            if np.isfinite(cost_new) and cost_new < cost:
                p, r = p_new, r_new
                drop = cost - cost_new
                cost = cost_new
                lam = max(lam * 0.3, 1e-14)
                history.append(cost)
                accepted = True
                if drop < cost_tol * max(cost, 1.0):
                    converged = True
                break
            lam *= 10.0
            if lam > 1e14:
                break
        if not accepted or converged:
            converged = converged or not accepted  # stalled counts as converged
            break
    return p, cost, converged, history


def _fit_log(spec: Log, x: np.ndarray, y: np.ndarray, seed: int) -> FittedModel:
    rng = np.random.default_rng(seed)
    y_lo, y_hi = float(y.min()), float(y.max())
    d_med = float(np.median(x))
    starts = [np.array([y_lo, y_hi, c0, d_med]) for c0 in LOG_SLOPE_STARTS]
    starts.append(
        np.array(
            [
                rng.uniform(y_lo, y_hi),
                rng.uniform(y_lo, y_hi),
                rng.uniform(-5.0, 5.0),
                rng.uniform(float(x.min()), float(x.max())),
            ]
        )
    )
    best = None
    for p0 in starts:
        params, cost, conv, history = levenberg_marquardt(
            lambda p: _logistic(p, x) - y, lambda p: _logistic_jacobian(p, x), p0
        )
        if best is None or cost < best[1]:
            best = (params, cost, conv, history)
    params, _, converged, history = best
    if not converged:
        warnings.warn("logistic fit hit the iteration cap", NonConvergenceWarning)

    def predict(v, params=params):
        return _logistic(params, np.asarray(v, dtype=float))

    return FittedModel(spec, params, predict, converged, np.asarray(history))


# ---------------------------------------------------------------------------
# small fully connected network, full-batch Adam with monotone safeguard


def _nn_init(layers: tuple[int, ...], rng: np.random.Generator):
    sizes = (1,) + layers + (1,)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return weights, biases


def _nn_forward(weights, biases, x_col):
    activations = [x_col]
    h = x_col
    for w, b in zip(weights[:-1], biases[:-1]):
        h = np.tanh(h @ w + b)
        activations.append(h)
    out = h @ weights[-1] + biases[-1]
    activations.append(out)
    return activations


def _nn_loss_grads(weights, biases, x_col, y_col):
    n = len(x_col)
    acts = _nn_forward(weights, biases, x_col)
    resid = acts[-1] - y_col
    loss = float(np.mean(resid * resid))
    delta = 2.0 * resid / n
    grads_w, grads_b = [], []
    for layer in range(len(weights) - 1, -1, -1):
        grads_w.append(acts[layer].T @ delta)
        grads_b.append(delta.sum(axis=0))
        if layer > 0:
            delta = (delta @ weights[layer].T) * (1.0 - acts[layer] ** 2)
    grads_w.reverse()
    grads_b.reverse()
    return loss, grads_w, grads_b


def _fit_nn(spec: Nn, x: np.ndarray, y: np.ndarray, seed: int) -> FittedModel:
    rng = np.random.default_rng(seed)
    weights, biases = _nn_init(spec.layers, rng)
    x_col = x[:, None]
    y_col = y[:, None]

    flat = weights + biases
    m = [np.zeros_like(p) for p in flat]
    v = [np.zeros_like(p) for p in flat]
    lr = NN_LEARNING_RATE
    beta1, beta2, eps = 0.9, 0.999, 1e-8

    loss, gw, gb = _nn_loss_grads(weights, biases, x_col, y_col)
    history = [loss]
    t = 0
    for _ in range(NN_EPOCHS):
        t += 1
        grads = gw + gb
        step = []
        for i, g in enumerate(grads):
            m[i] = beta1 * m[i] + (1.0 - beta1) * g
            v[i] = beta2 * v[i] + (1.0 - beta2) * g * g
            m_hat = m[i] / (1.0 - beta1 ** t)
            v_hat = v[i] / (1.0 - beta2 ** t)
            step.append(lr * m_hat / (np.sqrt(v_hat) + eps))
        nw = [w - s for w, s in zip(weights, step[: len(weights)])]
        nb = [b - s for b, s in zip(biases, step[len(weights):])]
        new_loss, ngw, ngb = _nn_loss_grads(nw, nb, x_col, y_col)
        if new_loss <= loss:
            weights, biases, loss, gw, gb = nw, nb, new_loss, ngw, ngb
        else:
            # monotone safeguard: reject the step and shrink the rate
            lr *= 0.5
        history.append(loss)

    params = np.concatenate([p.ravel() for p in weights + biases])

    def predict(vals, weights=weights, biases=biases):
        vals = np.asarray(vals, dtype=float)
        return _nn_forward(weights, biases, vals[:, None])[-1][:, 0]

    return FittedModel(spec, params, predict, True, np.asarray(history))


# ---------------------------------------------------------------------------
# linear SVR by deterministic subgradient descent


def _fit_svr(spec: Svr, x: np.ndarray, y: np.ndarray) -> FittedModel:
    eps_tube = 0.1 * float(np.std(y))
    reg = 1.0
    w, b = 0.0, float(np.mean(y))
    best = (np.inf, w, b)
    history = []
    for t in range(1, SVR_ITERATIONS + 1):
        r = y - (w * x + b)
        active = np.abs(r) > eps_tube
        obj = 0.5 * reg * w * w + float(np.mean(np.maximum(np.abs(r) - eps_tube, 0.0)))
        history.append(obj)
        if obj < best[0]:
            best = (obj, w, b)
        sign = np.sign(r)
        grad_w = reg * w - float(np.mean(sign * x * active))
        grad_b = -float(np.mean(sign * active))
        step = 0.5 / t
        w -= step * grad_w
        b -= step * grad_b
    _, w, b = best
    params = np.array([w, b])

    def predict(v, w=w, b=b):
        return w * np.asarray(v, dtype=float) + b

    return FittedModel(spec, params, predict, True, np.asarray(history))


# ---------------------------------------------------------------------------


def fit(spec: ModelSpec, x: np.ndarray, y: np.ndarray, seed: int = 0) -> FittedModel:
    """Fit ``spec`` to (x, y) by least squares; deterministic given the seed.

    Inputs are expected to be scaled to a common range beforehand. Raises
    SingularSystem for rank-deficient linear fits; iterative fits return
    best-so-far parameters with ``converged=False`` instead of failing.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y):
        raise ValueError("x and y must be aligned")
    if len(x) < param_count(spec) + 1:
        raise ValueError(
            f"need at least {param_count(spec) + 1} samples for {spec_name(spec)}"
        )
    if isinstance(spec, Poly):
        return _fit_poly(spec, x, y)
    if isinstance(spec, Mon):
        return _fit_mon(spec, x, y)
    if isinstance(spec, Log):
        return _fit_log(spec, x, y, seed)
    if isinstance(spec, Nn):
        return _fit_nn(spec, x, y, seed)
    if isinstance(spec, Svr):
        return _fit_svr(spec, x, y)
    raise TypeError(f"unknown spec {spec!r}")
