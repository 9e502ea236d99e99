"""Posterior-mean shrinkage under the point-mass + beta prior.

For ``d = theta + N(0, sigma**2)`` the rule is the posterior mean

    delta(d) = (1-alpha) * I1(d) / (alpha * phi(d/sigma)/sigma + (1-alpha) * I0(d))

where ``I_k(d) = int theta**k g(theta) phi((d-theta)/sigma)/sigma dtheta`` over
``[-m, m]``.  The integrals are evaluated by Gauss-Legendre quadrature in
log space: every term is taken relative to the largest log-term, so nothing
underflows when ``|d| / sigma`` is large.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Mapping

import numpy as np
from scipy.special import betaln, xlogy
from scipy.integrate import trapezoid

from .dwt import CoefficientPyramid
from .prior import BetaMixturePrior

__all__ = [
    "BetaShrinkageRule",
    "IdentityRule",
    "ZeroRule",
    "ShrinkageError",
    "shrink",
    "shrink_oracle",
    "shrink_pyramid",
    "beta_quadrature",
]

_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)
# Log-likelihood drop (relative to its maximum on the support) beyond which
# the integrand is ignored. exp(-200) is far below double precision even after
# multiplication by polynomial prior factors.
_LOG_CUTOFF = 200.0
_CHUNK = 4096


class ShrinkageError(FloatingPointError):
    """Quadrature produced a non-finite value."""


def _graded(shape: float) -> bool:
    """Whether the endpoint factor ``x**(shape-1)`` needs the substitution.

    Below about 1.6 the kink ``u**(1/shape)`` the substitution leaves in the
    likelihood is milder than ``x**(shape-1)``; at exactly 1 there is none.
    """
    return shape < 1.5 and shape != 1.0


@lru_cache(maxsize=32)
def _unit_legendre(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=64)
def _panel_nodes(order: int, a: float, b: float):
    """Node fractions for the three panel modes: plain, graded at p, graded at q.

    Returns arrays of shape ``(3, order)``: ``t`` (fraction from ``p``),
    ``s`` (fraction from ``q``, computed directly rather than as ``1 - t``)
    and the log-Jacobian of the substitution.
    """
    x, _ = _unit_legendre(order)
    t = np.stack([x, x ** (1.0 / a), 1.0 - (1.0 - x) ** (1.0 / b)])
    s = np.stack([1.0 - x, 1.0 - x ** (1.0 / a), (1.0 - x) ** (1.0 / b)])
    logjac = np.stack([
        np.zeros_like(x),
        -np.log(a) + (1.0 / a - 1.0) * np.log(x),
        -np.log(b) + (1.0 / b - 1.0) * np.log1p(-x),
    ])
    for arr in (t, s, logjac):
        arr.flags.writeable = False
    return t, s, logjac


def _panel(p, q, prior: BetaMixturePrior, order: int):
    """Nodes and log-weights for ``int_p^q f(theta) g(theta) dtheta``.

    ``p`` and ``q`` are arrays of panel ends (broadcast against the node axis).
    If a panel touches an endpoint where the density is singular or has an
    unbounded derivative (non-unit shape below 1.5), the substitution
    ``t = s**(1/shape)`` makes the beta factor constant in ``s``.
    """
    a, b, m = prior.a, prior.b, prior.m
    _, w = _unit_legendre(order)
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    left = (p == -m) & _graded(a)
    right = (q == m) & _graded(b) & ~left
    mode = np.where(left, 1, np.where(right, 2, 0))
    T, S, J = _panel_nodes(order, a, b)
    t, s, logjac = T[mode], S[mode], J[mode]

    p, q = p[..., None], q[..., None]
    width = q - p
    theta = p + width * t
    logw = np.log(w) + np.log(width) + logjac - (a + b - 1.0) * np.log(2.0 * m) - betaln(a, b)
    with np.errstate(divide="ignore"):
        if a != 1.0:
            logw += (a - 1.0) * np.log((p + m) + width * t)
        if b != 1.0:
            logw += (b - 1.0) * np.log((m - q) + width * s)
    return theta, logw


def beta_quadrature(prior: BetaMixturePrior, order: int = 64, split: float = 0.0):
    """Nodes and weights integrating against the beta density on ``[-m, m]``.

    Two Gauss-Legendre panels meet at ``split``. Returns ``(theta, weights)``
    with ``sum(weights * f(theta)) ~= E_g[f]``.
    """
    m = prior.m
    split = float(np.clip(split, -m, m))
    thetas, weights = [], []
    for p, q in ((-m, split), (split, m)):
        if q > p:
            th, lw = _panel(np.array(p), np.array(q), prior, order)
            thetas.append(th)
            weights.append(np.exp(lw))
    return np.concatenate(thetas), np.concatenate(weights)


def _log_terms(d, prior: BetaMixturePrior, sigma: float, order: int):
    """Node abscissae and log-terms of the continuous part, plus point-mass log-term."""
    m = prior.m
    peak = np.clip(d, -m, m)
    reach = np.sqrt((d - peak) ** 2 + 2.0 * _LOG_CUTOFF * sigma * sigma)
    lo = np.maximum(-m, d - reach)
    hi = np.minimum(m, d + reach)
    # keep the split away from the window ends so neither panel sits right
    # next to a (near-)singular endpoint or a steep boundary peak
    margin = 0.025 * (hi - lo)
    mid = np.clip(peak, lo + margin, hi - margin)

    th1, lw1 = _panel(lo, mid, prior, order)
    th2, lw2 = _panel(mid, hi, prior, order)
    theta = np.concatenate([th1, th2], axis=-1)
    logw = np.concatenate([lw1, lw2], axis=-1)

    z = (d[:, None] - theta) / sigma
    with np.errstate(divide="ignore"):
        log_cont = np.log1p(-prior.alpha) + logw - 0.5 * z * z - np.log(sigma) - _LOG_SQRT_2PI
        log_point = np.log(prior.alpha) - 0.5 * (d / sigma) ** 2 - np.log(sigma) - _LOG_SQRT_2PI
    return theta, log_cont, log_point


def _posterior_mean(theta, log_cont, log_point):
    top = np.maximum(np.max(log_cont, axis=-1), log_point)
    e = np.exp(log_cont - top[:, None])
    num = np.sum(theta * e, axis=-1)
    den = np.sum(e, axis=-1) + np.exp(log_point - top)
    return num / den


@dataclass(frozen=True)
class BetaShrinkageRule:
    """Bayes rule under quadratic loss for a :class:`BetaMixturePrior`."""

    prior: BetaMixturePrior
    sigma: float
    quadrature_order: int = 64

    def __post_init__(self):
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.quadrature_order < 16:
            raise ValueError("quadrature_order must be at least 16")

    def __call__(self, d):
        return shrink(d, self)


class IdentityRule:
    """``delta(d) = d``."""

    def __call__(self, d):
        return np.array(d, dtype=float)


class ZeroRule:
    """``delta(d) = 0``; used for levels whose elicited support is empty."""

    def __call__(self, d):
        return np.zeros_like(np.asarray(d, dtype=float))


ShrinkageRule = Callable[[np.ndarray], np.ndarray]


def shrink(d, rule: BetaShrinkageRule):
    """Evaluate the beta-prior shrinkage rule at ``d`` (scalar or array)."""
    d = np.asarray(d, dtype=float)
    flat = d.ravel()
    if not np.all(np.isfinite(flat)):
        raise ValueError("shrink is defined for finite inputs only")
    out = np.empty_like(flat)
    for start in range(0, flat.size, _CHUNK):
        part = flat[start: start + _CHUNK]
        theta, log_cont, log_point = _log_terms(part, rule.prior, rule.sigma, rule.quadrature_order)
        with np.errstate(invalid="ignore", over="ignore"):
            out[start: start + _CHUNK] = _posterior_mean(theta, log_cont, log_point)
    if not np.all(np.isfinite(out)):
        bad = flat[~np.isfinite(out)]
        raise ShrinkageError(
            f"non-finite posterior mean for d={bad[:5].tolist()} "
            f"(prior={rule.prior}, sigma={rule.sigma})"
        )
    out = out.reshape(d.shape)
    return out[()] if out.ndim == 0 else out


def shrink_oracle(d, rule: BetaShrinkageRule, grid_size: int = 200_001) -> float:
    """Brute-force posterior mean by the trapezoid rule on a dense grid.

    Works directly with the unnormalized posterior
    ``g(theta) * exp(-(d-theta)**2 / (2 sigma**2))``. Each half of
    ``[-m, m]`` gets ``grid_size // 2`` points; next to an endpoint whose
    shape parameter ``s`` is singular there the grid is graded as
    ``theta + m = m * u**(1/s)`` (uniform in ``u``), which turns the
    integrable singularity into a smooth integrand. Meant as an independent
    check, not for production use.
    """
    if grid_size < 10_000:
        raise ValueError("grid_size must be at least 1e4")
    prior, sigma = rule.prior, rule.sigma
    a, b, m, alpha = prior.a, prior.b, prior.m, prior.alpha
    d = float(d)
    log_norm = -(a + b - 1) * np.log(2 * m) - betaln(a, b)
    u = np.linspace(0.0, 1.0, int(grid_size) // 2)

    def half(near, far, sign):
        # theta measured from the endpoint whose shape is ``near``
        s = near if _graded(near) else 1.0
        gap = m * u ** (1.0 / s)
        theta = sign * (gap - m)
        log_w = (
            (near - 1) * np.log(m) + xlogy(near / s - 1, u)
            + xlogy(far - 1, 2 * m - gap) + np.log(m / s) + log_norm
        )
        return theta, log_w

    parts = [half(a, b, 1.0), half(b, a, -1.0)]
    log_zero = -0.5 * (d / sigma) ** 2
    logs = [lw - 0.5 * ((d - th) / sigma) ** 2 for th, lw in parts]
    ref = max(log_zero, *(np.max(lv) for lv in logs))
    num = den = 0.0
    for (theta, _), lv in zip(parts, logs):
        post = np.exp(lv - ref)
        num += trapezoid(theta * post, u)
        den += trapezoid(post, u)
    val = (1 - alpha) * num / (alpha * np.exp(log_zero - ref) + (1 - alpha) * den)
    if not np.isfinite(val):
        raise ShrinkageError(f"oracle produced non-finite value at d={d}")
    return float(val)


def shrink_pyramid(
    pyramid: CoefficientPyramid, rules: Mapping[int, ShrinkageRule]
) -> CoefficientPyramid:
    """Apply ``rules[j]`` to every detail level ``j``; coarse part passes through."""
    missing = [j for j in pyramid.levels if j not in rules]
    if missing:
        raise KeyError(f"no shrinkage rule configured for level(s) {missing}")
    return pyramid.map_details(lambda j, v: rules[j](v))
