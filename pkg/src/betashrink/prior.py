"""Point mass at zero mixed with a beta law rescaled to ``[-m, m]``."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import betaln

__all__ = [
    "BetaMixturePrior",
    "SymmetricPriorWarning",
    "beta_density",
    "beta_logdensity",
    "prior_mean",
    "prior_variance",
    "beta_skewness",
    "sample",
]


class SymmetricPriorWarning(UserWarning):
    """Raised (as a warning) when a == b, i.e. the prior is not asymmetric."""


@dataclass(frozen=True)
class BetaMixturePrior:
    """Hyperparameters of ``alpha * delta_0 + (1 - alpha) * Beta[-m, m](a, b)``.

    ``alpha = 0`` is accepted: the elicited weight at the primary resolution
    level is exactly zero.
    """

    alpha: float
    a: float
    b: float
    m: float

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")
        for name in ("a", "b", "m"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive finite number, got {v}")
        if self.a == self.b:
            warnings.warn(
                f"symmetric configuration a == b == {self.a}", SymmetricPriorWarning,
                stacklevel=3,
            )

    @property
    def symmetric(self) -> bool:
        return self.a == self.b

    def swapped(self) -> "BetaMixturePrior":
        """Mirror image of this prior (shapes exchanged)."""
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", SymmetricPriorWarning)
            return BetaMixturePrior(self.alpha, self.b, self.a, self.m)


def beta_logdensity(theta, prior: BetaMixturePrior):
    """Log of the continuous part ``g``; ``-inf`` outside the open support."""
    theta = np.asarray(theta, dtype=float)
    a, b, m = prior.a, prior.b, prior.m
    inside = (theta > -m) & (theta < m)
    t = np.where(inside, theta, 0.0)
    out = (
        (a - 1.0) * np.log(t + m)
        + (b - 1.0) * np.log(m - t)
        - (a + b - 1.0) * np.log(2.0 * m)
        - betaln(a, b)
    )
    out = np.where(inside, out, -np.inf)
    return out[()] if out.ndim == 0 else out


def beta_density(theta, prior: BetaMixturePrior):
    """Density ``g(theta; a, b, m)`` of the beta part on ``[-m, m]``.

    At the endpoints the closed-form limit is returned (finite when the
    matching shape is >= 1, ``inf`` otherwise); outside the support it is 0.
    """
    theta = np.asarray(theta, dtype=float)
    a, b, m = prior.a, prior.b, prior.m
    with np.errstate(divide="ignore"):
        out = np.exp(beta_logdensity(theta, prior))
    logc = -(a + b - 1.0) * np.log(2.0 * m) - betaln(a, b)
    left = _endpoint_limit(a, logc + (b - 1.0) * np.log(2.0 * m))
    right = _endpoint_limit(b, logc + (a - 1.0) * np.log(2.0 * m))
    out = np.where(theta == -m, left, out)
    out = np.where(theta == m, right, out)
    return out[()] if out.ndim == 0 else out


def _endpoint_limit(shape, log_value):
    if shape > 1:
        return 0.0
    if shape < 1:
        return np.inf
    return float(np.exp(log_value))


def prior_mean(prior: BetaMixturePrior) -> float:
    a, b = prior.a, prior.b
    return prior.m * (1.0 - prior.alpha) * (a - b) / (a + b)


def prior_variance(prior: BetaMixturePrior) -> float:
    """Variance of the mixture by the law of total variance.

    The between-component term is ``alpha * (a - b)**2``; the closed form
    printed in some references carries ``(a + b)**2`` there, which does not
    reproduce the published numeric values.
    """
    a, b, m, alpha = prior.a, prior.b, prior.m, prior.alpha
    s = a + b
    return (1.0 - alpha) * m * m / s ** 2 * (4.0 * a * b / (s + 1.0) + alpha * (a - b) ** 2)


def beta_skewness(prior: BetaMixturePrior) -> float:
    """Pearson skewness of the beta part alone (not of the mixture)."""
    a, b = prior.a, prior.b
    return 2.0 * (b - a) * np.sqrt(a + b + 1.0) / ((a + b + 2.0) * np.sqrt(a * b))


def sample(prior: BetaMixturePrior, count: int, rng) -> np.ndarray:
    """Draw ``count`` i.i.d. values; ``rng`` is a seed or a numpy Generator."""
    rng = np.random.default_rng(rng)
    count = int(count)
    if count < 0:
        raise ValueError("count must be non-negative")
    if count == 0:
        return np.empty(0)
    zero = rng.random(count) < prior.alpha
    draws = prior.m * (2.0 * rng.beta(prior.a, prior.b, size=count) - 1.0)
    return np.where(zero, 0.0, draws)
