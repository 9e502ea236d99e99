"""Data-driven choice of the noise level and the prior hyperparameters."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import skew

from .dwt import CoefficientPyramid, dyadic_exponent
from .prior import BetaMixturePrior, SymmetricPriorWarning
from .shrinkage import BetaShrinkageRule, IdentityRule, ZeroRule

__all__ = [
    "DegenerateWarning",
    "ElicitationConfig",
    "LevelChoice",
    "default_J0",
    "estimate_sigma",
    "alpha_for_level",
    "m_for_level",
    "sample_skewness",
    "suggest_shapes",
    "elicit_rules",
]

MAD_CONSTANT = 0.6745


class DegenerateWarning(UserWarning):
    """An elicited quantity is zero and the rule degenerates."""


def default_J0(n: int) -> int:
    """Primary level leaving 16 scaling coefficients (0 for short signals)."""
    return max(0, dyadic_exponent(n) - 5)


@dataclass(frozen=True)
class ElicitationConfig:
    """Policy for choosing ``alpha(j)``, ``m(j)`` and the beta shapes.

    ``shapes`` is either a fixed ``(a, b)`` pair or ``"auto"``; in the
    latter case the sign of the sample skewness of all detail coefficients
    picks ``right_shapes``, ``left_shapes`` or ``neutral_shapes``.
    """

    gamma: float = 2.0
    shapes: tuple[float, float] | str = "auto"
    skew_threshold: float = 0.1
    right_shapes: tuple[float, float] = (2.0, 3.0)
    left_shapes: tuple[float, float] = (3.0, 2.0)
    neutral_shapes: tuple[float, float] = (2.0, 2.01)
    quadrature_order: int = 64

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if isinstance(self.shapes, str):
            if self.shapes != "auto":
                raise ValueError(f"shapes must be 'auto' or an (a, b) pair, got {self.shapes!r}")
        else:
            a, b = self.shapes
            if not (a > 0 and b > 0):
                raise ValueError("beta shapes must be positive")
            object.__setattr__(self, "shapes", (float(a), float(b)))
        if self.skew_threshold < 0:
            raise ValueError("skew_threshold must be non-negative")


def estimate_sigma(pyramid: CoefficientPyramid) -> float:
    """Median absolute finest-level detail divided by 0.6745."""
    finest = pyramid.details.get(pyramid.J - 1)
    if finest is None or finest.size == 0:
        raise ValueError("pyramid has no finest detail level")
    sigma = float(np.median(np.abs(finest)) / MAD_CONSTANT)
    if sigma == 0.0:
        warnings.warn("finest detail level is zero; sigma estimate is 0", DegenerateWarning, stacklevel=2)
    return sigma


def alpha_for_level(j: int, J0: int, gamma: float = 2.0) -> float:
    """``1 - (j - J0 + 1)**(-gamma)``."""
    if j < J0:
        raise ValueError(f"level {j} is below the primary level {J0}")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    return 1.0 - (j - J0 + 1.0) ** (-gamma)


def m_for_level(pyramid: CoefficientPyramid, j: int) -> float:
    """Largest absolute detail coefficient of level ``j``."""
    if j not in pyramid.details:
        raise KeyError(f"pyramid has no detail level {j}")
    m = float(np.max(np.abs(pyramid.details[j])))
    if m == 0.0:
        warnings.warn(f"level {j} is identically zero", DegenerateWarning, stacklevel=2)
    return m


def sample_skewness(values) -> float:
    values = np.asarray(values, dtype=float)
    if np.ptp(values) == 0:
        return 0.0
    return float(skew(values, bias=True))


def suggest_shapes(pyramid: CoefficientPyramid, config: ElicitationConfig | None = None):
    """Pick ``(a, b)`` from the skewness of the detail coefficients.

    Positive skewness beyond the threshold gives ``a < b`` (right asymmetry),
    negative gives ``a > b``.
    """
    config = config or ElicitationConfig()
    d = pyramid.all_details()
    if d.size < 8:
        raise ValueError(
            f"only {d.size} detail coefficients; set the shapes (a, b) manually"
        )
    s = sample_skewness(d)
    if s > config.skew_threshold:
        return config.right_shapes
    if s < -config.skew_threshold:
        return config.left_shapes
    return config.neutral_shapes


@dataclass
class LevelChoice:
    level: int
    alpha: float
    m: float
    rule: object = field(repr=False)


def elicit_rules(
    pyramid: CoefficientPyramid,
    config: ElicitationConfig | None = None,
    sigma: float | None = None,
):
    """Build one shrinkage rule per detail level.

    Returns ``(rules, info)`` where ``rules`` maps level to rule and ``info``
    holds the elicited sigma, shapes, skewness and per-level choices. Levels
    with ``m(j) = 0`` get the zero rule; a zero sigma leaves the
    coefficients untouched.
    """
    config = config or ElicitationConfig()
    if sigma is None:
        sigma = estimate_sigma(pyramid)
    if config.shapes == "auto":
        a, b = suggest_shapes(pyramid, config)
    else:
        a, b = config.shapes
    rules, levels = {}, []
    for j in pyramid.levels:
        alpha = alpha_for_level(j, pyramid.J0, config.gamma)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", DegenerateWarning)
            m = m_for_level(pyramid, j)
        if m == 0.0:
            rule = ZeroRule()
        elif sigma == 0.0:
            rule = IdentityRule()
        else:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", SymmetricPriorWarning)
                prior = BetaMixturePrior(alpha, a, b, m)
            rule = BetaShrinkageRule(prior, sigma, config.quadrature_order)
        rules[j] = rule
        levels.append(LevelChoice(j, alpha, m, rule))
    info = {
        "sigma": float(sigma),
        "a": float(a),
        "b": float(b),
        "skewness": sample_skewness(pyramid.all_details()),
        "levels": levels,
    }
    return rules, info
