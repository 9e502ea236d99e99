"""Denoising pipeline shared by the simulation harness and the CLI.

transform -> estimate sigma -> per-level rule -> inverse transform.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .baselines import ThresholdRule
from .dwt import CoefficientPyramid, forward, inverse
from .elicitation import ElicitationConfig, default_J0, elicit_rules, estimate_sigma
from .shrinkage import shrink_pyramid

__all__ = ["METHODS", "MethodConfig", "denoise_pyramid", "denoise"]

METHODS = ("beta", "universal", "sure", "fdr", "identity")
_ALIASES = {"univ": "universal"}


def canonical_method(name: str) -> str:
    name = _ALIASES.get(name.lower(), name.lower())
    if name not in METHODS:
        raise ValueError(f"unknown method {name!r}; choose from {list(METHODS)}")
    return name


@dataclass(frozen=True)
class MethodConfig:
    elicitation: ElicitationConfig = field(default_factory=ElicitationConfig)
    levelwise: bool = True
    q: float = 0.05


def denoise_pyramid(
    pyramid: CoefficientPyramid,
    method: str,
    config: MethodConfig | None = None,
    sigma: float | None = None,
):
    """Shrink the detail coefficients of ``pyramid`` with ``method``.

    ``sigma`` overrides the finest-level MAD estimate. Returns
    ``(pyramid, info)``.
    """
    method = canonical_method(method)
    config = config or MethodConfig()
    if method == "identity":
        return pyramid.copy(), {"method": method}
    if sigma is None:
        sigma = estimate_sigma(pyramid)
    if method == "beta":
        rules, info = elicit_rules(pyramid, config.elicitation, sigma=sigma)
        return shrink_pyramid(pyramid, rules), {"method": method, **info}
    if sigma == 0.0:
        # noiseless data: every threshold policy degenerates to zero
        return pyramid.copy(), {"method": method, "sigma": 0.0}
    rule = ThresholdRule(method, sigma, q=config.q, levelwise=config.levelwise)
    return rule.apply(pyramid), {"method": method, "sigma": float(sigma)}


def denoise(
    y,
    method: str = "beta",
    wavelet: str = "daub8",
    J0: int | None = None,
    config: MethodConfig | None = None,
    sigma: float | None = None,
):
    """Denoise a dyadic-length signal. Returns ``(estimate, pyramids, info)``.

    ``pyramids`` is ``(empirical, shrunk)``.
    """
    y = np.asarray(y, dtype=float)
    if J0 is None:
        J0 = default_J0(y.size)
    pyr = forward(y, wavelet, J0)
    shrunk, info = denoise_pyramid(pyr, method, config, sigma)
    return inverse(shrunk, wavelet), (pyr, shrunk), info
