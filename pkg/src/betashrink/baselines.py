"""Soft-thresholding baselines: universal, SURE and FDR thresholds."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .dwt import CoefficientPyramid

__all__ = [
    "soft",
    "universal_threshold",
    "sure_risk",
    "sure_threshold",
    "fdr_threshold",
    "fdr_rejections",
    "SoftThresholdRule",
    "ThresholdRule",
    "POLICIES",
]

POLICIES = ("universal", "sure", "fdr")


def soft(d, lam):
    """``sign(d) * max(|d| - lam, 0)``."""
    if np.any(np.asarray(lam) < 0):
        raise ValueError("threshold must be non-negative")
    d = np.asarray(d, dtype=float)
    out = np.sign(d) * np.maximum(np.abs(d) - lam, 0.0)
    return out[()] if out.ndim == 0 else out


def universal_threshold(n: int, sigma: float) -> float:
    if n < 2:
        raise ValueError("universal threshold needs n >= 2")
    return float(sigma * np.sqrt(2.0 * np.log(n)))


def sure_risk(coeffs, sigma: float, lam):
    """Stein unbiased estimate of the soft-thresholding risk at ``lam``."""
    d = np.abs(np.asarray(coeffs, dtype=float))
    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    n = d.size
    below = (d[None, :] <= lam[:, None]).sum(axis=1)
    clipped = np.minimum(d[None, :] ** 2, lam[:, None] ** 2).sum(axis=1)
    out = n * sigma ** 2 - 2.0 * sigma ** 2 * below + clipped
    return out if out.size > 1 else float(out[0])


def sure_threshold(coeffs, sigma: float) -> float:
    """Threshold minimizing SURE over ``{0} U {|d_i|}``; ties go to the smallest.

    SURE is piecewise increasing between consecutive ``|d_i|``, so the minimum
    over ``lam >= 0`` is attained on this candidate set. Evaluated in
    O(n log n) from cumulative sums.
    """
    d = np.sort(np.abs(np.asarray(coeffs, dtype=float)))
    n = d.size
    if n == 0:
        raise ValueError("SURE needs at least one coefficient")
    cand = np.concatenate([[0.0], d])
    # #{|d_i| <= cand_k}: for cand = d_(k) (1-based) ties count fully
    below = np.searchsorted(d, cand, side="right")
    csum = np.concatenate([[0.0], np.cumsum(d ** 2)])
    clipped = csum[below] + (n - below) * cand ** 2
    risk = n * sigma ** 2 - 2.0 * sigma ** 2 * below + clipped
    return float(cand[np.argmin(risk)])


def fdr_rejections(coeffs, sigma: float, q: float = 0.05) -> np.ndarray:
    """Boolean mask of coefficients declared significant by the BH step-up test.

    Two-sided p-values ``2 * (1 - Phi(|d|/sigma))`` are compared with
    ``k q / n``; the largest passing rank ``k*`` and every smaller p-value
    are rejected.
    """
    d = np.abs(np.asarray(coeffs, dtype=float))
    n = d.size
    if n == 0:
        raise ValueError("FDR needs at least one coefficient")
    if not 0 < q < 1:
        raise ValueError("q must lie in (0, 1)")
    pvals = 2.0 * norm.sf(d / sigma)
    order = np.argsort(pvals, kind="stable")
    passed = np.nonzero(pvals[order] <= q * np.arange(1, n + 1) / n)[0]
    mask = np.zeros(n, dtype=bool)
    if passed.size:
        mask[order[: passed[-1] + 1]] = True
    return mask


def fdr_threshold(coeffs, sigma: float, q: float = 0.05) -> float:
    """Soft threshold that removes exactly the non-rejected coefficients.

    Returns the largest ``|d_i|`` among coefficients the step-up test keeps
    as null (0 when everything is rejected), so the rejected ones survive
    soft thresholding. With no rejection at all the universal threshold is
    used, raised to ``max |d_i|`` if needed so that every coefficient is
    still removed; this keeps the threshold monotone in ``q``.
    """
    d = np.abs(np.asarray(coeffs, dtype=float))
    reject = fdr_rejections(d, sigma, q)
    if not reject.any():
        return max(universal_threshold(max(d.size, 2), sigma), float(d.max()))
    if reject.all():
        return 0.0
    return float(d[~reject].max())


@dataclass(frozen=True)
class SoftThresholdRule:
    """Soft thresholding at a fixed ``lam``."""

    lam: float

    def __call__(self, d):
        return soft(d, self.lam)


@dataclass(frozen=True)
class ThresholdRule:
    """A threshold *policy*: picks ``lam`` from the data, then soft-thresholds.

    ``levelwise`` selects per-level thresholds for SURE/FDR; the universal
    threshold is always global and uses the signal length ``n``.
    """

    policy: str
    sigma: float
    q: float = 0.05
    levelwise: bool = True

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ValueError(f"unknown threshold policy {self.policy!r}")
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not 0 < self.q < 1:
            raise ValueError("q must lie in (0, 1)")

    def threshold(self, coeffs, n_total: int | None = None) -> float:
        coeffs = np.asarray(coeffs, dtype=float)
        if self.policy == "universal":
            return universal_threshold(n_total or coeffs.size, self.sigma)
        if self.policy == "sure":
            return sure_threshold(coeffs, self.sigma)
        return fdr_threshold(coeffs, self.sigma, self.q)

    def apply(self, pyramid: CoefficientPyramid) -> CoefficientPyramid:
        """Soft-threshold every detail level of ``pyramid``."""
        all_d = pyramid.all_details()
        if self.policy == "universal" or not self.levelwise:
            lam = self.threshold(all_d, pyramid.n)
            return pyramid.map_details(lambda j, v: soft(v, lam))
        return pyramid.map_details(lambda j, v: soft(v, self.threshold(v)))
