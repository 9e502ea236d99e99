"""Donoho-Johnstone test functions, noise injection and prior-driven coefficients."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .dwt import dyadic_exponent
from .prior import BetaMixturePrior, sample

__all__ = [
    "TEST_FUNCTIONS",
    "NoisySignal",
    "sampling_grid",
    "evaluate_test_function",
    "add_noise",
    "generate_prior_coefficients",
]

KNOTS = np.array([0.1, 0.13, 0.15, 0.23, 0.25, 0.40, 0.44, 0.65, 0.76, 0.78, 0.81])
BLOCKS_HEIGHTS = np.array([4, -5, 3, -4, 5, -4.2, 2.1, 4.3, -3.1, 2.1, -4.2])
BUMPS_HEIGHTS = np.array([4, 5, 3, 4, 5, 4.2, 2.1, 4.3, 3.1, 5.1, 4.2])
BUMPS_WIDTHS = np.array([0.005, 0.005, 0.006, 0.01, 0.01, 0.03, 0.01, 0.01, 0.005, 0.008, 0.005])


def blocks(t):
    t = np.asarray(t, dtype=float)
    return ((1.0 + np.sign(t[..., None] - KNOTS)) / 2.0) @ BLOCKS_HEIGHTS


def bumps(t):
    t = np.asarray(t, dtype=float)
    return (1.0 + np.abs(t[..., None] - KNOTS) / BUMPS_WIDTHS) ** -4 @ BUMPS_HEIGHTS


def heavisine(t):
    t = np.asarray(t, dtype=float)
    return 4.0 * np.sin(4.0 * np.pi * t) - np.sign(t - 0.3) - np.sign(0.72 - t)


def doppler(t):
    t = np.asarray(t, dtype=float)
    return np.sqrt(t * (1.0 - t)) * np.sin(2.0 * np.pi * 1.05 / (t + 0.05))


TEST_FUNCTIONS = {
    "bumps": bumps,
    "blocks": blocks,
    "doppler": doppler,
    "heavisine": heavisine,
}


def sampling_grid(n: int) -> np.ndarray:
    """Midpoints ``(i - 0.5) / n``, ``i = 1..n``."""
    return (np.arange(1, n + 1) - 0.5) / n


def evaluate_test_function(name: str, n: int, sd: float | None = None) -> np.ndarray:
    """Sample a test function on the midpoint grid of size ``n = 2**J``.

    With ``sd`` the samples are multiplied by ``sd / std(f)`` so that the
    clean signal has that standard deviation.
    """
    try:
        fn = TEST_FUNCTIONS[name.lower()]
    except KeyError:
        raise ValueError(f"unknown test function {name!r}; choose from {sorted(TEST_FUNCTIONS)}") from None
    dyadic_exponent(n)
    f = fn(sampling_grid(n))
    if sd is not None:
        f = f * (sd / np.std(f))
    return f


@dataclass(frozen=True)
class NoisySignal:
    clean: np.ndarray
    noisy: np.ndarray
    sigma: float
    snr: float
    seed: object

    @property
    def noise(self) -> np.ndarray:
        return self.noisy - self.clean


def add_noise(clean, snr: float, seed) -> NoisySignal:
    """Add i.i.d. ``N(0, sigma**2)`` noise with ``sigma = std(clean) / snr``."""
    clean = np.asarray(clean, dtype=float)
    if not snr > 0:
        raise ValueError("snr must be positive")
    sd = np.std(clean)
    if sd == 0:
        raise ValueError("clean signal is constant; SNR is undefined")
    sigma = float(sd / snr)
    rng = np.random.default_rng(seed)
    noisy = clean + sigma * rng.standard_normal(clean.size)
    return NoisySignal(clean, noisy, sigma, float(snr), seed)


def generate_prior_coefficients(prior: BetaMixturePrior, n: int, snr: float, seed, max_tries: int = 100):
    """Draw ``theta`` from the prior and noisy ``d = theta + eps``.

    ``sigma = std(theta) / snr``. A draw with ``std(theta) == 0`` is redrawn.
    Returns ``(theta, d, sigma)``.
    """
    dyadic_exponent(n)
    if not snr > 0:
        raise ValueError("snr must be positive")
    rng = np.random.default_rng(seed)
    for attempt in range(max_tries):
        theta = sample(prior, n, rng)
        sd = np.std(theta)
        if sd > 0:
            break
        warnings.warn(f"degenerate prior draw (std 0) on attempt {attempt + 1}; redrawing", RuntimeWarning, stacklevel=2)
    else:
        raise RuntimeError(f"prior produced constant draws {max_tries} times in a row")
    sigma = float(sd / snr)
    d = theta + sigma * rng.standard_normal(n)
    return theta, d, sigma
