import numpy as np
import pytest

from betashrink.pipeline import METHODS, canonical_method, denoise
from betashrink.signals import add_noise, evaluate_test_function


def test_aliases():
    assert canonical_method("UNIV") == "universal"
    with pytest.raises(ValueError):
        canonical_method("bams")


@pytest.mark.parametrize("method", METHODS)
def test_every_method_runs(method):
    clean = evaluate_test_function("heavisine", 256, sd=7.0)
    noisy = add_noise(clean, 6.0, 1).noisy
    est, (emp, shrunk), info = denoise(noisy, method)
    assert est.shape == noisy.shape
    assert info["method"] == method
    if method == "identity":
        assert np.allclose(est, noisy, atol=1e-10)
    else:
        assert np.mean((est - clean) ** 2) < np.mean((noisy - clean) ** 2)


def test_known_sigma_override():
    y = evaluate_test_function("bumps", 256)
    _, _, info = denoise(y + 0.1, "beta", sigma=0.5)
    assert info["sigma"] == 0.5


def test_noiseless_thresholds_are_identity():
    y = np.sin(np.linspace(0, 6, 64))
    est, _, _ = denoise(y, "sure", wavelet="haar", J0=2, sigma=0.0)
    assert np.allclose(est, y, atol=1e-12)


def test_pure_noise_is_suppressed(rng):
    y = rng.standard_normal(1024)
    est, _, _ = denoise(y, "beta")
    assert np.std(est) < np.std(y)
