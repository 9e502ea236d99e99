import numpy as np
import pytest
from scipy import integrate

from betashrink.prior import (
    BetaMixturePrior,
    SymmetricPriorWarning,
    beta_density,
    beta_skewness,
    prior_mean,
    prior_variance,
    sample,
)

CTX1 = BetaMixturePrior(0.9, 3.0, 7.0, 10.0)
CTX2 = BetaMixturePrior(0.6, 1.0, 20.0, 30.0)


@pytest.mark.parametrize("kw", [
    dict(alpha=1.0, a=2, b=3, m=1),
    dict(alpha=-0.1, a=2, b=3, m=1),
    dict(alpha=0.5, a=0, b=3, m=1),
    dict(alpha=0.5, a=2, b=-1, m=1),
    dict(alpha=0.5, a=2, b=3, m=0),
])
def test_invalid_hyperparameters(kw):
    with pytest.raises(ValueError):
        BetaMixturePrior(**kw)


def test_symmetric_prior_warns():
    with pytest.warns(SymmetricPriorWarning):
        p = BetaMixturePrior(0.5, 2, 2, 1)
    assert p.symmetric


@pytest.mark.parametrize("a,b", [(3, 7), (1, 20), (0.5, 2), (7, 1)])
def test_density_integrates_to_one(a, b):
    p = BetaMixturePrior(0.5, a, b, 4.0)
    val, _ = integrate.quad(lambda t: beta_density(t, p), -4, 4, limit=200)
    assert abs(val - 1) < 1e-6


def test_density_zero_outside_support():
    assert beta_density(10.5, CTX1) == 0
    assert beta_density(-10.5, CTX1) == 0


def test_reported_moments():
    assert abs(prior_variance(CTX1) - 2.20) < 0.01
    assert abs(prior_variance(CTX2) - 179.78) < 0.01
    assert abs(beta_skewness(CTX1) - 0.48) < 0.01
    assert abs(beta_skewness(CTX2) - 1.73) < 0.01
    assert np.isclose(prior_mean(CTX1), -0.4)


def test_mean_sign_matches_shapes():
    assert prior_mean(CTX1) < 0 and beta_skewness(CTX1) > 0
    sw = CTX1.swapped()
    assert prior_mean(sw) > 0 and beta_skewness(sw) < 0


@pytest.mark.parametrize("prior", [CTX1, CTX2])
def test_moments_against_sampling(prior):
    x = sample(prior, 400_000, 11)
    se_mean = x.std() / np.sqrt(x.size)
    assert abs(x.mean() - prior_mean(prior)) < 4 * se_mean
    assert abs(x.var() / prior_variance(prior) - 1) < 0.02


def test_sample_point_mass_fraction():
    x = sample(CTX1, 100_000, 3)
    frac = np.mean(x == 0)
    assert abs(frac - 0.9) < 3 * np.sqrt(0.9 * 0.1 / 1e5)
    assert np.all(np.abs(x) <= 10)


def test_sample_deterministic():
    assert np.array_equal(sample(CTX2, 100, 5), sample(CTX2, 100, 5))
