import numpy as np
import pytest

from betashrink.dwt import forward
from betashrink.prior import BetaMixturePrior
from betashrink.shrinkage import (
    BetaShrinkageRule,
    IdentityRule,
    ShrinkageError,
    ZeroRule,
    beta_quadrature,
    shrink,
    shrink_oracle,
    shrink_pyramid,
)

GRID = np.arange(-6, 6.0001, 0.25)


def rule(a, b, alpha=0.9, m=3.0, sigma=1.0, **kw):
    return BetaShrinkageRule(BetaMixturePrior(alpha, a, b, m), sigma, **kw)


@pytest.mark.parametrize("a,b", [(7, 1), (7, 3), (2, 3), (0.5, 4), (3, 0.7)])
def test_quadrature_integrates_prior(a, b):
    p = BetaMixturePrior(0.5, a, b, 2.0)
    theta, w = beta_quadrature(p)
    assert abs(w.sum() - 1) < 1e-9
    mean = 2.0 * (a - b) / (a + b)
    assert abs(np.dot(w, theta) - mean) < 1e-9


@pytest.mark.parametrize("a,b", [(7, 3), (1, 7), (0.6, 2.0), (1.0, 1.01), (0.3, 0.4)])
def test_matches_oracle(a, b):
    r = rule(a, b)
    ds = np.array([-4.0, -1.5, 0.0, 0.75, 3.0, 5.5])
    quad = shrink(ds, r)
    ref = np.array([shrink_oracle(d, r) for d in ds])
    assert np.max(np.abs(quad - ref)) < 1e-6


def test_swap_antisymmetry():
    r, s = rule(7, 3), rule(3, 7)
    assert np.max(np.abs(shrink(GRID, r) + shrink(-GRID, s))) < 1e-8


def test_bounded_by_m():
    r = rule(7, 3)
    out = shrink(np.linspace(-30, 30, 241), r)
    assert np.all(np.abs(out) < 3.0)
    assert 3.0 - 0.05 < shrink(100.0, r) < 3.0


def test_shrinks_toward_zero_near_origin():
    r = rule(2, 3)
    assert abs(shrink(0.3, r)) < 0.3


def test_higher_order_agrees():
    lo, hi = rule(7, 1), rule(7, 1, quadrature_order=128)
    assert np.max(np.abs(shrink(GRID, lo) - shrink(GRID, hi))) < 1e-9


def test_alpha_zero_and_small_sigma():
    r = rule(3, 7, alpha=0.0, m=10, sigma=0.01)
    assert abs(shrink(2.0, r) - 2.0) < 0.01


def test_scalar_and_shape_preserved():
    r = rule(2, 3)
    assert np.ndim(shrink(1.0, r)) == 0
    assert shrink(np.ones((3, 4)), r).shape == (3, 4)


def test_chunking_consistent(rng):
    r = rule(2, 3)
    d = rng.normal(0, 3, 9000)
    assert np.array_equal(shrink(d, r), np.concatenate([shrink(d[:100], r), shrink(d[100:], r)]))


def test_invalid_inputs():
    with pytest.raises(ValueError):
        rule(2, 3, sigma=0.0)
    with pytest.raises(ValueError):
        rule(2, 3, quadrature_order=8)
    with pytest.raises(ValueError):
        shrink(np.nan, rule(2, 3))
    with pytest.raises(ValueError):
        shrink_oracle(0.0, rule(2, 3), grid_size=100)


def test_shrinkage_error_is_floating_point_error():
    assert issubclass(ShrinkageError, FloatingPointError)


def test_pyramid_application(rng):
    pyr = forward(rng.standard_normal(64), "daub8", J0=3)
    rules = {j: ZeroRule() for j in pyr.levels}
    rules[5] = IdentityRule()
    out = shrink_pyramid(pyr, rules)
    assert np.all(out.details[3] == 0)
    assert np.array_equal(out.details[5], pyr.details[5])
    assert np.array_equal(out.coarse, pyr.coarse)
    del rules[4]
    with pytest.raises(KeyError):
        shrink_pyramid(pyr, rules)
