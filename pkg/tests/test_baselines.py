import numpy as np
import pytest

from betashrink.baselines import (
    SoftThresholdRule,
    ThresholdRule,
    fdr_rejections,
    fdr_threshold,
    soft,
    sure_risk,
    sure_threshold,
    universal_threshold,
)
from betashrink.dwt import forward


def test_soft_examples():
    assert np.array_equal(soft([-3.0, -0.5, 0.0, 0.5, 3.0], 1.0), [-2.0, 0.0, 0.0, 0.0, 2.0])
    assert soft(2.0, 0.0) == 2.0
    with pytest.raises(ValueError):
        soft(1.0, -0.1)


def test_universal():
    assert np.isclose(universal_threshold(512, 2.0), 2.0 * np.sqrt(2 * np.log(512)))
    with pytest.raises(ValueError):
        universal_threshold(1, 1.0)


def test_sure_threshold_minimizes_sure(rng):
    d = np.concatenate([rng.normal(0, 1, 200), rng.normal(5, 1, 20)])
    lam = sure_threshold(d, 1.0)
    grid = np.linspace(0, np.abs(d).max(), 4001)
    assert sure_risk(d, 1.0, lam) <= np.min(sure_risk(d, 1.0, grid)) + 1e-9


def test_sure_matches_brute_force(rng):
    d = rng.normal(0, 2, 50)
    cand = np.concatenate([[0.0], np.abs(d)])
    brute = cand[np.argmin([sure_risk(d, 1.0, c) for c in cand])]
    assert sure_threshold(d, 1.0) == brute


def test_sure_pure_noise_threshold_is_large(rng):
    d = rng.standard_normal(4096)
    assert sure_threshold(d, 1.0) > 1.0


def test_fdr_rejects_large_coefficient():
    d = np.zeros(64)
    d[5] = 10.0
    mask = fdr_rejections(d, 1.0)
    assert mask[5] and mask.sum() == 1
    lam = fdr_threshold(d, 1.0)
    assert soft(d, lam)[5] > 0
    assert np.count_nonzero(soft(d, lam)) == 1


def test_fdr_no_rejection_kills_everything():
    d = np.full(32, 0.1)
    lam = fdr_threshold(d, 1.0)
    assert np.all(soft(d, lam) == 0)


def test_fdr_all_rejected():
    assert fdr_threshold(np.full(16, 20.0), 1.0) == 0.0


def test_fdr_monotone_in_q(rng):
    d = np.concatenate([rng.standard_normal(200), rng.normal(4, 1, 30)])
    lams = [fdr_threshold(d, 1.0, q) for q in (0.01, 0.05, 0.2)]
    assert lams[0] >= lams[1] >= lams[2]


def test_fdr_invalid_q():
    with pytest.raises(ValueError):
        fdr_rejections(np.ones(4), 1.0, q=1.5)


def test_threshold_rule_modes(rng):
    pyr = forward(rng.standard_normal(256), "daub8", J0=3)
    for policy in ("universal", "sure", "fdr"):
        for levelwise in (True, False):
            out = ThresholdRule(policy, 1.0, levelwise=levelwise).apply(pyr)
            assert np.all(np.abs(out.all_details()) <= np.abs(pyr.all_details()))
            assert np.array_equal(out.coarse, pyr.coarse)


def test_threshold_rule_validation():
    with pytest.raises(ValueError):
        ThresholdRule("hard", 1.0)
    with pytest.raises(ValueError):
        ThresholdRule("sure", 0.0)


def test_soft_rule_callable():
    assert SoftThresholdRule(1.0)(2.5) == 1.5
