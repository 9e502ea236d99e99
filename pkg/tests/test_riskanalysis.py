import numpy as np
import pytest

from betashrink.baselines import SoftThresholdRule
from betashrink.prior import BetaMixturePrior
from betashrink.riskanalysis import bayes_risk, best_fit_sigma, classical_risk, risk_curve
from betashrink.shrinkage import BetaShrinkageRule, IdentityRule


def test_identity_rule_risk_is_sigma_squared():
    bias, var, risk = classical_risk(IdentityRule(), 1.3, sigma=2.0)
    assert abs(bias) < 1e-12
    assert abs(risk - 4.0) < 1e-10


def test_soft_threshold_at_zero_lambda_matches_identity():
    _, _, risk = classical_risk(SoftThresholdRule(0.0), -0.7, sigma=1.5)
    assert abs(risk - 2.25) < 1e-10


def test_sigma_required_for_plain_rules():
    with pytest.raises(ValueError):
        classical_risk(IdentityRule(), 0.0)


def test_curve_decomposition(prior73):
    r = BetaShrinkageRule(prior73, 1.0)
    curve = risk_curve(r, np.linspace(-3, 3, 25))
    assert np.allclose(curve.risk, curve.bias2 + curve.variance, atol=1e-14)
    assert np.all(curve.variance >= 0)


def test_curve_rejects_grid_outside_support(prior73):
    with pytest.raises(ValueError):
        risk_curve(BetaShrinkageRule(prior73, 1.0), [0.0, 3.5])


def test_curve_csv(tmp_path, prior73):
    curve = risk_curve(BetaShrinkageRule(prior73, 1.0), [-1.0, 0.0, 1.0])
    path = tmp_path / "c.csv"
    curve.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "theta,bias2,variance,risk"
    assert len(lines) == 4


def test_bayes_risk_below_prior_variance(prior73):
    from betashrink.prior import prior_variance
    r = bayes_risk(BetaShrinkageRule(prior73, 1.0))
    assert 0 < r < min(1.0, prior_variance(prior73))


def test_bayes_rule_beats_mismatched_rule(prior73):
    own = bayes_risk(BetaShrinkageRule(prior73, 1.0))
    other = bayes_risk(BetaShrinkageRule(prior73.swapped(), 1.0), prior=prior73)
    assert own < other


def test_best_fit_sigma_recovers_generating_sigma():
    priors = [BetaMixturePrior(0.9, 7, b, 3) for b in (1, 3)]
    targets = [bayes_risk(BetaShrinkageRule(p, 0.8)) for p in priors]
    s, err = best_fit_sigma(priors, targets, sigmas=np.linspace(0.6, 1.0, 21))
    assert abs(s - 0.8) < 1e-9 and err < 1e-9
