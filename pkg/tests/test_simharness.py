import json

import numpy as np
import pytest

from betashrink.simharness import (
    ExperimentScenario,
    RunRecord,
    ScenarioError,
    comparison_table,
    export,
    import_external,
    import_results,
    merge_results,
    mse,
    run_scenario,
)

PRIOR = {"alpha": 0.9, "a": 3, "b": 7, "m": 10}


def small(**kw):
    base = dict(kind="prior-coefficients", n=256, snr=3.0, runs=3, base_seed=11, prior=PRIOR, shapes=[3, 7])
    base.update(kw)
    return ExperimentScenario.from_dict(base)


def test_mse():
    assert mse([1, 2], [1, 2]) == 0
    assert mse(np.ones(5) + 2, np.ones(5)) == 4
    x, y = np.random.default_rng(0).normal(size=(2, 50))
    assert np.isclose(mse(x, y), sum((a - b) ** 2 for a, b in zip(x, y)) / 50)
    with pytest.raises(ValueError):
        mse([1, 2], [1])


@pytest.mark.parametrize("raw,field", [
    ({"kind": "prior-coefficients", "n": 256, "runs": 1}, "snr"),
    ({"kind": "x", "n": 256, "snr": 3, "runs": 1}, "kind"),
    ({"kind": "prior-coefficients", "n": 300, "snr": 3, "runs": 1, "prior": PRIOR}, "n"),
    ({"kind": "prior-coefficients", "n": 256, "snr": 3, "runs": 0, "prior": PRIOR}, "runs"),
    ({"kind": "prior-coefficients", "n": 256, "snr": 3, "runs": 1, "prior": {"alpha": 2, "a": 1, "b": 2, "m": 1}}, "prior"),
    ({"kind": "test-function", "n": 256, "snr": 3, "runs": 1, "signal": "ramp"}, "signal"),
    ({"kind": "test-function", "n": 256, "snr": 3, "runs": 1, "signal": "bumps", "methods": ["cv"]}, "methods"),
    ({"kind": "test-function", "n": 256, "snr": 3, "runs": 1, "signal": "bumps", "colour": 1}, "colour"),
    ({"schema_version": 2, "kind": "test-function", "n": 256, "snr": 3, "runs": 1}, "schema_version"),
])
def test_scenario_errors_name_field(raw, field):
    with pytest.raises(ScenarioError) as exc:
        ExperimentScenario.from_dict(raw)
    assert exc.value.field == field
    assert field in str(exc.value)


def test_scenario_round_trip():
    sc = small()
    assert ExperimentScenario.from_dict(json.loads(json.dumps(sc.to_dict()))) == sc


def test_identity_without_noise_is_exact():
    sc = small(snr=None, methods=["identity"], runs=1)
    res = run_scenario(sc)
    assert res.amse["identity"] == 0.0


def test_identity_without_noise_test_function():
    sc = ExperimentScenario.from_dict(
        dict(kind="test-function", n=256, snr=None, runs=1, signal="blocks", methods=["identity"])
    )
    assert run_scenario(sc).amse["identity"] < 1e-20


def test_determinism_and_parallelism():
    sc = small()
    a, b = run_scenario(sc), run_scenario(sc, workers=2)
    assert [r.mse for r in a.per_run] == [r.mse for r in b.per_run]
    assert [r.seed for r in a.per_run if r.method == "beta"] == [11, 12, 13]


def test_amse_is_mean():
    res = run_scenario(small())
    for m in res.methods:
        assert res.amse[m] == float(np.mean(res.mses(m)))
    assert not res.failures


def test_signal_domain_matches_coefficient_domain():
    a = run_scenario(small(runs=1))
    b = run_scenario(small(runs=1, mse_domain="signal"))
    for m in a.methods:
        assert np.isclose(a.amse[m], b.amse[m], rtol=1e-9)


def test_snr_monotone():
    lo = run_scenario(small(snr=3.0, runs=2))
    hi = run_scenario(small(snr=9.0, runs=2))
    for m in lo.methods:
        assert hi.amse[m] < lo.amse[m]


@pytest.mark.parametrize("fmt,suffix", [("csv", ".csv"), ("json", ".json")])
def test_export_import_round_trip(tmp_path, fmt, suffix):
    res = run_scenario(small())
    paths = export(res, tmp_path / f"r{suffix}", fmt)
    back = import_results(paths[0])
    assert back.amse == res.amse


def test_csv_header(tmp_path):
    path = export(run_scenario(small(runs=1)), tmp_path / "r.csv")[0]
    assert path.read_text().splitlines()[0] == "method,run,seed,mse"


def test_tampered_summary_rejected(tmp_path):
    paths = export(run_scenario(small(runs=1)), tmp_path / "r.csv")
    text = paths[1].read_text().splitlines()
    method, runs, _ = text[1].split(",")
    text[1] = f"{method},{runs},123.0"
    paths[1].write_text("\n".join(text) + "\n")
    with pytest.raises(ValueError):
        import_results(paths[0])


def test_external_merge(tmp_path):
    res = run_scenario(small(runs=2))
    ext = tmp_path / "cv.csv"
    ext.write_text("method,run,seed,mse\ncv,0,11,0.5\ncv,1,12,0.7\n")
    merged = merge_results(res, import_external(ext))
    assert merged.amse["cv"] == 0.6
    rows = comparison_table({"ctx1": merged})
    assert {r["method"] for r in rows} >= {"beta", "cv"}
    with pytest.raises(ValueError):
        merge_results(merged, [RunRecord("cv", 0, 0, 1.0)])
