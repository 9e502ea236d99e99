"""Seeded Monte-Carlo experiments: MSE per run, AMSE per method.

Run ``r`` of a scenario uses seed ``base_seed + r`` for all of its random
draws, so any run can be reproduced on its own and runs can be farmed out to
worker processes without changing results.
"""
from __future__ import annotations

import csv
import json
import logging
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .dwt import CoefficientPyramid, dyadic_exponent, get_filter, inverse
from .elicitation import ElicitationConfig, default_J0
from .pipeline import MethodConfig, canonical_method, denoise, denoise_pyramid
from .prior import BetaMixturePrior, SymmetricPriorWarning, sample
from .signals import (
    TEST_FUNCTIONS,
    add_noise,
    evaluate_test_function,
    generate_prior_coefficients,
)

__all__ = [
    "SCHEMA_VERSION",
    "ScenarioError",
    "ExperimentScenario",
    "RunRecord",
    "ExperimentResult",
    "mse",
    "run_scenario",
    "export",
    "import_results",
    "import_external",
    "merge_results",
    "comparison_table",
]

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
KINDS = ("prior-coefficients", "test-function")
RECORD_FIELDS = ("method", "run", "seed", "mse")


class ScenarioError(ValueError):
    """Invalid scenario description; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"scenario field {field!r}: {message}")
        self.field = field


def mse(estimate, truth) -> float:
    """Mean squared difference of two equal-length vectors."""
    estimate = np.asarray(estimate, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if estimate.shape != truth.shape:
        raise ValueError(f"length mismatch: {estimate.shape} vs {truth.shape}")
    return float(np.mean((estimate - truth) ** 2))


@dataclass(frozen=True)
class ExperimentScenario:
    """Everything needed to reproduce an experiment.

    ``snr=None`` injects no noise (used for pipeline sanity checks).
    """

    kind: str
    n: int
    snr: float | None
    runs: int
    base_seed: int = 0
    methods: tuple[str, ...] = ("beta", "universal", "sure", "fdr")
    name: str = ""
    prior: dict | None = None
    signal: str | None = None
    signal_sd: float | None = None
    wavelet: str = "daub8"
    J0: int | None = None
    gamma: float = 2.0
    shapes: tuple[float, float] | str = "auto"
    quadrature_order: int = 64
    levelwise: bool = True
    q: float = 0.05
    mse_domain: str = "coefficient"

    def __post_init__(self):
        try:
            methods = tuple(canonical_method(m) for m in self.methods)
        except (ValueError, AttributeError):
            return  # reported by validate()
        object.__setattr__(self, "methods", methods)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentScenario":
        if not isinstance(raw, dict):
            raise ScenarioError("<root>", "scenario must be a JSON object")
        raw = dict(raw)
        version = raw.pop("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ScenarioError("schema_version", f"unsupported version {version!r}")
        known = set(cls.__dataclass_fields__)
        for key in raw:
            if key not in known:
                raise ScenarioError(key, "unknown field")
        for key in ("kind", "n", "snr", "runs"):
            if key not in raw:
                raise ScenarioError(key, "missing required field")
        if "methods" in raw:
            raw["methods"] = tuple(raw["methods"])
        if isinstance(raw.get("shapes"), list):
            raw["shapes"] = tuple(raw["shapes"])
        try:
            scenario = cls(**raw)
        except TypeError as exc:
            raise ScenarioError("<root>", str(exc)) from None
        scenario.validate()
        return scenario

    def to_dict(self) -> dict:
        out = {"schema_version": SCHEMA_VERSION, **asdict(self)}
        out["methods"] = list(self.methods)
        if isinstance(self.shapes, tuple):
            out["shapes"] = list(self.shapes)
        return out

    def replace(self, **changes) -> "ExperimentScenario":
        return ExperimentScenario.from_dict({**self.to_dict(), **changes})

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ScenarioError("kind", f"must be one of {KINDS}, got {self.kind!r}")
        if not isinstance(self.n, int):
            raise ScenarioError("n", "must be an integer")
        try:
            dyadic_exponent(self.n)
        except ValueError as exc:
            raise ScenarioError("n", str(exc)) from None
        if self.snr is not None and not (isinstance(self.snr, (int, float)) and self.snr > 0):
            raise ScenarioError("snr", "must be a positive number or null")
        if not (isinstance(self.runs, int) and self.runs >= 1):
            raise ScenarioError("runs", "must be an integer >= 1")
        if not isinstance(self.base_seed, int) or self.base_seed < 0:
            raise ScenarioError("base_seed", "must be a non-negative integer")
        if not self.methods:
            raise ScenarioError("methods", "at least one method is required")
        for m in self.methods:
            try:
                canonical_method(m)
            except ValueError as exc:
                raise ScenarioError("methods", str(exc)) from None
        try:
            get_filter(self.wavelet)
        except ValueError as exc:
            raise ScenarioError("wavelet", str(exc)) from None
        J = dyadic_exponent(self.n)
        if self.J0 is not None and not (isinstance(self.J0, int) and 0 <= self.J0 < J):
            raise ScenarioError("J0", f"must be an integer in [0, {J - 1}]")
        if self.kind == "prior-coefficients":
            if not isinstance(self.prior, dict):
                raise ScenarioError("prior", "required for kind 'prior-coefficients'")
            try:
                self.prior_object()
            except (TypeError, ValueError) as exc:
                raise ScenarioError("prior", str(exc)) from None
            if self.mse_domain not in ("coefficient", "signal"):
                raise ScenarioError("mse_domain", "must be 'coefficient' or 'signal'")
        else:
            if self.signal not in TEST_FUNCTIONS:
                raise ScenarioError("signal", f"must be one of {sorted(TEST_FUNCTIONS)}")
            if self.signal_sd is not None and not self.signal_sd > 0:
                raise ScenarioError("signal_sd", "must be positive or null")
        try:
            self.method_config()
        except (TypeError, ValueError) as exc:
            raise ScenarioError("shapes", str(exc)) from None
        if not 0 < self.q < 1:
            raise ScenarioError("q", "must lie in (0, 1)")

    def prior_object(self) -> BetaMixturePrior:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", SymmetricPriorWarning)
            return BetaMixturePrior(**self.prior)

    def method_config(self) -> MethodConfig:
        elic = ElicitationConfig(
            gamma=self.gamma, shapes=self.shapes, quadrature_order=self.quadrature_order
        )
        return MethodConfig(elicitation=elic, levelwise=self.levelwise, q=self.q)

    @property
    def primary_level(self) -> int:
        return self.J0 if self.J0 is not None else default_J0(self.n)


@dataclass(frozen=True)
class RunRecord:
    method: str
    run: int
    seed: int
    mse: float


@dataclass
class ExperimentResult:
    per_run: list[RunRecord]
    scenario: dict | None = None
    failures: list[dict] = field(default_factory=list)
    runtime_seconds: float | None = None

    @property
    def methods(self) -> list[str]:
        seen = []
        for rec in self.per_run:
            if rec.method not in seen:
                seen.append(rec.method)
        return seen

    @property
    def amse(self) -> dict[str, float]:
        return {m: _mean([r.mse for r in self.per_run if r.method == m]) for m in self.methods}

    def mses(self, method: str) -> np.ndarray:
        return np.array([r.mse for r in self.per_run if r.method == method])


def _mean(values) -> float:
    return float(np.mean(np.asarray(values, dtype=float)))


def _one_run(scenario: ExperimentScenario, run: int):
    seed = scenario.base_seed + run
    config = scenario.method_config()
    J0 = scenario.primary_level
    records, failures = [], []

    if scenario.kind == "prior-coefficients":
        prior = scenario.prior_object()
        if scenario.snr is None:
            theta = sample(prior, scenario.n, seed)
            d = theta.copy()
        else:
            theta, d, _ = generate_prior_coefficients(prior, scenario.n, scenario.snr, seed)
        pyr = CoefficientPyramid.from_vector(d, J0)
        truth_pyr = CoefficientPyramid.from_vector(theta, J0)
        for method in scenario.methods:
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    est, _ = denoise_pyramid(pyr, method, config)
                if scenario.mse_domain == "signal":
                    value = mse(inverse(est, scenario.wavelet), inverse(truth_pyr, scenario.wavelet))
                else:
                    value = mse(est.to_vector(), theta)
                records.append(RunRecord(method, run, seed, value))
            except Exception as exc:  # recorded, never silently dropped
                failures.append({"method": method, "run": run, "seed": seed, "error": repr(exc)})
    else:
        clean = evaluate_test_function(scenario.signal, scenario.n, scenario.signal_sd)
        if scenario.snr is None:
            noisy = clean.copy()
        else:
            noisy = add_noise(clean, scenario.snr, seed).noisy
        for method in scenario.methods:
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore")
                    est, _, _ = denoise(noisy, method, scenario.wavelet, J0, config)
                records.append(RunRecord(method, run, seed, mse(est, clean)))
            except Exception as exc:
                failures.append({"method": method, "run": run, "seed": seed, "error": repr(exc)})
    return records, failures


def run_scenario(scenario: ExperimentScenario | dict, workers: int = 1) -> ExperimentResult:
    """Run every repetition of ``scenario`` and collect per-run MSEs.

    Results are identical for any ``workers``: each run is seeded on its
    own and records are gathered in run order.
    """
    if isinstance(scenario, dict):
        scenario = ExperimentScenario.from_dict(scenario)
    start = time.perf_counter()
    runs = range(scenario.runs)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(_one_run, [scenario] * scenario.runs, runs))
    else:
        outputs = [_one_run(scenario, r) for r in runs]
    per_run, failures = [], []
    for records, fails in outputs:
        per_run.extend(records)
        failures.extend(fails)
    # method-major order: all runs of the first method, then the next, ...
    order = {m: i for i, m in enumerate(scenario.methods)}
    per_run.sort(key=lambda r: (order[r.method], r.run))
    if failures:
        log.warning("%d method run(s) failed in scenario %r", len(failures), scenario.name)
    return ExperimentResult(per_run, scenario.to_dict(), failures, time.perf_counter() - start)


def _summary_path(path: Path) -> Path:
    return path.with_name(path.stem + ".amse.csv")


def export(result: ExperimentResult, path, format: str = "csv") -> list[Path]:
    """Write ``result`` to disk. Returns the paths written.

    ``csv`` writes the per-run records (header ``method,run,seed,mse``) to
    ``path`` and an AMSE summary (``method,runs,amse``) next to it as
    ``<stem>.amse.csv``. ``json`` writes a single document holding the
    scenario, records, AMSE map and failures. Floats are written with
    ``repr`` so re-import is exact.
    """
    path = Path(path)
    if format == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(RECORD_FIELDS)
            for r in result.per_run:
                w.writerow([r.method, r.run, r.seed, repr(r.mse)])
        summary = _summary_path(path)
        with open(summary, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["method", "runs", "amse"])
            for m, value in result.amse.items():
                w.writerow([m, len(result.mses(m)), repr(value)])
        return [path, summary]
    if format == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "scenario": result.scenario,
            "amse": result.amse,
            "records": [asdict(r) for r in result.per_run],
            "failures": result.failures,
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
        return [path]
    raise ValueError(f"unknown export format {format!r}")


def _read_records_csv(path: Path) -> list[RunRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != RECORD_FIELDS:
            raise ValueError(f"{path}: expected header {','.join(RECORD_FIELDS)}")
        return [
            RunRecord(row["method"], int(row["run"]), int(row["seed"]), float(row["mse"]))
            for row in reader
        ]


def import_results(path) -> ExperimentResult:
    """Read a CSV or JSON export back; AMSE is recomputed and cross-checked."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        if doc.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"{path}: unsupported schema_version {doc.get('schema_version')!r}")
        result = ExperimentResult(
            [RunRecord(**r) for r in doc["records"]], doc.get("scenario"), doc.get("failures", [])
        )
        stored = doc.get("amse", {})
    else:
        result = ExperimentResult(_read_records_csv(path))
        stored = {}
        summary = _summary_path(path)
        if summary.exists():
            with open(summary, newline="", encoding="utf-8") as fh:
                stored = {row["method"]: float(row["amse"]) for row in csv.DictReader(fh)}
    recomputed = result.amse
    for m, value in stored.items():
        if recomputed.get(m) != value:
            raise ValueError(f"{path}: stored AMSE for {m!r} does not match its records")
    return result


def import_external(path) -> list[RunRecord]:
    """Per-run MSEs of methods computed elsewhere (same CSV schema as export)."""
    return _read_records_csv(Path(path))


def merge_results(result: ExperimentResult, extra: list[RunRecord]) -> ExperimentResult:
    """Add externally computed records (e.g. CV, BAMS, LPM) to ``result``."""
    clash = set(result.methods) & {r.method for r in extra}
    if clash:
        raise ValueError(f"methods already present in result: {sorted(clash)}")
    return ExperimentResult(list(result.per_run) + list(extra), result.scenario, list(result.failures))


def comparison_table(results: dict[str, ExperimentResult]) -> list[dict]:
    """Rows ``{"scenario", "method", "runs", "amse"}`` for a set of labelled results."""
    rows = []
    for label, res in results.items():
        for m, value in res.amse.items():
            rows.append({"scenario": label, "method": m, "runs": len(res.mses(m)), "amse": value})
    return rows
