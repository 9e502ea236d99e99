"""Command-line front end.

    betashrink denoise  input.csv -o out.csv [--method beta] [--a 2 --b 3] ...
    betashrink simulate table_5_1_context1_small.json -o results.csv
    betashrink risk     table_3_1.json -o risks.csv [--curve-out curve.csv]
    betashrink genfunc  bumps --n 512 -o bumps.csv

Precedence for denoise options: config file > command-line flags > defaults.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import tempfile
import warnings
from contextlib import contextmanager
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .dwt import FILTERS
from .elicitation import ElicitationConfig, default_J0, sample_skewness
from .pipeline import METHODS, MethodConfig, canonical_method, denoise
from .prior import BetaMixturePrior, SymmetricPriorWarning
from .riskanalysis import bayes_risk, best_fit_sigma, risk_curve
from .shrinkage import BetaShrinkageRule
from .signals import TEST_FUNCTIONS, evaluate_test_function, sampling_grid
from .simharness import (
    SCHEMA_VERSION,
    ExperimentScenario,
    ScenarioError,
    export,
    import_external,
    merge_results,
    run_scenario,
)

log = logging.getLogger("betashrink")

MIN_POINTS = 16
FULL_RUNS = {"prior-coefficients": 1000, "test-function": 500}

DENOISE_DEFAULTS = {
    "wavelet": "daub8",
    "method": "beta",
    "a": None,
    "b": None,
    "gamma": 2.0,
    "j0": None,
    "sigma": None,
    "seed": 0,
    "pad": "none",
    "q": 0.05,
    "levelwise": True,
}


class CliError(Exception):
    pass


# -- file helpers -------------------------------------------------------------

@contextmanager
def _atomic_outputs():
    """Collect output paths; on error remove any that were already written."""
    written: list[Path] = []
    try:
        yield written
    except BaseException:
        for p in written:
            try:
                p.unlink()
            except FileNotFoundError:
                pass
        raise


def _write_text(path: Path, text: str, written: list[Path]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)
    written.append(path)


def _csv_text(header, rows) -> str:
    out = [",".join(header)]
    for row in rows:
        out.append(",".join(v if isinstance(v, str) else repr(float(v)) for v in row))
    return "\n".join(out) + "\n"


def read_signal_csv(path) -> tuple[np.ndarray | None, np.ndarray]:
    """Read a one-column (``y``) or two-column (``x,y``) CSV with a header row."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CliError(f"{path}: empty file") from None
        ncol = len(header)
        if ncol not in (1, 2):
            raise CliError(f"{path}: expected 1 or 2 columns, header has {ncol}")
        xs, ys = [], []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != ncol:
                raise CliError(f"{path}:{lineno}: expected {ncol} fields, got {len(row)}")
            try:
                vals = [float(c) for c in row]
            except ValueError:
                raise CliError(f"{path}:{lineno}: non-numeric value in {row!r}") from None
            if not all(np.isfinite(vals)):
                raise CliError(f"{path}:{lineno}: non-finite value in {row!r}")
            if ncol == 2:
                xs.append(vals[0])
            ys.append(vals[-1])
    return (np.array(xs) if ncol == 2 else None), np.array(ys)


def _load_json(path, what: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: malformed {what} JSON ({exc})") from None


def _bundled(name: str) -> Path | None:
    base = resources.files("betashrink") / "scenarios"
    for candidate in (name, f"{name}.json"):
        p = base / candidate
        if p.is_file():
            return Path(str(p))
    return None


def _resolve(path_or_name: str) -> Path:
    p = Path(path_or_name)
    if p.exists():
        return p
    bundled = _bundled(path_or_name)
    if bundled is None:
        raise CliError(f"no such file or bundled config: {path_or_name}")
    return bundled


# -- denoise ------------------------------------------------------------------

def _denoise_options(args) -> dict:
    opts = dict(DENOISE_DEFAULTS)
    for key in DENOISE_DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            opts[key] = val
    if args.config:
        cfg = _load_json(args.config, "config")
        unknown = set(cfg) - set(DENOISE_DEFAULTS) - {"schema_version"}
        if unknown:
            raise CliError(f"{args.config}: unknown config field(s) {sorted(unknown)}")
        opts.update({k: v for k, v in cfg.items() if k != "schema_version"})
    opts["method"] = canonical_method(opts["method"])
    if opts["wavelet"] not in FILTERS:
        raise CliError(f"unknown wavelet {opts['wavelet']!r}")
    if (opts["a"] is None) != (opts["b"] is None):
        raise CliError("give both --a and --b, or neither (automatic shapes)")
    if opts["pad"] not in ("none", "reflect"):
        raise CliError("--pad must be 'none' or 'reflect'")
    return opts


def _dyadic_prepare(y: np.ndarray, pad: str):
    n = y.size
    if n < MIN_POINTS:
        raise CliError(f"need at least {MIN_POINTS} data points, got {n}")
    J = int(np.floor(np.log2(n)))
    if 2 ** J == n:
        return y, n
    if pad == "reflect":
        target = 2 ** (J + 1)
        return np.pad(y, (0, target - n), mode="symmetric"), n
    return y[: 2 ** J], 2 ** J


def cmd_denoise(args) -> int:
    opts = _denoise_options(args)
    x, y = read_signal_csv(args.input)
    work, keep = _dyadic_prepare(y, opts["pad"])
    shapes = "auto" if opts["a"] is None else (float(opts["a"]), float(opts["b"]))
    J0 = opts["j0"] if opts["j0"] is not None else default_J0(work.size)
    config = MethodConfig(
        ElicitationConfig(gamma=float(opts["gamma"]), shapes=shapes),
        levelwise=bool(opts["levelwise"]),
        q=float(opts["q"]),
    )
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        est, (emp, shrunk), info = denoise(
            work, opts["method"], opts["wavelet"], J0, config, opts["sigma"]
        )
    est = est[:keep]
    if x is None:
        x_out = np.arange(keep, dtype=float)
    else:
        x_out = x[:keep]

    sigma_hat = info.get("sigma")
    details_emp = emp.all_details()
    details_new = shrunk.all_details()
    cut = 1e-6 * sigma_hat if sigma_hat else 0.0
    diag = {
        "schema_version": SCHEMA_VERSION,
        "input": str(args.input),
        "n_input": int(y.size),
        "n_used": int(keep),
        "effective_config": {**opts, "j0": J0},
        "sigma_hat": sigma_hat,
        "skewness": sample_skewness(details_emp),
        "levels": [
            {"level": lv.level, "alpha": lv.alpha, "m": lv.m}
            for lv in info.get("levels", [])
        ],
        "shapes": [info["a"], info["b"]] if "a" in info else None,
        "sparsity": float(np.mean(np.abs(details_new) <= cut)),
        "warnings": sorted({str(w.message) for w in caught}),
    }
    out = Path(args.output)
    diag_path = Path(args.diagnostics) if args.diagnostics else out.with_name(out.stem + ".diagnostics.json")
    with _atomic_outputs() as written:
        _write_text(out, _csv_text(["x", "y"], zip(x_out, est)), written)
        _write_text(diag_path, json.dumps(diag, indent=2, default=float) + "\n", written)
    log.info("denoised %d points -> %s", keep, out)
    return 0


# -- simulate -----------------------------------------------------------------

def cmd_simulate(args) -> int:
    path = _resolve(args.scenario)
    raw = _load_json(path, "scenario")
    if not isinstance(raw, dict):
        raise ScenarioError("<root>", "scenario must be a JSON object")
    raw = dict(raw)
    if args.full:
        raw["runs"] = FULL_RUNS.get(raw.get("kind"), raw.get("runs"))
    if args.runs is not None:
        raw["runs"] = args.runs
    if args.seed is not None:
        raw["base_seed"] = args.seed
    if args.snr is not None:
        raw["snr"] = args.snr
    scenario = ExperimentScenario.from_dict(raw)
    result = run_scenario(scenario, workers=args.workers)
    if result.failures:
        for f in result.failures[:10]:
            log.error("run %(run)s method %(method)s failed: %(error)s", f)
        raise CliError(f"{len(result.failures)} method run(s) failed; no results written")
    for ext in args.external or []:
        result = merge_results(result, import_external(ext))
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    with _atomic_outputs() as written, tempfile.TemporaryDirectory(dir=out.parent) as tmpdir:
        for p in export(result, Path(tmpdir) / out.name, args.format):
            final = out.parent / p.name
            os.replace(p, final)
            written.append(final)
    for m, v in result.amse.items():
        print(f"{m:10s} AMSE={v:.6g}")
    return 0


# -- risk ---------------------------------------------------------------------

def _risk_rows(args) -> tuple[list[dict], float, float | None, int]:
    if args.config:
        cfg = _load_json(_resolve(args.config), "risk config")
        rows = cfg.get("rows")
        if not rows:
            raise CliError("risk config needs a non-empty 'rows' list")
        sigma = float(args.sigma if args.sigma is not None else cfg.get("sigma", 1.0))
        tol = cfg.get("tolerance")
        points = int(cfg.get("curve", {}).get("points", 121))
        return rows, sigma, tol, points
    needed = ("alpha", "a", "b", "m")
    if any(getattr(args, k) is None for k in needed):
        raise CliError("give a risk config or all of --alpha --a --b --m")
    row = {k: getattr(args, k) for k in needed}
    return [row], float(args.sigma if args.sigma is not None else 1.0), None, 121


def cmd_risk(args) -> int:
    rows, sigma, tol, points = _risk_rows(args)
    if args.tolerance is not None:
        tol = args.tolerance
    priors, table = [], []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SymmetricPriorWarning)
        for row in rows:
            prior = BetaMixturePrior(float(row["alpha"]), float(row["a"]), float(row["b"]), float(row["m"]))
            priors.append(prior)
            r = bayes_risk(BetaShrinkageRule(prior, sigma))
            table.append((prior, r, row.get("target")))
    header = ["alpha", "a", "b", "m", "sigma", "bayes_risk", "target"]
    lines = [
        (p.alpha, p.a, p.b, p.m, sigma, r, "" if t is None else float(t)) for p, r, t in table
    ]
    with _atomic_outputs() as written:
        _write_text(Path(args.output), _csv_text(header, lines), written)
        if args.curve_out:
            curve_rows = []
            for p in priors:
                grid = np.linspace(-p.m, p.m, points)
                curve = risk_curve(BetaShrinkageRule(p, sigma), grid)
                curve_rows += [(p.alpha, p.a, p.b, p.m) + row for row in curve.rows()]
            _write_text(
                Path(args.curve_out),
                _csv_text(["alpha", "a", "b", "m", "theta", "bias2", "variance", "risk"], curve_rows),
                written,
            )
    for p, r, t in table:
        extra = "" if t is None else f"  target={t}  diff={r - t:+.4f}"
        print(f"alpha={p.alpha} a={p.a} b={p.b} m={p.m} sigma={sigma}: r={r:.4f}{extra}")
    targets = [(p, t) for p, r, t in table if t is not None]
    if tol is not None and targets:
        worst = max(abs(r - t) for p, r, t in table if t is not None)
        if worst > tol:
            s, err = best_fit_sigma([p for p, _ in targets], [t for _, t in targets])
            print(
                f"FAIL: max |r - target| = {worst:.4f} > {tol}; best-fitting sigma = {s:.3f} "
                f"(max error {err:.4f})",
                file=sys.stderr,
            )
            return 1
        print(f"PASS: all Bayes risks within {tol} of their targets")
    return 0


# -- genfunc ------------------------------------------------------------------

def cmd_genfunc(args) -> int:
    f = evaluate_test_function(args.name, args.n, args.sd)
    x = sampling_grid(args.n)
    with _atomic_outputs() as written:
        _write_text(Path(args.output), _csv_text(["x", "f"], zip(x, f)), written)
    return 0


# -- argument parsing ---------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="betashrink", description="Asymmetric Bayesian wavelet shrinkage."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("denoise", help="denoise a signal stored in a CSV file")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--diagnostics", help="diagnostics JSON path (default: <output>.diagnostics.json)")
    p.add_argument("--config", help="JSON file; its values override flags")
    p.add_argument("--wavelet", choices=sorted(FILTERS))
    p.add_argument("--method", choices=list(METHODS) + ["univ"])
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--j0", type=int)
    p.add_argument("--sigma", type=float, help="noise sd (default: MAD estimate)")
    p.add_argument("--seed", type=int)
    p.add_argument("--pad", choices=["none", "reflect"])
    p.add_argument("--q", type=float, help="FDR level")
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("simulate", help="run a Monte-Carlo scenario")
    p.add_argument("scenario", help="scenario JSON path or bundled scenario name")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--runs", type=int)
    p.add_argument("--seed", type=int, help="base seed")
    p.add_argument("--snr", type=float)
    p.add_argument("--full", action="store_true", help="use the full run counts (1000 / 500)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--external", action="append", help="CSV of externally computed per-run MSEs")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("risk", help="Bayes risk table and classical risk curves")
    p.add_argument("config", nargs="?", help="risk config JSON path or bundled name")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--curve-out")
    p.add_argument("--alpha", type=float)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--m", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--seed", type=int, help="accepted for uniformity; risk is deterministic")
    p.set_defaults(func=cmd_risk)

    p = sub.add_parser("genfunc", help="sample a Donoho-Johnstone test function")
    p.add_argument("name", choices=sorted(TEST_FUNCTIONS))
    p.add_argument("--n", type=int, default=512)
    p.add_argument("--sd", type=float, help="rescale to this standard deviation")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--seed", type=int, help="accepted for uniformity; output is deterministic")
    p.set_defaults(func=cmd_genfunc)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (CliError, ScenarioError, ValueError, OSError) as exc:
        print(f"betashrink {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
