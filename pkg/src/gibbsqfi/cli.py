"""Batch command line: metric tables, sweeps, moments and the verify suite.

Jobs are described by a JSON config; outputs are CSV (tables) or JSON
(reports) and are a pure function of (config, seed), so reruns are
byte-identical.  QFI_NUM_THREADS caps the worker threads used for sweep
points; results are emitted in canonical order regardless.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import families as fam
from .dsf import build_dsf, sum_rule_report
from .hilbert import HermitianOperator, gibbs_state, read_operator_json, write_operator_json
from .inequalities import run_verification_suite
from .metrics import (
    metric_from_dsf,
    metric_mc_oracle,
    metric_series_A,
    metric_series_B,
    metric_spectral,
)
from .models import BosonModel, SpinModel, boson_build, spin_build

__all__ = ["main", "JobConfig", "run_metric_job"]


class UsageError(Exception):
    """Invalid configuration or arguments; maps to exit code 2."""


@dataclass
class JobConfig:
    """Validated batch job description."""

    model: dict
    beta: float
    families: list[fam.MonotoneFamily]
    methods: list[str]
    sweep: dict | None
    output: dict | None

    @classmethod
    def from_dict(cls, raw: dict) -> "JobConfig":
        problems = []
        model = raw.get("model")
        if not isinstance(model, dict):
            problems.append("model: required object (model spec or matrix paths)")
            model = {}
        beta = raw.get("beta", 1.0)
        if not isinstance(beta, (int, float)) or beta <= 0:
            problems.append(f"beta: must be a positive number, got {beta!r}")
            beta = 1.0
        family_ids = raw.get("families", [])
        if not isinstance(family_ids, list):
            problems.append("families: must be a list of identifiers")
            family_ids = []
        families = []
        for text in family_ids:
            try:
                parsed = parse_family_expanding(str(text))
            except ValueError as exc:
                problems.append(f"families: {exc}")
                continue
            families.extend(parsed)
        if not families:
            problems.append("families: at least one family identifier required")
        methods = raw.get("methods", ["spectral"])
        if not isinstance(methods, list):
            problems.append("methods: must be a list")
            methods = []
        methods = [str(m) for m in methods]
        for m in methods:
            try:
                _parse_method(m)
            except ValueError as exc:
                problems.append(f"methods: {exc}")
        if not methods:
            problems.append("methods: at least one method required")
        sweep = raw.get("sweep")
        if sweep is not None:
            if (
                not isinstance(sweep, dict)
                or "parameter" not in sweep
                or not isinstance(sweep.get("grid"), list)
                or not sweep["grid"]
            ):
                problems.append("sweep: needs {'parameter': name, 'grid': [values...]}")
                sweep = None
        output = raw.get("output")
        if problems:
            raise UsageError("invalid config:\n  " + "\n  ".join(problems))
        return cls(model, float(beta), families, methods, sweep, output)


def parse_family_expanding(text: str) -> list[fam.MonotoneFamily]:
    """Parse a family identifier, expanding pair:d into its two members."""
    family = fam.parse_family(text)
    if family.kind == "pair":
        return list(family.members)
    return [family]


def _parse_method(spec: str):
    base, _, arg = spec.partition(":")
    if base in ("oracle", "spectral", "dsf"):
        if arg:
            raise ValueError(f"method {base!r} takes no argument")
        return base, None
    if base in ("seriesA", "seriesB"):
        try:
            L = int(arg)
        except ValueError:
            raise ValueError(f"method {spec!r}: truncation L must be an integer") from None
        if L < 1:
            raise ValueError(f"method {spec!r}: truncation L must be >= 1")
        return base, L
    raise ValueError(f"unknown method {spec!r}")


def _resolve_model(model: dict, override: tuple[str, float] | None = None):
    """Build (T, S) from a model spec or matrix file paths."""
    spec = dict(model)
    if override is not None:
        name, value = override
        spec[name] = value
    kind = spec.get("model")
    if kind == "spin":
        try:
            m = SpinModel(float(spec["S"]), float(spec["omega0"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"spin model: {exc}") from None
        return spin_build(m)
    if kind == "boson":
        try:
            m = BosonModel(int(spec["k"]), float(spec["omega"]), int(spec["cutoff"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"boson model: {exc}") from None
        return boson_build(m)
    if kind is None and "T" in spec and "S" in spec:
        try:
            T, _ = read_operator_json(spec["T"])
            S, _ = read_operator_json(spec["S"])
        except FileNotFoundError as exc:
            raise UsageError(f"matrix file not found: {exc.filename}") from None
        except (KeyError, ValueError, json.JSONDecodeError) as exc:
            raise UsageError(f"bad matrix file: {exc}") from None
        return T, S
    raise UsageError(
        "model must be {'model': 'spin'|'boson', ...} or {'T': path, 'S': path}"
    )


def _sweep_points(config: JobConfig):
    if config.sweep is None:
        return [(None, None)]
    name = config.sweep["parameter"]
    if name not in ("beta", "omega0", "omega"):
        raise UsageError(f"sweep parameter must be beta, omega0 or omega, not {name!r}")
    return [(name, float(v)) for v in config.sweep["grid"]]


def _num_threads() -> int:
    raw = os.environ.get("QFI_NUM_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _rows_for_point(config: JobConfig, point):
    name, value = point
    beta = config.beta
    override = None
    if name == "beta":
        beta = value
    elif name is not None:
        override = (name, value)
    T, S = _resolve_model(config.model, override)
    state = gibbs_state(HermitianOperator(beta * T.matrix))
    spectrum = None
    rows = []
    for family in config.families:
        for method_spec in config.methods:
            base, L = _parse_method(method_spec)
            if base == "oracle":
                result = metric_mc_oracle(state, S, family)
            elif base == "spectral":
                result = metric_spectral(state, S, family)
            elif base == "dsf":
                if spectrum is None:
                    spectrum = build_dsf(state, S)
                result = metric_from_dsf(spectrum, family)
            elif base == "seriesA":
                result = metric_series_A(state, S, family, L)
            else:
                result = metric_series_B(state, S, family, L)
            rows.append(
                {
                    "family": family.label,
                    "parameter": "" if name is None else f"{name}={value:g}",
                    "method": method_spec,
                    "value": result.value,
                    "L": "" if result.diagnostics.truncation is None else result.diagnostics.truncation,
                    "radius_ok": result.diagnostics.convergence_radius_ok,
                }
            )
    return rows


def run_metric_job(config: JobConfig) -> tuple[list[dict], list[str]]:
    """All output rows for a job, in canonical order, plus warnings."""
    points = _sweep_points(config)
    threads = _num_threads()
    if threads > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            per_point = list(pool.map(lambda p: _rows_for_point(config, p), points))
    else:
        per_point = [_rows_for_point(config, p) for p in points]
    rows = [row for chunk in per_point for row in chunk]
    warnings = [
        f"series truncation outside convergence radius: {row['family']} {row['method']} {row['parameter']}"
        for row in rows
        if row["radius_ok"] is False
    ]
    return rows, warnings


def _format_rows_csv(rows, header) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=header, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_cell(row[k]) for k in header})
    return buffer.getvalue()


def _csv_cell(value):
    if isinstance(value, float):
        return repr(value)
    return value


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _resolve_output(args, config: JobConfig | None, default_format: str):
    out = getattr(args, "out", None)
    fmt = getattr(args, "format", None)
    if config is not None and config.output:
        out = out or config.output.get("path")
        fmt = fmt or config.output.get("format")
    return out, (fmt or default_format)


def _load_config(args) -> JobConfig:
    if not args.config:
        raise UsageError("--config is required for this subcommand")
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise UsageError(f"config file not found: {args.config}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config is not valid JSON: {exc}") from None
    return JobConfig.from_dict(raw)


def _cmd_metric(args) -> int:
    config = _load_config(args)
    if args.require_sweep and config.sweep is None:
        raise UsageError("sweep subcommand needs a 'sweep' section in the config")
    rows, warnings = run_metric_job(config)
    out, fmt = _resolve_output(args, config, "csv")
    if fmt == "csv":
        text = _format_rows_csv(rows, ["family", "parameter", "method", "value", "L", "radius_ok"])
        if warnings:
            text = "".join(f"# warning: {w}\n" for w in warnings) + text
    elif fmt == "json":
        text = json.dumps({"rows": rows, "warnings": warnings}, indent=2, sort_keys=True) + "\n"
    else:
        raise UsageError(f"unknown format {fmt!r}")
    _emit(text, out)
    return 0


def _cmd_verify(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    summary = run_verification_suite(args.seed, args.trials)
    out, fmt = _resolve_output(args, None, "json")
    if fmt != "json":
        raise UsageError("verify reports are JSON only")
    _emit(json.dumps(summary.to_dict(), indent=2, sort_keys=True) + "\n", out)
    return 0 if summary.passed else 1


def _cmd_moments(args) -> int:
    config = _load_config(args)
    T, S = _resolve_model(config.model)
    state = gibbs_state(HermitianOperator(config.beta * T.matrix))
    rows = [
        {
            "p": row.p,
            "functional": row.functional,
            "moment_doubled": row.moment_doubled,
            "rel_error": row.rel_error,
        }
        for row in sum_rule_report(state, S, p_max=args.pmax)
    ]
    out, fmt = _resolve_output(args, config, "csv")
    if fmt == "csv":
        text = _format_rows_csv(rows, ["p", "functional", "moment_doubled", "rel_error"])
    elif fmt == "json":
        text = json.dumps({"rows": rows}, indent=2, sort_keys=True) + "\n"
    else:
        raise UsageError(f"unknown format {fmt!r}")
    _emit(text, out)
    return 0


def _cmd_model(args) -> int:
    config = _load_config(args)
    T, S = _resolve_model(config.model)
    state = gibbs_state(HermitianOperator(config.beta * T.matrix))
    spectrum = build_dsf(state, S)
    summary = {
        "dim": T.dim,
        "beta": config.beta,
        "spectral_range": float(
            state.decomposition.eigenvalues[-1] - state.decomposition.eigenvalues[0]
        ),
        "dsf_lines": int(spectrum.omegas.size),
        "mean_S": spectrum.mean_s,
    }
    if args.out:
        write_operator_json(T, f"{args.out}_T.json")
        write_operator_json(S, f"{args.out}_S.json")
        summary["written"] = [f"{args.out}_T.json", f"{args.out}_S.json"]
    sys.stdout.write(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gibbsqfi",
        description="Monotone Riemannian metrics on Gibbs states: batch tools",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, config=True):
        if config:
            p.add_argument("--config", help="path to the JSON job config")
        p.add_argument("--out", help="output file (stdout when omitted)")
        p.add_argument("--format", choices=("csv", "json"), help="output format")

    p_metric = sub.add_parser("metric", help="metric table for one job")
    add_common(p_metric)
    p_metric.set_defaults(func=_cmd_metric, require_sweep=False)

    p_sweep = sub.add_parser("sweep", help="metric table over a parameter grid")
    add_common(p_sweep)
    p_sweep.set_defaults(func=_cmd_metric, require_sweep=True)

    p_verify = sub.add_parser("verify", help="randomized inequality and sum-rule suite")
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--trials", type=int, default=100)
    add_common(p_verify, config=False)
    p_verify.set_defaults(func=_cmd_verify)

    p_moments = sub.add_parser("moments", help="moment sum-rule table")
    add_common(p_moments)
    p_moments.add_argument("--pmax", type=int, default=6)
    p_moments.set_defaults(func=_cmd_moments)

    p_model = sub.add_parser("model", help="build a model and export its matrices")
    add_common(p_model)
    p_model.set_defaults(func=_cmd_model)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
