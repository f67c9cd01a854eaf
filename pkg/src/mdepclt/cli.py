"""Command-line front end: model configs in, machine-readable reports out.

The CLI is a thin shell: each command assembles its payload through a
library function in this module, so scripted library use and the command
line produce byte-identical output.

Exit codes: 0 success, 1 check/threshold violation, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import conditions as cond
from . import martingale as mart
from . import montecarlo as mc
from .models import (
    ArrayModel,
    InvalidParameterError,
    Schedule,
    build_model,
    model_from_config,
    model_to_config,
)

DEFAULT_KS_THRESHOLD = 0.05

#: sweep default: wide enough that bounded rows reach their exactly-zero
#: Lindeberg regime even at the smallest representative eps (evaluation is
#: closed-form, so the extra points cost nothing)
SWEEP_N_GRID = tuple(2**k for k in range(6, 23))

#: clt default: sampling is the expensive path, start at 2^8
CLT_N_GRID = tuple(2**k for k in range(8, 15))


class ConfigError(ValueError):
    """Malformed run configuration (reported with exit code 2)."""


def parse_grid(text: str) -> list[int]:
    """Either comma-separated sizes ("64,256,1024") or a dyadic exponent
    range ("6..14" meaning 2^6 .. 2^14)."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = text.split("..")
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValueError
            return [2**k for k in range(lo, hi + 1)]
        return [int(tok) for tok in text.split(",") if tok]
    except ValueError:
        raise ConfigError(f"cannot parse n-grid {text!r}") from None


def parse_floats(text: str, name: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok]
    except ValueError:
        raise ConfigError(f"cannot parse {name} list {text!r}") from None


def catalogue() -> dict[str, ArrayModel]:
    """Models exercised by the sweep command."""
    return {
        "iid-baseline": build_model("iid-baseline"),
        "two-scale": build_model("two-scale", alpha=0.25),
        "block-repeat": build_model("block-repeat", m_schedule=2),
        "block-repeat-gaussian": build_model(
            "block-repeat", innovation="normal", m_schedule=Schedule("power", 0.25)
        ),
        "tail-coupled": build_model("tail-coupled", m_schedule=Schedule("power", 0.25)),
        "moving-average": build_model("moving-average", coeffs=(1.0, 0.5)),
    }


# ---------------------------------------------------------------------------
# payload builders (library surface mirrored by the CLI)


def conditions_payload(model: ArrayModel, n_grid, eps_list, r_list) -> dict:
    """All condition reports for one model over one grid."""
    reports = []
    for eps in eps_list:
        reports.append(cond.condition_report(cond.lindeberg_classic, model, n_grid, eps=eps))
        reports.append(
            cond.condition_report(cond.lindeberg_mdep, model, n_grid, eps=eps, zero_m="promote")
        )
    for r in r_list:
        reports.append(cond.condition_report(cond.lyapunov_ratio, model, n_grid, r=r))
    reports.append(cond.condition_report(cond.orey_ratio, model, n_grid))
    reports.append(cond.condition_report(cond.rio_functional, model, n_grid))
    for r in r_list:
        delta = r - 2
        reports.extend(
            cond.component_reports(cond.berk_check, model, n_grid, delta=delta).values()
        )
        reports.extend(
            cond.component_reports(
                cond.romano_wolf_check, model, n_grid, delta=delta, gamma=0.0
            ).values()
        )
    return {
        "model": model_to_config(model),
        "reports": [cond.report_to_dict(rep) for rep in reports],
    }


def _enumerable_ns(model: ArrayModel, n_grid) -> list[int]:
    return [n for n in n_grid if mart.trace_feasible(model, n)]


def oracle_payload(model: ArrayModel, n_grid, eps_list) -> dict:
    """Structure, tower, bound, and truncation checks at enumerable sizes."""
    ns = _enumerable_ns(model, n_grid)
    if not ns:
        raise ConfigError("no grid point is exactly enumerable for this model")
    traces = []
    trunc = []
    for n in ns:
        trace = mart.build_trace(model, n)
        # smallest eps with |X| <= eps/m on every outcome, so the bound
        # checks apply
        eps_auto = max(model.m(n), 1) * float(abs(trace.table.rows).max())
        traces.append(mart.trace_summary(trace, eps=eps_auto))
        for eps in eps_list:
            chk = mart.check_truncation(model, n, eps)
            trunc.append({"n": n, "eps": eps, "passed": chk.passed, **chk.values})
    passed = all(t["structure_passed"] and t["tower_passed"] and t.get("bounds_passed", True) for t in traces)
    passed = passed and all(t["passed"] for t in trunc)
    return {
        "model": model_to_config(model),
        "traces": traces,
        "truncation": trunc,
        "passed": passed,
    }


def clt_payload(model: ArrayModel, n_grid, reps, seed, threshold) -> dict:
    report = mc.convergence_sweep(model, n_grid, reps=reps, seed=seed)
    payload = mc.report_to_dict(report)
    payload["ks_threshold"] = threshold
    payload["passed"] = report.final_ks <= threshold
    return payload


def sweep_payload(n_grid, eps_list, r_list) -> dict:
    """Which condition sets hold on which catalogued models."""
    rows = []
    for name, model in catalogue().items():
        entry = {"model": name, "config": model_to_config(model)}
        lind = [
            cond.condition_report(cond.lindeberg_classic, model, n_grid, eps=eps).verdict
            == "tends-to-zero"
            for eps in eps_list
        ]
        entry["lindeberg-classic"] = all(lind)
        lmd = [
            cond.condition_report(
                cond.lindeberg_mdep, model, n_grid, eps=eps, zero_m="promote"
            ).verdict
            == "tends-to-zero"
            for eps in eps_list
        ]
        entry["lindeberg-mdep"] = all(lmd)
        for r in r_list:
            rep = cond.condition_report(cond.lyapunov_ratio, model, n_grid, r=r)
            entry[f"lyapunov(r={r:g})"] = rep.verdict == "tends-to-zero"
        orey = cond.condition_report(cond.orey_ratio, model, n_grid)
        entry["orey"] = orey.verdict in ("bounded", "tends-to-zero")
        rio = cond.condition_report(cond.rio_functional, model, n_grid)
        entry["rio"] = rio.verdict == "tends-to-zero"
        delta = 2.0
        entry["berk(delta=2)"] = cond.berk_holds(
            cond.component_reports(cond.berk_check, model, n_grid, delta=delta)
        )
        entry["romano-wolf(delta=2,gamma=0)"] = cond.romano_wolf_holds(
            cond.component_reports(
                cond.romano_wolf_check, model, n_grid, delta=delta, gamma=0.0
            )
        )
        rows.append(entry)
    return {"n_grid": list(n_grid), "eps": list(eps_list), "r": list(r_list), "rows": rows}


# ---------------------------------------------------------------------------
# rendering


def payload_to_json(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _csv_from_rows(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def payload_to_csv(command: str, payload: dict) -> str:
    if command == "conditions":
        rows = []
        for rep in payload["reports"]:
            for cv in rep["grid"]:
                rows.append(
                    [
                        cv["condition_id"],
                        cv["eq"],
                        cv["n"],
                        repr(cv["value"]),
                        cv["method"],
                        repr(cv["mc_std_err"]),
                        rep["verdict"],
                    ]
                )
        return _csv_from_rows(
            ["condition_id", "eq", "n", "value", "method", "mc_std_err", "verdict"], rows
        )
    if command == "clt":
        rows = [
            [row["n"], repr(row["ks_stat"]), row["reps"], row["seed"]]
            for row in payload["grid"]
        ]
        return _csv_from_rows(["n", "ks_stat", "reps", "seed"], rows)
    if command == "oracle":
        rows = [
            [t["n"], name, passed]
            for t in payload["traces"]
            for name, passed in sorted(t["checks"].items())
        ]
        rows += [[t["n"], f"truncation(eps={t['eps']:g})", t["passed"]] for t in payload["truncation"]]
        return _csv_from_rows(["n", "check", "passed"], rows)
    # sweep
    conditions = [k for k in payload["rows"][0] if k not in ("model", "config")]
    rows = [[row["model"]] + [row[c] for c in conditions] for row in payload["rows"]]
    return _csv_from_rows(["model"] + conditions, rows)


# ---------------------------------------------------------------------------
# argument handling


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mdepclt",
        description="Evaluate dependence conditions, martingale identities, and "
        "normal convergence for m-dependent triangular arrays.",
    )
    parser.add_argument("--cmd", choices=("conditions", "clt", "oracle", "sweep"), required=True)
    parser.add_argument("--model", help="family name (uses that family's default parameters)")
    parser.add_argument("--config", help="JSON file with model and run settings")
    parser.add_argument("--n-grid", help='either "6..14" (powers of two) or "64,128,..."')
    parser.add_argument("--reps", type=int, help="Monte Carlo replicates (clt)")
    parser.add_argument("--seed", type=int, help="base RNG seed")
    parser.add_argument("--eps", help="comma-separated thresholds")
    parser.add_argument("--r", help="comma-separated moment orders (> 2)")
    parser.add_argument("--out", help="output path (default: stdout)")
    parser.add_argument("--format", choices=("json", "csv"), help="output format")
    return parser


_MODEL_KEYS = ("family", "alpha", "beta", "m", "m_kind", "innovation", "coeffs", "spike_frac", "amplitude")


def resolve_config(args) -> dict:
    """Merge defaults, config file, and flags (flags win)."""
    default_grid = {"sweep": SWEEP_N_GRID, "clt": CLT_N_GRID}.get(args.cmd, cond.DEFAULT_N_GRID)
    settings: dict = {
        "n_grid": list(default_grid),
        "reps": 10_000,
        "seed": 0,
        "eps": list(cond.DEFAULT_EPS_GRID),
        "r": list(cond.DEFAULT_R_GRID),
        "format": "json",
        "out": None,
        "ks_threshold": DEFAULT_KS_THRESHOLD,
        "model_cfg": None,
    }
    if args.config:
        try:
            with open(args.config) as fh:
                raw = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {args.config}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}")
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
        model_cfg = {k: raw.pop(k) for k in list(raw) if k in _MODEL_KEYS}
        if model_cfg:
            settings["model_cfg"] = model_cfg
        if "n_grid" in raw:
            grid = raw.pop("n_grid")
            settings["n_grid"] = parse_grid(grid) if isinstance(grid, str) else [int(v) for v in grid]
        for key in ("reps", "seed", "ks_threshold"):
            if key in raw:
                settings[key] = raw.pop(key)
        for key in ("eps", "r"):
            if key in raw:
                settings[key] = [float(v) for v in raw.pop(key)]
        for key in ("out", "format"):
            if key in raw:
                settings[key] = raw.pop(key)
        if raw:
            raise ConfigError(f"unknown config keys: {sorted(raw)}")
    if args.model:
        if settings["model_cfg"] and settings["model_cfg"].get("family") == args.model:
            pass  # keep config parameters for the same family
        else:
            settings["model_cfg"] = {"family": args.model}
    if args.n_grid:
        settings["n_grid"] = parse_grid(args.n_grid)
    if args.reps is not None:
        settings["reps"] = args.reps
    if args.seed is not None:
        settings["seed"] = args.seed
    if args.eps:
        settings["eps"] = parse_floats(args.eps, "eps")
    if args.r:
        settings["r"] = parse_floats(args.r, "r")
    if args.out:
        settings["out"] = args.out
    if args.format:
        settings["format"] = args.format
    if not settings["n_grid"]:
        raise ConfigError("n-grid must be nonempty")
    if settings["format"] not in ("json", "csv"):
        raise ConfigError(f"unknown format {settings['format']!r}")
    return settings


def _model_from_settings(settings: dict) -> ArrayModel:
    if not settings["model_cfg"]:
        raise ConfigError("this command needs a model (--model or config file)")
    try:
        return model_from_config(settings["model_cfg"])
    except InvalidParameterError as exc:
        raise ConfigError(str(exc)) from None


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = resolve_config(args)
        command = args.cmd
        if command == "conditions":
            model = _model_from_settings(settings)
            payload = conditions_payload(model, settings["n_grid"], settings["eps"], settings["r"])
            failed = False
        elif command == "oracle":
            model = _model_from_settings(settings)
            payload = oracle_payload(model, settings["n_grid"], settings["eps"])
            failed = not payload["passed"]
        elif command == "clt":
            model = _model_from_settings(settings)
            payload = clt_payload(
                model,
                settings["n_grid"],
                settings["reps"],
                settings["seed"],
                settings["ks_threshold"],
            )
            failed = not payload["passed"]
        else:
            payload = sweep_payload(settings["n_grid"], settings["eps"], settings["r"])
            failed = False
        text = (
            payload_to_json(payload)
            if settings["format"] == "json"
            else payload_to_csv(command, payload)
        )
        if settings["out"]:
            with open(settings["out"], "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 1 if failed else 0
    except ValueError as exc:
        # ConfigError, model parameter errors, and the engines' own
        # argument validation (eps > 0, r > 2, reps >= 100, grids)
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
