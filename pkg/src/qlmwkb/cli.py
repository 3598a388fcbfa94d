"""Command-line entry point: ``qlmwkb {expand,compare,solve,spectrum,verify}``.

Exit codes: 0 success, 1 verification or computation failure, 2 usage error.
Option values resolve as command-line flag, then ``--config`` JSON, then default.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .errors import QlmWkbError, UsageError
from .formal_series import poly_to_latex
from .potentials import KINDS, make_potential
from .qlm_engine import MAX_ITERATE, match_prefix, qlm_pth_series
from .spectra import METHODS, level_table
from .wkb_engine import wkb_terms

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
ORDER_CAPS = {"wkb": 12, "qlm": 10}
ENV_MAX_ORDER = "QLMWKB_MAX_ORDER"
DEFAULT_OUT = "qlmwkb-output"

DEFAULTS = {
    "expand": {"target": "wkb", "iterate": 1, "order": 8, "format": "text"},
    "compare": {"iterate": 2, "order": 8, "format": "json"},
    "solve": {
        "potential": "ho1d",
        "energy": None,
        "iterates": 3,
        "z_max": None,
        "z_min": None,
        "grid_points": 2001,
        "imag_shift": 0.05,
        "ode_rel_tol": 1e-10,
        "quadrature_order": 16,
        "format": "json",
    },
    "spectrum": {"potential": "ho1d", "levels": 3, "methods": "exact,wkb,qlm", "format": None},
    "verify": {"suite": "all", "fixtures": None, "format": "json"},
}
FORMATS = {
    "expand": ("latex", "text", "json"),
    "compare": ("json",),
    "solve": ("json",),
    "spectrum": ("csv", "json"),
    "verify": ("json",),
}
SUFFIX = {"latex": ".tex", "text": ".txt", "json": ".json", "csv": ".csv"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _global_options(parser, suppress: bool):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", default=default, help="JSON file with option values")
    parser.add_argument("--out", default=default, help="output directory, or a file path with a suffix")
    parser.add_argument("--format", default=default, help="output format")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qlmwkb", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qlmwkb {__version__}")
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("expand", help="write the WKB series or a QLM iterate")
    _global_options(p, suppress=True)
    p.add_argument("--target", choices=("wkb", "qlm"))
    p.add_argument("--iterate", type=int)
    p.add_argument("--order", type=int)

    p = sub.add_parser("compare", help="match a QLM iterate against the WKB series")
    _global_options(p, suppress=True)
    p.add_argument("--iterate", type=int)
    p.add_argument("--order", type=int)

    p = sub.add_parser("solve", help="numerical QLM iterates for one potential and energy")
    _global_options(p, suppress=True)
    p.add_argument("--potential", choices=KINDS)
    p.add_argument("--param", action="append", metavar="NAME=VALUE")
    p.add_argument("--energy", type=float)
    p.add_argument("--iterates", type=int)
    p.add_argument("--z-max", dest="z_max", type=float)
    p.add_argument("--z-min", dest="z_min", type=float)
    p.add_argument("--grid-points", dest="grid_points", type=int)
    p.add_argument("--imag-shift", dest="imag_shift", type=float)
    p.add_argument("--rtol", dest="ode_rel_tol", type=float)
    p.add_argument("--quadrature-order", dest="quadrature_order", type=int)

    p = sub.add_parser("spectrum", help="exact / WKB / QLM level table")
    _global_options(p, suppress=True)
    p.add_argument("--potential", choices=KINDS)
    p.add_argument("--param", action="append", metavar="NAME=VALUE")
    p.add_argument("--levels", type=int, help="highest level offset n_max")
    p.add_argument("--methods", help="comma-separated subset of exact,wkb,qlm")

    p = sub.add_parser("verify", help="run the acceptance checks")
    _global_options(p, suppress=True)
    p.add_argument("--suite", choices=("formal", "numeric", "spectra", "all"))
    p.add_argument("--fixtures", help="directory with golden series files")
    return parser


# -- option resolution -----------------------------------------------------------


def _load_config(path):
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    return data


def _parse_params(items) -> dict:
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise UsageError(f"--param expects NAME=VALUE, got {item!r}")
        try:
            out[name.strip()] = float(value)
        except ValueError as exc:
            raise UsageError(f"parameter {name} is not a number: {value!r}") from exc
    return out


def resolve_options(args) -> dict:
    """Merge flag > config > default for the chosen command."""
    config = _load_config(getattr(args, "config", None))
    options = {}
    for key, default in DEFAULTS[args.command].items():
        flag = getattr(args, key, None)
        if flag is not None:
            options[key] = flag
        elif key in config:
            options[key] = config[key]
        else:
            options[key] = default
    options["out"] = getattr(args, "out", None) or config.get("out") or DEFAULT_OUT
    if args.command in ("solve", "spectrum"):
        params = {}
        for name, value in dict(config.get("params", {})).items():
            params[name] = float(value)
        params.update(_parse_params(getattr(args, "param", None)))
        options["params"] = params
        for key in ("hbar", "mass"):
            if key in params:
                options[key] = params.pop(key)
            elif key in config:
                options[key] = float(config[key])
    fmt = options.get("format")
    if fmt is not None and fmt not in FORMATS[args.command]:
        raise UsageError(f"{args.command} supports formats {', '.join(FORMATS[args.command])}, got {fmt!r}")
    return options


def order_cap(target: str) -> int:
    env = os.environ.get(ENV_MAX_ORDER)
    if env is None or env == "":
        return ORDER_CAPS[target]
    try:
        cap = int(env)
    except ValueError as exc:
        raise UsageError(f"{ENV_MAX_ORDER} must be an integer, got {env!r}") from exc
    if cap < 1:
        raise UsageError(f"{ENV_MAX_ORDER} must be >= 1, got {cap}")
    return cap


def _check_order(target: str, order, iterate=None):
    if not isinstance(order, int) or isinstance(order, bool) or order < 1:
        raise UsageError(f"order must be a positive integer, got {order!r}")
    cap = order_cap(target)
    if order > cap:
        raise UsageError(f"order {order} exceeds the {target} limit of {cap}")
    if iterate is not None:
        if not isinstance(iterate, int) or not 0 <= iterate <= MAX_ITERATE:
            raise UsageError(f"iterate must be an integer in 0..{MAX_ITERATE}, got {iterate!r}")


# -- output --------------------------------------------------------------------


class Outputs:
    """Resolves ``--out`` and records every file written for the manifest."""

    def __init__(self, out: str, default_name: str):
        path = Path(out)
        if path.suffix:
            self.directory = path.parent if str(path.parent) else Path(".")
            self.primary = path
        else:
            self.directory = path
            self.primary = path / default_name
        self.written = []

    def write(self, path: Path, text: str):
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        self.written.append(str(path))

    def manifest(self, command: str, config_echo: dict):
        data = {
            "command": command,
            "config_echo": config_echo,
            "artifact_paths": list(self.written),
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "engine_version": __version__,
        }
        path = self.directory / "manifest.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(_json(data), encoding="utf-8")
        return path


def _clean(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    return value


def _json(data) -> str:
    return json.dumps(_clean(data), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def _echo(options: dict) -> dict:
    return {k: v for k, v in options.items()}


# -- commands ------------------------------------------------------------------


def _series_latex(series, title: str) -> str:
    lines = [f"% {title}", r"\begin{align*}"]
    for m, poly in enumerate(series):
        body = poly_to_latex(poly)
        if m == 0:
            lines.append(f"y &= {body} \\\\")
        else:
            power = "g" if m == 1 else f"g^{{{m}}}"
            lines.append(f"  &\\quad + {power} \\left[ {body} \\right] \\\\")
    lines[-1] = lines[-1].rstrip(" \\")
    lines.append(r"\end{align*}")
    return "\n".join(lines) + "\n"


def cmd_expand(options: dict) -> int:
    target, order, fmt = options["target"], options["order"], options["format"]
    iterate = options["iterate"] if target == "qlm" else None
    _check_order(target, order, iterate)
    if target == "wkb":
        series = wkb_terms(order).series
        title = f"WKB series through g^{order - 1}"
        name = "wkb_series"
    else:
        series = qlm_pth_series(iterate, order).series
        title = f"QLM iterate {iterate} through g^{order - 1}"
        name = f"qlm_iterate{iterate}"
    if fmt == "latex":
        text = _series_latex(series, title)
    elif fmt == "text":
        text = f"# {title}\n" + series.to_text()
    else:
        text = _json({"target": target, "iterate": iterate, "order": order, "series": series.to_json()})
    out = Outputs(options["out"], name + SUFFIX[fmt])
    out.write(out.primary, text)
    out.manifest("expand", _echo(options))
    return EXIT_OK


def cmd_compare(options: dict) -> int:
    p, order = options["iterate"], options["order"]
    _check_order("qlm", order, p)
    qlm = qlm_pth_series(p, order).series
    wkb = wkb_terms(order).series
    prefix = match_prefix(qlm, wkb)
    expected = min(2**p, order)
    per_order = [
        {"order": m, "equal": qlm[m] == wkb[m], "diff": (qlm[m] - wkb[m]).to_text()} for m in range(order)
    ]
    report = {"iterate": p, "order": order, "match_prefix": prefix, "expected": expected, "per_order": per_order}
    out = Outputs(options["out"], f"compare_p{p}.json")
    out.write(out.primary, _json(report))
    out.manifest("compare", _echo(options))
    return EXIT_OK if prefix == expected else EXIT_FAIL


def _potential(options):
    kwargs = {k: options[k] for k in ("hbar", "mass") if k in options}
    return make_potential(options["potential"], **kwargs, **options["params"])


def cmd_solve(options: dict) -> int:
    from .riccati_numeric import SolveConfig, asymptotic_residue_fit, solve_qlm
    from .errors import FitQualityError

    pot = _potential(options)
    if options["energy"] is None:
        raise UsageError("solve needs --energy")
    E = float(options["energy"])
    cfg = SolveConfig(
        z_max=options["z_max"],
        z_min=options["z_min"],
        grid_points=int(options["grid_points"]),
        imag_shift=float(options["imag_shift"]),
        ode_rel_tol=float(options["ode_rel_tol"]),
        quadrature_order=int(options["quadrature_order"]),
    ).resolved(pot, E)
    hist = solve_qlm(pot, E, int(options["iterates"]), cfg)
    leading = {"ho1d": "oscillator", "ho3d": "oscillator", "coulomb": "coulomb"}.get(pot.kind, "constant")
    try:
        residue = asymptotic_residue_fit(hist.iterates[-1], leading, energy=E, hbar=pot.hbar, mass=pot.mass)
    except (FitQualityError, UsageError):
        residue = None
    run = {
        "potential": pot.describe(),
        "energy": E,
        "config": cfg.as_dict(),
        "grid": hist.iterates[0].grid.tolist(),
        "shift": cfg.imag_shift,
        "iterates": [
            {"p": p, "re": y.values.real.tolist(), "im": y.values.imag.tolist()} for p, y in enumerate(hist.iterates)
        ],
        "sup_diffs": hist.sup_diffs,
        "convergence_orders": hist.convergence_orders(),
        "asymptotic_residue": {"model": leading, "alpha": residue},
    }
    out = Outputs(options["out"], "run.json")
    out.write(out.primary, _json(run))
    out.manifest("solve", _echo(options))
    return EXIT_OK


def _fmt15(x: float) -> str:
    return "nan" if not math.isfinite(x) else f"{x:.15g}"


def cmd_spectrum(options: dict) -> int:
    pot = _potential(options)
    methods = [m.strip() for m in str(options["methods"]).split(",") if m.strip()]
    for m in methods:
        if m not in METHODS:
            raise UsageError(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
    n_max = options["levels"]
    if not isinstance(n_max, int) or n_max < 0:
        raise UsageError(f"--levels must be a non-negative integer, got {n_max!r}")
    out_path = Path(options["out"])
    fmt = options["format"] or ("json" if out_path.suffix == ".json" else "csv")
    rows = level_table(pot, n_max, methods)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "method", "energy", "status"])
        for row in rows:
            for m in methods:
                res = row["results"][m]
                writer.writerow([row["n"], m, _fmt15(res.energy), res.status])
        text = buf.getvalue()
    else:
        table = []
        for row in rows:
            entry = {k: row[k] for k in ("n", "E_exact", "E_wkb", "E_qlm", "dE_qlm", "dE_wkb")}
            entry["levels"] = {
                m: {"energy": r.energy, "status": r.status, "provenance": dict(r.provenance)}
                for m, r in row["results"].items()
            }
            table.append(entry)
        text = _json({"potential": pot.describe(), "methods": methods, "rows": table})
    out = Outputs(options["out"], f"spectrum_{pot.kind}{SUFFIX[fmt]}")
    out.write(out.primary, text)
    out.manifest("spectrum", _echo(options))
    return EXIT_OK


def cmd_verify(options: dict) -> int:
    from .verify import run_suite

    checks = run_suite(options["suite"], options["fixtures"])
    for c in checks:
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  ({c.detail})")
    report = {"suite": options["suite"], "passed": all(c.passed for c in checks), "checks": [c.to_dict() for c in checks]}
    out = Outputs(options["out"], "verify_report.json")
    out.write(out.primary, _json(report))
    out.manifest("verify", _echo(options))
    return EXIT_OK if report["passed"] else EXIT_FAIL


COMMANDS = {
    "expand": cmd_expand,
    "compare": cmd_compare,
    "solve": cmd_solve,
    "spectrum": cmd_spectrum,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        options = resolve_options(args)
        return COMMANDS[args.command](options)
    except UsageError as exc:
        print(f"qlmwkb: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QlmWkbError as exc:
        print(f"qlmwkb: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
