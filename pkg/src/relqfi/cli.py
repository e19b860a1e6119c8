"""Command-line front end.

Physical inputs are dimensionless: acceleration a~ = a/omega0, proper time
tau~ = gamma0 tau, rotation frequency Omega/gamma0.  ``--raw-units`` accepts
(omega0, mu, a, tau) instead and reports the conversion it applied.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .dynamics import InitialState, evolve_closed_form, evolve_ode
from .errors import ConfigInvalid, DetectorError
from .qfi import METHODS, PARAMS, compute_qfi, qfi_ultrarel
from .rates import DetectorParams, rates_for, rates_numeric, rates_ultrarel
from .sweep import (FIGURES, FORMATS, SweepConfig, figure_config, format_table,
                    run_grid, write_table)
from .trajectory import Kind, Trajectory
from .verify import SUITES, run_suites

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    """Bad command-line input; maps to exit code 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _units(p: argparse.ArgumentParser):
    g = p.add_argument_group("units")
    g.add_argument("--raw-units", action="store_true",
                   help="read --a and --tau in physical units and convert")
    g.add_argument("--omega0", type=float, default=1.0, help="level spacing (raw units)")
    g.add_argument("--mu", type=float, default=0.1, help="coupling (raw units)")


def _trajectory_args(p, default="nonrel"):
    p.add_argument("--trajectory", choices=[k.value for k in Kind], default=default)
    p.add_argument("--a", type=float, help="acceleration")
    p.add_argument("--w", type=float, default=0.0, help="four-velocity drift component")
    p.add_argument("--limit", action="store_true", help="ultrarel: take w -> infinity")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="relqfi", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", help="JSON file of option defaults (schema_version 1)")
    parser.add_argument("--json", action="store_true", help="report errors as JSON on stderr")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    # --json may also follow the subcommand
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="report errors as JSON on stderr")

    p = sub.add_parser("rates", parents=[common], help="rate coefficients for a trajectory")
    _trajectory_args(p)
    p.add_argument("--numeric", action="store_true", help="add the quadrature oracle")
    _units(p)

    p = sub.add_parser("evolve", parents=[common], help="evolved Bloch vector")
    _trajectory_args(p)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--omega", type=float, default=1.0, help="rotation frequency Omega/gamma0")
    p.add_argument("--ode", action="store_true", help="integrate numerically instead")
    _units(p)

    p = sub.add_parser("qfi", parents=[common], help="quantum Fisher information")
    p.add_argument("--param", choices=PARAMS, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--a", type=float)
    p.add_argument("--beta", type=float, help="2 pi / a, alternative to --a")
    p.add_argument("--w", type=float, default=0.0)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--methods", nargs="+", choices=METHODS, default=list(METHODS))
    p.add_argument("--ultrarel-limit", action="store_true",
                   help="w -> infinity: both rates vanish")
    _units(p)

    p = sub.add_parser("figure", parents=[common], help="write the data behind a figure")
    p.add_argument("fig_id", choices=sorted(FIGURES))
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=FORMATS, default="csv")
    p.add_argument("--methods", nargs="+", choices=METHODS)

    p = sub.add_parser("sweep", parents=[common], help="evaluate a grid from a JSON config")
    p.add_argument("sweep_config", help="sweep JSON document")
    p.add_argument("--out", help="output file (overrides the config)")
    p.add_argument("--format", choices=FORMATS)

    p = sub.add_parser("verify", parents=[common], help="run the acceptance suites")
    p.add_argument("--suite", action="append", choices=list(SUITES),
                   help="suite to run (repeatable; default all)")
    return parser


def _load_config(path):
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise UsageError("config must be a JSON object")
    version = doc.pop("schema_version", None)
    if version != SCHEMA_VERSION:
        raise UsageError(f"config schema_version must be {SCHEMA_VERSION}, got {version!r}")
    return {k.replace("-", "_"): v for k, v in doc.items()}


def parse_args(argv):
    parser = build_parser()
    pre = _Parser(add_help=False)
    pre.add_argument("--config")
    known_args, rest = pre.parse_known_args(argv)
    if known_args.config:
        # file values become subcommand defaults so explicit flags still win
        values = _load_config(known_args.config)
        subparsers = next(a for a in parser._actions
                          if isinstance(a, argparse._SubParsersAction))
        command = next((t for t in rest if t in subparsers.choices), None)
        if command is None:
            raise UsageError("a subcommand is required")
        sub = subparsers.choices[command]
        actions = {a.dest: a for a in sub._actions}
        unknown = sorted(set(values) - set(actions))
        if unknown:
            raise UsageError(f"config keys not valid for {command}: {', '.join(unknown)}")
        for dest in values:
            actions[dest].required = False
        sub.set_defaults(**values)
    return parser.parse_args(argv)


# -- input conversion ---------------------------------------------------------

def _scaled(ns, need_tau=False):
    """Detector params, dimensionless a and tau, and the conversion record."""
    if not ns.raw_units:
        return DetectorParams.rescaled(), ns.a, getattr(ns, "tau", None), None
    p = DetectorParams(ns.omega0, ns.mu)
    conv = {"omega0": p.omega0, "mu": p.mu, "gamma0": p.gamma0}
    a = tau = None
    if ns.a is not None:
        a = ns.a / p.omega0
        conv.update(a=ns.a, a_rescaled=a)
    if need_tau:
        tau = ns.tau * p.gamma0
        conv.update(tau=ns.tau, tau_rescaled=tau)
    if hasattr(ns, "omega"):
        ns.omega = p.omega0 / p.gamma0
        conv.update(omega_rescaled=ns.omega)
    return p, a, tau, conv


def _trajectory(kind, a, w):
    if Kind(kind).accelerated and a is None:
        raise UsageError(f"--a is required for trajectory {kind}")
    if kind == "inertial":
        return Trajectory.inertial(w)
    if kind == "uniform":
        if w:
            raise UsageError("uniform acceleration has w = 0")
        return Trajectory.uniform(a)
    return getattr(Trajectory, kind)(a, w)


def _rates(ns, p, a):
    a = None if a is None else a * p.omega0  # rate formulas take physical a
    if ns.trajectory == "ultrarel" and ns.limit:
        if a is None:
            raise UsageError("--a is required for trajectory ultrarel")
        return rates_ultrarel(p, a, limit=True), None
    traj = _trajectory(ns.trajectory, a, ns.w)
    if ns.trajectory == "drifted":
        return None, traj
    return rates_for(traj, p), traj


# -- subcommands --------------------------------------------------------------

def cmd_rates(ns):
    p, a, _, conv = _scaled(ns)
    closed, traj = _rates(ns, p, a)
    out = {"trajectory": ns.trajectory, "a": a, "w": ns.w,
           "units": "raw" if ns.raw_units else "rescaled"}
    if conv:
        out["conversion"] = conv
    if closed is not None:
        out["closed_form"] = closed.as_dict()
    if ns.numeric or closed is None:
        if traj is None:
            raise UsageError("no numeric route for the w -> infinity limit")
        num = rates_numeric(traj, p)
        out["numeric"] = num.as_dict()
        if closed is not None:
            out["relative_difference"] = {
                k: abs(getattr(num, k) - getattr(closed, k)) / max(abs(getattr(closed, k)), 1e-300)
                for k in ("gamma_plus", "gamma_minus", "A", "B")}
    return out


def cmd_evolve(ns):
    p, a, tau, conv = _scaled(ns, need_tau=True)
    closed, traj = _rates(ns, p, a)
    if closed is None:
        closed = rates_numeric(traj, p)
    # Bloch equations in units of gamma0
    g0 = p.gamma0
    rc = type(closed).from_gammas(closed.gamma_plus / g0, closed.gamma_minus / g0)
    # only Omega enters the propagator; mu is chosen so that gamma0 = 1
    dp = DetectorParams(ns.omega, math.sqrt(2 * math.pi / ns.omega))
    init = InitialState(ns.theta, ns.phi)
    state = (evolve_ode if ns.ode else evolve_closed_form)(init, rc, dp, tau)
    out = {"tau": tau, "w1": state.w1, "w2": state.w2, "w3": state.w3,
           "norm": state.norm, "A": rc.A, "B": rc.B,
           "method": "ode" if ns.ode else "closed-form"}
    if conv:
        out["conversion"] = conv
    return out


def cmd_qfi(ns):
    _, a, tau, conv = _scaled(ns, need_tau=True)
    if ns.ultrarel_limit:
        f_theta, f_phi = qfi_ultrarel(ns.theta)
        if ns.param == "beta":
            raise UsageError("beta is not estimable once both rates vanish")
        value = f_theta if ns.param == "theta" else f_phi
        return {"results": [{"param": ns.param, "fisher": value, "method": "closed-form",
                             "tau": tau, "limit": "ultrarel"}]}
    if (a is None) == (ns.beta is None):
        raise UsageError("pass exactly one of --a or --beta")
    kw = dict(w=ns.w, phi=ns.phi, omega=ns.omega)
    if a is not None:
        kw["a"] = a
    else:
        kw["beta"] = ns.beta
    results = [compute_qfi(ns.param, ns.theta, tau, method=m, **kw).as_dict()
               for m in ns.methods]
    out = {"results": results}
    if conv:
        out["conversion"] = conv
    return out


def cmd_figure(ns):
    cfg = figure_config(ns.fig_id, ns.methods, ns.format)
    records = run_grid(cfg)
    if ns.out:
        write_table(records, cfg, ns.out, ns.format)
        bad = sum(r.error is not None for r in records)
        return {"figure": ns.fig_id, "description": FIGURES[ns.fig_id][0],
                "rows": len(records), "errors": bad, "out": ns.out}
    sys.stdout.write(format_table(records, cfg, ns.format))
    return None


def cmd_sweep(ns):
    try:
        doc = json.loads(Path(ns.sweep_config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read sweep config: {exc}") from exc
    cfg = SweepConfig.from_dict(doc)
    cfg.validate()
    fmt = ns.format or cfg.fmt
    out = ns.out or cfg.output
    records = run_grid(cfg)
    if out:
        write_table(records, cfg, out, fmt)
        return {"rows": len(records), "errors": sum(r.error is not None for r in records),
                "out": out}
    sys.stdout.write(format_table(records, cfg, fmt))
    return None


def cmd_verify(ns):
    results = run_suites(ns.suite, seed=ns.seed)
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} suites passed")
    return EXIT_FAIL if failed else EXIT_OK


COMMANDS = {"rates": cmd_rates, "evolve": cmd_evolve, "qfi": cmd_qfi,
            "figure": cmd_figure, "sweep": cmd_sweep, "verify": cmd_verify}


def _report(exc, as_json, code):
    if as_json:
        payload = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
        if isinstance(exc, ConfigInvalid):
            payload["problems"] = [list(p) for p in exc.problems]
        print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    else:
        print(f"relqfi: {type(exc).__name__}: {exc}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    as_json = "--json" in argv
    try:
        ns = parse_args(argv)
    except UsageError as exc:
        return _report(exc, as_json, EXIT_USAGE)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        out = COMMANDS[ns.command](ns)
    except (UsageError, ValueError, KeyError) as exc:
        # invalid physical input, bad config, unknown names
        return _report(exc, ns.json, EXIT_USAGE)
    except DetectorError as exc:
        return _report(exc, ns.json, EXIT_FAIL)
    if isinstance(out, int):
        return out
    if out is not None:
        print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
