"""Command-line front end.

Every option can also come from ``--config FILE`` (section named after the
subcommand, keys spelled like the long flags); flags on the command line win.
Exit status: 0 success, 2 usage or input error, 1 numerical failure.
"""
from __future__ import annotations

import argparse
import keyword
import sys
from typing import Dict, List, Optional

import numpy as np

from . import scenarios as sc
from .calibration import (GeneralizedTrapezoid, calibrate_generalized, calibrate_hierarchical,
                          calibrate_linear_play, calibrate_preisach, calibrate_trapezoid,
                          langmuir_pair, make_graph)
from .curves import IdentityCurve, load_curve_csv
from .errors import (ConfigError, HysteresisError, InadmissibleInit, NoConvergence,
                     NotApplicable, SlopeUnavailable, UnknownTarget)
from .model import PeakSequence, init_state, preisach_signature, scan
from .modelio import load_config, load_model, read_column, save_model, write_csv
from .ode import OdeProblem, Source, convergence_study, integrate as ode_integrate, make_source
from .pde import PdeProblem, integrate as pde_integrate, pde_convergence
from .reproduce import TABLE5_HS, TARGETS, reproduce
from .roots import METHODS, SolverConfig


class UsageError(Exception):
    pass


def _floats(text: str) -> List[float]:
    try:
        return [float(x) for x in str(text).split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


# argparse defaults stay None so a config value can fill any gap the flags leave
def _opt(p: argparse.ArgumentParser, defaults: Dict, flag: str, default=None, aliases=(),
         **kw):
    dest = flag.lstrip("-").replace("-", "_")
    if keyword.iskeyword(dest):
        dest += "_"
    p.add_argument(flag, *aliases, dest=dest, default=None, **kw)
    defaults[dest] = default


def build_parser():
    ap = argparse.ArgumentParser(prog="playhyst",
                                 description="Play-type hysteresis models: calibration, "
                                             "scanning, ODE and transport solvers.")
    sub = ap.add_subparsers(dest="command", required=True)
    table = {}

    def cmd(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", default=None, help="INI file with a [%s] section" % name)
        table[name] = (p, {})
        return p, table[name][1]

    p, d = cmd("calibrate", "fit a model to a hysteresis graph")
    _opt(p, d, "--family", "nonlinear",
         choices=["gamma", "nonlinear", "linear", "preisach", "trapezoid"])
    _opt(p, d, "--langmuir", None, type=_floats, help="V_l,B_l,V_r,B_r")
    _opt(p, d, "--curves", None, choices=["convex_concave", "ch4", "intro"])
    _opt(p, d, "--gl", None, aliases=("--left",), help="CSV u,w of the left curve")
    _opt(p, d, "--gr", None, aliases=("--right",), help="CSV u,w of the right curve")
    _opt(p, d, "--trapezoid", None, type=_floats, help="alpha,beta,A,B,w_min,w_max")
    _opt(p, d, "--I", 7, type=int, help="number of slabs")
    _opt(p, d, "--Kmax", 100, aliases=("--kmax",), type=int, help="per-slab hysteron budget")
    _opt(p, d, "--qmax", 1, type=int)
    _opt(p, d, "--strategy", "uniform", choices=["uniform", "adaptive"])
    _opt(p, d, "--tol", 0.0, type=float)
    _opt(p, d, "--budget", None, type=int)
    _opt(p, d, "--boundary-tol", None, type=float)
    _opt(p, d, "--pin", "left", choices=["left", "right"])
    _opt(p, d, "--K", 50, type=int, help="levels for linear and Preisach families")
    _opt(p, d, "--eps", 0.0, type=float)
    _opt(p, d, "--smooth", "false", choices=["true", "false"])
    _opt(p, d, "--out", "model.jsonl")

    p, d = cmd("scan", "trace a model along a peak sequence")
    _opt(p, d, "--model", None)
    _opt(p, d, "--peaks", None, type=_floats)
    _opt(p, d, "--samples", 100, type=int)
    _opt(p, d, "--init", "left", choices=["left", "right"])
    _opt(p, d, "--out", "trace.csv")

    p, d = cmd("signature", "Preisach-plane points of a play model")
    _opt(p, d, "--model", None)
    _opt(p, d, "--out", "signature.csv")

    for name in ("ode", "ode-convergence"):
        p, d = cmd(name, "implicit time stepping of d/dt(a(u)+w) = f"
                   if name == "ode" else "step-size sweep against the finest run")
        _opt(p, d, "--model", None)
        _opt(p, d, "--a", "identity", help="'identity' or a CSV u,w")
        _opt(p, d, "--source", "fcont", nargs="+",
             help="fcont, fdisc, pm1, zero or 'csv FILE' (column f)")
        _opt(p, d, "--u-init", 1.0, type=float)
        _opt(p, d, "--T", 10.0, type=float)
        _opt(p, d, "--solver", "hybrid", choices=sorted(METHODS))
        _opt(p, d, "--rel-tol", 1e-6 if name == "ode" else 1e-12, type=float)
        _opt(p, d, "--abs-tol", 1e-14, type=float)
        _opt(p, d, "--max-iter", 100, type=int)
        if name == "ode":
            _opt(p, d, "--tau", 0.01, type=float)
            _opt(p, d, "--on-failure", "raise", choices=["raise", "record"])
            _opt(p, d, "--out", "run.csv")
        else:
            _opt(p, d, "--taus", [0.1, 0.01, 0.001, 0.0001], type=_floats)
            _opt(p, d, "--out", "ode_convergence.csv")

    for name in ("pde", "pde-convergence"):
        p, d = cmd(name, "upwind transport with hysteresis" if name == "pde"
                   else "grid sweep against the finest run")
        _opt(p, d, "--model", None)
        _opt(p, d, "--flux", "identity", choices=["identity"])
        _opt(p, d, "--lambda", 0.9, type=float)
        _opt(p, d, "--T", sc.CH4_BOX_T, type=float)
        _opt(p, d, "--length", sc.CH4_BOX_LENGTH, type=float)
        _opt(p, d, "--init", "box", nargs="+",
             help="box, linear, zero or 'csv FILE' (columns x,u)")
        _opt(p, d, "--inflow", "zero", nargs="+",
             help="zero (no inflow), ramp, or 'csv FILE' (columns t,u)")
        _opt(p, d, "--init-mode", "left", choices=["left", "right"])
        if name == "pde":
            _opt(p, d, "--h", 0.005, type=float)
            _opt(p, d, "--snapshots", [], type=_floats)
            _opt(p, d, "--out-prefix", "pde")
        else:
            _opt(p, d, "--hs", list(TABLE5_HS), type=_floats)
            _opt(p, d, "--out", "pde_convergence.csv")

    p, d = cmd("reproduce", "regenerate the data behind a figure or table")
    p.add_argument("target", help="one of: " + ", ".join(sorted(TARGETS)))
    _opt(p, d, "--out-dir", "artifacts")
    return ap, table


def _resolve(args, parser, defaults, section):
    # config keys are the flag names, so `lambda` rather than the `lambda_` attribute
    keys = {dest.rstrip("_"): dest for dest in defaults}
    cfg = load_config(args.config, section, keys) if args.config else {}
    actions = {a.dest: a for a in parser._actions}
    for dest, default in defaults.items():
        if getattr(args, dest) is not None:
            continue
        if dest.rstrip("_") in cfg:
            act = actions[dest]
            raw = cfg[dest.rstrip("_")]
            try:
                val = act.type(raw) if act.type else raw
            except (argparse.ArgumentTypeError, ValueError) as exc:
                raise UsageError(f"config key {dest!r}: {exc}") from None
            if act.choices is not None and val not in act.choices:
                raise UsageError(f"config key {dest!r}: {val!r} not in {list(act.choices)}")
            setattr(args, dest, val)
        else:
            setattr(args, dest, default)
    return args


def _need(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise UsageError(f"--{n.replace('_', '-')} is required")


# ---------------------------------------------------------------- handlers

def _curves(args):
    if args.langmuir is not None:
        if len(args.langmuir) != 4:
            raise UsageError("--langmuir takes V_l,B_l,V_r,B_r")
        return langmuir_pair(*args.langmuir)
    if args.curves == "convex_concave":
        return sc.convex_concave_curves()
    if args.curves == "ch4":
        return sc.ch4_curves()
    if args.curves == "intro":
        return sc.intro_curves()
    if args.gl and args.gr:
        return load_curve_csv(args.gl), load_curve_csv(args.gr)
    raise UsageError("give --langmuir, --curves, or both --gl and --gr")


def do_calibrate(args):
    fam = args.family
    if fam == "trapezoid":
        _need(args, "trapezoid")
        if len(args.trapezoid) != 6:
            raise UsageError("--trapezoid takes alpha,beta,A,B,w_min,w_max")
        model, adj = calibrate_trapezoid(GeneralizedTrapezoid(*args.trapezoid), args.Kmax,
                                         args.pin)
        note = f"A*={float(adj.A):.6g} B*={float(adj.B):.6g}"
    else:
        gl, gr = _curves(args)
        if fam == "gamma":
            model, note = calibrate_generalized(gl, gr), ""
        elif fam == "nonlinear":
            res = calibrate_hierarchical(gl, gr, args.I, args.Kmax, args.qmax, args.strategy,
                                         args.tol, args.budget, args.boundary_tol, args.pin)
            model = res.model
            note = f"slabs={len(res.slabs)} boundary_error={res.boundary_error:.6g}"
        elif fam == "linear":
            g = make_graph(gl, gr)
            model = calibrate_linear_play(gr, np.linspace(g.u_min, g.u_max, args.K + 1))
            note = ""
        else:
            model = calibrate_preisach(gl, gr, args.K, eps=args.eps,
                                       smooth=args.smooth == "true")
            note = ""
    save_model(model, args.out)
    print(f"{model.kind} K={model.K} {note}".rstrip() + f" -> {args.out}")


def do_scan(args):
    _need(args, "model", "peaks")
    m = load_model(args.model)
    st = init_state(m, args.peaks[0], args.init)
    tr = scan(m, st, PeakSequence(args.peaks, args.samples))
    head = ["idx", "u", "w"] + [f"v_{k + 1}" for k in range(m.K)]
    write_csv(args.out, head, ([i, u, w, *v] for i, (u, w, v) in enumerate(zip(tr.u, tr.w, tr.v))))
    print(f"{len(tr)} points -> {args.out}")


def do_signature(args):
    _need(args, "model")
    rows = preisach_signature(load_model(args.model))
    write_csv(args.out, ["alpha", "beta", "mu"], rows)
    print(f"{len(rows)} points -> {args.out}")


def _choice(spec):
    """``'csv FILE'``, ``['csv', 'FILE']`` or ``'csv:FILE'`` -> ``('csv', 'FILE')``."""
    if isinstance(spec, (list, tuple)):
        spec = " ".join(spec)
    spec = spec.strip()
    for sep in (":", " "):
        head, _, tail = spec.partition(sep)
        if head == "csv" and tail.strip():
            return "csv", tail.strip()
    return spec, None


def _source(spec) -> Source:
    kind, path = _choice(spec)
    if kind == "csv":
        return make_source(read_column(path, "f"))
    return make_source(kind)


def _a_curve(spec):
    return IdentityCurve() if spec == "identity" else load_curve_csv(spec)


def _solver(args, on_failure="raise"):
    return SolverConfig(args.solver, args.abs_tol, args.rel_tol, args.max_iter, on_failure)


def do_ode(args):
    _need(args, "model")
    m = load_model(args.model)
    prob = OdeProblem(m, _source(args.source), args.u_init, args.T, args.tau, _a_curve(args.a))
    run = ode_integrate(prob, _solver(args, args.on_failure))
    write_csv(args.out, ["t", "f", "u", "w", "iters", "status"],
              zip(run.t, run.F, run.U, run.W, run.iters, run.status))
    print(f"{len(run.t) - 1} steps, mean iterations {run.mean_iters:.3f}, "
          f"failures {run.failures} -> {args.out}")
    return 1 if run.failures else 0


def do_ode_convergence(args):
    _need(args, "model")
    m = load_model(args.model)
    src, a = _source(args.source), _a_curve(args.a)
    tab = convergence_study(lambda tau: OdeProblem(m, src, args.u_init, args.T, tau, a),
                            args.taus, _solver(args))
    write_csv(args.out, ["tau", "E_u", "E_w"], tab.rows())
    for tau, eu, ew in tab.rows():
        print(f"tau={tau:<8g} E_u={eu:.6g} E_w={ew:.6g}")
    print(f"p_u={tab.p_u:.3f} (reference tau={tab.fine_tau:g}) -> {args.out}")


def _init_fn(spec):
    spec, path = _choice(spec)
    if spec == "box":
        return sc.piecewise_constant(sc.CH4_BOX)
    if spec == "linear":
        xs, us = zip(*sc.CH4_LINEAR)
        return lambda x: np.interp(x, xs, us, left=0.0, right=0.0)
    if spec == "zero":
        return lambda x: np.zeros_like(x)
    if spec == "csv":
        xs = read_column(path, "x")
        us = read_column(path, "u")
        return lambda x: np.interp(x, xs, us)
    raise UsageError(f"unknown --init {spec!r}")


def _inflow_fn(spec):
    spec, path = _choice(spec)
    if spec == "zero":
        return None
    if spec == "ramp":
        return sc.intro_inflow
    if spec == "csv":
        ts = read_column(path, "t")
        us = read_column(path, "u")
        return lambda t: float(np.interp(t, ts, us))
    raise UsageError(f"unknown --inflow {spec!r}")


def _pde_problem(args, m, h):
    return PdeProblem(m, _init_fn(args.init), 0.0, args.length, h, args.T, lam=args.lambda_,
                      inflow=_inflow_fn(args.inflow), init_mode=args.init_mode)


def do_pde(args):
    _need(args, "model")
    m = load_model(args.model)
    prob = _pde_problem(args, m, args.h)
    snaps = list(args.snapshots) or [args.T]
    run = pde_integrate(prob, snapshots=snaps, trace=True)
    for t in snaps:
        st = run.snapshots[t]
        write_csv(f"{args.out_prefix}_t{t:g}.csv", ["x", "u", "w"], zip(run.x, st.U, st.W))
    write_csv(f"{args.out_prefix}_trace.csv", ["u", "w"], zip(run.trace_u, run.trace_w))
    print(f"{prob.N} steps on {prob.J} cells, {len(snaps)} snapshots -> {args.out_prefix}_*.csv")


def do_pde_convergence(args):
    _need(args, "model")
    m = load_model(args.model)
    conv = pde_convergence(lambda h: _pde_problem(args, m, h), args.hs)
    write_csv(args.out, ["h", "E_u", "E_w"], conv.rows())
    for h, eu, ew in conv.rows():
        print(f"h={h:<8g} E_u={eu:.6g} E_w={ew:.6g}")
    print(f"p_u={conv.p_u:.3f} (reference h={conv.fine_h:g}) -> {args.out}")


def do_reproduce(args):
    files = reproduce(args.target, args.out_dir)
    for f in files:
        print(f)


HANDLERS = {
    "calibrate": do_calibrate, "scan": do_scan, "signature": do_signature, "ode": do_ode,
    "ode-convergence": do_ode_convergence, "pde": do_pde,
    "pde-convergence": do_pde_convergence, "reproduce": do_reproduce,
}


def run(argv: Optional[List[str]] = None) -> int:
    ap, table = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    parser, defaults = table[args.command]
    try:
        _resolve(args, parser, defaults, args.command)
        code = HANDLERS[args.command](args)
        return int(code or 0)
    except NoConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (UsageError, ConfigError, UnknownTarget, NotApplicable, SlopeUnavailable,
            InadmissibleInit, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except HysteresisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
