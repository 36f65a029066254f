"""Command line front end: ``s3sr {sample,integrate,connect,hopf,verify}``.

Exit codes: 0 success, 1 usage or input error, 2 verification failure,
3 numerical failure. Angles are radians; CSV floats use 17 significant digits.
"""
import argparse
import contextlib
import csv
import json
import os
import sys

import numpy as np

from . import connect, geodesics, hamiltonian, hopf, verify
from .core import IDENTITY
from .errors import InputError, NumericalError, S3SRError
from .hamiltonian import write_csv

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_NUMERIC = 0, 1, 2, 3
TOL_ENV = "S3SR_DEFAULT_TOL"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _vec(n):
    def parse(text):
        try:
            v = [float(t) for t in text.split(",")]
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {text!r}")
        if len(v) != n:
            raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers, got {text!r}")
        return np.array(v)
    return parse


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _nonneg(text):
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
    return v


def default_tol():
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return connect.DEFAULT_VERIFY_TOL
    try:
        v = float(raw)
    except ValueError:
        raise UsageError(f"{TOL_ENV}={raw!r} is not a number")
    if not v > 0:
        raise UsageError(f"{TOL_ENV} must be positive")
    return v


def build_parser():
    p = _Parser(prog="s3sr", description="Sub-Riemannian geodesics on S^3 = SU(2).")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def out_opts(sp, fmt="csv"):
        sp.add_argument("--format", choices=("csv", "json"), default=fmt)
        sp.add_argument("--output", "-o", help="output file (default stdout)")

    sp = sub.add_parser("sample", help="closed-form geodesic samples")
    sp.add_argument("--kind", choices=("bc", "const", "vertical", "hyper"), default="bc")
    sp.add_argument("--B", type=float, default=0.0)
    sp.add_argument("--theta", type=float, default=0.0)
    sp.add_argument("--psi", type=float, default=0.0, help="heading of the constant geodesic")
    sp.add_argument("--psi1", type=float, default=0.0, help="chart momentum (kind hyper)")
    sp.add_argument("--eta-dot0", type=_positive, default=1.0)
    sp.add_argument("--base", type=_vec(4), default=IDENTITY)
    sp.add_argument("--s-end", type=_nonneg, default=np.pi)
    sp.add_argument("--n", type=int, default=201)
    out_opts(sp)

    sp = sub.add_parser("integrate", help="Hamiltonian trajectory with monitor columns")
    sp.add_argument("--chart", choices=("cartesian", "hyper"), default="cartesian")
    sp.add_argument("--x0", type=_vec(4), default=IDENTITY)
    sp.add_argument("--xi", type=_vec(4), help="initial covector (cartesian)")
    sp.add_argument("--state", type=_vec(6), help="xi1,xi2,eta,psi1,psi2,theta (hyper)")
    sp.add_argument("--s-end", type=_nonneg, required=True)
    sp.add_argument("--n-samples", type=int, help="uniform output samples (default: steps)")
    sp.add_argument("--rel-tol", type=_positive, default=hamiltonian.DEFAULT_RTOL)
    sp.add_argument("--abs-tol", type=_positive, default=hamiltonian.DEFAULT_ATOL)
    sp.add_argument("--max-step", type=_positive, default=hamiltonian.DEFAULT_MAX_STEP)
    out_opts(sp)

    sp = sub.add_parser("connect", help="enumerate geodesics to a target")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--target", type=_vec(4), help="target point x1,x2,x3,x4")
    g.add_argument("--fiber-omega", type=float, help="target (cos w, sin w, 0, 0)")
    sp.add_argument("--n-max", type=int, default=4)
    sp.add_argument("--theta", type=float, default=0.0, help="free heading for fiber targets")
    sp.add_argument("--grid-step", type=_positive, default=connect.DEFAULT_GRID_STEP)
    sp.add_argument("--branch-max", type=int, default=connect.DEFAULT_BRANCH_MAX)
    sp.add_argument("--s-max", type=_positive)
    sp.add_argument("--verify-tol", type=_positive)
    sp.add_argument("--oracle", action="store_true", help="cross-check with brute_force_count")
    sp.add_argument("--emit-lhs-grid", type=int, metavar="N",
                    help="dump the B-equation residual on N grid points instead")
    out_opts(sp, "json")

    sp = sub.add_parser("hopf", help="Hopf projection, lift and holonomy")
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--path", help="CSV with columns x1..x4 (and optionally s) to project")
    g.add_argument("--loop", help="CSV of t,u1,u2,u3 to lift")
    g.add_argument("--shortest-omega", type=float, help="shortest loop with this holonomy")
    sp.add_argument("--x0", type=_vec(4), help="lift start (default: a point over c(0))")
    out_opts(sp, "json")

    sp = sub.add_parser("verify", help="run the invariant suite")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=_positive, help=f"verify tolerance (env {TOL_ENV})")
    sp.add_argument("--module", action="append",
                    choices=("core", "hamiltonian", "geodesics", "connect", "hopf"))
    return p


@contextlib.contextmanager
def _sink(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _emit(args, text):
    with _sink(args.output) as fh:
        fh.write(text if text.endswith("\n") else text + "\n")


def _cmd_sample(args):
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    gs = geodesics.sample(args.kind, args.s_end, args.n, B=args.B, theta=args.theta,
                          psi=args.psi, base=args.base, psi1=args.psi1,
                          eta_dot0=args.eta_dot0)
    _emit(args, gs.to_csv() if args.format == "csv" else gs.to_json())


def _cmd_integrate(args):
    s_eval = None
    if args.n_samples is not None:
        if args.n_samples < 1:
            raise UsageError("--n-samples must be >= 1")
        s_eval = np.linspace(0.0, args.s_end, args.n_samples)
    opts = dict(rel_tol=args.rel_tol, abs_tol=args.abs_tol, max_step=args.max_step)
    if args.chart == "cartesian":
        if args.xi is None:
            raise UsageError("--xi is required for the cartesian chart")
        tr = hamiltonian.integrate(args.x0, args.xi, args.s_end, s_eval=s_eval, **opts)
        if args.format == "csv":
            _emit(args, tr.to_csv())
        else:
            doc = {"columns": list(hamiltonian.CSV_COLUMNS),
                   "rows": [[float(hamiltonian.fmt(v)) for v in r] for r in tr.rows()],
                   "max_monitors": tr.max_monitors()}
            _emit(args, json.dumps(doc, indent=2))
        return
    if args.state is None:
        raise UsageError("--state is required for the hyper chart")
    tr = hamiltonian.integrate_hyper(args.state, args.s_end, rel_tol=args.rel_tol,
                                     abs_tol=args.abs_tol, max_step=args.max_step,
                                     s_eval=s_eval)
    cols = ("s", "xi1", "xi2", "eta", "psi1", "psi2", "theta", "H")
    H = [hamiltonian.hamiltonian_hyper(st) for st in tr.states]
    rows = np.column_stack([tr.s, tr.states, H])
    if args.format == "csv":
        _emit(args, write_csv(cols, rows))
    else:
        _emit(args, json.dumps({"columns": list(cols),
                                "rows": [[float(hamiltonian.fmt(v)) for v in r] for r in rows]},
                               indent=2))


def _cmd_connect(args):
    vt = args.verify_tol if args.verify_tol is not None else default_tol()
    if args.emit_lhs_grid is not None:
        if args.target is None:
            raise UsageError("--emit-lhs-grid needs --target")
        if args.emit_lhs_grid < 2:
            raise UsageError("--emit-lhs-grid needs at least 2 points")
        tgt = connect.TargetPoint.from_point(args.target)
        lim = connect.b_limit(tgt.rho)
        B = np.linspace(-lim, lim, args.emit_lhs_grid)
        rows = np.column_stack([B, connect.param_equation_lhs(B, tgt)])
        _emit(args, write_csv(("B", "lhs"), rows))
        return
    oracle = None
    if args.fiber_omega is not None:
        target = args.fiber_omega
        if args.s_max is not None or args.oracle:
            # the oracle counts by arc length, so enumerate by arc length too
            s_max = args.s_max if args.s_max is not None else 2 * np.pi
            sols = connect.enumerate_to_fiber_within(args.fiber_omega, s_max, args.theta, vt)
        else:
            sols = connect.enumerate_to_fiber(args.fiber_omega, args.n_max, theta=args.theta,
                                              verify_tol=vt)
        if args.oracle:
            tp = connect.TargetPoint(1.0, float(geodesics._wrap(args.fiber_omega)), 0.0, 0.0)
            oracle, _ = connect.brute_force_count(tp, args.grid_step, s_max)
    else:
        target = connect.TargetPoint.from_point(args.target)
        sols = connect.enumerate_between(target, args.grid_step, vt, args.branch_max,
                                         s_max=args.s_max)
        if args.oracle:
            s_max = args.s_max if args.s_max is not None else max(g.s_arc for g in sols)
            oracle, _ = connect.brute_force_count(target, args.grid_step, s_max)
    if args.format == "json":
        _emit(args, connect.report_json(target, sols, oracle))
    else:
        cols = ("B", "theta", "s_arc", "paper_length", "branch_index", "residual")
        _emit(args, write_csv(cols, [[g.B, g.theta, g.s_arc, g.paper_length,
                                      g.branch_index, g.residual] for g in sols]))
    if oracle is not None and oracle != len(sols):
        print(f"oracle count {oracle} differs from {len(sols)} solutions", file=sys.stderr)
        return EXIT_VERIFY


def _read_path(fname):
    with open(fname, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise InputError("path file has no samples")
    try:
        x = np.array([[float(r[k]) for k in ("x1", "x2", "x3", "x4")] for r in rows])
    except KeyError:
        raise InputError("path file needs columns x1, x2, x3, x4")
    except (TypeError, ValueError) as e:
        raise InputError(f"bad path row: {e}")
    s = np.array([float(r["s"]) for r in rows]) if "s" in rows[0] else np.arange(len(rows), dtype=float)
    return s, x


def _over(u):
    # a point of S^3 over u in S^2
    a, b, c = u
    if a > -1 + 1e-12:
        x = np.array([1.0 + a, 0.0, -c, b])
    else:
        x = np.array([0.0, 1.0 - a, b, c])
    return x / np.linalg.norm(x)


def _cmd_hopf(args):
    if args.path is not None:
        s, x = _read_path(args.path)
        u = hopf.project_path(x)
        # rescale to t in [0, 1] so the output reads back as a loop file
        span = s[-1] - s[0]
        t = (s - s[0]) / span if span > 0 else np.zeros_like(s)
        rows = np.column_stack([t, u])
        if args.format == "csv":
            _emit(args, write_csv(hopf.LOOP_COLUMNS, rows))
        else:
            _emit(args, json.dumps({"columns": list(hopf.LOOP_COLUMNS), "s_range": [s[0], s[-1]],
                                    "rows": rows.tolist()}, indent=2))
        return
    if args.loop is not None:
        with open(args.loop, newline="") as fh:
            loop = hopf.read_loop_csv(fh)
        x0 = args.x0 if args.x0 is not None else _over(loop.u[0])
        res = hopf.holonomy(loop, x0)
        doc = res.to_dict()
    else:
        sl = hopf.shortest_loop_with_holonomy(args.shortest_omega)
        if args.format == "csv":
            _emit(args, sl.loop.to_csv())
            return
        doc = sl.to_dict()
    _emit(args, json.dumps(doc, indent=2))


def _cmd_verify(args):
    tol = args.tol if args.tol is not None else default_tol()
    checks = verify.run(args.seed, tol, args.module)
    for c in checks:
        print(c.line())
    bad = sum(not c.passed for c in checks)
    print(f"{len(checks) - bad}/{len(checks)} checks passed")
    return EXIT_VERIFY if bad else EXIT_OK


COMMANDS = {"sample": _cmd_sample, "integrate": _cmd_integrate, "connect": _cmd_connect,
            "hopf": _cmd_hopf, "verify": _cmd_verify}


def run(argv=None):
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.cmd](args) or EXIT_OK
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except S3SRError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())
