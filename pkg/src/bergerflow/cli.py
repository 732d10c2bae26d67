"""Command-line front end.

Subcommands: ``simulate`` (CSV trajectory), ``portrait`` (CSV vector-field
grid plus optional integral curves), ``equilibria`` (JSON), and ``verify``
(JSON report of the built-in verification suite).

Exit codes: 0 success, 1 argument error, 2 integration failure,
3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import acceptance, dynamics, phase
from .integrate import IntegratorConfig, StepBudgetError, integrate
from .model import FlowKind, FlowParams


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _build_params(args) -> FlowParams:
    kind = FlowKind.COLLAPSE if args.flow == "collapse" else FlowKind.NORMALIZED
    if args.a not in (-2.0, 2.0):
        raise _ArgError("--a must be 2 or -2")
    allowed = (-1.0, 1.0) if kind is FlowKind.COLLAPSE else (-0.5, 0.5)
    if args.kappa not in allowed:
        raise _ArgError(
            f"--kappa must be one of {allowed} for --flow {args.flow}"
        )
    if not args.epsilon > 0:
        raise _ArgError("--epsilon must be positive")
    return FlowParams(kind, a=args.a, kappa=args.kappa, epsilon=args.epsilon)


def _build_config(args) -> IntegratorConfig:
    kwargs = {}
    if args.rtol is not None:
        kwargs["rtol"] = args.rtol
    if args.atol is not None:
        kwargs["atol"] = args.atol
    if args.collapse_tol is not None:
        kwargs["collapse_tol"] = args.collapse_tol
    if args.equilib_tol is not None:
        kwargs["equilib_tol"] = args.equilib_tol
    if args.stride is not None:
        kwargs["output_stride"] = args.stride
    try:
        return IntegratorConfig(**kwargs)
    except ValueError as exc:
        raise _ArgError(str(exc))


class _ArgError(Exception):
    pass


def _add_flow_flags(p: argparse.ArgumentParser):
    p.add_argument("--flow", required=True, choices=["collapse", "normalized"])
    p.add_argument("--a", type=float, default=2.0)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--rtol", type=float, default=None)
    p.add_argument("--atol", type=float, default=None)
    p.add_argument("--collapse-tol", dest="collapse_tol", type=float, default=None)
    p.add_argument("--equilib-tol", dest="equilib_tol", type=float, default=None)
    p.add_argument("--stride", type=int, default=None)


def _emit_csv_trajectory(traj, out):
    out.write("t,alpha,beta,volume,energy,f,g,dalpha,dbeta\n")
    for state, scalars in traj.samples:
        dx, dy = dynamics.vector_field(traj.params, (state.alpha, state.beta))
        row = [state.t, state.alpha, state.beta, scalars.volume, scalars.energy,
               scalars.f, scalars.g, dx, dy]
        out.write(",".join(_fmt(v) for v in row) + "\n")
    term = traj.termination
    out.write(f"# termination={term.tag} t={_fmt(term.t_event)}\n")


def cmd_simulate(args) -> int:
    params = _build_params(args)
    config = _build_config(args)
    if not args.t_end > 0:
        raise _ArgError("--t-end must be positive")
    try:
        traj = integrate(params, config, args.t_end)
    except StepBudgetError as exc:
        print(f"integration failure: {exc}", file=sys.stderr)
        return 2
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        _emit_csv_trajectory(traj, out)
    finally:
        if args.out:
            out.close()
    return 2 if traj.termination.tag == "StepUnderflow" else 0


def cmd_portrait(args) -> int:
    params = _build_params(args)
    config = _build_config(args)
    try:
        nx, ny = (int(v) for v in args.grid.split(","))
        x_range = tuple(float(v) for v in args.x_range.split(","))
        y_range = tuple(float(v) for v in args.y_range.split(","))
    except ValueError:
        raise _ArgError("--grid expects nx,ny and ranges expect lo,hi")
    try:
        points, dirs, mags = phase.sample_portrait(params, x_range, y_range, nx, ny)
    except ValueError as exc:
        raise _ArgError(str(exc))
    seeds = []
    if args.seeds:
        for chunk in args.seeds.split(";"):
            chunk = chunk.strip()
            if not chunk:
                continue
            try:
                x, y = (float(v) for v in chunk.split(","))
            except ValueError:
                raise _ArgError(f"--seeds entry {chunk!r} is not x,y")
            if x <= 0 or y <= 0:
                raise _ArgError(f"--seeds entry {chunk!r} must be in the open first quadrant")
            seeds.append((x, y))
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        out.write("x,y,ux,uy,mag\n")
        for p, d, m in zip(points, dirs, mags):
            out.write(",".join(_fmt(v) for v in (p[0], p[1], d[0], d[1], m)) + "\n")
        from .model import State

        for x, y in seeds:
            try:
                traj = integrate(params, config, args.t_end,
                                 start=State(t=0.0, alpha=x, beta=y))
            except StepBudgetError as exc:
                print(f"integration failure: {exc}", file=sys.stderr)
                return 2
            out.write(f"\n# seed={_fmt(x)},{_fmt(y)}\n")
            out.write("t,alpha,beta\n")
            for state, _ in traj.samples:
                out.write(",".join(_fmt(v) for v in (state.t, state.alpha, state.beta)) + "\n")
    finally:
        if args.out:
            out.close()
    return 0


def cmd_equilibria(args) -> int:
    if args.flow == "collapse":
        print(
            "error: the collapse flow has no isolated equilibria; its critical "
            "set is the degenerate boundary line of points (0, k) with k != 0",
            file=sys.stderr,
        )
        return 1
    params = _build_params(args)
    entries = [
        {
            "epsilon_star": eq.epsilon_star,
            "point": list(eq.point),
            "stability": eq.stability,
        }
        for eq in dynamics.equilibria(params)
    ]
    print(json.dumps(entries, indent=2))
    return 0


def cmd_verify(args) -> int:
    results = acceptance.run_checks(name_filter=args.filter, oracle_tol=args.oracle_tol)
    report = {
        "status": "pass" if all(r.passed for r in results) else "fail",
        "checks": [
            {
                "name": r.name,
                "passed": bool(r.passed),
                "measured": float(r.measured),
                "threshold": float(r.threshold),
            }
            for r in results
        ],
    }
    print(json.dumps(report, indent=2))
    return 0 if report["status"] == "pass" else 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bergerflow",
        description="Simulate and verify the Berger-sphere collapse and "
        "volume-normalized gradient flows.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate one trajectory and emit CSV")
    _add_flow_flags(p)
    p.add_argument("--t-end", dest="t_end", type=float, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("portrait", help="sample the vector field on a grid")
    _add_flow_flags(p)
    p.add_argument("--t-end", dest="t_end", type=float, default=10.0)
    p.add_argument("--grid", default="20,20")
    p.add_argument("--x-range", dest="x_range", default="0.05,1.5")
    p.add_argument("--y-range", dest="y_range", default="0.05,1.5")
    p.add_argument("--seeds", default="1,1;0.6666666666666666,1")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_portrait)

    p = sub.add_parser("equilibria", help="list equilibria as JSON")
    _add_flow_flags(p)
    p.set_defaults(fn=cmd_equilibria)

    p = sub.add_parser("verify", help="run the verification suite")
    p.add_argument("--filter", default="")
    p.add_argument("--oracle-tol", dest="oracle_tol", type=float, default=1e-8)
    p.set_defaults(fn=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (_ArgError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
