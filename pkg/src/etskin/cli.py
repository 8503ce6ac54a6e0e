"""Command-line interface.

Exit codes: 0 success, 2 usage or model errors, 3 servo did not arrive,
4 IK did not converge.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from etskin import bench, ik, servo
from etskin.errors import KinematicsError
from etskin.geometry import validate_pose
from etskin.jacobian import jacobian_fast, jacobian_naive, to_ee_frame
from etskin.model import BUILTIN_MODELS, fkine, joint_config, load_model

EXIT_OK, EXIT_USAGE, EXIT_SERVO, EXIT_IK = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _floats(text):
    try:
        return np.array([float(v) for v in text.replace(" ", "").split(",") if v != ""])
    except ValueError as exc:
        raise UsageError(f"cannot parse number list {text!r}") from exc


def _q(ets, text):
    return joint_config(ets, _floats(text) if text else np.zeros(ets.n))


def _goal(ets, args):
    if args.goal is not None and args.goal_q is not None:
        raise UsageError("give either --goal or --goal-q, not both")
    if args.goal_q is not None:
        return fkine(ets, _floats(args.goal_q))
    if args.goal is None:
        raise UsageError("a goal is required: --goal (16 numbers, row-major) or --goal-q")
    vals = _floats(args.goal)
    if vals.size != 16:
        raise UsageError(f"--goal needs 16 numbers, got {vals.size}")
    return validate_pose(vals.reshape(4, 4), tol=1e-6)


def _matrix_text(M):
    return "\n".join(" ".join(f"{v:.17g}" for v in row) for row in np.atleast_2d(M)) + "\n"


def _emit(text, out):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_models(args):
    rows = []
    for name in BUILTIN_MODELS:
        m = load_model(name)
        rows.append({"name": name, "joints": m.n, "terms": len(m), "ets": str(m)})
    if args.format == "json":
        _emit(json.dumps(rows, indent=2) + "\n", args.out)
    else:
        _emit("".join(f"{r['name']}\tn={r['joints']}\tM={r['terms']}\t{r['ets']}\n" for r in rows), args.out)
    return EXIT_OK


def cmd_fk(args):
    ets = load_model(args.model)
    T = fkine(ets, _q(ets, args.q))
    if args.format == "json":
        _emit(json.dumps({"pose": T.tolist()}) + "\n", args.out)
    else:
        _emit(_matrix_text(T), args.out)
    return EXIT_OK


def cmd_jacobian(args):
    ets = load_model(args.model)
    q = _q(ets, args.q)
    J = (jacobian_naive if args.algorithm == "naive" else jacobian_fast)(ets, q)
    if args.frame == "ee":
        J = to_ee_frame(J, fkine(ets, q))
    if args.format == "json":
        _emit(json.dumps({"frame": J.frame, "jacobian": J.matrix.tolist()}) + "\n", args.out)
    else:
        _emit(_matrix_text(J.matrix), args.out)
    return EXIT_OK


def cmd_servo(args):
    ets = load_model(args.model)
    q0 = _q(ets, args.q0)
    cfg = servo.ServoConfig(kt=args.kt, kr=args.kr, v_max=args.vmax, e_min=args.emin,
                            dt=args.dt, max_steps=args.max_steps)
    log = servo.simulate_pbs(ets, q0, _goal(ets, args), cfg)
    _emit(log.to_csv(), args.out)
    print(f"status={log.status} steps={len(log)}", file=sys.stdout if args.out else sys.stderr)
    return EXIT_OK if log.status == servo.ARRIVED else EXIT_SERVO


def cmd_ik(args):
    ets = load_model(args.model)
    opts = ik.IKOptions.from_spec(args.method, max_searches=args.searches,
                                  max_iterations=args.iters, tol=args.tol, seed=args.seed)
    q0 = _q(ets, args.q0) if args.q0 else None
    result = ik.solve(ets, _goal(ets, args), opts, q0=q0)
    _emit(json.dumps(result.to_dict(), sort_keys=True) + "\n", args.out)
    return EXIT_OK if result.success else EXIT_IK


def cmd_bench(args):
    methods = [m for m in args.methods.split(",") if m] if args.methods else list(bench.STANDARD_METHODS)
    budgets = bench.STANDARD_BUDGETS if args.both_budgets else ((args.searches, args.iters),)
    if args.problems < 1:
        raise UsageError("--problems must be at least 1")
    report = bench.run_campaign(args.model, methods, args.problems, budgets,
                                seed=args.seed, tol=args.tol, workers=args.workers)
    if args.out:
        out = Path(args.out)
        out.with_suffix(".csv").write_text(report.to_csv())
        out.with_suffix(".json").write_text(report.to_json())
    else:
        sys.stdout.write(report.to_json() if args.format == "json" else report.to_csv())
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", default=None,
                        help="builtin name (planar2, ur5, panda) or model file; default panda, ur5 for bench")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = argparse.ArgumentParser(prog="etskin", description="ETS manipulator kinematics")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("models", parents=[common], help="list builtin models").set_defaults(func=cmd_models)

    p = sub.add_parser("fk", parents=[common], help="forward kinematics")
    p.add_argument("--q", default=None, help="comma-separated joint values (default zeros)")
    p.set_defaults(func=cmd_fk)

    p = sub.add_parser("jacobian", parents=[common], help="manipulator Jacobian")
    p.add_argument("--q", default=None)
    p.add_argument("--frame", choices=("world", "ee"), default="world")
    p.add_argument("--algorithm", choices=("naive", "fast"), default="fast")
    p.set_defaults(func=cmd_jacobian)

    goal = argparse.ArgumentParser(add_help=False)
    goal.add_argument("--goal", default=None, help="16 comma-separated numbers, row-major pose")
    goal.add_argument("--goal-q", default=None, help="joint values whose pose is the goal")
    goal.add_argument("--q0", default=None, help="start configuration")

    p = sub.add_parser("servo", parents=[common, goal], help="position-based servo simulation")
    p.add_argument("--kt", type=float, default=2.0)
    p.add_argument("--kr", type=float, default=2.0)
    p.add_argument("--vmax", type=float, default=0.2)
    p.add_argument("--emin", type=float, default=1e-4)
    p.add_argument("--dt", type=float, default=0.02)
    p.add_argument("--max-steps", type=int, default=5000)
    p.set_defaults(func=cmd_servo)

    p = sub.add_parser("ik", parents=[common, goal], help="numerical inverse kinematics")
    p.add_argument("--method", default="LM-Chan:0.1", help=f"one of {', '.join(ik.METHODS)}, optional :PARAM")
    p.add_argument("--searches", type=int, default=100)
    p.add_argument("--iters", type=int, default=30)
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_ik)

    p = sub.add_parser("bench", parents=[common], help="IK method comparison campaign")
    p.add_argument("--methods", default=None, help="comma-separated method specs (default: all ten)")
    p.add_argument("--problems", type=int, default=1000)
    p.add_argument("--searches", type=int, default=1)
    p.add_argument("--iters", type=int, default=500)
    p.add_argument("--both-budgets", action="store_true", help="run both 1x500 and 100x30 budgets")
    p.add_argument("--tol", type=float, default=bench.BENCH_TOL)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.model is None:
        args.model = "ur5" if args.command == "bench" else "panda"
    try:
        return args.func(args)
    except (KinematicsError, UsageError, ValueError) as exc:
        print(f"etskin {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
