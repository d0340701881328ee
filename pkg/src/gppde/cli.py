"""Command-line front end: solve one problem, sweep step sizes, check kernels.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 I/O error.
Output files are byte-stable for a fixed seed; wall-clock columns are
written as zero unless ``--timings`` asks for real measurements.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .driver import RunConfig, fit_convergence, run
from .kernels import validate_derivatives
from .problems import PROBLEM_NAMES, analytic_solution, error_grid, make_problem


def _fmt(x) -> str:
    return "%.17g" % float(x)


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int(os.environ.get("NGP_SEED", "0"))


def _problem(args):
    overrides = {}
    if args.noise:
        overrides["sigma0"] = args.noise
    base = make_problem(args.problem)
    if args.n_artificial:
        overrides["n_artificial"] = {f: args.n_artificial for f in base.fields}
    return make_problem(args.problem, **overrides)


def _write_text(path: str, text: str):
    with open(path, "w") as fh:
        fh.write(text)


_FORMATS = ("csv", "json", "svg")


def _formats(arg: str):
    """Parse the --format list; None signals a usage error."""
    got = tuple(f.strip() for f in arg.split(",") if f.strip())
    if not got or any(f not in _FORMATS for f in got):
        return None
    return set(got)


def _plot_solution(problem, result, path: str):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    grid = error_grid(problem)
    f0 = problem.fields[0]
    last = result.steps[-1]
    t = last.state.time
    mean = last.predictors[f0](grid)
    exact = analytic_solution(problem, grid, t)[f0]
    fig, ax = plt.subplots(figsize=(6, 4))
    if problem.ndim == 1:
        ax.plot(grid, exact, "k-", lw=1.5, label="reference")
        ax.plot(grid, mean, "r--", lw=1.5, label="posterior mean")
        x_state = last.state.locations[f0]
        band = 2.0 * np.sqrt(np.clip(np.diag(last.state.cov), 0.0, None))
        n0 = last.state.field_index(f0)
        ax.errorbar(
            x_state,
            last.state.field_mean(f0),
            yerr=band[n0],
            fmt="none",
            ecolor="orange",
            alpha=0.6,
            label="two-sigma band",
        )
        ax.set_xlabel("x")
        ax.legend(frameon=False)
    else:
        n = int(round(len(grid) ** 0.5))
        pc = ax.pcolormesh(
            grid[:, 0].reshape(n, n),
            grid[:, 1].reshape(n, n),
            (mean - exact).reshape(n, n),
            shading="auto",
        )
        fig.colorbar(pc, ax=ax, label="mean - reference")
        ax.set_xlabel("x1")
        ax.set_ylabel("x2")
    ax.set_title(f"{problem.name}, t = {t:g}")
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)


def _plot_error_history(problem, result, path: str):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    times = [s.state.time for s in result.steps]
    errs = [s.rel_l2_error for s in result.steps]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(times, errs, "o-")
    ax.set_xlabel("t")
    ax.set_ylabel("relative L2 error")
    ax.set_title(f"{problem.name}, dt = {result.dt:g}")
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)


def _bad_usage(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return 2


def _cmd_solve(args) -> int:
    if args.dt is not None and args.dt <= 0.0:
        return _bad_usage(f"--dt must be positive, got {args.dt:g}")
    if args.T is not None and args.T <= 0.0:
        return _bad_usage(f"--T must be positive, got {args.T:g}")
    if args.noise < 0.0:
        return _bad_usage(f"--noise must be nonnegative, got {args.noise:g}")
    formats = _formats(args.format)
    if formats is None:
        return _bad_usage(
            f"--format takes a nonempty subset of {','.join(_FORMATS)}"
        )
    problem = _problem(args)
    os.makedirs(args.out, exist_ok=True)
    cfg = RunConfig(problem=problem, dt=args.dt, T=args.T, seed=_seed(args))
    result = run(cfg)
    last = result.steps[-1]

    if "csv" in formats:
        lines = ["step,time,rel_l2_error,nlml,trace_cov,wall_ms"]
        for i, s in enumerate(result.steps, start=1):
            wall_ms = s.wall_time * 1e3 if args.timings else 0.0
            lines.append(
                ",".join(
                    [str(i)]
                    + [
                        _fmt(v)
                        for v in (
                            s.state.time,
                            s.rel_l2_error,
                            s.nlml,
                            float(np.trace(s.state.cov)),
                            wall_ms,
                        )
                    ]
                )
            )
        _write_text(os.path.join(args.out, "steps.csv"), "\n".join(lines) + "\n")

    if "json" in formats:
        state = {
            "problem": problem.name,
            "dt": result.dt,
            "n_steps": result.n_steps,
            "seed": result.seed,
            "time": last.state.time,
            "rel_l2_error": last.rel_l2_error,
            "trace_cov": float(np.trace(last.state.cov)),
            "fields": {
                f: {
                    "x": np.asarray(last.state.locations[f]).tolist(),
                    "mean": last.state.field_mean(f).tolist(),
                }
                for f in problem.fields
            },
            "cov": last.state.cov.tolist(),
        }
        with open(os.path.join(args.out, "state_final.json"), "w") as fh:
            json.dump(state, fh, indent=1, sort_keys=True)
            fh.write("\n")

    if "svg" in formats:
        _plot_solution(problem, result, os.path.join(args.out, "solution.svg"))
        _plot_error_history(
            problem, result, os.path.join(args.out, "error_vs_time.svg")
        )
    print(
        f"{problem.name}: {result.n_steps} steps of {result.dt:g}, "
        f"final rel l2 error {last.rel_l2_error:.3e}"
    )
    return 0


def _run_one(problem, dt, T, seed):
    res = run(RunConfig(problem=problem, dt=dt, T=T, seed=seed))
    return res.dt, res.final_error


def _cmd_converge(args) -> int:
    if args.T is not None and args.T <= 0.0:
        return _bad_usage(f"--T must be positive, got {args.T:g}")
    if args.noise < 0.0:
        return _bad_usage(f"--noise must be nonnegative, got {args.noise:g}")
    problem = _problem(args)
    try:
        dts = [float(t) for t in args.dt_list.split(",") if t.strip()]
    except ValueError:
        return _bad_usage(f"bad --dt-list {args.dt_list!r}")
    if len(dts) < 2:
        return _bad_usage("--dt-list needs at least two step sizes")
    if any(dt <= 0.0 for dt in dts):
        return _bad_usage("--dt-list entries must be positive")
    os.makedirs(args.out, exist_ok=True)
    seed = _seed(args)
    T = args.T
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            rows = list(ex.map(_run_one, [problem] * len(dts), dts, [T] * len(dts), [seed] * len(dts)))
    else:
        rows = [_run_one(problem, dt, T, seed) for dt in dts]
    eff = np.array([r[0] for r in rows])
    errs = np.array([r[1] for r in rows])
    slope, n_used = fit_convergence(eff, errs)

    lines = ["sweep_value,rel_l2_error"]
    lines += [f"{_fmt(d)},{_fmt(e)}" for d, e in rows]
    lines.append(f"# fitted_slope={_fmt(slope)}")
    _write_text(os.path.join(args.out, "convergence.csv"), "\n".join(lines) + "\n")
    print(f"{problem.name}: fitted order {slope:.3f} from {n_used} of {len(dts)} step sizes")
    return 0


def _cmd_validate_kernels(args) -> int:
    report = validate_derivatives(n_samples=args.n_samples, seed=_seed(args))
    print(f"{'family':8s} {'order':16s} {'max_rel_err':>12s} {'tol':>8s} status")
    for c in report.checks:
        order = f"{c.order.left} {c.order.right}"
        status = "ok" if c.passed else "FAIL"
        print(
            f"{c.family.value:8s} {order:16s} {c.max_rel_err:12.3e} "
            f"{c.tol:8.0e} {status}"
        )
    failures = report.failures()
    print(
        f"{len(report.checks)} derivative checks against finite differences, "
        f"{len(failures)} failures"
    )
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gppde",
        description="GP time stepping for evolution PDEs with uncertain initial data",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--problem", required=True, choices=PROBLEM_NAMES)
        p.add_argument("--T", type=float, default=None, help="final time")
        p.add_argument("--noise", type=float, default=0.0, help="initial data noise stdev")
        p.add_argument("--n-artificial", type=int, default=0, help="state points per field")
        p.add_argument("--seed", type=int, default=None, help="overrides NGP_SEED")
        p.add_argument("--out", default=".", help="output directory")

    p_solve = sub.add_parser("solve", help="propagate one problem and write step logs")
    common(p_solve)
    p_solve.add_argument("--dt", type=float, default=None, help="time step")
    p_solve.add_argument(
        "--format", default="csv,json", help="comma-separated subset of csv,json,svg"
    )
    p_solve.add_argument(
        "--timings", action="store_true", help="write real wall-clock times"
    )
    p_solve.set_defaults(func=_cmd_solve)

    p_conv = sub.add_parser("converge", help="error vs step size with a fitted order")
    common(p_conv)
    p_conv.add_argument("--dt-list", required=True, help="comma-separated step sizes")
    p_conv.add_argument("--jobs", type=int, default=1, help="parallel runs")
    p_conv.set_defaults(func=_cmd_converge)

    p_val = sub.add_parser(
        "validate-kernels", help="check kernel derivatives against finite differences"
    )
    p_val.add_argument("--n-samples", type=int, default=100)
    p_val.add_argument("--seed", type=int, default=None)
    p_val.set_defaults(func=_cmd_validate_kernels)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
