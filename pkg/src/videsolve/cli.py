"""Command-line front end.

Subcommands: solve (run a problem and dump the trajectory), table
(benchmark error table for a built-in example), stability (scan the
stability region), bifurcation (thresholds and per-alpha classification)
and verify (run the acceptance checks).

All data output is CSV: comma separated, one header row, '\n' line
endings, UTF-8, numbers printed with 17 significant digits so they
round-trip exactly.  Informational header lines start with '#'.
Exit codes: 0 success, 1 verification failure, 2 usage or validation
error, 3 solver failure.
"""

from __future__ import annotations

import argparse
import sys

from . import analysis, bench, verify
from .core import SolverConfig, SolverError, VideProblem, problem_from_text, solve
from .expr import ParseError

_PROBLEM_KEYS = ("name", "f", "K", "x0", "y0", "exact")


class ProblemFileError(ValueError):
    pass


def load_problem(path: str) -> VideProblem:
    """Read a problem file: 'key = value' lines with keys name, f, K, x0,
    y0 and optional exact; '#' starts a comment anywhere in a line."""
    seen = {}
    try:
        with open(path, encoding="utf-8") as handle:
            lines = handle.readlines()
    except OSError as err:
        raise ProblemFileError(f"cannot read {path!r}: {err}") from err
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, separator, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not separator or not key:
            raise ProblemFileError(f"{path}:{lineno}: expected 'key = value'")
        if key not in _PROBLEM_KEYS:
            raise ProblemFileError(f"{path}:{lineno}: unknown key {key!r}")
        if key in seen:
            raise ProblemFileError(f"{path}:{lineno}: duplicate key {key!r}")
        if not value:
            raise ProblemFileError(f"{path}:{lineno}: empty value for {key!r}")
        seen[key] = value
    missing = [key for key in ("name", "f", "K", "x0", "y0") if key not in seen]
    if missing:
        raise ProblemFileError(f"{path}: missing required keys: {', '.join(missing)}")
    try:
        x0 = float(seen["x0"])
        y0 = float(seen["y0"])
    except ValueError as err:
        raise ProblemFileError(f"{path}: bad numeric value: {err}") from err
    try:
        return problem_from_text(seen["name"], seen["f"], seen["K"], x0, y0,
                                 seen.get("exact"))
    except (ParseError, ValueError) as err:
        raise ProblemFileError(f"{path}: {err}") from err


def _fmt(value: float) -> str:
    return format(value, ".17g")


def _emit(lines, out_path):
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _fail(kind: str, message: str, code: int) -> int:
    print(f"error: {kind}: {message}", file=sys.stderr)
    return code


def _parse_range(text: str):
    lo, separator, hi = text.partition(":")
    if not separator:
        raise ValueError(f"range {text!r} must look like a:b")
    try:
        low = float(lo)
        high = float(hi)
    except ValueError:
        raise ValueError(f"range {text!r} has non-numeric endpoints") from None
    if not low < high:
        raise ValueError(f"range {text!r} must have a < b")
    return low, high


def cmd_solve(args) -> int:
    try:
        if args.problem:
            problem = load_problem(args.problem)
        else:
            problem = bench.get_example(args.example)
        config = SolverConfig(h=args.h, steps=args.steps, djm_depth=args.depth)
    except (ProblemFileError, ValueError) as err:
        return _fail("usage", str(err), 2)
    try:
        trajectory = solve(problem, config)
    except SolverError as err:
        return _fail("solver", str(err), 3)
    lines = []
    if problem.has_exact:
        lines.append("j,x,y,exact,abs_error")
        for j, (x, y) in enumerate(zip(trajectory.nodes, trajectory.values)):
            exact = problem.eval_exact(x)
            lines.append(f"{j},{_fmt(x)},{_fmt(y)},{_fmt(exact)},{_fmt(abs(y - exact))}")
    else:
        lines.append("j,x,y")
        for j, (x, y) in enumerate(zip(trajectory.nodes, trajectory.values)):
            lines.append(f"{j},{_fmt(x)},{_fmt(y)}")
    _emit(lines, args.out)
    return 0


def cmd_table(args) -> int:
    try:
        problem = bench.get_example(args.example)
    except ValueError as err:
        return _fail("usage", str(err), 2)
    h = args.h
    steps = round(1.0 / h) if h > 0 else 0
    if steps < 1 or abs(steps * h - 1.0) > 1e-9:
        return _fail("usage", f"step size {h!r} does not partition [0, 1]", 2)
    on_grid = [x for x in bench.X_REPORT
               if abs(round(x / h) * h - x) <= 1e-9 and 1 <= round(x / h) <= steps]
    if not on_grid:
        return _fail("usage", f"no multiple of 0.1 lies on the grid of h={h!r}", 2)
    try:
        table = bench.error_table(problem, h, steps, on_grid)
        worst = bench.max_abs_error(problem, steps + 1)
    except SolverError as err:
        return _fail("solver", str(err), 3)
    except ValueError as err:
        return _fail("usage", str(err), 2)
    lines = [
        f"# problem = {problem.name}",
        f"# h = {_fmt(h)}",
        f"# nodes = {steps + 1}",
        f"# max_abs_error = {_fmt(worst)}",
    ]
    comparators = bench.COMPARATORS_EX1.get(h) if problem.name == "ex1" else None
    meshless = bench.MESHLESS_TABLES.get(problem.name, {}).get(steps + 1)
    if meshless:
        lines.append(
            "# published max errors at this node count: "
            f"this scheme {meshless['reported']:g} ({meshless['time']:g} s), "
            f"linear meshless {meshless['linear']:g} ({meshless['linear_time']:g} s), "
            f"quadratic meshless {meshless['quadratic']:g} "
            f"({meshless['quadratic_time']:g} s)"
        )
    if comparators:
        lines.append("# comparator columns quote published results "
                     "(Runge-Kutta/predictor-corrector/multi-step: Wolfe & "
                     "Phillips; day: Day's trapezoidal method)")
        names = sorted(comparators)
        lines.append("x,computed,exact,abs_error," + ",".join(names))
        for row in table.rows:
            k = round(row.x * 10) - 1
            quoted = ",".join(_fmt(comparators[name][k]) for name in names)
            lines.append(
                f"{_fmt(row.x)},{_fmt(row.computed)},{_fmt(row.exact)},"
                f"{_fmt(row.abs_error)},{quoted}"
            )
    else:
        lines.append("x,computed,exact,abs_error")
        for row in table.rows:
            lines.append(f"{_fmt(row.x)},{_fmt(row.computed)},{_fmt(row.exact)},"
                         f"{_fmt(row.abs_error)}")
    _emit(lines, args.out)
    return 0


def cmd_stability(args) -> int:
    try:
        u_lo, u_hi = _parse_range(args.u_range)
        v_lo, v_hi = _parse_range(args.v_range)
        if args.resolution < 1:
            raise ValueError(f"resolution must be >= 1, got {args.resolution}")
        grid = analysis.stability_region(u_lo, u_hi, v_lo, v_hi, args.resolution)
    except ValueError as err:
        return _fail("usage", str(err), 2)
    lines = ["u,v,re_r1,im_r1,re_r2,im_r2,stable"]
    for cell in grid:
        lines.append(
            f"{_fmt(cell.u)},{_fmt(cell.v)},"
            f"{_fmt(cell.r1.real)},{_fmt(cell.r1.imag)},"
            f"{_fmt(cell.r2.real)},{_fmt(cell.r2.imag)},"
            f"{int(cell.stable)}"
        )
    _emit(lines, args.out)
    return 0


def cmd_bifurcation(args) -> int:
    try:
        lo, hi = _parse_range(args.alpha_range)
        if args.samples < 1:
            raise ValueError(f"samples must be >= 1, got {args.samples}")
        thresholds = analysis.bifurcation_thresholds(args.h)
    except ValueError as err:
        return _fail("usage", str(err), 2)
    lines = [
        f"# h = {_fmt(args.h)}",
        f"# alpha0 = {thresholds.alpha0:.12g}",
        f"# alpha1 = {thresholds.alpha1:.12g}",
        f"# alpha2 = {thresholds.alpha2:.12g}",
        "alpha,region,|r1|,|r2|",
    ]
    count = args.samples
    for index in range(count):
        if count == 1:
            alpha = lo
        else:
            alpha = lo + (hi - lo) * index / (count - 1)
        report = analysis.classify_bifurcation(alpha, args.h, args.tol)
        lines.append(f"{_fmt(alpha)},{report.region},"
                     f"{_fmt(abs(report.r1))},{_fmt(abs(report.r2))}")
    _emit(lines, args.out)
    return 0


def cmd_verify(args) -> int:
    if args.list:
        for name in verify.check_names():
            print(name)
        return 0
    results = verify.run_all()
    failures = 0
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(f"{status} {result.name}: {result.detail}")
        failures += 0 if result.passed else 1
    total = len(results)
    print(f"{total - failures}/{total} checks passed")
    return 0 if failures == 0 else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="videsolve",
        description="Volterra integro-differential equation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a problem and emit the trajectory")
    source = p_solve.add_mutually_exclusive_group(required=True)
    source.add_argument("--problem", help="path to a problem file")
    source.add_argument("--example", help="built-in example name (ex1..ex4)")
    p_solve.add_argument("--h", type=float, required=True, help="step size")
    p_solve.add_argument("--steps", type=int, required=True, help="number of steps")
    p_solve.add_argument("--depth", type=int, default=3,
                         help="refinement depth (default 3)")
    p_solve.add_argument("--out", help="output CSV path (default stdout)")
    p_solve.set_defaults(func=cmd_solve)

    p_table = sub.add_parser("table", help="benchmark error table for an example")
    p_table.add_argument("--example", required=True, help="built-in example name")
    p_table.add_argument("--h", type=float, required=True,
                         help="step size; must partition [0, 1]")
    p_table.add_argument("--out", help="output CSV path (default stdout)")
    p_table.set_defaults(func=cmd_table)

    p_stab = sub.add_parser("stability", help="scan the stability region")
    p_stab.add_argument("--u-range", default="-4:1", help="u range a:b (default -4:1)")
    p_stab.add_argument("--v-range", default="-4:1", help="v range a:b (default -4:1)")
    p_stab.add_argument("--resolution", type=int, default=200,
                        help="cells per axis (default 200)")
    p_stab.add_argument("--out", help="output CSV path (default stdout)")
    p_stab.set_defaults(func=cmd_stability)

    p_bif = sub.add_parser("bifurcation",
                           help="thresholds and per-alpha classification")
    p_bif.add_argument("--h", type=float, required=True, help="step size in (0, 2)")
    p_bif.add_argument("--alpha-range", default="-4:4",
                       help="alpha range a:b (default -4:4)")
    p_bif.add_argument("--samples", type=int, default=401,
                       help="sample count across the range (default 401)")
    p_bif.add_argument("--tol", type=float, default=1e-9,
                       help="boundary label half-width (default 1e-9)")
    p_bif.add_argument("--out", help="output CSV path (default stdout)")
    p_bif.set_defaults(func=cmd_bifurcation)

    p_verify = sub.add_parser("verify", help="run the acceptance checks")
    p_verify.add_argument("--list", action="store_true",
                          help="print check names without running them")
    p_verify.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_request:
        return int(exit_request.code or 0)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
