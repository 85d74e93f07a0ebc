"""Built-in benchmark problems, error tables and empirical convergence
order estimation.

The four built-ins are standard nonlinear test problems with known exact
solutions.  The REFERENCE_* and comparator constants below quote
previously published error values (for this scheme and for the methods it
was compared against); they are embedded for report rendering and
verification only, never recomputed.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import SolverConfig, VideProblem, problem_from_text, solve

_BUILTIN_SPECS = (
    # name, f(x, y), K(x, t, y), x0, y0, exact(x)
    ("ex1", "1 + 2*x - y", "x*(1+2*x)*exp(t*(x-t))*y", 0.0, 1.0, "exp(x^2)"),
    ("ex2", "2*x - sin(x^4)/2", "x^2*t*cos(x^2*y)", 0.0, 0.0, "x^2"),
    ("ex3", "1 - x/2 + x*exp(-x^2)/2", "x*t*exp(-y^2)", 0.0, 0.0, "x"),
    ("ex4", "1", "exp(-t)*y^2", 0.0, 1.0, "exp(x)"),
)


def builtin_problems():
    """The four built-in example problems, in order ex1..ex4."""
    return tuple(problem_from_text(*spec) for spec in _BUILTIN_SPECS)


def get_example(name: str) -> VideProblem:
    for spec in _BUILTIN_SPECS:
        if spec[0] == name:
            return problem_from_text(*spec)
    known = ", ".join(spec[0] for spec in _BUILTIN_SPECS)
    raise ValueError(f"unknown example {name!r} (known: {known})")


@dataclass(frozen=True)
class ErrorRow:
    x: float
    computed: float
    exact: float
    abs_error: float


@dataclass
class ErrorTable:
    problem: str
    h: float
    rows: list


def _grid_index(x: float, x0: float, h: float, steps: int) -> int:
    j = round((x - x0) / h)
    if j < 0 or j > steps or abs(x0 + j * h - x) > 1e-9:
        raise ValueError(f"report point {x!r} is not on the grid (h={h!r})")
    return j


def error_table(problem: VideProblem, h: float, steps: int,
                report_points: Sequence[float]) -> ErrorTable:
    """Solve at step size h and tabulate |computed - exact| at the given
    report points, which must lie on the grid within 1e-9."""
    if not problem.has_exact:
        raise ValueError(f"problem {problem.name!r} has no exact solution")
    indices = [_grid_index(x, problem.x0, h, steps) for x in report_points]
    trajectory = solve(problem, SolverConfig(h=h, steps=steps))
    rows = []
    for j in sorted(set(indices)):
        x = trajectory.nodes[j]
        computed = trajectory.values[j]
        exact = problem.eval_exact(x)
        rows.append(ErrorRow(x=x, computed=computed, exact=exact,
                             abs_error=abs(computed - exact)))
    return ErrorTable(problem=problem.name, h=h, rows=rows)


def max_abs_error(problem: VideProblem, nodes: int) -> float:
    """Maximum |y_j - exact(x_j)| over a grid of `nodes` points covering
    [x0, x0 + 1] with h = 1/(nodes - 1)."""
    if not problem.has_exact:
        raise ValueError(f"problem {problem.name!r} has no exact solution")
    if nodes < 2:
        raise ValueError(f"need at least 2 nodes, got {nodes!r}")
    h = 1.0 / (nodes - 1)
    trajectory = solve(problem, SolverConfig(h=h, steps=nodes - 1))
    exact = np.array([problem.eval_exact(x) for x in trajectory.nodes])
    return float(np.max(np.abs(trajectory.values - exact)))


@dataclass
class OrderEstimate:
    """Endpoint errors under step halving and the pairwise order estimates
    log2(e(h) / e(h/2)).  A pair with a zero error is flagged as None and
    skipped; `summary` is the median of the defined pairs (None if none
    are defined)."""

    hs: list
    errors: list
    pairwise: list
    summary: Optional[float]


def estimate_order(problem: VideProblem, h0: float, levels: int,
                   x_end: float) -> OrderEstimate:
    """Empirical convergence order from the error at x_end under `levels`
    successive halvings starting at h0."""
    if not problem.has_exact:
        raise ValueError(f"problem {problem.name!r} has no exact solution")
    if levels < 2:
        raise ValueError(f"need at least 2 levels, got {levels!r}")
    hs = []
    errors = []
    for level in range(levels):
        h = h0 / 2**level
        steps = round((x_end - problem.x0) / h)
        if steps < 1 or abs(problem.x0 + steps * h - x_end) > 1e-9:
            raise ValueError(
                f"x_end={x_end!r} is not an integer number of steps of h={h!r}"
            )
        trajectory = solve(problem, SolverConfig(h=h, steps=steps))
        hs.append(h)
        errors.append(abs(float(trajectory.values[-1]) - problem.eval_exact(x_end)))
    pairwise = []
    for coarse, fine in zip(errors, errors[1:]):
        if coarse == 0.0 or fine == 0.0:
            pairwise.append(None)
        else:
            pairwise.append(math.log2(coarse / fine))
    defined = [p for p in pairwise if p is not None]
    return OrderEstimate(
        hs=hs,
        errors=errors,
        pairwise=pairwise,
        summary=statistics.median(defined) if defined else None,
    )


def depth_comparison(problem: VideProblem, h: float, steps: int):
    """Maximum grid error at refinement depths 1, 2 and 3 on the same grid.

    Depths 1 and 2 are the internal explicit and once-corrected baselines;
    depth 3 is the production scheme.
    """
    if not problem.has_exact:
        raise ValueError(f"problem {problem.name!r} has no exact solution")
    table = []
    for depth in (1, 2, 3):
        trajectory = solve(problem, SolverConfig(h=h, steps=steps, djm_depth=depth))
        exact = np.array([problem.eval_exact(x) for x in trajectory.nodes])
        table.append((depth, float(np.max(np.abs(trajectory.values - exact)))))
    return table


# ---------------------------------------------------------------------------
# Published reference data.

X_REPORT = tuple(round(0.1 * k, 1) for k in range(1, 11))

# Previously reported |y(x) - y_j| for this scheme on ex1 at x = 0.1..1.0.
# The value printed for h=0.1 at x=0.4 (6.2e-3) breaks the otherwise
# monotone trend of its column and is flagged, never asserted, by the
# verification suite (computed values sit near 6.2e-4 there).
REFERENCE_EX1 = {
    0.1: (2.3e-5, 1.2e-4, 3.1e-4, 6.2e-3, 1.0e-3,
          1.7e-3, 2.8e-3, 4.4e-3, 6.8e-3, 1.0e-2),
    0.025: (2.1e-6, 9.0e-6, 2.1e-5, 4.1e-5, 7.0e-5,
            1.7e-4, 1.8e-4, 2.8e-4, 4.3e-4, 6.6e-4),
}

# Comparator columns for ex1, quoted from the published comparison studies:
# third order Runge-Kutta, predictor-corrector and multi-step methods
# (Wolfe & Phillips) and Day's trapezoidal method.
COMPARATORS_EX1 = {
    0.1: {
        "runge_kutta_o3": (5.5e-4, 1.2e-3, 1.9e-3, 2.8e-3, 3.9e-3,
                           5.8e-3, 7.3e-3, 1.0e-2, 1.4e-2, 2.0e-2),
        "predictor_corrector_o3": (5.0e-5, 5.2e-5, 2.7e-4, 6.6e-4, 1.2e-3,
                                   2.0e-3, 3.1e-3, 4.8e-3, 7.3e-3, 1.1e-2),
        "multi_step_o3": (5.0e-5, 8.1e-4, 7.5e-4, 2.1e-3, 2.5e-3,
                          4.7e-3, 6.0e-3, 1.0e-2, 1.4e-2, 2.1e-2),
        "day": (5.4e-4, 1.1e-3, 1.9e-3, 2.8e-3, 4.0e-3,
                5.6e-3, 7.9e-3, 1.1e-2, 1.5e-2, 2.2e-2),
    },
    0.025: {
        "runge_kutta_o3": (3.3e-5, 7.1e-5, 1.2e-4, 1.7e-4, 2.4e-4,
                           3.3e-4, 4.5e-4, 6.3e-4, 8.7e-4, 1.2e-3),
        "predictor_corrector_o3": (2.2e-6, 1.1e-5, 2.7e-5, 5.0e-5, 8.4e-5,
                                   1.3e-4, 2.0e-4, 3.1e-4, 4.6e-4, 7.0e-4),
        "multi_step_o3": (7.7e-6, 2.6e-5, 5.7e-5, 1.0e-4, 1.7e-4,
                          2.6e-4, 4.0e-4, 5.9e-4, 8.8e-4, 1.3e-3),
        "day": (3.3e-5, 7.1e-5, 1.1e-4, 1.7e-4, 2.5e-4,
                3.5e-4, 5.0e-4, 7.0e-4, 1.0e-3, 1.4e-3),
    },
}

# Maximum-error tables for ex2 and ex3 on [0, 1], keyed by node count.
# `reported` is the value previously published for this scheme (with its
# CPU seconds); `linear`/`quadratic` are the moving-least-squares
# (meshless) comparators of Dehghan & Salehi with their CPU seconds.
# CPU times are informational only, never asserted.
MESHLESS_TABLES = {
    "ex2": {
        5: dict(reported=1.49e-3, time=0.00, linear=2.83e-3, linear_time=0.42,
                quadratic=2.21e-4, quadratic_time=0.58),
        9: dict(reported=4.54e-4, time=0.00, linear=7.22e-4, linear_time=0.68,
                quadratic=3.41e-5, quadratic_time=0.79),
        17: dict(reported=1.26e-4, time=0.00, linear=2.25e-4, linear_time=0.76,
                 quadratic=9.98e-6, quadratic_time=1.16),
        33: dict(reported=3.35e-5, time=0.01, linear=6.93e-5, linear_time=0.87,
                 quadratic=3.26e-6, quadratic_time=1.85),
        65: dict(reported=8.26e-6, time=0.04, linear=2.19e-5, linear_time=0.95,
                 quadratic=1.87e-6, quadratic_time=2.15),
        129: dict(reported=2.19e-6, time=0.15, linear=6.58e-6, linear_time=1.40,
                  quadratic=1.28e-6, quadratic_time=2.91),
    },
    "ex3": {
        5: dict(reported=8.96e-3, time=0.00, linear=5.84e-3, linear_time=0.45,
                quadratic=1.96e-4, quadratic_time=0.46),
        9: dict(reported=2.33e-4, time=0.00, linear=1.75e-3, linear_time=0.57,
                quadratic=2.42e-5, quadratic_time=0.58),
        17: dict(reported=6.13e-5, time=0.00, linear=4.88e-4, linear_time=0.65,
                 quadratic=3.48e-6, quadratic_time=0.73),
        33: dict(reported=1.59e-5, time=0.01, linear=1.30e-4, linear_time=0.72,
                 quadratic=6.55e-7, quadratic_time=0.87),
        65: dict(reported=4.10e-6, time=0.04, linear=3.21e-5, linear_time=1.68,
                 quadratic=5.75e-7, quadratic_time=1.66),
        129: dict(reported=1.04e-6, time=0.17, linear=8.19e-6, linear_time=4.83,
                  quadratic=6.05e-7, quadratic_time=5.61),
    },
}
