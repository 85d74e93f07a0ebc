"""Uniform-grid stepper for scalar Volterra integro-differential problems

    y'(x) = f(x, y(x)) + integral from x0 to x of K(x, t, y(t)) dt,
    y(x0) = y0.

One step integrates the equation over [x_j, x_j + h] and applies the
trapezium rule to both the outer integral and the memory integral.  The
resulting update is implicit in y_{j+1}: writing the already-computable
part as the predictor g and the implicit endpoint contribution as
N(z) = (h/2) f(x_{j+1}, z) + (h^2/4) K(x_{j+1}, x_{j+1}, z), the step
solves y_{j+1} = g + N(y_{j+1}) with a fixed number of refinements
s_{m+1} = g + N(s_m) starting from s_0 = g (Daftardar-Gejji/Jafari series
truncation; depth 3 by default, so y_{j+1} = g + N(g + N(g))).

The outer abscissae of the memory sums change every step, so nothing can
be cached across steps: a full solve costs O(n^2) kernel evaluations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .expr import EvalError, Expression, evaluate, free_variables, parse


class SolverError(RuntimeError):
    """A step failed.  `step_index` is the failing step j; `values_completed`
    is the number of trajectory values known when the failure occurred."""

    def __init__(self, message: str, step_index: int, values_completed: int):
        super().__init__(message)
        self.step_index = step_index
        self.values_completed = values_completed


def _check_vars(label: str, expression: Expression, allowed: set):
    extra = free_variables(expression) - allowed
    if extra:
        names = ", ".join(sorted(extra))
        raise ValueError(f"{label} may only use {sorted(allowed)}, found: {names}")


@dataclass(frozen=True)
class VideProblem:
    """A problem instance: right side f(x, y), kernel K(x, t, y), initial
    data (x0, y0), and optionally the exact solution as a function of x."""

    name: str
    f: Expression
    kernel: Expression
    x0: float
    y0: float
    exact: Optional[Expression] = None

    def __post_init__(self):
        _check_vars("f", self.f, {"x", "y"})
        _check_vars("kernel", self.kernel, {"x", "t", "y"})
        if self.exact is not None:
            _check_vars("exact solution", self.exact, {"x"})

    @property
    def has_exact(self) -> bool:
        return self.exact is not None

    def eval_f(self, x: float, y: float) -> float:
        return evaluate(self.f, {"x": x, "y": y})

    def eval_kernel(self, x: float, t: float, y: float) -> float:
        return evaluate(self.kernel, {"x": x, "t": t, "y": y})

    def eval_exact(self, x: float) -> float:
        if self.exact is None:
            raise ValueError(f"problem {self.name!r} has no exact solution")
        return evaluate(self.exact, {"x": x})


def problem_from_text(name, f, kernel, x0, y0, exact=None) -> VideProblem:
    """Convenience constructor taking the formulas as text."""
    return VideProblem(
        name=name,
        f=parse(f),
        kernel=parse(kernel),
        x0=float(x0),
        y0=float(y0),
        exact=None if exact is None else parse(exact),
    )


@dataclass(frozen=True)
class SolverConfig:
    h: float
    steps: int
    djm_depth: int = 3

    def __post_init__(self):
        if not (self.h > 0 and math.isfinite(self.h)):
            raise ValueError(f"step size must be positive and finite, got {self.h!r}")
        if self.steps < 1:
            raise ValueError(f"step count must be >= 1, got {self.steps!r}")
        if self.djm_depth < 1:
            raise ValueError(f"refinement depth must be >= 1, got {self.djm_depth!r}")


@dataclass(frozen=True)
class StepIntermediates:
    """Predictor value before any implicit correction and the value after
    the first correction (equal to the predictor when depth is 1)."""

    predictor: float
    corrected: float


@dataclass
class Trajectory:
    problem: str
    h: float
    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.nodes.ndim != 1 or self.nodes.shape != self.values.shape:
            raise ValueError("nodes and values must be 1-d arrays of equal length")
        if len(self.nodes) < 1:
            raise ValueError("trajectory needs at least the initial node")
        if len(self.nodes) > 1:
            gaps = np.diff(self.nodes)
            if not np.all(np.abs(gaps - self.h) <= 1e-12 * max(1.0, abs(self.h))):
                raise ValueError("nodes must increase uniformly with spacing h")


def _eval_f(problem, x, y, j):
    try:
        return problem.eval_f(x, y)
    except EvalError as err:
        raise SolverError(
            f"step {j}: f evaluation failed at x={x!r}, y={y!r}: {err}", j, j + 1
        ) from err


def _eval_kernel(problem, x, t, y, j, where):
    try:
        return problem.eval_kernel(x, t, y)
    except EvalError as err:
        raise SolverError(
            f"step {j}: kernel evaluation failed at {where} (x={x!r}, t={t!r}): {err}",
            j, j + 1,
        ) from err


def lag_sums(problem: VideProblem, values: Sequence[float], j: int, h: float):
    """The two accumulated kernel sums over interior history nodes.

    Returns (inner, outer) where inner sums K(x_j, x_i, y_i) for
    i = 1..j-1 and outer sums K(x_{j+1}, x_i, y_i) for i = 1..j.
    Empty sums are 0 (both, at j = 0).
    """
    x0 = problem.x0
    xj = x0 + j * h
    xj1 = x0 + (j + 1) * h
    inner = 0.0
    outer = 0.0
    for i in range(1, j + 1):
        xi = x0 + i * h
        if i < j:
            inner += _eval_kernel(problem, xj, xi, values[i], j, f"history node i={i}")
        outer += _eval_kernel(problem, xj1, xi, values[i], j, f"history node i={i}")
    return inner, outer


def predictor(problem: VideProblem, values: Sequence[float], j: int, h: float) -> float:
    """Explicit part of the step: y_j plus the trapezium contributions that
    use only already-computed values.

    Corner kernel terms carry weight h^2/4 and interior history terms
    h^2/2.  At j = 0 the corners K(x_0, x_0, y_0) and K(x_j, x_j, y_j)
    coincide and are both counted, one per trapezium endpoint.
    """
    x0, y0 = problem.x0, problem.y0
    xj = x0 + j * h
    xj1 = x0 + (j + 1) * h
    yj = values[j]
    inner, outer = lag_sums(problem, values, j, h)
    corners = (
        _eval_kernel(problem, xj, x0, y0, j, "corner (x_j, x_0)")
        + _eval_kernel(problem, xj, xj, yj, j, "corner (x_j, x_j)")
        + _eval_kernel(problem, xj1, x0, y0, j, "corner (x_j+1, x_0)")
    )
    return (
        yj
        + h / 2 * _eval_f(problem, xj, yj, j)
        + h * h / 4 * corners
        + h * h / 2 * (inner + outer)
    )


def implicit_terms(problem: VideProblem, z: float, j: int, h: float) -> float:
    """The implicit endpoint contribution N(z) evaluated at candidate z:
    (h/2) f(x_{j+1}, z) + (h^2/4) K(x_{j+1}, x_{j+1}, z)."""
    xj1 = problem.x0 + (j + 1) * h
    return (
        h / 2 * _eval_f(problem, xj1, z, j)
        + h * h / 4 * _eval_kernel(problem, xj1, xj1, z, j, "implicit endpoint")
    )


def corrector(problem: VideProblem, m1: float, j: int, h: float) -> float:
    """One implicit refinement of the predictor value m1."""
    return m1 + implicit_terms(problem, m1, j, h)


def djm_refine(g: float, increment: Callable[[float], float], depth: int) -> float:
    """Truncated Daftardar-Gejji/Jafari value for u = g + N(u).

    Iterates s_0 = g, s_{m+1} = g + increment(s_m) and returns s_{depth-1}.
    depth 1 returns g unchanged; depth 3 gives g + N(g + N(g)).
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth!r}")
    s = g
    for _ in range(depth - 1):
        s = g + increment(s)
        if not math.isfinite(s):
            raise ArithmeticError("refinement produced a non-finite iterate")
    return s


def djm_step(problem: VideProblem, values: Sequence[float], j: int, h: float,
             depth: int = 3):
    """Advance one step from y_j; returns (y_{j+1}, StepIntermediates).

    Aborts with SolverError (reporting j) if any iterate is non-finite.
    """
    m1 = predictor(problem, values, j, h)
    if not math.isfinite(m1):
        raise SolverError(f"step {j}: predictor is non-finite", j, j + 1)
    s = m1
    m2 = m1
    for m in range(depth - 1):
        s = m1 + implicit_terms(problem, s, j, h)
        if not math.isfinite(s):
            raise SolverError(f"step {j}: refinement {m + 1} is non-finite", j, j + 1)
        if m == 0:
            m2 = s
    return s, StepIntermediates(predictor=m1, corrected=m2)


def solve(problem: VideProblem, config: SolverConfig) -> Trajectory:
    """March the stepper for config.steps steps of size config.h.

    Returns the trajectory on the grid x_j = x0 + j h, j = 0..steps.  Grid
    nodes are computed as x0 + j*h rather than by cumulative addition so
    the uniform-spacing invariant holds to 1e-12.
    """
    values = [problem.y0]
    for j in range(config.steps):
        y_next, _ = djm_step(problem, values, j, config.h, config.djm_depth)
        values.append(y_next)
    nodes = problem.x0 + config.h * np.arange(config.steps + 1)
    return Trajectory(problem.name, config.h, nodes, np.asarray(values))
