"""Linear stability and bifurcation analysis of the stepper.

Stability: applied to the test equation y' = alpha*y + beta*integral(y),
the scheme reduces (in the scaled variables u = h*alpha, v = h^2*beta) to
the two-term recurrence y_j = b1*y_{j-1} + b2*y_{j-2} with characteristic
equation r^2 - b1*r - b2 = 0.  The scheme is asymptotically stable at
(u, v) exactly when both characteristic roots lie strictly inside the
unit circle.

Bifurcation: applied to the exponentially fading-memory equation
y' = -integral of exp(-alpha*(x - t))*y(t) dt, the scheme reduces to
y_{j+2} - b1*y_{j+1} + b2*y_j = 0 (note the sign convention differs from
the stability recurrence).  Because f vanishes and the kernel equals -z
at t = x, each implicit refinement maps z to M1 - (h^2/4) z, so the step
is y_{j+1} = q*M1 with q = 1 - h^2/4 + h^4/16; collecting the history
terms gives the coefficients a0, a1, a2 below.  Three thresholds
alpha2 < alpha0 < alpha1 split the parameter line into four regions with
distinct qualitative behavior; in the h -> 0 limit they reproduce the
continuous equation's boundaries at -2, 0 and 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

REGION_BEHAVIOR = {
    "I": "converging to zero without oscillation",
    "II": "damped oscillations converging to zero",
    "III": "divergent oscillations",
    "IV": "unbounded without oscillation",
    "boundary-I/II": "double root in (0, 1): converges without oscillation",
    "boundary-II/III": "complex pair on the unit circle (bifurcation point)",
    "boundary-III/IV": "double root above 1: unbounded",
}

# (oscillatory, growing) expected from a long simulated sequence, for the
# four open regions.
REGION_TRAITS = {
    "I": (False, False),
    "II": (True, False),
    "III": (True, True),
    "IV": (False, True),
}


def stability_coefficients(u: float, v: float):
    """Recurrence coefficients (b1, b2) of the stability difference
    equation y_j = b1*y_{j-1} + b2*y_{j-2} at scaled parameters (u, v)."""
    b1 = (2 + u + u**2 / 2 + u**3 / 8
          + v + 3 * u * v / 4 + 5 * u**2 * v / 16
          + v**2 / 4 + 7 * u * v**2 / 32 + 3 * v**3 / 64)
    b2 = (-1 - u - u**2 / 2 - u**3 / 8
          - u * v / 4 - u**2 * v / 16
          + u * v**2 / 32 + v**3 / 64)
    return b1, b2


def quadratic_roots(p1: float, p0: float):
    """Both roots of r^2 + p1*r + p0 = 0 via the discriminant formula.

    Returns (r1, r2) as complex numbers with r1 = (-p1 + sqrt(disc))/2;
    for a negative discriminant the pair is conjugate with r1 carrying
    the positive imaginary part.
    """
    disc = p1 * p1 - 4 * p0
    if disc >= 0:
        s = math.sqrt(disc)
        return complex((-p1 + s) / 2), complex((-p1 - s) / 2)
    s = math.sqrt(-disc)
    return complex(-p1 / 2, s / 2), complex(-p1 / 2, -s / 2)


@dataclass(frozen=True)
class StabilityAssessment:
    u: float
    v: float
    b1: float
    b2: float
    r1: complex
    r2: complex
    stable: bool


def assess_stability(u: float, v: float) -> StabilityAssessment:
    """Characteristic roots and strict stability verdict at (u, v).

    A root of modulus exactly 1 counts as unstable (the criterion is
    asymptotic stability)."""
    b1, b2 = stability_coefficients(u, v)
    r1, r2 = quadratic_roots(-b1, -b2)
    return StabilityAssessment(
        u=u, v=v, b1=b1, b2=b2, r1=r1, r2=r2,
        stable=max(abs(r1), abs(r2)) < 1.0,
    )


def stability_region(u_min: float, u_max: float, v_min: float, v_max: float,
                     resolution: int):
    """Assessments at the centers of a resolution-by-resolution cell grid
    covering the rectangle, as a flat row-major list (u varies slowest).

    The ordering is deterministic and independent of evaluation order.
    """
    if not (u_min < u_max and v_min < v_max):
        raise ValueError("ranges must satisfy u_min < u_max and v_min < v_max")
    if resolution < 1:
        raise ValueError(f"resolution must be >= 1, got {resolution!r}")
    du = (u_max - u_min) / resolution
    dv = (v_max - v_min) / resolution
    grid = []
    for iu in range(resolution):
        u = u_min + (iu + 0.5) * du
        for iv in range(resolution):
            v = v_min + (iv + 0.5) * dv
            grid.append(assess_stability(u, v))
    return grid


def bifurcation_coefficients(alpha: float, h: float):
    """Coefficients (a0, a1, a2, b1, b2) of the fading-memory recurrence
    y_{j+2} - b1*y_{j+1} + b2*y_j = 0 at decay rate alpha and step h.

    With q = 1 - h^2/4 + h^4/16 and E = exp(-alpha*h):
        a0 = (h^2/4) q (1 + E)        (weight of the initial value)
        a1 = (h^2/2) q (1 + E)        (weight of the geometric history sum)
        a2 = q (1 - h^2/4 - (h^2/2) E)  (weight of y_j)
        b1 = E + a2,  b2 = (a1 + a2) E.
    Note (1 + h^2/4) q = 1 + h^6/64, so b2 = (1 + h^6/64) E exactly.
    """
    if not (h > 0):
        raise ValueError(f"step size must be positive, got {h!r}")
    q = 1 - h * h / 4 + h**4 / 16
    E = math.exp(-alpha * h)
    a0 = h * h / 4 * q * (1 + E)
    a1 = h * h / 2 * q * (1 + E)
    a2 = q * (1 - h * h / 4 - h * h / 2 * E)
    b1 = E + a2
    b2 = (a1 + a2) * E
    return a0, a1, a2, b1, b2


@dataclass(frozen=True)
class BifurcationThresholds:
    """The three alpha values where the recurrence changes character at a
    given step size; always alpha2 < alpha0 < alpha1."""

    h: float
    alpha0: float
    alpha1: float
    alpha2: float

    def __post_init__(self):
        if not (self.alpha2 < self.alpha0 < self.alpha1):
            raise ValueError(
                f"threshold ordering violated at h={self.h!r}: "
                f"{self.alpha2!r} < {self.alpha0!r} < {self.alpha1!r} fails"
            )


def bifurcation_thresholds(h: float) -> BifurcationThresholds:
    """Closed-form thresholds alpha0 (oscillation growth/decay boundary,
    where the complex pair crosses the unit circle), alpha1 and alpha2
    (where the discriminant vanishes and the pair turns real).

    Valid for 0 < h < 2; out-of-domain h raises ValueError naming the
    violated condition.
    """
    if not (h > 0 and math.isfinite(h)):
        raise ValueError(f"step size must be positive and finite, got {h!r}")
    radical = 1024 + 8 * h**6 - 2 * h**8
    if radical <= 0:
        raise ValueError(
            f"h={h!r} out of domain: 1024 + 8h^6 - 2h^8 = {radical!r} is not positive"
        )
    denominator = (h * h - 4) ** 2 * (16 - 4 * h * h + h**4)
    if denominator == 0:
        raise ValueError(f"h={h!r} out of domain: (h^2 - 4)^2 (16 - 4h^2 + h^4) vanishes")
    root = 8 * h * math.sqrt(radical)
    arg1 = 2 * (128 + 160 * h**2 - 32 * h**4 + 8 * h**6 - h**8 + root) / denominator
    if arg1 <= 0:
        raise ValueError(f"h={h!r} out of domain: log argument for alpha1 is {arg1!r}")
    arg2 = -2 * (-128 - 160 * h**2 + 32 * h**4 - 8 * h**6 + h**8 + root) / denominator
    if arg2 <= 0:
        raise ValueError(f"h={h!r} out of domain: log argument for alpha2 is {arg2!r}")
    return BifurcationThresholds(
        h=h,
        alpha0=math.log1p(h**6 / 64) / h,
        alpha1=math.log(arg1) / h,
        alpha2=math.log(arg2) / h,
    )


@dataclass(frozen=True)
class BifurcationReport:
    alpha: float
    h: float
    a0: float
    a1: float
    a2: float
    b1: float
    b2: float
    r1: complex
    r2: complex
    region: str


def classify_bifurcation(alpha: float, h: float, tol: float = 1e-9) -> BifurcationReport:
    """Region label plus coefficients and characteristic roots at (alpha, h).

    alpha within +-tol of a threshold gets the corresponding boundary
    label; the thresholds are transcendental, so exact comparison would
    be meaningless.  Regions: alpha > alpha1 is I, alpha0..alpha1 is II,
    alpha2..alpha0 is III, alpha < alpha2 is IV (see REGION_BEHAVIOR).
    """
    if not (tol > 0):
        raise ValueError(f"tolerance must be positive, got {tol!r}")
    thresholds = bifurcation_thresholds(h)
    a0, a1, a2, b1, b2 = bifurcation_coefficients(alpha, h)
    r1, r2 = quadratic_roots(-b1, b2)
    if abs(alpha - thresholds.alpha1) <= tol:
        region = "boundary-I/II"
    elif abs(alpha - thresholds.alpha0) <= tol:
        region = "boundary-II/III"
    elif abs(alpha - thresholds.alpha2) <= tol:
        region = "boundary-III/IV"
    elif alpha > thresholds.alpha1:
        region = "I"
    elif alpha > thresholds.alpha0:
        region = "II"
    elif alpha > thresholds.alpha2:
        region = "III"
    else:
        region = "IV"
    return BifurcationReport(
        alpha=alpha, h=h, a0=a0, a1=a1, a2=a2, b1=b1, b2=b2,
        r1=r1, r2=r2, region=region,
    )


def iterate_recurrence(b1: float, b2: float, y0: float, y1: float, steps: int):
    """Iterate y_{j+2} = b1*y_{j+1} - b2*y_j from the two seeds.

    Returns a list of `steps` values starting [y0, y1, ...].  Overflow to
    infinity is permitted (it signals divergence) and truncates the
    sequence at the first infinite value; a NaN aborts with
    ArithmeticError.
    """
    if steps < 2:
        raise ValueError(f"need at least 2 steps, got {steps!r}")
    values = [float(y0), float(y1)]
    if any(math.isnan(v) for v in values):
        raise ArithmeticError("seed value is NaN")
    for _ in range(steps - 2):
        grow = b1 * values[-1]
        shed = b2 * values[-2]
        nxt = grow - shed
        if math.isnan(nxt):
            if math.isinf(grow) or math.isinf(shed):
                # both products overflowed with equal signs: still plain
                # divergence, record the dominant direction and stop
                values.append(grow if math.isinf(grow) else -shed)
                break
            raise ArithmeticError(f"NaN at index {len(values)}")
        values.append(nxt)
        if math.isinf(nxt):
            break
    return values


def simulate_difference(alpha: float, h: float, y0: float, y1: float, steps: int):
    """Empirical cross-check for classify_bifurcation: simulate the
    fading-memory recurrence at (alpha, h) from the two seeds."""
    _, _, _, b1, b2 = bifurcation_coefficients(alpha, h)
    return iterate_recurrence(b1, b2, y0, y1, steps)


def tail_sign_changes(values: Sequence[float]) -> int:
    """Number of strict sign changes in the final half of the sequence."""
    tail = values[len(values) // 2:]
    return sum(1 for a, b in zip(tail, tail[1:]) if a * b < 0)


def is_oscillatory(values: Sequence[float]) -> bool:
    """At least 3 sign changes in the final half of the sequence.  The
    threshold makes the verdict robust against start-up transients."""
    return tail_sign_changes(values) >= 3


def is_growing(values: Sequence[float]) -> bool:
    """Whether the amplitude envelope grows: the largest magnitude in the
    second half exceeds the largest in the first half (an infinity
    anywhere in the tail counts as growth)."""
    half = len(values) // 2
    head = values[:half]
    tail = values[half:]
    if any(math.isinf(v) for v in tail):
        return True
    if not head or not tail:
        return False
    return max(abs(v) for v in tail) > max(abs(v) for v in head)
