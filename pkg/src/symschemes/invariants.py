"""Closed-form difference invariants and their differential counterparts.

Stencil conventions: a 4-point stencil holds (x[0], y[0]) .. (x[3], y[3])
at strictly increasing abscissas, with steps h1 = x[1]-x[0],
h2 = x[2]-x[1], h3 = x[3]-x[2].  Three-point stencils (example 1) use the
first two steps only.  All denominators are guarded: anything smaller
than 1e-14 times the scale of its numerator raises instead of returning
an infinity.

The ``*_xy`` forms evaluate on raw coordinate sequences without the
Stencil monotonicity check; the steppers call them with trial points
from inside Newton iterations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .grid import DegenerateStencil, Stencil

DEGENERATE_RTOL = 1e-14


class PoleOfChart(ArithmeticError):
    """1 + x_i * x_j vanished for a consecutive abscissa pair (example 3)."""


class NonPositiveAbscissa(ValueError):
    """Example-4 invariants need strictly positive abscissas."""


class DegenerateOrdinates(ArithmeticError):
    """Consecutive ordinates coincide where the cross-ratio needs them apart."""


class DomainError(ValueError):
    """Differential invariant evaluated outside its domain (e.g. y' = 0)."""


@dataclass(frozen=True)
class JetPoint:
    """Prolonged point (x, y, y', y'', y''') for differential-invariant oracles."""
    x: float
    y: float
    yp: float
    ypp: float
    yppp: float = 0.0


def _guard(den, scale, exc=DegenerateStencil, what="denominator"):
    if abs(den) <= DEGENERATE_RTOL * (abs(scale) + 1e-300):
        raise exc(f"{what} vanished ({den!r} against scale {scale!r})")
    return den


def _unpack(s, n):
    if isinstance(s, Stencil):
        xs, ys = s.xs, s.ys
    else:
        xs, ys = s
    if len(xs) != n or len(ys) != n:
        raise DegenerateStencil(f"need {n} points, got {len(xs)}")
    return xs, ys


# ----------------------------------------------------------------- example 1

def ex1_xi(s, k: float):
    """Three-point invariants of the power-law equation (parameter k)."""
    if k in (0.0, 0.5, 1.0, 2.0):
        raise ValueError(f"k={k} lies in the excluded set {{0, 1/2, 1, 2}}")
    x, y = _unpack(s, 3)
    h1, h2 = x[1] - x[0], x[2] - x[1]
    F = [x[i] * x[i] * y[i] for i in range(3)]
    _guard(h1, abs(h2) + abs(h1), what="step h_n")
    _guard(h2, abs(h2) + abs(h1), what="step h_{n+1}")
    xi1 = h2 / h1
    xi2 = (F[2] - F[1]) / h2 ** k
    xi3 = (F[1] - F[0]) / h1 ** k
    return (xi1, xi2, xi3)


# ----------------------------------------------------------------- example 2

def ex2_xi(s):
    """Chord lengths and chord cross-products of the plane stencil."""
    x, y = _unpack(s, 4)
    h1, h2, h3 = x[1] - x[0], x[2] - x[1], x[3] - x[2]
    d1, d2, d3 = y[1] - y[0], y[2] - y[1], y[3] - y[2]
    xi1 = math.hypot(h3, d3)
    xi2 = math.hypot(h2, d2)
    xi3 = math.hypot(h1, d1)
    xi4 = d3 * h2 - d2 * h3
    xi5 = d2 * h1 - d1 * h2
    for v, name in ((xi1, "xi1"), (xi2, "xi2"), (xi3, "xi3")):
        _guard(v, abs(h1) + abs(h2) + abs(h3) + abs(d1) + abs(d2) + abs(d3),
               what=f"chord {name}")
    return (xi1, xi2, xi3, xi4, xi5)


def ex2_J(s, alpha: float = 0.5):
    """Curvature-like pair (J1, J2) approximating the plane invariants."""
    xi1, xi2, xi3, xi4, xi5 = ex2_xi(s)
    beta = 1.0 - alpha
    t1 = xi4 / (xi1 * xi2 * (xi1 + xi2))
    t2 = xi5 / (xi2 * xi3 * (xi2 + xi3))
    J1 = 2 * alpha * t1 + 2 * beta * t2
    J2 = 6.0 / (xi1 + xi2 + xi3) * (t1 - t2)
    return (J1, J2)


# ----------------------------------------------------------------- example 3

def _chart_step(xa, xb):
    den = 1 + xa * xb
    _guard(den, abs(xb - xa) + 1.0, PoleOfChart, "1 + x_i x_j")
    return (xb - xa) / den


def ex3_xi(s):
    """Slope-difference and chart-step invariants of the arctan realization."""
    x, y = _unpack(s, 4)
    h1, h2, h3 = x[1] - x[0], x[2] - x[1], x[3] - x[2]
    for h, name in ((h1, "h_n"), (h2, "h_{n+1}"), (h3, "h_{n+2}")):
        _guard(h, abs(h1) + abs(h2) + abs(h3), what=f"step {name}")
    s1 = (y[1] - y[0]) / h1
    s2 = (y[2] - y[1]) / h2
    s3 = (y[3] - y[2]) / h3
    xi1 = math.sqrt(1 + x[1] * x[1]) * (s2 - s1)
    xi2 = math.sqrt(1 + x[2] * x[2]) * (s3 - s2)
    xi3 = _chart_step(x[0], x[1])
    xi4 = _chart_step(x[1], x[2])
    xi5 = _chart_step(x[2], x[3])
    return (xi1, xi2, xi3, xi4, xi5)


def ex3_J(s, alpha: float = 0.5):
    xi1, xi2, xi3, xi4, xi5 = ex3_xi(s)
    beta = 1.0 - alpha
    J1 = 2 * alpha * xi1 / (xi3 + xi4) + 2 * beta * xi2 / (xi4 + xi5)
    J2 = 6.0 / (xi3 + xi4 + xi5) * (xi2 / (xi4 + xi5) - xi1 / (xi3 + xi4))
    return (J1, J2)


# ----------------------------------------------------------------- example 4

def ex4_xi(s):
    """Scaled ordinate differences for the projective action on x > 0."""
    x, y = _unpack(s, 4)
    if min(x) <= 0:
        raise NonPositiveAbscissa(f"abscissas must be positive, got {x}")
    xi1 = (y[3] - y[2]) / math.sqrt(x[2] * x[3])
    xi2 = (y[2] - y[1]) / math.sqrt(x[1] * x[2])
    xi3 = (y[1] - y[0]) / math.sqrt(x[0] * x[1])
    xi4 = (y[3] - y[1]) / math.sqrt(x[1] * x[3])
    xi5 = (y[2] - y[0]) / math.sqrt(x[0] * x[2])
    return (xi1, xi2, xi3, xi4, xi5)


def ex4_J(s, alpha: float = 0.5):
    xi1, xi2, xi3, xi4, xi5 = ex4_xi(s)
    A = xi4 - xi1 - xi2
    B = xi5 - xi2 - xi3
    scale = sum(abs(v) for v in (xi1, xi2, xi3))
    for v, name in ((xi1, "xi1"), (xi2, "xi2"), (xi3, "xi3")):
        _guard(v, scale, what=name)
    J1 = 8 * (alpha * A / (xi1 * xi2 * (xi1 + xi2))
              + (1 - alpha) * B / (xi2 * xi3 * (xi2 + xi3)))
    num = A * (xi2 + xi3) * xi3 - B * xi1 * (xi1 + xi2)
    den = xi1 * xi2 * xi3 * (xi1 + xi2) * (xi2 + xi3) * (xi1 + xi2 + xi3)
    J2 = 12 * num / _guard(den, abs(num))
    return (J1, J2)


# ----------------------------------------------------------------- example 5

def ex5_R(s) -> float:
    """Anharmonic (cross) ratio of four consecutive ordinates.

    Accepts a Stencil or any 4-sequence of ordinates; only y-values enter.
    Equals 4 exactly on arithmetic and homographic sequences.
    """
    if isinstance(s, Stencil):
        y = s.ys
    elif len(s) == 4:
        y = tuple(float(v) for v in s)
    elif len(s) == 2:
        y = tuple(float(v) for v in s[1])
    else:
        raise DegenerateStencil("cross ratio needs 4 ordinates")
    if len(y) != 4:
        raise DegenerateStencil("cross ratio needs 4 ordinates")
    scale = max(abs(v) for v in y) + abs(y[3] - y[0])
    d32 = y[3] - y[2]
    d10 = y[1] - y[0]
    _guard(d32, scale, DegenerateOrdinates, "y[3] - y[2]")
    _guard(d10, scale, DegenerateOrdinates, "y[1] - y[0]")
    return (y[3] - y[1]) * (y[2] - y[0]) / (d32 * d10)


def ex5_J1(s) -> float:
    """Nonuniform-mesh approximant of the Schwarzian invariant.

    The bracket compares the cross-ratio with its value on linear data,
    (h3 + h2)(h2 + h1) / (h3 h1); the printed source swaps one factor of
    that denominator, which breaks the continuous limit and is corrected
    here (checked against the uniform-mesh specialization, where both
    readings give (4 - R) / (2 h^2)).
    """
    x, y = _unpack(s, 4)
    h1, h2, h3 = x[1] - x[0], x[2] - x[1], x[3] - x[2]
    R = ex5_R(y)
    pre = 6 * h3 * h1 / (h2 * (h2 + h3) * (h1 + h2) * (h3 + h2 + h1))
    return pre * ((h3 + h2) * (h2 + h1) / (h3 * h1) - R)


# ------------------------------------------------- differential invariants

def diff_invariants(example: int, p: JetPoint):
    """Closed-form (I1, I2) pair for examples 2..5."""
    x, yp, ypp, yppp = p.x, p.yp, p.ypp, p.yppp
    if example == 2:
        w = 1 + yp * yp
        return (ypp / w ** 1.5, (w * yppp - 3 * yp * ypp * ypp) / w ** 3)
    if example == 3:
        w = 1 + x * x
        return (w ** 1.5 * ypp, (w * yppp + 3 * x * ypp) * w ** 1.5)
    if example == 4:
        if yp == 0:
            raise DomainError("y' = 0 outside the domain of the invariants")
        return ((2 * x * ypp + yp) / yp ** 3,
                x * x * (yp * yppp - 3 * ypp * ypp) / yp ** 5)
    if example == 5:
        if yp == 0:
            raise DomainError("Schwarzian undefined at y' = 0")
        return ((yp * yppp - 1.5 * ypp * ypp) / (yp * yp), x)
    raise ValueError(f"no differential-invariant pair for example {example}")
