"""Baseline non-invariant discretizations on uniform meshes.

The third-order baselines substitute the interpolating-polynomial
derivatives at the stencil midpoint x_{n+1/2} into the equation being
discretized and solve the resulting scalar problem for the newest value.
The example-1 baseline is the central-difference discretization solved
by fixed-point iteration, mirroring its published form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .grid import (FLAG_DIVERGED, FLAG_OK, GridPoint, Trajectory)
from .problems import OdeProblem
from .reference import SolverTolerances, startup_values
from .rootfind import (DEFAULT_ROOT, Divergence, NonConvergence, NumericalError,
                       RootConfig, SingularDerivative, fixed_point, newton_1d)
from .schemes import NegativeRadicand


@dataclass(frozen=True)
class UniformStencil:
    """3 or 4 ordinates on consecutive uniform nodes starting at x_base."""
    x_base: float
    h: float
    ys: tuple

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("h must be positive")
        if len(self.ys) not in (3, 4):
            raise ValueError("need 3 or 4 ordinates")


def p3_derivatives(s: UniformStencil):
    """(y', y'', y''') of the interpolating cubic at the stencil midpoint.

    The midpoint is x_base + 3h/2 for the four nodes starting at x_base;
    all three formulas are exact on polynomials of degree <= 3.
    """
    if len(s.ys) != 4:
        raise ValueError("midpoint derivatives need a 4-point stencil")
    ym1, y0, y1, y2 = s.ys
    h = s.h
    d1 = (27 * (y1 - y0) - (y2 - ym1)) / (24 * h)
    d2 = (y2 - y1 - y0 + ym1) / (2 * h * h)
    d3 = (y2 - 3 * y1 + 3 * y0 - ym1) / h ** 3
    return (d1, d2, d3)


def standard_step_ex1(prev2, x_n, h, cfg: RootConfig = DEFAULT_ROOT) -> float:
    """Central-difference step of the power-law equation at node x_n.

    Solves the discretized equation for y_{n+1} by fixed-point iteration;
    a negative radicand inside the square root aborts the step.
    """
    y0, y1 = prev2  # y_{n-1}, y_n

    def g(v):
        rad = 2 * x_n * y1 + x_n * x_n * (v - y0) / (2 * h)
        if rad < 0:
            raise NegativeRadicand(f"radicand {rad!r} at x = {x_n}")
        return ((h * h * math.sqrt(rad) + x_n * x_n * (2 * y1 - y0)
                 + 2 * x_n * h * y0 - 2 * h * h * y1) / (x_n * x_n + 2 * x_n * h))

    return fixed_point(g, 2 * y1 - y0, cfg)


def midpoint_residual(problem: OdeProblem):
    """Equation residual f(xm, y', y'', y''') = 0 for examples 2..5."""
    ex = problem.example
    if ex == 2:
        K = problem.params.get("K", 1.0)

        def res(xm, d1, d2, d3):
            return (1 + d1 * d1) * d3 - 3 * d1 * d2 * d2 - K * d2 * d2
    elif ex == 3:
        def res(xm, d1, d2, d3):
            w = 1 + xm * xm
            return w * d3 + 3 * xm * d2 - d2 * d2 * w ** 1.5
    elif ex == 4:
        A = problem.params.get("A", -1.0)

        def res(xm, d1, d2, d3):
            if d1 < 0 or 2 * xm * d2 + d1 < 0:
                return math.nan  # outside the domain of the fractional powers
            return xm * xm * (d1 * d3 - 3 * d2 * d2) - A * math.sqrt(d1) * (
                2 * xm * d2 + d1) ** 1.5
    elif ex == 5:
        force = problem.params.get("forcing") or (lambda x: 0.0)

        def res(xm, d1, d2, d3):
            return d1 * d3 - 1.5 * d2 * d2 - force(xm) * d1 * d1
    else:
        raise ValueError(f"no third-order baseline for example {ex}")
    return res


def standard_step_third_order(problem: OdeProblem, prev3, x_base, h,
                              cfg: RootConfig = DEFAULT_ROOT) -> float:
    """Advance a third-order baseline one node.

    ``prev3`` holds (y_{n-1}, y_n, y_{n+1}) and ``x_base`` is the abscissa
    of the middle known value y_n, so the equation is collocated at
    x_n + h/2, the center of the four-point stencil.  The residual is
    normalized by its slope at the cubic-continuation predictor, putting
    the Newton tolerance in ordinate units.
    """
    ym1, y0, y1 = prev3
    xm = x_base + 0.5 * h
    res = midpoint_residual(problem)

    def raw(v):
        return res(xm, *p3_derivatives(UniformStencil(x_base - h, h, (ym1, y0, y1, v))))

    pred = y1 * 3 - 3 * y0 + ym1  # cubic continuation (vanishing 3rd difference)
    d = 1e-7 * (1 + abs(pred))
    slope = (raw(pred + d) - raw(pred - d)) / (2 * d)
    scale = max(abs(slope), 1e-12)

    def f(v):
        return raw(v) / scale

    return newton_1d(f, pred, cfg)


def run_standard(problem: OdeProblem, n_nodes, startups=None,
                 cfg: RootConfig = DEFAULT_ROOT,
                 startup_tol: SolverTolerances = SolverTolerances()) -> Trajectory:
    """Run the matching baseline on a uniform mesh of ``n_nodes`` nodes.

    A Divergence or non-convergence at some node flags it and terminates
    the run (the trajectory keeps everything computed so far); this is
    the expected outcome when the underlying solution blows up.
    """
    if n_nodes < problem.order + 1:
        raise ValueError("mesh too short for the stencil")
    x0, xf = problem.interval
    h = (xf - x0) / (n_nodes - 1)
    xs = [x0 + i * h for i in range(n_nodes)]
    n_start = 2 if problem.order == 2 else 3
    if startups is None:
        startups = startup_values(problem, xs[:n_start], startup_tol)
    ys = [p.y for p in startups]
    flags = [FLAG_OK] * len(ys)
    meta = {"example": problem.example, "scheme": "standard", "h": h}
    for i in range(n_start, n_nodes):
        try:
            if problem.order == 2:
                v = standard_step_ex1((ys[i - 2], ys[i - 1]), xs[i - 1], h, cfg)
            else:
                v = standard_step_third_order(
                    problem, (ys[i - 3], ys[i - 2], ys[i - 1]), xs[i - 2], h, cfg)
            if not math.isfinite(v) or abs(v) > 1e10:
                raise Divergence(f"iterate escaped at node {i}")
        except (Divergence, NonConvergence, SingularDerivative,
                NegativeRadicand) as exc:
            ys.append(math.nan)
            flags.append(FLAG_DIVERGED)
            meta["failure_x"] = xs[i]
            meta["failure"] = f"{type(exc).__name__}: {exc}"
            break
        ys.append(v)
        flags.append(FLAG_OK)
    return Trajectory(xs[:len(ys)], ys, flags, meta)
