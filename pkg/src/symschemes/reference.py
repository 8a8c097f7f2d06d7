"""High-accuracy adaptive reference solver.

An embedded Dormand-Prince 5(4) pair with proportional step control
produces the dense reference solutions, start-up values and error
baselines for the scheme benchmarks.  A singularity inside the interval
announces itself as step-size underflow; the partial solution up to the
failure abscissa is returned, flagged, rather than raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .grid import GridPoint
from .rootfind import NumericalError

STATUS_COMPLETE = "complete"
STATUS_UNDERFLOW = "step-underflow"

# Dormand-Prince 5(4) tableau; last row of A doubles as the 5th-order weights.
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = _A[6]
# difference b5 - b4 for the local error estimate
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


class UnsupportedOrder(ValueError):
    pass


class OutOfRange(ValueError):
    pass


class StepUnderflow(NumericalError):
    """Step control drove h below h_min (reported via DenseSolution.status)."""


@dataclass(frozen=True)
class SolverTolerances:
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    h_init: Optional[float] = None  # default: 1e-3 * interval length
    h_min: Optional[float] = None   # default: 1e-12 * interval length

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.h_init is not None and self.h_min is not None:
            if not 0 < self.h_min < self.h_init:
                raise ValueError("need 0 < h_min < h_init")


@dataclass(frozen=True)
class FirstOrderSystem:
    dim: int
    rhs: Callable  # (x, u: ndarray) -> ndarray
    x0: float
    u0: tuple
    x_end: float


def to_first_order(problem) -> FirstOrderSystem:
    """Rewrite an n-th order problem as u' = f(x, u) with u = (y, y', ...)."""
    n = problem.order
    if n == 2:
        def rhs(x, u):
            return np.array([u[1], problem.rhs_highest(x, u[0], u[1])])
    elif n == 3:
        def rhs(x, u):
            return np.array([u[1], u[2], problem.rhs_highest(x, u[0], u[1], u[2])])
    else:
        raise UnsupportedOrder(f"order {n} not supported")
    x0, xf = problem.interval
    return FirstOrderSystem(n, rhs, x0, tuple(problem.initial), xf)


class DenseSolution:
    """Accepted steps of one integration plus cubic-Hermite interpolation."""

    def __init__(self, xs, us, fs, status):
        self.xs = np.asarray(xs, dtype=float)
        self.us = np.asarray(us, dtype=float)
        self.fs = np.asarray(fs, dtype=float)
        self.status = status

    @property
    def complete(self):
        return self.status == STATUS_COMPLETE

    @property
    def x_start(self):
        return float(self.xs[0])

    @property
    def x_end(self):
        """Last abscissa reached (failure abscissa when flagged)."""
        return float(self.xs[-1])

    def sample_at(self, xq):
        """States at the requested abscissas (4th-order dense output)."""
        xq = np.atleast_1d(np.asarray(xq, dtype=float))
        lo, hi = self.xs[0], self.xs[-1]
        span = max(hi - lo, 1e-300)
        if np.any(xq < lo - 1e-12 * span) or np.any(xq > hi + 1e-12 * span):
            bad = xq[(xq < lo - 1e-12 * span) | (xq > hi + 1e-12 * span)]
            raise OutOfRange(f"{bad[0]} outside solved range [{lo}, {hi}]")
        idx = np.clip(np.searchsorted(self.xs, xq, side="right") - 1, 0, len(self.xs) - 2)
        out = np.empty((len(xq), self.us.shape[1]))
        for m, (x, i) in enumerate(zip(xq, idx)):
            h = self.xs[i + 1] - self.xs[i]
            t = (x - self.xs[i]) / h
            # cubic Hermite basis
            h00 = (1 + 2 * t) * (1 - t) ** 2
            h10 = t * (1 - t) ** 2
            h01 = t * t * (3 - 2 * t)
            h11 = t * t * (t - 1)
            out[m] = (h00 * self.us[i] + h01 * self.us[i + 1]
                      + h * (h10 * self.fs[i] + h11 * self.fs[i + 1]))
        return out


def _step_dopri(rhs, x, u, h):
    """One Dormand-Prince step: returns (u5, error_estimate, f_stages_ok)."""
    k = [None] * 7
    k[0] = rhs(x, u)
    for s in range(1, 7):
        acc = u + h * sum(a * k[j] for j, a in enumerate(_A[s]) if a != 0.0)
        k[s] = rhs(x + _C[s] * h, acc)
    u5 = u + h * sum(b * k[j] for j, b in enumerate(_B5) if b != 0.0)
    err = h * sum(e * k[j] for j, e in enumerate(_E) if e != 0.0)
    return u5, err, k[0]


def integrate_adaptive(system: FirstOrderSystem,
                       tol: SolverTolerances = SolverTolerances()) -> DenseSolution:
    """Integrate with embedded 5(4) error control.

    The returned solution is flagged ``step-underflow`` if h fell below
    h_min before reaching x_end (the signature of a singularity); all
    accepted steps up to the failure abscissa are retained.
    """
    x0, xf = system.x0, system.x_end
    length = xf - x0
    if length == 0:
        u0 = np.asarray(system.u0, dtype=float)
        f0 = system.rhs(x0, u0)
        return DenseSolution([x0], [u0], [f0], STATUS_COMPLETE)
    h = tol.h_init if tol.h_init is not None else 1e-3 * length
    h_min = tol.h_min if tol.h_min is not None else 1e-12 * length
    x = x0
    u = np.asarray(system.u0, dtype=float)
    f = system.rhs(x, u)
    if not np.all(np.isfinite(f)):
        raise ValueError("rhs not finite at the initial state")
    xs, us, fs = [x], [u.copy()], [np.asarray(f, dtype=float)]
    status = STATUS_COMPLETE
    while x < xf:
        if h < h_min:
            status = STATUS_UNDERFLOW
            break
        h = min(h, xf - x)
        u_new, err, _ = _step_dopri(system.rhs, x, u, h)
        if not np.all(np.isfinite(u_new)):
            h = max(h * 0.2, 0.5 * h_min)
            continue
        scale = tol.abs_tol + tol.rel_tol * np.abs(u_new)
        ratio = float(np.max(np.abs(err) / scale))
        if not math.isfinite(ratio):
            h = max(h * 0.2, 0.5 * h_min)
            continue
        if ratio <= 1.0:
            x = x + h
            u = u_new
            fval = system.rhs(x, u)
            xs.append(x)
            us.append(u.copy())
            fs.append(np.asarray(fval, dtype=float))
            if not np.all(np.isfinite(fval)):
                # landed on a point where the equation itself degenerates
                status = STATUS_UNDERFLOW
                break
        factor = 0.9 * ratio ** -0.2 if ratio > 0 else 5.0
        h = h * min(5.0, max(0.2, factor))
    return DenseSolution(xs, us, fs, status)


def integrate_fixed(system: FirstOrderSystem, h: float) -> DenseSolution:
    """Integrate with a fixed step (no error control); order-five propagation."""
    n = max(1, round((system.x_end - system.x0) / h))
    x = system.x0
    u = np.asarray(system.u0, dtype=float)
    xs, us, fs = [x], [u.copy()], [np.asarray(system.rhs(x, u), dtype=float)]
    for i in range(n):
        u, _, _ = _step_dopri(system.rhs, x, u, h)
        x = system.x0 + (i + 1) * h
        xs.append(x)
        us.append(u.copy())
        fs.append(np.asarray(system.rhs(x, u), dtype=float))
    return DenseSolution(xs, us, fs, STATUS_COMPLETE)


def startup_values(problem, nodes, tol: SolverTolerances = SolverTolerances()):
    """Start-up grid points at the given ascending nodes.

    Uses the closed-form solution when the problem has one, otherwise the
    adaptive reference; the first node with the given initial value is a
    special case needing no integration.
    """
    nodes = [float(v) for v in nodes]
    if sorted(nodes) != nodes:
        raise ValueError("start-up nodes must be ascending")
    if problem.exact is not None:
        return [GridPoint(v, problem.exact(v)) for v in nodes]
    x0 = problem.interval[0]
    if len(nodes) == 1 and math.isclose(nodes[0], x0, rel_tol=0, abs_tol=1e-14):
        return [GridPoint(x0, problem.initial[0])]
    system = to_first_order(problem)
    system = FirstOrderSystem(system.dim, system.rhs, system.x0, system.u0, nodes[-1])
    ref = integrate_adaptive(system, tol)
    if not ref.complete:
        raise StepUnderflow(
            f"reference failed at x={ref.x_end} before start-up node {nodes[-1]}")
    vals = ref.sample_at(nodes)
    return [GridPoint(v, float(vals[i, 0])) for i, v in enumerate(nodes)]
