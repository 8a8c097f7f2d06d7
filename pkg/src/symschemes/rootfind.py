"""Scalar and planar root-finding kernels used by the steppers.

All three solvers accept a :class:`RootConfig`.  Newton derivatives are
estimated by central finite differences, so callers only supply residual
functions.  When a residual cannot be evaluated below ``tol`` in floating
point (cancellation-limited stencil invariants), the Newton solvers accept
the iterate once the update stagnates at rounding level while the residual
sits within ``STAGNATION_CAP * tol``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

DIVERGENCE_LIMIT = 1e10
FD_STEP = 1e-7
STAGNATION_STEP = 1e-13
STAGNATION_CAP = 1e8


class NumericalError(ArithmeticError):
    """Base class for solver failures."""


class NonConvergence(NumericalError):
    pass


class Divergence(NumericalError):
    pass


class SingularDerivative(NumericalError):
    pass


class SingularJacobian(NumericalError):
    pass


@dataclass(frozen=True)
class RootConfig:
    tol: float = 1e-12
    max_iter: int = 100
    damping: float = 1.0

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")


DEFAULT_ROOT = RootConfig()


def _check_magnitude(y):
    if not math.isfinite(y) or abs(y) > DIVERGENCE_LIMIT:
        raise Divergence(f"iterate escaped: {y!r}")


def fixed_point(g, y0, cfg: RootConfig = DEFAULT_ROOT) -> float:
    """Solve g(y) = y by damped fixed-point iteration.

    The damping factor is halved whenever the residual grows, which keeps
    mildly non-contractive maps under control.
    """
    y = float(y0)
    d = cfg.damping
    prev_res = math.inf
    for _ in range(cfg.max_iter):
        _check_magnitude(y)
        gy = g(y)
        _check_magnitude(gy)
        res = gy - y
        if abs(res) <= cfg.tol:
            return y
        if abs(res) > prev_res:
            d = max(d / 2, 1.0 / 64)
        prev_res = abs(res)
        y = y + d * res
    raise NonConvergence(f"fixed point not reached in {cfg.max_iter} iterations")


def _fd_derivative(f, y, fy):
    d = FD_STEP * (1 + abs(y))
    fp = (f(y + d) - f(y - d)) / (2 * d)
    if abs(fp) < 1e-14 * (1 + abs(fy)):
        return None
    return fp


def newton_1d(f, y0, cfg: RootConfig = DEFAULT_ROOT) -> float:
    """Damped scalar Newton with central finite-difference derivative."""
    y = float(y0)
    nudged = False
    fy = f(y)
    for _ in range(cfg.max_iter):
        _check_magnitude(y)
        if abs(fy) <= cfg.tol:
            return y
        fp = _fd_derivative(f, y, fy)
        if fp is None:
            # flat spot: nudge once (stationary initial guess), then give up
            if nudged:
                raise SingularDerivative(f"derivative vanishes near y={y!r}")
            nudged = True
            y = y + 1e-4 * (1 + abs(y))
            fy = f(y)
            continue
        step = fy / fp
        lam = cfg.damping
        ynew = y - lam * step
        fnew = f(ynew)
        while abs(fnew) > abs(fy) and abs(lam * step) > STAGNATION_STEP * (1 + abs(y)):
            lam /= 2
            ynew = y - lam * step
            fnew = f(ynew)
        if (abs(ynew - y) <= STAGNATION_STEP * (1 + abs(y))
                and abs(fnew) <= STAGNATION_CAP * cfg.tol):
            return ynew  # rounding floor of the residual
        y, fy = ynew, fnew
    if abs(fy) <= cfg.tol:
        return y
    raise NonConvergence(f"Newton: |f|={abs(fy):.3e} after {cfg.max_iter} iterations")


def fd_jacobian(F, p):
    """2x2 central finite-difference Jacobian at p."""
    rows = [[0.0, 0.0], [0.0, 0.0]]
    for j in range(2):
        d = FD_STEP * (1 + abs(p[j]))
        pp = list(p)
        pm = list(p)
        pp[j] += d
        pm[j] -= d
        Fp = F(pp)
        Fm = F(pm)
        for i in range(2):
            rows[i][j] = (Fp[i] - Fm[i]) / (2 * d)
    return rows


def _solve2(J, f):
    a, b = J[0]
    c, d = J[1]
    det = a * d - b * c
    norm = max(abs(a) + abs(b), abs(c) + abs(d))
    if det == 0 or not math.isfinite(det):
        raise SingularJacobian("Jacobian is singular")
    inv_norm = max(abs(d) + abs(b), abs(c) + abs(a)) / abs(det)
    if norm * inv_norm > 1e14:
        raise SingularJacobian(f"Jacobian condition estimate {norm * inv_norm:.2e}")
    return ((d * f[0] - b * f[1]) / det, (a * f[1] - c * f[0]) / det)


def newton_2d(F, p0, cfg: RootConfig = DEFAULT_ROOT):
    """Damped planar Newton with finite-difference Jacobian.

    Returns the root as an (x, y) tuple; the residual max-norm at the
    returned point is at most ``cfg.tol`` (up to the rounding floor of F).
    """
    p = [float(p0[0]), float(p0[1])]
    nudged = False
    f = F(p)
    for _ in range(cfg.max_iter):
        for c in p:
            _check_magnitude(c)
        res = max(abs(f[0]), abs(f[1]))
        if not math.isfinite(res):
            raise Divergence("residual is not finite")
        if res <= cfg.tol:
            return (p[0], p[1])
        try:
            J = fd_jacobian(F, p)
            step = _solve2(J, f)
        except SingularJacobian:
            if nudged:
                raise
            nudged = True
            p = [c + 1e-4 * (1 + abs(c)) for c in p]
            f = F(p)
            continue
        scale = 1 + max(abs(p[0]), abs(p[1]))
        lam = cfg.damping
        pn = [p[0] - lam * step[0], p[1] - lam * step[1]]
        fn = F(pn)
        while (max(abs(fn[0]), abs(fn[1])) > res
               and lam * max(abs(step[0]), abs(step[1])) > STAGNATION_STEP * scale):
            lam /= 2
            pn = [p[0] - lam * step[0], p[1] - lam * step[1]]
            fn = F(pn)
        moved = max(abs(pn[0] - p[0]), abs(pn[1] - p[1]))
        if (moved <= STAGNATION_STEP * scale
                and max(abs(fn[0]), abs(fn[1])) <= STAGNATION_CAP * cfg.tol):
            return (pn[0], pn[1])
        p, f = pn, fn
    if max(abs(f[0]), abs(f[1])) <= cfg.tol:
        return (p[0], p[1])
    raise NonConvergence(
        f"planar Newton: residual {max(abs(f[0]), abs(f[1])):.3e} "
        f"after {cfg.max_iter} iterations")
