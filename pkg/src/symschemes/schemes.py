"""The five symmetry-preserving steppers and the trajectory driver.

Every stepper advances one node from a 2- or 3-point prefix.  The
implicit ones (examples 1, 2, 4 and the example-3 ordinate solve) start
from an extrapolation predictor: the new abscissa continues the last
step ratio and the new ordinate continues the quadratic through the
prefix.  Planar systems are solved with residual rows normalized by
their gradient norms at the predictor, so the Newton tolerance is
expressed in mesh units regardless of how steeply the invariants vary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from .grid import FLAG_NEAR_POLE, FLAG_OK, GridPoint, Trajectory
from .invariants import ex2_J, ex4_J
from .problems import OdeProblem
from .rootfind import (DEFAULT_ROOT, NumericalError, RootConfig, fd_jacobian,
                       fixed_point, newton_2d)


class NegativeRadicand(NumericalError):
    pass


class NoRealRoot(NumericalError):
    pass


class ChartPole(NumericalError):
    pass


class NonMonotone(NumericalError):
    pass


class NegativeBase(NumericalError):
    pass


@dataclass(frozen=True)
class SchemeConfig:
    """Scheme parameters; ``scheme_config`` fills per-example defaults."""
    example: int
    k: float = 3.0                 # example-1 nonlinearity exponent
    K: float = 1.0                 # example-2 invariant-equation constant
    lattice_K: float = 1.0         # example-1 step-ratio constant (uniform mesh)
    A: float = -1.0                # example-4 constant
    alpha: float = 0.5
    gamma: Optional[float] = None  # lattice ratio; measured from start-ups if None
    forcing: Optional[Callable] = None
    root: RootConfig = field(default=DEFAULT_ROOT)


def scheme_config(example, **overrides) -> SchemeConfig:
    """Per-example configuration.

    ``forcing`` defaults: example 3 keeps None, meaning the closed-form
    quadratic law F(z) = z^2; example 5 gets the sine forcing of the
    benchmark problem (None would mean the free equation F = 0).
    """
    defaults = {}
    if example == 5:
        defaults["forcing"] = math.sin
    defaults.update(overrides)
    cfg = SchemeConfig(example=example, **defaults)
    if cfg.example == 1 and cfg.k in (0.0, 0.5, 1.0, 2.0):
        raise ValueError(f"k={cfg.k} excluded for example 1")
    if not 0.0 <= cfg.alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    return cfg


def _quad_extrapolate(p0, p1, p2, x):
    (x0, y0), (x1, y1), (x2, y2) = (p.as_tuple() for p in (p0, p1, p2))
    return (y0 * (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2))
            + y1 * (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2))
            + y2 * (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1)))


def _predict(p0, p1, p2):
    """Continuation guess: x by last step ratio, y by quadratic extrapolation."""
    ratio = (p2.x - p1.x) / (p1.x - p0.x)
    ratio = min(max(ratio, 0.1), 10.0)  # keep the guess in a sane cone
    x3 = p2.x + (p2.x - p1.x) * ratio
    return x3, _quad_extrapolate(p0, p1, p2, x3)


def _solve_scaled_2d(F, pred, root: RootConfig):
    """Newton on F with rows scaled by their gradient norms at the predictor."""
    J0 = fd_jacobian(F, pred)
    s = [max(abs(J0[i][0]), abs(J0[i][1]), 1e-12) for i in range(2)]

    def scaled(p):
        f = F(p)
        return (f[0] / s[0], f[1] / s[1])

    return newton_2d(scaled, pred, root)


def gamma_from_startups(example, pts) -> float:
    """Lattice ratio measured once from the three start-up points."""
    xs = tuple(p.x for p in pts)
    ys = tuple(p.y for p in pts)
    if example == 2:
        c12 = math.hypot(xs[2] - xs[1], ys[2] - ys[1])
        c01 = math.hypot(xs[1] - xs[0], ys[1] - ys[0])
        return c12 / c01
    if example == 3:
        xi3 = (xs[1] - xs[0]) / (1 + xs[0] * xs[1])
        xi4 = (xs[2] - xs[1]) / (1 + xs[1] * xs[2])
        return xi3 / xi4
    if example == 4:
        xi2 = (ys[2] - ys[1]) / math.sqrt(xs[1] * xs[2])
        xi3 = (ys[1] - ys[0]) / math.sqrt(xs[0] * xs[1])
        return xi2 / xi3
    raise ValueError(f"example {example} has no lattice ratio")


# ----------------------------------------------------------------- example 1

def step_ex1(prev2, cfg: SchemeConfig) -> GridPoint:
    """Advance the power-law scheme one node on the uniform mesh.

    Works in the combination F = x^2 y, in which the scheme reads
    F2 - 2 F1 + F0 = h^k [ (F2 - F0) / (2 h^k) ]^{(k-2)/(k-1)}; for k = 3
    this is the tabulated sqrt(1/2) h^{3/2} (F2 - F0)^{1/2} form.
    """
    if cfg.lattice_K != 1.0:
        raise ValueError("only the uniform lattice (K = 1) is implemented")
    p0, p1 = prev2
    h = p1.x - p0.x
    if h <= 0:
        raise NonMonotone("start-up abscissas must increase")
    x2 = p1.x + h
    F0 = p0.x * p0.x * p0.y
    F1 = p1.x * p1.x * p1.y
    k = cfg.k
    expo = (k - 2.0) / (k - 1.0)
    hk = h ** k

    def g(u):
        base = (u - F0) / (2 * hk)
        if base < 0:
            raise NegativeRadicand(
                f"negative base {base!r} under exponent {expo}")
        return 2 * F1 - F0 + hk * base ** expo

    u = fixed_point(g, 2 * F1 - F0, cfg.root)
    return GridPoint(x2, u / (x2 * x2))


# ----------------------------------------------------------------- example 2

def step_ex2(prev3, cfg: SchemeConfig) -> GridPoint:
    """Solve {J2 = K J1^2, xi1 = gamma xi2} for the next plane point."""
    p0, p1, p2 = prev3
    gamma = cfg.gamma if cfg.gamma is not None else gamma_from_startups(2, prev3)
    xs = (p0.x, p1.x, p2.x)
    ys = (p0.y, p1.y, p2.y)
    xi2_known = math.hypot(xs[2] - xs[1], ys[2] - ys[1])

    def F(p):
        x3, y3 = p
        J1, J2 = ex2_J((xs + (x3,), ys + (y3,)), cfg.alpha)
        xi1 = math.hypot(x3 - xs[2], y3 - ys[2])
        return (J2 - cfg.K * J1 * J1, xi1 - gamma * xi2_known)

    pred = _predict(p0, p1, p2)
    x3, y3 = _solve_scaled_2d(F, pred, cfg.root)
    if x3 <= p2.x:
        raise NonMonotone(f"solver returned x={x3} behind {p2.x}")
    return GridPoint(x3, y3)


# ----------------------------------------------------------------- example 3

def mesh_ex3(prev3_x, cfg: SchemeConfig) -> float:
    """Next mesh abscissa from the chart-step ratio lattice."""
    x0, x1, x2 = prev3_x
    if cfg.gamma is not None:
        gamma = cfg.gamma
    else:
        xi3 = (x1 - x0) / (1 + x0 * x1)
        xi4c = (x2 - x1) / (1 + x1 * x2)
        gamma = xi3 / xi4c
    xi4 = (x2 - x1) / (1 + x1 * x2)
    xi5 = xi4 / gamma
    den = 1 - xi5 * x2
    if abs(den) <= 1e-14 * (1 + abs(xi5 * x2)):
        raise ChartPole(f"1 - xi5 x = {den!r}")
    x3 = (x2 + xi5) / den
    if x3 <= x2:
        raise NonMonotone(f"mesh step produced {x3} <= {x2}")
    return x3


def step_ex3_y(prev3, x_next, cfg: SchemeConfig) -> GridPoint:
    """Ordinate at a fixed next abscissa from J2 = F(J1).

    With the default law F(z) = z^2 (cfg.forcing None) the equation is
    quadratic in the new slope-difference invariant and is solved in
    closed form; the root mapping closest to the quadratic-extrapolation
    predictor is the smooth continuation.  A custom forcing falls back to
    a damped fixed-point sweep started from the predictor.
    """
    p0, p1, p2 = prev3
    x0, x1, x2 = p0.x, p1.x, p2.x
    h1, h2, h3 = x1 - x0, x2 - x1, x_next - x2
    if h3 <= 0:
        raise NonMonotone(f"x_next={x_next} behind {x2}")
    s1 = (p1.y - p0.y) / h1
    s2 = (p2.y - p1.y) / h2
    xi1 = math.sqrt(1 + x1 * x1) * (s2 - s1)
    xi3 = (x1 - x0) / (1 + x0 * x1)
    xi4 = (x2 - x1) / (1 + x1 * x2)
    xi5 = (x_next - x2) / (1 + x2 * x_next)
    # J1 = a1 + b1 xi2 and J2 = a2 + b2 xi2 in the unknown invariant xi2
    a1 = 2 * cfg.alpha * xi1 / (xi3 + xi4)
    b1 = 2 * (1 - cfg.alpha) / (xi4 + xi5)
    a2 = -6 * xi1 / ((xi3 + xi4 + xi5) * (xi3 + xi4))
    b2 = 6 / ((xi3 + xi4 + xi5) * (xi4 + xi5))
    sq15 = math.sqrt(1 + x2 * x2)
    ys_pred = _quad_extrapolate(p0, p1, p2, x_next)

    def y_of(xi2):
        return p2.y + h3 * (s2 + xi2 / sq15)

    if cfg.forcing is not None:
        def g(y):
            xi2 = sq15 * ((y - p2.y) / h3 - s2)
            J1 = a1 + b1 * xi2
            target = (cfg.forcing(J1) - a2) / b2
            return y_of(target)

        return GridPoint(x_next, fixed_point(g, ys_pred, cfg.root))

    A = b1 * b1
    B = 2 * a1 * b1 - b2
    C = a1 * a1 - a2
    disc = B * B - 4 * A * C
    if disc < -1e-13 * (B * B + abs(4 * A * C)):
        raise NoRealRoot(f"discriminant {disc!r} < 0 at x = {x_next}")
    sq = math.sqrt(max(disc, 0.0))
    q = -0.5 * (B + math.copysign(sq, B)) if B != 0 else 0.5 * sq
    if A == 0:
        if B == 0:
            raise NoRealRoot("degenerate quadratic")
        roots = [-C / B]
    elif q == 0:
        roots = [0.0, -B / A]
    else:
        roots = [q / A, C / q]
    y3 = min((y_of(r) for r in roots), key=lambda v: abs(v - ys_pred))
    return GridPoint(x_next, y3)


# ----------------------------------------------------------------- example 4

def _signed_pow32(v):
    return math.copysign(abs(v) ** 1.5, v)


def step_ex4(prev3, cfg: SchemeConfig) -> GridPoint:
    """Solve {J2 = A J1^{3/2}, xi1 = gamma xi2} for the next point (A = -1).

    Inside the iteration J1^{3/2} is extended oddly so transient J1 < 0 do
    not derail Newton; a converged root with J1 < 0 is rejected.
    """
    p0, p1, p2 = prev3
    gamma = cfg.gamma if cfg.gamma is not None else gamma_from_startups(4, prev3)
    xs = (p0.x, p1.x, p2.x)
    ys = (p0.y, p1.y, p2.y)
    xi2_known = (ys[2] - ys[1]) / math.sqrt(xs[1] * xs[2])

    def F(p):
        x3, y3 = p
        if x3 <= 0:
            raise NegativeBase(f"iterate left the chart: x = {x3}")
        J1, J2 = ex4_J((xs + (x3,), ys + (y3,)), cfg.alpha)
        xi1 = (y3 - ys[2]) / math.sqrt(xs[2] * x3)
        return (J2 - cfg.A * _signed_pow32(J1), xi1 - gamma * xi2_known)

    pred = _predict(p0, p1, p2)
    x3, y3 = _solve_scaled_2d(F, pred, cfg.root)
    if x3 <= p2.x:
        raise NonMonotone(f"solver returned x={x3} behind {p2.x}")
    J1, _ = ex4_J((xs + (x3,), ys + (y3,)), cfg.alpha)
    if J1 < 0:
        raise NegativeBase(f"converged with J1 = {J1} < 0")
    return GridPoint(x3, y3)


# ----------------------------------------------------------------- example 5

POLE_RTOL = 1e-14


def ex5_lattice_constant(x_n, h, forcing) -> float:
    """Cross-ratio target K = 4 (1 - h^2/2 F(x_n + h/2)) on the uniform mesh."""
    F = forcing if forcing is not None else (lambda x: 0.0)
    return 4.0 * (1.0 - 0.5 * h * h * F(x_n + 0.5 * h))


def _ex5_update(y0, y1, y2, K):
    a = y2 - y0          # y_{n+1} - y_{n-1}
    b = y1 - y0          # y_n - y_{n-1}
    den = a - K * b
    num = a * y1 - K * b * y2
    scale = abs(a) + abs(K * b)
    near_pole = abs(den) < POLE_RTOL * scale
    if den == 0:
        return math.copysign(math.inf, num), True
    return num / den, near_pole


def step_ex5(prev3_y, x_n, h, cfg: SchemeConfig) -> float:
    """Explicit fractional-linear update of the forced Schwarzian scheme.

    ``x_n`` is the abscissa of the middle prefix value, so the forcing is
    sampled at the stencil center x_n + h/2.  Large outputs near a pole
    are returned as-is; the caller flags rather than aborts.
    """
    y0, y1, y2 = prev3_y
    K = ex5_lattice_constant(x_n, h, cfg.forcing)
    y3, _ = _ex5_update(y0, y1, y2, K)
    return y3


# ----------------------------------------------------------------- driver

def _attach_node(exc, i):
    exc.args = (f"node {i}: {exc.args[0] if exc.args else exc!r}",)
    return exc


def run_scheme(problem: OdeProblem, cfg: SchemeConfig, startups) -> Trajectory:
    """Iterate the example's stepper across the problem interval.

    Stopping conventions match the published node counts:

    * examples 1 and 5 run a fixed uniform mesh of round((xF-x0)/h) steps;
    * example 2 keeps stepping until the two trailing nodes passed x_F;
    * example 3 generates all mesh nodes strictly below x_F, then sweeps
      the ordinate solve across that mesh;
    * example 4 stops before appending a node at or beyond x_F.
    """
    pts = [p if isinstance(p, GridPoint) else GridPoint(*p) for p in startups]
    expected = 2 if problem.order == 2 else 3
    if len(pts) != expected:
        raise ValueError(f"example {cfg.example} needs {expected} start-ups")
    x0, xf = problem.interval
    meta = {"example": cfg.example, "alpha": cfg.alpha}
    if xf <= pts[-1].x or xf == x0:
        return Trajectory([p.x for p in pts], [p.y for p in pts], meta=meta)

    if cfg.example in (1, 5):
        h = pts[1].x - pts[0].x
        if any(abs(pts[i + 1].x - pts[i].x - h) > 1e-9 * h for i in range(len(pts) - 1)):
            raise ValueError("uniform-mesh schemes need equally spaced start-ups")
        meta["h"] = h
        n_steps = max(len(pts) - 1, round((xf - x0) / h))
        xs = [x0 + i * h for i in range(n_steps + 1)]
        ys = [p.y for p in pts]
        flags = [FLAG_OK] * len(pts)
        if cfg.example == 1:
            for i in range(len(pts), len(xs)):
                try:
                    nxt = step_ex1((GridPoint(xs[i - 2], ys[i - 2]),
                                    GridPoint(xs[i - 1], ys[i - 1])), cfg)
                except NumericalError as exc:
                    raise _attach_node(exc, i)
                ys.append(nxt.y)
                flags.append(FLAG_OK)
        else:
            for i in range(len(pts), len(xs)):
                K = ex5_lattice_constant(xs[i - 2], h, cfg.forcing)
                y3, near = _ex5_update(ys[i - 3], ys[i - 2], ys[i - 1], K)
                ys.append(y3)
                flags.append(FLAG_NEAR_POLE if near else FLAG_OK)
        return Trajectory(xs, ys, flags, meta)

    gamma = cfg.gamma if cfg.gamma is not None else gamma_from_startups(cfg.example, pts)
    cfg = replace(cfg, gamma=gamma)
    meta["gamma"] = gamma
    meta["h0"] = pts[1].x - pts[0].x

    if cfg.example == 2:
        nodes = list(pts)
        while nodes[-2].x < xf:
            try:
                nodes.append(step_ex2(tuple(nodes[-3:]), cfg))
            except NumericalError as exc:
                raise _attach_node(exc, len(nodes))
        return Trajectory([p.x for p in nodes], [p.y for p in nodes], meta=meta)

    if cfg.example == 3:
        xs = [p.x for p in pts]
        while True:
            try:
                cand = mesh_ex3(tuple(xs[-3:]), cfg)
            except NumericalError as exc:
                raise _attach_node(exc, len(xs))
            if cand >= xf:
                break
            xs.append(cand)
        nodes = list(pts)
        for i in range(3, len(xs)):
            try:
                nodes.append(step_ex3_y(tuple(nodes[-3:]), xs[i], cfg))
            except NumericalError as exc:
                raise _attach_node(exc, i)
        return Trajectory([p.x for p in nodes], [p.y for p in nodes], meta=meta)

    if cfg.example == 4:
        nodes = list(pts)
        while True:
            try:
                nxt = step_ex4(tuple(nodes[-3:]), cfg)
            except NumericalError as exc:
                raise _attach_node(exc, len(nodes))
            if nxt.x >= xf:
                break
            nodes.append(nxt)
        return Trajectory([p.x for p in nodes], [p.y for p in nodes], meta=meta)

    raise ValueError(f"unknown example {cfg.example}")
