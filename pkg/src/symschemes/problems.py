"""The five benchmark initial value problems.

Each problem stores its ODE solved explicitly for the highest derivative,
initial data, integration interval and (where one exists) the closed-form
solution.  Model parameters live in ``params``:

  example 1   x^2 y'' + 4x y' + 2y = (2xy + x^2 y')^{1/2}        (k = 3)
  example 2   (1 + y'^2) y''' - 3 y' y''^2 = K y''^2             (K = 1)
  example 3   (1 + x^2) y''' + 3x y'' = y''^2 (1 + x^2)^{3/2}
  example 4   x^2 (y' y''' - 3 y''^2) = A sqrt(y') (2x y'' + y')^{3/2},  A = -1
  example 5   (y' y''' - (3/2) y''^2) / y'^2 = sin(x)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

BLOWUP_X = 11.25  # example 3: curvature pole location fixed by y''(0)


@dataclass(frozen=True)
class OdeProblem:
    example: int
    name: str
    order: int
    interval: tuple
    initial: tuple  # (y0, y0', ...) at interval[0], length == order
    rhs_highest: Callable  # (x, y, y', [y'']) -> highest derivative
    exact: Optional[Callable] = None
    variant: Optional[str] = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.initial) != self.order:
            raise ValueError("initial data length must equal the ODE order")
        x0, xf = self.interval
        if not xf >= x0:
            raise ValueError("interval must be ordered")


def _exact1(x):
    return x / 12.0 + 1.0 / (x * x)


def _rhs1(x, y, yp):
    rad = 2 * x * y + x * x * yp
    if rad < 0:
        return math.nan  # outside the domain; adaptive solver rejects the step
    return (math.sqrt(rad) - 4 * x * yp - 2 * y) / (x * x)


def _rhs2(x, y, yp, ypp):
    return ypp * ypp * (3 * yp + 1.0) / (1 + yp * yp)


def _rhs3(x, y, yp, ypp):
    return (ypp * ypp * (1 + x * x) ** 1.5 - 3 * x * ypp) / (1 + x * x)


def _rhs4(x, y, yp, ypp):
    if yp <= 0:
        return math.nan
    return 3 * ypp * ypp / yp - math.sqrt(yp) * (2 * x * ypp + yp) ** 1.5 / (x * x * yp)


def _rhs5(x, y, yp, ypp):
    if yp == 0:
        return math.nan
    return (math.sin(x) * yp * yp + 1.5 * ypp * ypp) / yp


def example_problem(example, variant=None, interval=None, initial=None) -> OdeProblem:
    """Build one of the five benchmark problems.

    ``variant`` selects the example-3 case ('blowup' or 'noblowup');
    ``interval`` and ``initial`` override the defaults (example 5 uses
    interval (0, 6) for the singularity study).
    """
    if example == 1:
        # y(1) = 13/12; y'(1) = -23/12 follows from the closed-form solution.
        # (The source text quotes y'(1) = -1, which contradicts its own
        # exact solution; only y0 enters the difference schemes.)
        iv = interval or (1.0, 3.0)
        init = initial or (13.0 / 12.0, 1.0 / 12.0 - 2.0)
        return OdeProblem(1, "power-law second order", 2, iv, tuple(init),
                          _rhs1, exact=_exact1, params={"k": 3.0})
    if example == 2:
        iv = interval or (0.0, 10.0)
        init = initial or (0.0, -10.0, 1.0)
        return OdeProblem(2, "plane-similitude third order", 3, iv, tuple(init),
                          _rhs2, params={"K": 1.0})
    if example == 3:
        var = variant or "blowup"
        if var not in ("blowup", "noblowup"):
            raise ValueError(f"unknown example-3 variant {var!r}")
        sign = 1.0 if var == "blowup" else -1.0
        iv = interval or (0.0, 11.2)
        init = initial or (0.0, 0.0, sign / math.atan(BLOWUP_X))
        return OdeProblem(3, "arctan-chart third order", 3, iv, tuple(init),
                          _rhs3, variant=var, params={"x_blowup": BLOWUP_X})
    if example == 4:
        iv = interval or (1.0, 16.0)
        init = initial or (0.0, 0.1, 0.1)
        return OdeProblem(4, "scale-projective third order", 3, iv, tuple(init),
                          _rhs4, params={"A": -1.0})
    if example == 5:
        iv = interval or (0.0, 2.0)
        init = initial or (0.0, -10.0, 1.0)
        return OdeProblem(5, "forced Schwarzian", 3, iv, tuple(init),
                          _rhs5, params={"forcing": math.sin})
    raise ValueError(f"example must be 1..5, got {example}")
