"""Exact finite group actions for the five symmetry families.

Each flow is the hand-exponentiated form of the corresponding vector
field; ``tests/test_groups.py`` checks d/dt at t = 0 against the field
numerically.  Actions apply pointwise to stencils; an image with a
non-monotone mesh or a vanished denominator raises UndefinedAction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .grid import DegenerateStencil, GridPoint, Stencil


class UndefinedAction(ArithmeticError):
    """Group element undefined on the given stencil."""


@dataclass(frozen=True)
class GroupElement:
    """Tagged finite transformation: family name plus parameter vector."""
    family: str
    params: tuple

    def transform(self, x, y):
        fn = _FAMILIES.get(self.family)
        if fn is None:
            raise ValueError(f"unknown group family {self.family!r}")
        return fn(self.params, x, y)


def _ex1_translation(params, x, y):
    t, = params
    xt = x + t
    if xt == 0 or x * xt <= 0:
        raise UndefinedAction("translation flow crosses x = 0")
    return xt, y * x * x / (xt * xt)


def _ex1_shift(params, x, y):
    eps, = params
    if x == 0:
        raise UndefinedAction("shift undefined at x = 0")
    return x, y + eps / (x * x)


def _ex1_scaling(params, x, y):
    lam, k = params
    return lam * x, lam ** (k - 2.0) * y


def _ex2_translation(params, x, y):
    a, b = params
    return x + a, y + b


def _ex2_rotation(params, x, y):
    th, = params
    c, s = math.cos(th), math.sin(th)
    return x * c + y * s, -x * s + y * c


def _ex2_scaling(params, x, y):
    lam, = params
    return lam * x, lam * y


def _ex3_shift(params, x, y):
    a, b = params
    return x, y + a + b * x


def _ex3_tan_flow(params, x, y):
    t, = params
    theta = math.atan(x) + t
    if abs(theta) >= math.pi / 2:
        raise UndefinedAction("tan flow leaves the chart")
    xt = math.tan(theta)
    return xt, y * math.sqrt((1 + xt * xt) / (1 + x * x))


def _ex3_scaling(params, x, y):
    lam, = params
    return x, lam * y


def _ex4_shift(params, x, y):
    c, = params
    return x, y + c


def _ex4_scaling(params, x, y):
    lam, = params
    return lam * x, lam * y


def _ex4_proj_flow(params, x, y):
    t, = params
    den = 1 - t * y
    if den <= 0:
        raise UndefinedAction("projective flow pole reached (1 - t y <= 0)")
    return x / (den * den), y / den


def _ex5_mobius(params, x, y):
    a, b, c, d = params
    den = c * y + d
    if den == 0:
        raise UndefinedAction(f"Moebius pole at y = {y}")
    return x, (a * y + b) / den


_FAMILIES = {
    "ex1.translation": _ex1_translation,
    "ex1.shift": _ex1_shift,
    "ex1.scaling": _ex1_scaling,
    "ex2.translation": _ex2_translation,
    "ex2.rotation": _ex2_rotation,
    "ex2.scaling": _ex2_scaling,
    "ex3.shift": _ex3_shift,
    "ex3.tan_flow": _ex3_tan_flow,
    "ex3.scaling": _ex3_scaling,
    "ex4.shift": _ex4_shift,
    "ex4.scaling": _ex4_scaling,
    "ex4.proj_flow": _ex4_proj_flow,
    "ex5.mobius": _ex5_mobius,
}


def ex1_translation(t):
    return GroupElement("ex1.translation", (float(t),))


def ex1_shift(eps):
    return GroupElement("ex1.shift", (float(eps),))


def ex1_scaling(lam, k=3.0):
    if lam <= 0:
        raise ValueError("scaling factor must be positive")
    return GroupElement("ex1.scaling", (float(lam), float(k)))


def ex2_translation(a, b):
    return GroupElement("ex2.translation", (float(a), float(b)))


def ex2_rotation(theta):
    return GroupElement("ex2.rotation", (float(theta),))


def ex2_scaling(lam):
    if lam <= 0:
        raise ValueError("scaling factor must be positive")
    return GroupElement("ex2.scaling", (float(lam),))


def ex3_shift(a, b):
    return GroupElement("ex3.shift", (float(a), float(b)))


def ex3_tan_flow(t):
    return GroupElement("ex3.tan_flow", (float(t),))


def ex3_scaling(lam):
    return GroupElement("ex3.scaling", (float(lam),))


def ex4_shift(c):
    return GroupElement("ex4.shift", (float(c),))


def ex4_scaling(lam):
    if lam <= 0:
        raise ValueError("scaling factor must be positive")
    return GroupElement("ex4.scaling", (float(lam),))


def ex4_proj_flow(t):
    return GroupElement("ex4.proj_flow", (float(t),))


def ex5_mobius(a, b, c, d):
    det = a * d - b * c
    if det == 0:
        raise ValueError("Moebius parameters must satisfy ad - bc != 0")
    s = 1.0 / math.sqrt(abs(det))  # normalize so |ad - bc| = 1
    return GroupElement("ex5.mobius", (a * s, b * s, c * s, d * s))


def apply_group(g: GroupElement, s: Stencil) -> Stencil:
    """Pointwise image of a stencil; rejects non-monotone image meshes."""
    try:
        pts = [GridPoint(*g.transform(p.x, p.y)) for p in s]
    except ZeroDivisionError as exc:
        raise UndefinedAction(str(exc)) from exc
    try:
        return Stencil(pts)
    except DegenerateStencil as exc:
        raise UndefinedAction(f"image mesh not monotone: {exc}") from exc


def apply_to_points(g: GroupElement, points):
    """Transform a plain (x, y) sequence without stencil validation."""
    return [g.transform(x, y) for (x, y) in points]
