"""Shared mesh data model: grid points, stencils, trajectories."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

FLAG_OK = "ok"
FLAG_NEAR_POLE = "near-pole"
FLAG_DIVERGED = "diverged"
FLAG_SOLVER_FAILED = "solver-failed"


class DegenerateStencil(ValueError):
    """Stencil abscissas are not strictly increasing, or an invariant
    denominator vanished to rounding level."""


@dataclass(frozen=True)
class GridPoint:
    x: float
    y: float

    def as_tuple(self):
        return (self.x, self.y)


class Stencil:
    """Ordered window of 3 or 4 consecutive grid points.

    Abscissas must be strictly increasing; the derived steps
    ``h[j] = x[j+1] - x[j]`` are therefore all positive.
    """

    __slots__ = ("points",)

    def __init__(self, points):
        pts = tuple(p if isinstance(p, GridPoint) else GridPoint(*p) for p in points)
        if len(pts) not in (3, 4):
            raise DegenerateStencil(f"stencil needs 3 or 4 points, got {len(pts)}")
        for a, b in zip(pts, pts[1:]):
            if not (b.x > a.x):
                raise DegenerateStencil(
                    f"abscissas not strictly increasing: {a.x} !< {b.x}")
        self.points = pts

    @property
    def xs(self):
        return tuple(p.x for p in self.points)

    @property
    def ys(self):
        return tuple(p.y for p in self.points)

    @property
    def steps(self):
        xs = self.xs
        return tuple(b - a for a, b in zip(xs, xs[1:]))

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def __repr__(self):
        body = ", ".join(f"({p.x:.6g}, {p.y:.6g})" for p in self.points)
        return f"Stencil[{body}]"


@dataclass
class Trajectory:
    """Full discrete solution: mesh, values and per-node status flags.

    ``meta`` records run parameters a caller may need later (step size,
    lattice ratio gamma, start-up provenance).
    """

    xs: np.ndarray
    ys: np.ndarray
    flags: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.xs = np.asarray(self.xs, dtype=float)
        self.ys = np.asarray(self.ys, dtype=float)
        if self.xs.shape != self.ys.shape:
            raise ValueError("xs and ys must have the same length")
        if not self.flags:
            self.flags = [FLAG_OK] * len(self.xs)
        if len(self.flags) != len(self.xs):
            raise ValueError("one flag per node required")
        ok_x = self.xs[[f == FLAG_OK for f in self.flags]]
        if ok_x.size > 1 and not np.all(np.diff(ok_x) > 0):
            raise ValueError("mesh not strictly increasing over ok nodes")

    def __len__(self):
        return len(self.xs)

    @property
    def n_nodes(self):
        return len(self.xs)

    def node(self, i) -> GridPoint:
        return GridPoint(float(self.xs[i]), float(self.ys[i]))

    def flagged(self, flag):
        """Indices of nodes carrying the given flag."""
        return [i for i, f in enumerate(self.flags) if f == flag]

    @property
    def completed(self):
        return all(f in (FLAG_OK, FLAG_NEAR_POLE) for f in self.flags)
