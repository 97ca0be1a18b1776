"""Ellipse domains, boundary knots with outward normals, interior knot layouts."""
from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Role",
    "Knot",
    "EllipseDomain",
    "Ring",
    "InteriorLayout",
    "boundary_knots",
    "interior_knots",
    "positions",
    "normals",
    "write_knots_csv",
    "read_knots_csv",
]

_INSIDE_MARGIN = 1e-9
_DUPLICATE_TOL = 1e-9


class Role(enum.Enum):
    BOUNDARY = "boundary"
    INTERIOR = "interior"


@dataclass(frozen=True)
class Knot:
    """A collocation point. ``normal`` is the unit outward normal for boundary knots."""

    x: float
    y: float
    role: Role
    normal: tuple[float, float] | None = None

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"knot coordinates must be finite, got ({self.x}, {self.y})")
        if self.role is Role.BOUNDARY:
            if self.normal is None:
                raise ValueError("boundary knots need an outward normal")
            length = math.hypot(*self.normal)
            if abs(length - 1.0) > 1e-12:
                raise ValueError(f"normal must be a unit vector, |n| = {length}")
        elif self.normal is not None:
            raise ValueError("interior knots carry no normal")

    @property
    def position(self) -> tuple[float, float]:
        return (self.x, self.y)

    @property
    def is_boundary(self) -> bool:
        return self.role is Role.BOUNDARY


@dataclass(frozen=True)
class EllipseDomain:
    a: float = 2.0
    b: float = 1.0
    center: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if not (self.a >= self.b > 0):
            raise ValueError(f"need a >= b > 0, got a={self.a}, b={self.b}")

    def level(self, x, y):
        """Implicit function (x-cx)^2/a^2 + (y-cy)^2/b^2; equals 1 on the boundary."""
        cx, cy = self.center
        return ((np.asarray(x) - cx) / self.a) ** 2 + ((np.asarray(y) - cy) / self.b) ** 2

    def contains(self, x, y, margin: float = _INSIDE_MARGIN):
        return self.level(x, y) < 1.0 - margin


@dataclass(frozen=True)
class Ring:
    """``count`` points on the concentric ellipse scaled by ``scale``, starting at angle ``offset``."""

    scale: float
    count: int
    offset: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.scale < 1.0:
            raise ValueError(f"ring scale must lie in (0, 1), got {self.scale}")
        if self.count < 1:
            raise ValueError("ring count must be positive")


@dataclass(frozen=True)
class InteriorLayout:
    """Explicit points followed by zero or more concentric rings."""

    points: tuple[tuple[float, float], ...] = ()
    rings: tuple[Ring, ...] = field(default_factory=tuple)

    @classmethod
    def explicit(cls, points: Iterable[Sequence[float]]) -> "InteriorLayout":
        return cls(points=tuple((float(p[0]), float(p[1])) for p in points))

    @classmethod
    def ring(cls, scale: float, count: int, offset: float = 0.0) -> "InteriorLayout":
        return cls(rings=(Ring(scale, count, offset),))

    def __add__(self, other: "InteriorLayout") -> "InteriorLayout":
        return InteriorLayout(self.points + other.points, self.rings + other.rings)

    def unique_points(self) -> "InteriorLayout":
        """Drop repeated explicit points (tables sometimes list a point twice)."""
        kept: list[tuple[float, float]] = []
        for p in self.points:
            if all(math.hypot(p[0] - q[0], p[1] - q[1]) > _DUPLICATE_TOL for q in kept):
                kept.append(p)
        return InteriorLayout(tuple(kept), self.rings)


def boundary_knots(domain: EllipseDomain, n: int) -> list[Knot]:
    """``n`` knots uniform in parametric angle, starting at (cx + a, cy)."""
    if n < 3:
        raise ValueError(f"need at least 3 boundary knots, got {n}")
    cx, cy = domain.center
    knots = []
    for k in range(n):
        t = 2.0 * math.pi * k / n
        c, s = math.cos(t), math.sin(t)
        nx, ny = domain.b * c, domain.a * s
        length = math.hypot(nx, ny)
        knots.append(
            Knot(cx + domain.a * c, cy + domain.b * s, Role.BOUNDARY, (nx / length, ny / length))
        )
    return knots


def interior_knots(domain: EllipseDomain, layout: InteriorLayout) -> list[Knot]:
    cx, cy = domain.center
    pts = list(layout.points)
    for ring in layout.rings:
        for k in range(ring.count):
            t = 2.0 * math.pi * (k + ring.offset) / ring.count
            pts.append((cx + ring.scale * domain.a * math.cos(t), cy + ring.scale * domain.b * math.sin(t)))

    knots: list[Knot] = []
    for x, y in pts:
        if not domain.contains(x, y):
            raise ValueError(f"interior knot ({x}, {y}) is not strictly inside the domain")
        for q in knots:
            if math.hypot(x - q.x, y - q.y) <= _DUPLICATE_TOL:
                raise ValueError(f"duplicate interior knot ({x}, {y})")
        knots.append(Knot(float(x), float(y), Role.INTERIOR))
    return knots


def positions(knots: Sequence[Knot]) -> np.ndarray:
    return np.array([[k.x, k.y] for k in knots], dtype=float).reshape(-1, 2)


def normals(knots: Sequence[Knot]) -> np.ndarray:
    return np.array([k.normal for k in knots], dtype=float).reshape(-1, 2)


_CSV_FIELDS = ("x", "y", "role", "nx", "ny")


def write_knots_csv(knots: Sequence[Knot], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_FIELDS)
        for k in knots:
            nx, ny = (repr(v) for v in k.normal) if k.normal else ("", "")
            writer.writerow([repr(k.x), repr(k.y), k.role.value, nx, ny])


def read_knots_csv(path) -> list[Knot]:
    """Read knots written by :func:`write_knots_csv`.

    ``role`` defaults to interior and the normal columns may be omitted, so a
    bare ``x,y`` file is a valid interior point list.
    """
    knots = []
    with open(Path(path), newline="") as fh:
        for row in csv.DictReader(fh):
            role = Role(row.get("role") or "interior")
            normal = None
            if role is Role.BOUNDARY:
                normal = (float(row["nx"]), float(row["ny"]))
            knots.append(Knot(float(row["x"]), float(row["y"]), role, normal))
    return knots
