"""Interior-layout strings and problem files for the command line.

A problem file is YAML (or JSON, which YAML accepts)::

    domain: {a: 2, b: 1, center: [0, 0]}
    operator:
      type: coupled          # helmholtz | known-rhs | coupled | varying-helmholtz
      dx: 1                  # L1 coefficients (coupled)
      dy: 0
      identity: 0
      f: "0"                 # forcing (coupled)
    dirichlet: "exp(-x)"
    neumann: "cos(x)*nx"     # optional, variables x, y, nx, ny
    neumann_knots: [1, 3]    # boundary knot indices carrying the Neumann condition
    exact: "exp(-x)"         # optional, enables error columns
    points: [[1.5, 0], [0, 0]]
    boundary_knots: 7
    interior: "ring:0.5:4+ring:0.8:8"
    shape: 4
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
import yaml

from .expr import compile_expression
from .geometry import EllipseDomain, InteriorLayout, Ring, read_knots_csv
from .solver import CoupledDRM, FirstOrderOperator, Helmholtz, KnownRhsDRM, ProblemSpec, ResponseKernel

__all__ = ["ConfigError", "parse_interior", "Problem", "load_problem"]


class ConfigError(ValueError):
    pass


def parse_interior(text: str, table: InteriorLayout | None = None) -> InteriorLayout | None:
    """Parse ``none``, ``table``, ``ring:scale:count[:offset]`` or ``file:path``, joined by ``+``.

    ``table`` stands for the benchmark's tabulated evaluation points.
    """
    text = text.strip()
    if text == "none":
        return None
    layout = InteriorLayout()
    for part in text.split("+"):
        part = part.strip()
        kind, _, rest = part.partition(":")
        if kind == "table":
            if table is None:
                raise ConfigError("'table' interior layout is only available for benchmark cases")
            layout = layout + table
        elif kind == "ring":
            fields = rest.split(":")
            if len(fields) not in (2, 3):
                raise ConfigError(f"ring layout must be ring:scale:count[:offset], got {part!r}")
            try:
                ring = Ring(float(fields[0]), int(fields[1]), float(fields[2]) if len(fields) == 3 else 0.0)
            except ValueError as exc:
                raise ConfigError(f"bad ring layout {part!r}: {exc}") from None
            layout = layout + InteriorLayout(rings=(ring,))
        elif kind == "file":
            if not rest:
                raise ConfigError("file layout needs a path: file:PATH")
            try:
                knots = read_knots_csv(rest)
            except (OSError, KeyError, ValueError) as exc:
                raise ConfigError(f"cannot read interior knots from {rest!r}: {exc}") from None
            layout = layout + InteriorLayout.explicit((k.x, k.y) for k in knots)
        else:
            raise ConfigError(f"unknown interior layout {part!r} (use none, table, ring:S:N or file:PATH)")
    return layout


@dataclass(frozen=True)
class Problem:
    name: str
    spec: ProblemSpec
    points: np.ndarray
    exact: Callable | None


def _expr(data: dict, key: str, variables=("x", "y"), required=True):
    if key not in data:
        if required:
            raise ConfigError(f"problem file is missing {key!r}")
        return None
    return compile_expression(data[key], variables)


def _operator(data: dict):
    op = data.get("operator", {"type": "helmholtz"})
    if isinstance(op, str):
        op = {"type": op}
    kind = op.get("type", "helmholtz")
    if kind == "helmholtz":
        return Helmholtz(float(op.get("lambda", 1.0)))
    if kind == "known-rhs":
        return KnownRhsDRM(_expr(op, "g"))
    if kind == "coupled":
        l1 = FirstOrderOperator(float(op.get("dx", 0.0)), float(op.get("dy", 0.0)), float(op.get("identity", 0.0)))
        f = _expr(op, "f", required=False) or compile_expression("0")
        return CoupledDRM(l1, f)
    if kind == "varying-helmholtz":
        return ResponseKernel()
    raise ConfigError(f"unknown operator type {kind!r}")


def load_problem(path, n_boundary: int | None = None, interior: str | None = None, shape: float | None = None) -> Problem:
    """Read a problem file; keyword arguments override the file's settings."""
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path} is not valid YAML/JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must contain a mapping")

    dom = data.get("domain", {})
    try:
        domain = EllipseDomain(float(dom.get("a", 2.0)), float(dom.get("b", 1.0)), tuple(map(float, dom.get("center", (0.0, 0.0)))))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad domain: {exc}") from None

    layout_text = interior if interior is not None else data.get("interior", "none")
    if isinstance(layout_text, list):
        layout = InteriorLayout.explicit(layout_text)
    else:
        layout = parse_interior(str(layout_text))

    try:
        spec = ProblemSpec(
            domain=domain,
            mode=_operator(data),
            dirichlet=_expr(data, "dirichlet"),
            n_boundary=int(n_boundary if n_boundary is not None else data.get("boundary_knots", 11)),
            neumann=_expr(data, "neumann", ("x", "y", "nx", "ny"), required=False),
            neumann_knots=frozenset(int(i) for i in data.get("neumann_knots", ())),
            interior=layout,
            shape=float(shape if shape is not None else data.get("shape", 1.0)),
        )
    except TypeError as exc:
        raise ConfigError(str(exc)) from None

    points = np.asarray(data.get("points", []), dtype=float).reshape(-1, 2)
    return Problem(path.stem, spec, points, _expr(data, "exact", required=False))
