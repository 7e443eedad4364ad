"""Implicit primitives and the built-in demo cases composed from them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .errors import InvalidSpec, UnknownTestCase
from .expr import And, BoolTree, Const, Leaf, Not, Or, Pow, Region, Sub, Var, compose


@dataclass(frozen=True)
class Circle:
    cx: float
    cy: float
    radius: float


@dataclass(frozen=True)
class Parabola:
    """Region above the parabola y = a*(x-x0)^2 - c (opens-up) or
    y = -a*(x-x0)^2 - c (opens-down)."""

    a: float
    x0: float
    c: float
    orientation: str = "opens-up"


@dataclass(frozen=True)
class Slab:
    """|axis| <= half_thickness, unbounded along the other two axes."""

    axis: str
    half_thickness: float


@dataclass(frozen=True)
class Paraboloid:
    """side='under': z <= coeff*(1-x^2-y^2); side='above': z >= -coeff*(1-x^2-y^2)."""

    side: str
    coeff: float


@dataclass(frozen=True)
class CylinderZ:
    radius: float


PrimitiveSpec = Union[Circle, Parabola, Slab, Paraboloid, CylinderZ]

_XY = ("x", "y")
_XYZ = ("x", "y", "z")


def _require_finite(spec, **fields):
    for name, value in fields.items():
        if not math.isfinite(value):
            raise InvalidSpec(f"{type(spec).__name__}.{name} must be finite, got {value!r}")


def _require_positive(spec, **fields):
    _require_finite(spec, **fields)
    for name, value in fields.items():
        if value <= 0:
            raise InvalidSpec(f"{type(spec).__name__}.{name} must be > 0, got {value!r}")


def primitive(spec: PrimitiveSpec) -> Region:
    """Build the implicit region for an elementary shape."""
    x, y, z = Var("x"), Var("y"), Var("z")
    if isinstance(spec, Circle):
        _require_finite(spec, cx=spec.cx, cy=spec.cy)
        _require_positive(spec, radius=spec.radius)
        expr = Const(spec.radius**2) - (x - spec.cx) ** 2 - (y - spec.cy) ** 2
        return Region(expr, _XY, description=f"disc r={spec.radius} at ({spec.cx},{spec.cy})")
    if isinstance(spec, Parabola):
        _require_finite(spec, x0=spec.x0, c=spec.c)
        _require_positive(spec, a=spec.a)
        shifted = Pow(Sub(x, Const(spec.x0)), 2)
        if spec.orientation == "opens-up":
            expr = y - spec.a * shifted + spec.c
        elif spec.orientation == "opens-down":
            expr = y + spec.a * shifted + spec.c
        else:
            raise InvalidSpec(f"orientation must be 'opens-up' or 'opens-down', got {spec.orientation!r}")
        return Region(expr, _XY, description=f"above {spec.orientation} parabola")
    if isinstance(spec, Slab):
        if spec.axis not in ("x", "y", "z"):
            raise InvalidSpec(f"slab axis must be x, y or z, got {spec.axis!r}")
        _require_positive(spec, half_thickness=spec.half_thickness)
        expr = Const(spec.half_thickness**2) - Var(spec.axis) ** 2
        return Region(expr, _XYZ, description=f"slab |{spec.axis}| <= {spec.half_thickness}")
    if isinstance(spec, Paraboloid):
        _require_positive(spec, coeff=spec.coeff)
        bowl = spec.coeff * (Const(1.0) - x**2 - y**2)
        if spec.side == "under":
            expr = -z + bowl
        elif spec.side == "above":
            expr = z + bowl
        else:
            raise InvalidSpec(f"paraboloid side must be 'under' or 'above', got {spec.side!r}")
        return Region(expr, _XYZ, description=f"{spec.side} paraboloid, coeff {spec.coeff}")
    if isinstance(spec, CylinderZ):
        _require_positive(spec, radius=spec.radius)
        expr = Const(spec.radius**2) - x**2 - y**2
        return Region(expr, _XYZ, description=f"cylinder r={spec.radius} about z")
    raise InvalidSpec(f"unknown primitive {spec!r}")


@dataclass(frozen=True)
class TestCase:
    """A named demo: primitive parameters, the composition trees, plot window."""

    name: str
    params: dict
    trees: tuple[tuple[str, BoolTree], ...]  # (label, tree) pairs
    alpha: float
    bounds: tuple[tuple[float, float], ...]
    default_resolution: int


def _case_circles() -> TestCase:
    params = dict(x0=1.0, y0=2.0, r0=1.5, x1=1.0, y1=1.0, r1=1.0)
    c0 = Leaf(primitive(Circle(params["x0"], params["y0"], params["r0"])))
    c1 = Leaf(primitive(Circle(params["x1"], params["y1"], params["r1"])))
    return TestCase(
        name="circles-4.1",
        params=params,
        trees=(("and", And(c0, c1)), ("or", Or(c0, c1))),
        alpha=1.0,
        bounds=((-1.0, 3.0), (-0.5, 4.0)),
        default_resolution=256,
    )


def _case_parabolas() -> TestCase:
    # region of interest: above the opens-up parabola AND below the
    # opens-down one, i.e. phi1 >= 0 and phi2 <= 0
    params = dict(a=1.0, x0=1.0, d=3.0, b=1.5)
    p1 = Leaf(primitive(Parabola(params["a"], params["x0"], params["d"], "opens-up")))
    p2 = Leaf(primitive(Parabola(params["a"], params["x0"], params["b"], "opens-down")))
    return TestCase(
        name="parabolas-4.2",
        params=params,
        trees=(("and", And(p1, Not(p2))), ("or", Or(p1, Not(p2)))),
        alpha=1.0,
        bounds=((-2.0, 4.0), (-6.0, 2.0)),
        default_resolution=256,
    )


def _case_slabs() -> TestCase:
    params = dict(a=2.0, b=1.0, c=2.0)
    s = [
        Leaf(primitive(Slab("x", params["a"]))),
        Leaf(primitive(Slab("y", params["b"]))),
        Leaf(primitive(Slab("z", params["c"]))),
    ]
    return TestCase(
        name="slabs-A1",
        params=params,
        trees=(("and", And(*s)), ("or", Or(*s))),
        alpha=1.0,
        bounds=((-3.0, 3.0), (-3.0, 3.0), (-3.0, 3.0)),
        default_resolution=64,
    )


def _case_paraboloid_cylinders() -> TestCase:
    # lens between two paraboloids, optionally with an annular cylindrical
    # cut-out: keep the core of radius 0.3, remove the ring out to 0.5
    params = dict(coeff=0.6, r_outer=0.5, r_inner=0.3)
    f1 = Leaf(primitive(Paraboloid("under", params["coeff"])))
    f2 = Leaf(primitive(Paraboloid("above", params["coeff"])))
    f3 = Leaf(primitive(CylinderZ(params["r_outer"])))
    f4 = Leaf(primitive(CylinderZ(params["r_inner"])))
    return TestCase(
        name="paraboloid-cylinders-A2",
        params=params,
        trees=(
            ("and", And(f1, f2)),
            ("cutout", And(f1, f2, Or(Not(f3), f4))),
        ),
        alpha=1.0,
        bounds=((-1.2, 1.2), (-1.2, 1.2), (-1.2, 1.2)),
        default_resolution=64,
    )


_CASES = {
    "circles-4.1": _case_circles,
    "parabolas-4.2": _case_parabolas,
    "slabs-A1": _case_slabs,
    "paraboloid-cylinders-A2": _case_paraboloid_cylinders,
}

TESTCASE_NAMES = tuple(_CASES)


def testcase(name: str) -> tuple[Region, Region, TestCase]:
    """Return both composed regions of a named demo case plus its definition."""
    try:
        case = _CASES[name]()
    except KeyError:
        raise UnknownTestCase(name, TESTCASE_NAMES) from None
    first = compose(case.trees[0][1], case.alpha)
    second = compose(case.trees[1][1], case.alpha)
    return first, second, case
