"""Grid evaluation and zero-level-set extraction.

Marching squares works on 2D scalar fields; 3D regions are rendered as
stacks of z-slices.  Conventions: a node value of exactly 0 counts as
inside when building cell codes, and ambiguous saddle cells are resolved by
the sign of the cell-center average.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch
from .expr import Region, eval_arrays


@dataclass(frozen=True)
class ScalarField:
    """Values of a region's expression on a regular grid.

    ``values[i, j(, k)]`` corresponds to axis-0 index i, axis-1 index j, ...;
    node i along an axis sits at ``lo + i*(hi-lo)/(n-1)``.
    """

    bounds: tuple[tuple[float, float], ...]
    resolution: tuple[int, ...]
    values: np.ndarray
    vars: tuple[str, ...]

    def axis(self, k: int) -> np.ndarray:
        lo, hi = self.bounds[k]
        return np.linspace(lo, hi, self.resolution[k])


@dataclass(frozen=True)
class Polyline:
    points: np.ndarray  # (m, 2)
    closed: bool


@dataclass(frozen=True)
class ContourSet:
    """Zero-level-set polylines of a 2D field."""

    polylines: tuple[Polyline, ...]
    iso: float = 0.0


def grid_eval(region: Region, bounds, resolution) -> ScalarField:
    """Evaluate a region on a regular 2D or 3D grid."""
    bounds = tuple((float(lo), float(hi)) for lo, hi in bounds)
    if np.ndim(resolution) == 0:
        resolution = (int(resolution),) * len(bounds)
    else:
        resolution = tuple(int(n) for n in resolution)
    if len(resolution) != len(bounds):
        raise DimensionMismatch("resolution and bounds dimension differ")
    if len(bounds) not in (2, 3):
        raise DimensionMismatch(f"grids are 2D or 3D, got {len(bounds)} axes")
    if len(region.vars) != len(bounds):
        raise DimensionMismatch(
            f"region has {len(region.vars)} variables but bounds have {len(bounds)} axes")
    for (lo, hi) in bounds:
        if not lo < hi:
            raise ValueError(f"bounds must have lo < hi, got ({lo}, {hi})")
    for n in resolution:
        if n < 2:
            raise ValueError("resolution must be >= 2 per axis")
    axes = [np.linspace(lo, hi, n) for (lo, hi), n in zip(bounds, resolution)]
    mesh = np.meshgrid(*axes, indexing="ij")
    env = {name: grid for name, grid in zip(region.vars, mesh)}
    # constant subexpressions stay scalar, so broadcast to the grid shape
    values = np.broadcast_to(eval_arrays(region.expr, env), mesh[0].shape).copy()
    return ScalarField(bounds=bounds, resolution=resolution, values=values, vars=region.vars)


# ----------------------------------------------------------------------
# marching squares

def _edge_key(n0: tuple[int, int], n1: tuple[int, int]) -> tuple:
    return (n0, n1) if n0 <= n1 else (n1, n0)


def marching_squares(field: ScalarField) -> ContourSet:
    """Extract iso-0 polylines from a 2D field by per-cell linear interpolation."""
    if field.values.ndim != 2:
        raise DimensionMismatch("marching squares needs a 2D field")
    vals = field.values
    nx, ny = field.resolution
    xs, ys = field.axis(0), field.axis(1)
    inside = vals >= 0.0

    # one crossing point per grid edge, shared exactly by both adjacent cells
    crossings: dict[tuple, tuple[float, float]] = {}

    def crossing(n0, n1):
        key = _edge_key(n0, n1)
        pt = crossings.get(key)
        if pt is None:
            v0 = vals[n0]
            v1 = vals[n1]
            t = v0 / (v0 - v1)
            x = xs[n0[0]] + t * (xs[n1[0]] - xs[n0[0]])
            y = ys[n0[1]] + t * (ys[n1[1]] - ys[n0[1]])
            pt = (float(x), float(y))
            crossings[key] = pt
        return key

    segments: list[tuple[tuple, tuple]] = []
    for i in range(nx - 1):
        for j in range(ny - 1):
            n00, n10, n01, n11 = (i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)
            cell_edges = ((n00, n10), (n10, n11), (n01, n11), (n00, n01))
            crossed = [(a, b) for (a, b) in cell_edges if inside[a] != inside[b]]
            if not crossed:
                continue
            if len(crossed) == 2:
                segments.append((crossing(*crossed[0]), crossing(*crossed[1])))
            else:
                # saddle: pair the crossings around two diagonal corners;
                # center sign picks which diagonal stays connected
                center_in = (vals[n00] + vals[n10] + vals[n01] + vals[n11]) / 4.0 >= 0.0
                corners = [n00, n10, n01, n11]
                targets = [c for c in corners if inside[c] != center_in]
                for c in targets:
                    adjacent = [(a, b) for (a, b) in crossed if c in (a, b)]
                    segments.append((crossing(*adjacent[0]), crossing(*adjacent[1])))

    return ContourSet(polylines=tuple(_chain(segments, crossings)))


def _chain(segments, crossings) -> list[Polyline]:
    """Join edge-keyed segments into open chains and closed loops."""
    incident: dict[tuple, list[int]] = {}
    for idx, (e0, e1) in enumerate(segments):
        incident.setdefault(e0, []).append(idx)
        incident.setdefault(e1, []).append(idx)

    used = [False] * len(segments)
    polylines: list[Polyline] = []

    def walk(start_edge, first_idx):
        used[first_idx] = True
        e0, e1 = segments[first_idx]
        keys = [start_edge, e1 if e0 == start_edge else e0]
        while True:
            tail = keys[-1]
            nxt = next((s for s in incident[tail] if not used[s]), None)
            if nxt is None:
                break
            used[nxt] = True
            a, b = segments[nxt]
            keys.append(b if a == tail else a)
        closed = len(keys) > 2 and keys[0] == keys[-1]
        if closed:
            keys = keys[:-1]
        pts = np.array([crossings[k] for k in keys], dtype=float)
        return Polyline(points=pts, closed=closed)

    # open chains first, starting from degree-1 endpoints, then loops;
    # iteration over the sorted keys keeps the output deterministic
    for endpoint in sorted(k for k, ids in incident.items() if len(ids) == 1):
        idx = next((s for s in incident[endpoint] if not used[s]), None)
        if idx is not None:
            polylines.append(walk(endpoint, idx))
    for idx, seg in enumerate(segments):
        if not used[idx]:
            polylines.append(walk(seg[0], idx))
    return polylines


def slice_contours_3d(region: Region, bounds, resolution, n_slices: int
                      ) -> list[tuple[float, ContourSet]]:
    """Contour a 3D region on uniformly spaced z-levels.

    Levels span the z-bounds inclusively; a single slice sits at the middle.
    """
    if len(region.vars) != 3:
        raise DimensionMismatch("slice contours need a 3D region")
    if n_slices < 1:
        raise ValueError("n_slices must be >= 1")
    bounds = tuple((float(lo), float(hi)) for lo, hi in bounds)
    res = tuple(int(n) for n in np.broadcast_to(resolution, (3,)))
    zlo, zhi = bounds[2]
    if n_slices == 1:
        levels = np.array([(zlo + zhi) / 2.0])
    else:
        levels = np.linspace(zlo, zhi, n_slices)

    xname, yname, zname = region.vars
    xs = np.linspace(*bounds[0], res[0])
    ys = np.linspace(*bounds[1], res[1])
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    out = []
    for z in levels:
        values = np.broadcast_to(
            eval_arrays(region.expr, {xname: gx, yname: gy, zname: float(z)}),
            gx.shape).copy()
        fld = ScalarField(bounds=bounds[:2], resolution=res[:2],
                          values=values, vars=(xname, yname))
        out.append((float(z), marching_squares(fld)))
    return out


def inside_fraction(field: ScalarField) -> float:
    """Fraction of grid nodes with value >= 0 (quick area/volume estimate)."""
    return float(np.count_nonzero(field.values >= 0.0)) / field.values.size
