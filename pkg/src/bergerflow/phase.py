"""Trapping regions and phase-portrait tooling for the collapse flow.

Four families of compact trapping regions certify that trajectories stay
boxed in: one for the negative-product case and three covering the
positive-product case depending on where the initial condition sits
relative to the lines y = x and y = 3x/2.  Region boundaries are sampled
to verify the inward-pointing flux, and trajectories are measured against
the region they were assigned at start.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import vector_field
from .model import FlowKind, FlowParams, State


@dataclass(frozen=True)
class Region:
    """One of the trapping regions; all four are closed triangles.

    K(v, w):  0 <= x <= v,  w <= y <= w + v - x           (v, w > 0)
    K1(v, w): 0 <= x <= v,  3x/2 + w - 3v/2 <= y <= w     (0 < v < 2w/3)
    K2(v):    0 <= x <= v,  x <= y <= 3x/2                (v > 0)
    K3(v, w): 0 <= x <= v,  (w/v) x <= y <= x             (0 < w < v)
    """

    tag: str  # "K" | "K1" | "K2" | "K3"
    v: float
    w: float | None = None

    def __post_init__(self):
        if self.tag == "K":
            if not (self.v > 0 and self.w is not None and self.w > 0):
                raise ValueError("K requires v > 0 and w > 0")
        elif self.tag == "K1":
            if not (self.w is not None and 0 < self.v < 2.0 / 3.0 * self.w):
                raise ValueError("K1 requires 0 < v < 2w/3")
        elif self.tag == "K2":
            if not self.v > 0:
                raise ValueError("K2 requires v > 0")
            if self.w is not None:
                raise ValueError("K2 takes no second parameter")
        elif self.tag == "K3":
            if not (self.w is not None and 0 < self.w < self.v):
                raise ValueError("K3 requires 0 < w < v")
        else:
            raise ValueError(f"unknown region tag {self.tag!r}")

    def vertices(self) -> list[tuple[float, float]]:
        v, w = self.v, self.w
        if self.tag == "K":
            return [(0.0, w), (v, w), (0.0, w + v)]
        if self.tag == "K1":
            return [(0.0, w - 1.5 * v), (v, w), (0.0, w)]
        if self.tag == "K2":
            return [(0.0, 0.0), (v, v), (v, 1.5 * v)]
        return [(0.0, 0.0), (v, w), (v, v)]


def region_contains(region: Region, point) -> bool:
    """Closed-set membership with non-strict inequalities."""
    x, y = point
    v, w = region.v, region.w
    if not 0.0 <= x <= v:
        return False
    if region.tag == "K":
        return w <= y <= w + v - x
    if region.tag == "K1":
        return 1.5 * x + w - 1.5 * v <= y <= w
    if region.tag == "K2":
        return x <= y <= 1.5 * x
    return w / v * x <= y <= x


def region_for_initial(params: FlowParams, state: State) -> Region | None:
    """The trapping region assigned to a collapse-flow initial condition.

    Returns None on the separating lines y = 3x/2, y = x and x = 2y/3,
    where no region applies (the explicit solutions cover the meaningful
    boundary cases).
    """
    if params.kind is not FlowKind.COLLAPSE:
        raise ValueError("trapping regions apply to the collapse flow only")
    x, y = state.alpha, state.beta
    if params.product == -2.0:
        return Region("K", x, y)
    if x < 2.0 / 3.0 * y:
        return Region("K1", x, y)
    if x < y < 1.5 * x:
        return Region("K2", x)
    if y < x:
        return Region("K3", x, y)
    return None


def _edges(region: Region):
    """Boundary edges with x > 0 in the interior, as (p0, p1, inward normal)."""
    v, w = region.v, region.w
    if region.tag == "K":
        return [
            ((0.0, w), (v, w), (0.0, 1.0)),
            ((v, w), (0.0, w + v), _unit((-1.0, -1.0))),
        ]
    if region.tag == "K1":
        return [
            ((0.0, w), (v, w), (0.0, -1.0)),
            ((0.0, w - 1.5 * v), (v, w), _unit((-1.5, 1.0))),
        ]
    if region.tag == "K2":
        return [
            ((0.0, 0.0), (v, v), _unit((-1.0, 1.0))),
            ((0.0, 0.0), (v, 1.5 * v), _unit((1.5, -1.0))),
            ((v, v), (v, 1.5 * v), (-1.0, 0.0)),
        ]
    return [
        ((0.0, 0.0), (v, v), _unit((1.0, -1.0))),
        ((0.0, 0.0), (v, w), _unit((-w / v, 1.0))),
        ((v, w), (v, v), (-1.0, 0.0)),
    ]


def _unit(n):
    norm = math.hypot(*n)
    return (n[0] / norm, n[1] / norm)


def inward_flux_check(region: Region, params: FlowParams, n_samples: int = 1000):
    """Sample boundary points with x > 0 and return those where the field
    has a strictly outward component (beyond a 1e-12 rounding allowance).

    Corners are excluded by offsetting samples from the edge endpoints.
    """
    if params.kind is not FlowKind.COLLAPSE:
        raise ValueError("inward flux certification applies to the collapse flow only")
    violations = []
    for p0, p1, normal in _edges(region):
        for i in range(1, n_samples + 1):
            s = i / (n_samples + 1)
            x = p0[0] + s * (p1[0] - p0[0])
            y = p0[1] + s * (p1[1] - p0[1])
            if x <= 0.0 or y <= 0.0:
                continue
            fx, fy = vector_field(params, (x, y))
            if fx * normal[0] + fy * normal[1] < -1e-12:
                violations.append((x, y))
    return violations


def _distance_outside(region: Region, point) -> float:
    if region_contains(region, point):
        return 0.0
    verts = region.vertices()
    return min(
        _segment_distance(point, verts[i], verts[(i + 1) % 3]) for i in range(3)
    )


def _segment_distance(p, a, b):
    px, py = p[0] - a[0], p[1] - a[1]
    dx, dy = b[0] - a[0], b[1] - a[1]
    denom = dx * dx + dy * dy
    s = 0.0 if denom == 0.0 else max(0.0, min(1.0, (px * dx + py * dy) / denom))
    return math.hypot(px - s * dx, py - s * dy)


def containment_report(trajectory, region: Region) -> float:
    """Maximum distance by which any trajectory sample leaves the region."""
    return max(
        _distance_outside(region, (state.alpha, state.beta))
        for state, _ in trajectory.samples
    )


def axis_extent(region: Region) -> tuple[float, float] | None:
    """The y-interval the region meets on the x = 0 axis, or None if the
    region touches the axis only at the origin.

    For a trapped fiber-collapse trajectory this brackets the limiting
    base scale.
    """
    v, w = region.v, region.w
    if region.tag == "K":
        return (w, w + v)
    if region.tag == "K1":
        return (w - 1.5 * v, w)
    return None


def sample_portrait(params: FlowParams, x_range, y_range, nx: int, ny: int):
    """Evaluate the field on a grid for plotting.

    Returns (points, directions, magnitudes): points is (nx*ny, 2),
    directions are unit vectors, magnitudes the field norms (reported
    separately so plots can use a log scale).
    """
    x_lo, x_hi = x_range
    y_lo, y_hi = y_range
    if x_lo <= 0 or y_lo <= 0:
        raise ValueError("portrait grid must lie in the open first quadrant")
    if nx < 1 or ny < 1:
        raise ValueError("grid counts must be positive")
    xs = np.linspace(x_lo, x_hi, nx)
    ys = np.linspace(y_lo, y_hi, ny)
    points = np.array([(x, y) for x in xs for y in ys])
    field = np.array([vector_field(params, p) for p in points])
    mags = np.hypot(field[:, 0], field[:, 1])
    dirs = np.where(mags[:, None] > 0.0, field / np.where(mags[:, None] == 0.0, 1.0, mags[:, None]), 0.0)
    return points, dirs, mags
