"""Collocation domains: uniform cell-centered grids with midpoint quadrature.

Covers the three geometries used by the scenarios: rectangular beam,
quarter-annulus shell, and half-annulus tissue section.  Cell-centered
points keep boundary-distance factors away from their zeros and give
second-order quadrature; weights include the volume measure (r dr dtheta
for cylindrical domains).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class BoundarySet:
    points: np.ndarray    # (m, 2) coordinates
    weights: np.ndarray   # (m,) boundary measure
    normal: np.ndarray    # (m, 2) outward normal, in the frame of coordinate_tag


@dataclass(frozen=True)
class Domain:
    points: np.ndarray    # (n, 2)
    weights: np.ndarray   # (n,) with volume measure
    boundary_sets: dict
    coordinate_tag: str   # "cartesian" | "cylindrical"
    geometry_params: dict = field(default_factory=dict)

    @property
    def n_points(self) -> int:
        return len(self.weights)

    def to_csv_rows(self):
        return np.column_stack([self.points, self.weights])


def _midpoints(a: float, b: float, n: int) -> np.ndarray:
    edges = np.linspace(a, b, n + 1)
    return 0.5 * (edges[:-1] + edges[1:])


def sample_beam(L: float, h: float, nx: int, ny: int) -> Domain:
    """Uniform nx-by-ny grid of a rectangular beam [0,L] x [-h/2, h/2];
    boundary set "right_end" samples the loaded end x = L."""
    if nx < 2 or ny < 2:
        raise DomainError("need nx, ny >= 2")
    if L <= 0 or h <= 0:
        raise DomainError("need positive beam dimensions")
    xs = _midpoints(0.0, L, nx)
    ys = _midpoints(-0.5 * h, 0.5 * h, ny)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([X.ravel(), Y.ravel()])
    w = np.full(len(pts), (L / nx) * (h / ny))
    right = BoundarySet(
        points=np.column_stack([np.full(ny, L), ys]),
        weights=np.full(ny, h / ny),
        normal=np.tile([1.0, 0.0], (ny, 1)),
    )
    left = BoundarySet(
        points=np.column_stack([np.zeros(ny), ys]),
        weights=np.full(ny, h / ny),
        normal=np.tile([-1.0, 0.0], (ny, 1)),
    )
    return Domain(pts, w, {"right_end": right, "left_end": left}, "cartesian",
                  {"L": L, "h": h, "nx": nx, "ny": ny})


def sample_annulus(r_i: float, r_o: float, theta_span: float, nr: int, nt: int) -> Domain:
    """Cell-centered (r, theta) grid of an annular sector with weights
    r dr dtheta; boundary sets sample the outer/inner surfaces and the two
    straight symmetry edges."""
    if r_i <= 0:
        raise DomainError(f"inner radius must be positive, got {r_i}")
    if not r_i < r_o:
        raise DomainError("need r_i < r_o")
    if theta_span <= 0:
        raise DomainError("need a positive angular span")
    if nr < 2 or nt < 2:
        raise DomainError("need nr, nt >= 2")
    rs = _midpoints(r_i, r_o, nr)
    ts = _midpoints(0.0, theta_span, nt)
    R, T = np.meshgrid(rs, ts, indexing="ij")
    dr = (r_o - r_i) / nr
    dt = theta_span / nt
    pts = np.column_stack([R.ravel(), T.ravel()])
    w = R.ravel() * dr * dt
    outer = BoundarySet(
        points=np.column_stack([np.full(nt, r_o), ts]),
        weights=np.full(nt, r_o * dt),
        normal=np.tile([1.0, 0.0], (nt, 1)),
    )
    inner = BoundarySet(
        points=np.column_stack([np.full(nt, r_i), ts]),
        weights=np.full(nt, r_i * dt),
        normal=np.tile([-1.0, 0.0], (nt, 1)),
    )
    edge0 = BoundarySet(
        points=np.column_stack([rs, np.zeros(nr)]),
        weights=np.full(nr, dr),
        normal=np.tile([0.0, -1.0], (nr, 1)),
    )
    edge1 = BoundarySet(
        points=np.column_stack([rs, np.full(nr, theta_span)]),
        weights=np.full(nr, dr),
        normal=np.tile([0.0, 1.0], (nr, 1)),
    )
    return Domain(pts, w,
                  {"outer_surface": outer, "inner_surface": inner,
                   "edge_theta0": edge0, "edge_theta1": edge1},
                  "cylindrical",
                  {"r_i": r_i, "r_o": r_o, "theta_span": theta_span,
                   "nr": nr, "nt": nt})
