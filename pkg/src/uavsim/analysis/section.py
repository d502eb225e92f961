"""Planar cross-sections of convex polytopes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .polytope import ConvexPolytope, plane_basis


@dataclass(frozen=True, eq=False)
class Polygon:
    """Planar polygon: ``points`` are (u, w) coordinates about ``origin`` in the basis ``(u, w)``."""

    points: np.ndarray
    origin: np.ndarray
    u: np.ndarray
    w: np.ndarray

    @property
    def empty(self) -> bool:
        return len(self.points) == 0

    @property
    def area(self) -> float:
        if len(self.points) < 3:
            return 0.0
        x, y = self.points[:, 0], self.points[:, 1]
        return 0.5 * abs(float(x @ np.roll(y, -1) - y @ np.roll(x, -1)))

    def to_world(self) -> np.ndarray:
        return self.origin + self.points[:, :1] * self.u + self.points[:, 1:] * self.w


def cross_section(poly: ConvexPolytope, plane_normal, plane_offset: float) -> Polygon:
    """Intersection of ``poly`` with ``{x : n . x = offset}``, counter-clockwise about ``n``.

    Edges crossing the plane are clipped; vertices lying on it are kept. The
    result is empty when the plane misses the polytope.
    """
    n = np.asarray(plane_normal, dtype=float)
    n = n / np.linalg.norm(n)
    u, w = plane_basis(n)
    origin = plane_offset * n
    V = poly.vertices
    tol = 1e-12 * poly.scale
    s = V @ n - plane_offset
    hits = [V[k] for k in np.flatnonzero(np.abs(s) <= tol)]
    for i, j in poly.edges():
        if (s[i] > tol and s[j] < -tol) or (s[i] < -tol and s[j] > tol):
            t = s[i] / (s[i] - s[j])
            hits.append(V[i] + t * (V[j] - V[i]))
    if not hits:
        return Polygon(np.zeros((0, 2)), origin, u, w)
    pts = np.array(hits)
    rel = pts - origin
    uv = np.column_stack((rel @ u, rel @ w))
    uv = _unique_rows(uv, 1e-9 * poly.scale)
    if len(uv) >= 3:
        c = uv.mean(axis=0)
        uv = uv[np.argsort(np.arctan2(uv[:, 1] - c[1], uv[:, 0] - c[0]), kind="stable")]
    return Polygon(uv, origin, u, w)


def _unique_rows(uv, tol):
    out = []
    for p in uv:
        if not any(np.max(np.abs(p - q)) <= tol for q in out):
            out.append(p)
    return np.array(out)
