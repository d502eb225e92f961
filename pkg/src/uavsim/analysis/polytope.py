"""Convex polytopes in R^3 held in both vertex and half-space form."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

RANK_TOL = 1e-9
_PARALLEL_TOL = 1e-10


def _scale(points) -> float:
    return max(1.0, float(np.max(np.abs(points)))) if len(points) else 1.0


def _affine_dimension(points, tol=RANK_TOL):
    """Affine rank of a point cloud with its centroid and principal directions."""
    pts = np.asarray(points, dtype=float)
    centroid = pts.mean(axis=0)
    if len(pts) < 2:
        return 0, centroid, np.eye(3)
    _, s, vt = np.linalg.svd(pts - centroid)
    if s[0] <= tol * _scale(pts):
        return 0, centroid, vt
    return int(np.sum(s > tol * max(s[0], 1.0))), centroid, vt


def _unique_directions(dirs):
    """Deduplicate unit vectors up to sign; returns one representative per line."""
    out = []
    for d in dirs:
        if not any(abs(float(d @ u)) > 1.0 - _PARALLEL_TOL for u in out):
            out.append(d)
    return out


def _complement_basis(directions):
    """Orthonormal basis of the orthogonal complement of span(directions)."""
    if len(directions) == 0:
        return np.eye(3)
    _, s, vt = np.linalg.svd(np.atleast_2d(directions))
    r = int(np.sum(s > RANK_TOL * s[0]))
    return vt[r:]


@dataclass(frozen=True, eq=False)
class ConvexPolytope:
    """``{x : normals @ x <= offsets}`` together with its extreme points.

    ``dimension`` is the affine dimension (0 point, 1 segment, 2 polygon,
    3 solid). Flat sets carry pairs of opposite facets that pin them to their
    affine hull.
    """

    vertices: np.ndarray
    normals: np.ndarray
    offsets: np.ndarray
    dimension: int

    def __post_init__(self):
        for name, shape in (("vertices", (-1, 3)), ("normals", (-1, 3)), ("offsets", (-1,))):
            arr = np.array(getattr(self, name), dtype=float).reshape(shape)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def facets(self) -> list[tuple[np.ndarray, float]]:
        return [(n, float(b)) for n, b in zip(self.normals, self.offsets)]

    @cached_property
    def scale(self) -> float:
        return _scale(self.vertices)

    def contains(self, points, tol: float = 1e-9) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.all(pts @ self.normals.T <= self.offsets + tol, axis=1)

    def slack(self, points) -> np.ndarray:
        """``offsets - normals @ x`` for every point/facet pair (non-negative inside)."""
        return self.offsets - np.atleast_2d(points) @ self.normals.T

    @cached_property
    def _tight(self) -> np.ndarray:
        return np.abs(self.slack(self.vertices)) <= 1e-9 * self.scale

    @cached_property
    def solid_facets(self) -> np.ndarray:
        """Indices of the facets that bound the set within its affine hull."""
        if self.dimension < 3:
            # pinning facets are tight at every vertex
            return np.flatnonzero(~np.all(self._tight, axis=0))
        return np.arange(len(self.offsets))

    def edges(self) -> list[tuple[int, int]]:
        if self.dimension == 0:
            return []
        if self.dimension == 1:
            return [(0, 1)]
        if self.dimension == 2:
            order = self.face_vertex_indices()[0]
            return [(order[i], order[(i + 1) % len(order)]) for i in range(len(order))]
        T = self._tight.astype(int)
        shared = T @ T.T
        iu, ju = np.nonzero(np.triu(shared >= 2, k=1))
        return list(zip(iu.tolist(), ju.tolist()))

    def face_vertex_indices(self) -> list[list[int]]:
        """Vertex indices of each face, ordered counter-clockwise about the outward normal.

        A solid yields one list per facet; a polygon yields a single face.
        """
        if self.dimension < 2:
            return []
        if self.dimension == 2:
            _, centroid, vt = _affine_dimension(self.vertices)
            normal = vt[2]
            return [_order_ccw(self.vertices, list(range(len(self.vertices))), normal)]
        faces = []
        for j, n in enumerate(self.normals):
            idx = np.flatnonzero(self._tight[:, j]).tolist()
            faces.append(_order_ccw(self.vertices, idx, n))
        return faces

    def affine(self, A, b) -> "ConvexPolytope":
        """Image under ``x -> A x + b`` for invertible ``A``."""
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        Ait = np.linalg.inv(A).T
        normals = self.normals @ Ait.T
        norms = np.linalg.norm(normals, axis=1)
        normals = normals / norms[:, None]
        offsets = self.offsets / norms + normals @ b
        return ConvexPolytope(self.vertices @ A.T + b, normals, offsets, self.dimension)

    # ------------------------------------------------------------------ builders

    @classmethod
    def zonotope(cls, center, generators) -> "ConvexPolytope":
        """``center + sum_i t_i g_i`` for ``t_i`` in [-1, 1]; generators are columns of a 3 x n array."""
        c = np.asarray(center, dtype=float)
        G = np.asarray(generators, dtype=float).reshape(3, -1)
        scale = max(1.0, float(np.abs(c).max()), float(np.abs(G).sum(axis=1).max()))
        keep = np.linalg.norm(G, axis=0) > RANK_TOL * scale
        G = G[:, keep]
        if G.shape[1] == 0:
            return cls._point(c)
        U, s, _ = np.linalg.svd(G)
        dim = int(np.sum(s > RANK_TOL * s[0]))
        units = G / np.linalg.norm(G, axis=0)
        if dim == 1:
            d = units[:, 0]
            half = float(np.abs(d @ G).sum())
            ends = np.array([c - half * d, c + half * d])
            return cls._segment(ends, d)
        if dim == 2:
            p = U[:, 2]
            cand = [np.cross(p, u) for u in _unique_directions(units.T)]
            cand = [n / np.linalg.norm(n) for n in cand]
            pin = [p]
        else:
            cand = []
            for gi, gj in itertools.combinations(units.T, 2):
                n = np.cross(gi, gj)
                norm = np.linalg.norm(n)
                if norm > 1e-9:
                    cand.append(n / norm)
            cand = _unique_directions(cand)
            pin = []
        normals = []
        for n in cand:
            normals.extend((n, -n))
        normals = np.array(normals)
        offsets = normals @ c + np.abs(normals @ G).sum(axis=1)
        verts = _zonotope_vertices(c, G, normals, offsets, need=dim, scale=scale)
        if pin:
            p = pin[0]
            normals = np.vstack((normals, p, -p))
            offsets = np.concatenate((offsets, [p @ c, -(p @ c)]))
        return cls(verts, normals, offsets, dim)

    @classmethod
    def box(cls, lower, upper) -> "ConvexPolytope":
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        return cls.zonotope(0.5 * (lower + upper), np.diag(0.5 * (upper - lower)))

    @classmethod
    def from_points(cls, points) -> "ConvexPolytope":
        """Convex hull of an arbitrary point cloud (Qhull for the solid case)."""
        from scipy.spatial import ConvexHull

        pts = np.asarray(points, dtype=float).reshape(-1, 3)
        dim, centroid, vt = _affine_dimension(pts)
        if dim == 0:
            return cls._point(centroid)
        if dim == 1:
            d = vt[0]
            t = (pts - centroid) @ d
            return cls._segment(np.array([pts[np.argmin(t)], pts[np.argmax(t)]]), d)
        if dim == 2:
            u, w, p = vt[0], vt[1], vt[2]
            hull = ConvexHull(np.column_stack(((pts - centroid) @ u, (pts - centroid) @ w)))
            verts = pts[hull.vertices]
            normals, offsets = [], []
            for eq in hull.equations:
                n = eq[0] * u + eq[1] * w
                normals.append(n)
                offsets.append(-eq[2] + n @ centroid)
            normals += [p, -p]
            offsets += [p @ centroid, -(p @ centroid)]
            return cls(verts, normals, offsets, 2)
        hull = ConvexHull(pts)
        normals, offsets = [], []
        for eq in hull.equations:
            n, b = eq[:3], -eq[3]
            if not any(float(n @ m) > 1.0 - _PARALLEL_TOL and abs(b - o) < 1e-9 * _scale(pts)
                       for m, o in zip(normals, offsets)):
                normals.append(n)
                offsets.append(b)
        normals = np.array(normals)
        offsets = np.array(offsets)
        cand = pts[hull.vertices]
        tight = np.abs(offsets - cand @ normals.T) <= 1e-9 * _scale(pts)
        verts = cand[tight.sum(axis=1) >= 3]
        return cls(verts, normals, offsets, 3)

    @classmethod
    def _point(cls, c):
        eye = np.eye(3)
        return cls(np.atleast_2d(c), np.vstack((eye, -eye)), np.concatenate((c, -c)), 0)

    @classmethod
    def _segment(cls, ends, d):
        comp = _complement_basis(np.atleast_2d(d))
        normals = [d, -d]
        offsets = [max(ends @ d), -min(ends @ d)]
        for e in comp:
            normals += [e, -e]
            offsets += [float(e @ ends[0]), -float(e @ ends[0])]
        return cls(ends, normals, offsets, 1)


def _zonotope_vertices(c, G, normals, offsets, need, scale, chunk=8192):
    """Corner images tight on at least ``need`` distinct facets (vertices of the zonotope)."""
    n = G.shape[1]
    tol = 1e-9 * scale
    found = []
    for start in range(0, 2 ** n, chunk):
        idx = np.arange(start, min(start + chunk, 2 ** n))
        signs = ((idx[:, None] >> np.arange(n)) & 1) * 2.0 - 1.0
        pts = c + signs @ G.T
        tight = np.abs(offsets - pts @ normals.T) <= tol
        found.append(pts[tight.sum(axis=1) >= need])
    pts = np.vstack(found)
    return _dedupe(pts, tol)


def _dedupe(pts, tol):
    out = []
    for p in pts:
        if not any(np.max(np.abs(p - q)) <= tol for q in out):
            out.append(p)
    return np.array(out).reshape(-1, 3)


def _order_ccw(vertices, idx, normal):
    if len(idx) < 3:
        return list(idx)
    pts = vertices[idx]
    centroid = pts.mean(axis=0)
    u, w = plane_basis(normal)
    rel = pts - centroid
    ang = np.arctan2(rel @ w, rel @ u)
    return [idx[k] for k in np.argsort(ang, kind="stable")]


def plane_basis(normal) -> tuple[np.ndarray, np.ndarray]:
    """Right-handed orthonormal pair ``(u, w)`` spanning the plane normal to ``normal``.

    ``u`` comes from the coordinate axis least aligned with the normal, so the
    basis for a z normal is (x, y).
    """
    n = np.asarray(normal, dtype=float)
    n = n / np.linalg.norm(n)
    e = np.zeros(3)
    e[int(np.argmin(np.abs(n)))] = 1.0
    u = e - (e @ n) * n
    u /= np.linalg.norm(u)
    return u, np.cross(n, u)
