"""File export for polytopes (OFF meshes) and cross-sections (CSV)."""

from __future__ import annotations

import csv
from pathlib import Path

from .polytope import ConvexPolytope
from .section import Polygon


def write_off(poly: ConvexPolytope, path) -> None:
    """OFF mesh: one polygonal face per facet; flat sets give one face, segments none."""
    faces = poly.face_vertex_indices()
    with open(Path(path), "w") as fh:
        fh.write("OFF\n")
        fh.write(f"{len(poly.vertices)} {len(faces)} 0\n")
        for v in poly.vertices:
            fh.write(" ".join(repr(float(x)) for x in v) + "\n")
        for f in faces:
            fh.write(" ".join(str(i) for i in [len(f), *f]) + "\n")


def read_off(path):
    """Parse an OFF file into ``(vertices, faces)`` lists."""
    tokens = [ln.split("#")[0].split() for ln in Path(path).read_text().splitlines()]
    tokens = [t for t in tokens if t]
    if tokens[0] != ["OFF"]:
        raise ValueError("not an OFF file")
    nv, nf, _ = (int(x) for x in tokens[1])
    verts = [[float(x) for x in tokens[2 + i]] for i in range(nv)]
    faces = [[int(x) for x in tokens[2 + nv + i][1:]] for i in range(nf)]
    return verts, faces


def write_polygon_csv(poly: Polygon, path) -> None:
    with open(Path(path), "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y"])
        for x, y in poly.points:
            writer.writerow([repr(float(x)), repr(float(y))])
