import csv

import numpy as np

from uavsim.analysis import ConvexPolytope, cross_section, force_set, read_off, write_off, write_polygon_csv


def test_off_round_trip(tmp_path, hexa):
    fs = force_set(hexa)
    path = tmp_path / "force.off"
    write_off(fs, path)
    verts, faces = read_off(path)
    assert np.array_equal(np.array(verts), fs.vertices)
    assert len(faces) == len(fs.normals)
    # each face lies in its facet plane
    for face in faces:
        pts = np.array(verts)[face]
        hits = np.abs(pts @ fs.normals.T - fs.offsets) <= 1e-9 * fs.scale
        assert np.any(np.all(hits, axis=0))


def test_off_face_orientation(tmp_path):
    cube = ConvexPolytope.box([0, 0, 0], [1, 1, 1])
    write_off(cube, tmp_path / "cube.off")
    verts, faces = read_off(tmp_path / "cube.off")
    V = np.array(verts)
    centre = V.mean(axis=0)
    for face in faces:
        a, b, c = V[face[:3]]
        normal = np.cross(b - a, c - a)
        assert normal @ (a - centre) > 0


def test_segment_off_has_no_faces(tmp_path, quad):
    write_off(force_set(quad), tmp_path / "seg.off")
    verts, faces = read_off(tmp_path / "seg.off")
    assert len(verts) == 2 and faces == []


def test_polygon_csv(tmp_path):
    sec = cross_section(ConvexPolytope.box([0, 0, 0], [1, 1, 1]), [0, 0, 1], 0.5)
    write_polygon_csv(sec, tmp_path / "slice.csv")
    with open(tmp_path / "slice.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x", "y"]
    assert np.array_equal(np.array(rows[1:], dtype=float), sec.points)
