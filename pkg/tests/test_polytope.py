import math

import numpy as np
import pytest

from uavsim.airframe import GRAVITY, AirframeModel, RotorSpec, preset
from uavsim.analysis import (ConvexPolytope, acceleration_set, cross_section, force_set, moment_set,
                             omni_acceleration_radius, plane_basis)
from uavsim.errors import CapacityError
from uavsim.rotation import quat_from_axis_angle, quat_from_yaw, quat_to_matrix

from conftest import random_airframe, single_rotor
from oracles import corner_images, hull_equations, hull_vertices, lp_ray_radius, max_pairing_distance


def _check_invariants(poly, tol=1e-9):
    assert np.all(poly.slack(poly.vertices) >= -tol * max(1.0, poly.scale))
    if poly.dimension == 3:
        tight = np.abs(poly.slack(poly.vertices)) <= tol * max(1.0, poly.scale)
        assert np.all(tight.sum(axis=0) >= 3)
    assert np.allclose(np.linalg.norm(poly.normals, axis=1), 1.0)


@pytest.mark.parametrize("name", ["quad-flat", "hex-tilt20", "octo-fa"])
@pytest.mark.parametrize("which", ["force", "moment"])
def test_matches_corner_hull(name, which):
    model = preset(name)
    rows = model.effectiveness[:3] if which == "force" else model.effectiveness[3:]
    poly = force_set(model) if which == "force" else moment_set(model)
    lo, hi = model.thrust_bounds
    pts = corner_images(rows, lo, hi)
    ref = hull_vertices(pts)
    assert len(ref) == len(poly.vertices)
    assert max_pairing_distance(poly.vertices, ref) <= 1e-9
    # every corner image is inside, every vertex is a corner image
    assert np.all(poly.contains(pts, tol=1e-9))
    d = np.linalg.norm(poly.vertices[:, None] - pts[None], axis=2).min(axis=1)
    assert d.max() <= 1e-9
    _check_invariants(poly)


def test_random_airframes_match_corner_hull():
    rng = np.random.default_rng(21)
    for _ in range(25):
        model = random_airframe(rng, bidirectional=bool(rng.integers(2)))
        lo, hi = model.thrust_bounds
        for rows, poly in ((model.effectiveness[:3], force_set(model)), (model.effectiveness[3:], moment_set(model))):
            ref = hull_vertices(corner_images(rows, lo, hi))
            assert max_pairing_distance(poly.vertices, ref) <= 1e-9
            _check_invariants(poly)


def test_quad_force_set_is_segment(quad):
    fs = force_set(quad)
    assert fs.dimension == 1
    assert max_pairing_distance(fs.vertices, np.array([[0, 0, 0], [0, 0, 20.0]])) <= 1e-12


def test_bidirectional_single_rotor():
    fs = force_set(single_rotor(axis=(1, 0, 0), lo=-3.0, hi=3.0))
    assert fs.dimension == 1
    assert max_pairing_distance(fs.vertices, np.array([[-3.0, 0, 0], [3.0, 0, 0]])) <= 1e-12
    assert fs.contains([[0.5, 0, 0]])[0]
    assert not fs.contains([[0.5, 0.001, 0]])[0]


def test_flat_set_dimension():
    rotors = [RotorSpec((0, 0, 0), (1, 0, 0)), RotorSpec((0, 0, 0), (0, 1, 0)), RotorSpec((0, 0, 0), (0.6, 0.8, 0))]
    fs = force_set(AirframeModel(rotors=rotors, mass=1.0, inertia=np.eye(3)))
    assert fs.dimension == 2
    rows = np.array([[1, 0, 0.6], [0, 1, 0.8], [0, 0, 0]])
    ref = hull_vertices(corner_images(rows, np.zeros(3), np.full(3, 8.0)))
    assert max_pairing_distance(fs.vertices, ref) <= 1e-9
    assert not fs.contains([[1.0, 1.0, 1e-6]])[0]


def test_point_set():
    poly = ConvexPolytope.zonotope([1.0, 2.0, 3.0], np.zeros((3, 2)))
    assert poly.dimension == 0
    assert poly.contains([[1, 2, 3]])[0]


def test_central_symmetry():
    rng = np.random.default_rng(22)
    for _ in range(10):
        model = random_airframe(rng, bidirectional=True)
        for poly in (force_set(model), moment_set(model)):
            assert max_pairing_distance(poly.vertices, -poly.vertices) <= 1e-9


def test_monotone_in_thrust_interval():
    rng = np.random.default_rng(23)
    for _ in range(10):
        model = random_airframe(rng)
        k = int(rng.integers(model.n_rotors))
        rotors = list(model.rotors)
        r = rotors[k]
        rotors[k] = RotorSpec(r.position, r.axis, r.spin_direction, r.thrust_coefficient, r.torque_to_thrust_ratio,
                              r.thrust_min - 1.0, r.thrust_max + 2.0)
        bigger = AirframeModel(rotors=rotors, mass=model.mass, inertia=model.inertia)
        assert np.all(force_set(bigger).contains(force_set(model).vertices))
        assert np.all(moment_set(bigger).contains(moment_set(model).vertices))


def test_capacity_limit():
    rotors = [RotorSpec((0.1 * i, 0, 0), (0, 0, 1)) for i in range(17)]
    with pytest.raises(CapacityError):
        force_set(AirframeModel(rotors=rotors, mass=1.0, inertia=np.eye(3)))


def test_from_points_matches_box():
    cube = ConvexPolytope.box([0, 0, 0], [1, 1, 1])
    rng = np.random.default_rng(24)
    pts = np.vstack((cube.vertices, rng.uniform(0, 1, size=(50, 3))))
    hull = ConvexPolytope.from_points(pts)
    assert len(hull.vertices) == 8
    assert len(hull.normals) == 6
    assert max_pairing_distance(hull.vertices, cube.vertices) <= 1e-12


def test_edges_of_cube():
    cube = ConvexPolytope.box([0, 0, 0], [1, 1, 1])
    edges = cube.edges()
    assert len(edges) == 12
    for i, j in edges:
        assert np.linalg.norm(cube.vertices[i] - cube.vertices[j]) == pytest.approx(1.0)
    assert len(cube.face_vertex_indices()) == 6


# cross sections

def test_cube_slice():
    sec = cross_section(ConvexPolytope.box([0, 0, 0], [1, 1, 1]), [0, 0, 1], 0.5)
    assert len(sec.points) == 4
    assert sec.area == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(sec.to_world()[:, 2], 0.5)


def test_slice_miss():
    sec = cross_section(ConvexPolytope.box([0, 0, 0], [1, 1, 1]), [0, 0, 1], 1.5)
    assert sec.empty
    assert sec.area == 0.0


def test_slice_counter_clockwise():
    sec = cross_section(ConvexPolytope.box([-1, -1, -1], [1, 1, 1]), [1, 1, 1] / np.sqrt(3), 0.0)
    assert len(sec.points) == 6
    x, y = sec.points[:, 0], sec.points[:, 1]
    assert x @ np.roll(y, -1) - y @ np.roll(x, -1) > 0


def test_plane_basis_orthonormal():
    rng = np.random.default_rng(25)
    for n in [np.array([0, 0, 1.0]), *rng.normal(size=(20, 3))]:
        n = n / np.linalg.norm(n)
        u, w = plane_basis(n)
        M = np.vstack((u, w, n))
        assert np.allclose(M @ M.T, np.eye(3), atol=1e-12)
    u, w = plane_basis(np.array([0, 0, 1.0]))
    assert np.allclose(u, [1, 0, 0]) and np.allclose(w, [0, 1, 0])


def test_hover_slice_area_monte_carlo(hexa):
    fz = hexa.mass * GRAVITY
    sec = cross_section(force_set(hexa), [0, 0, 1], fz)
    lo, hi = hexa.thrust_bounds
    pts = corner_images(hexa.effectiveness[:3], lo, hi)
    A, b = hull_equations(pts)
    # sample the full set's x/y extent so the estimate does not lean on the slice under test
    xmin, ymin = pts[:, :2].min(axis=0)
    xmax, ymax = pts[:, :2].max(axis=0)
    rng = np.random.default_rng(26)
    n = 10 ** 6
    xy = rng.uniform([xmin, ymin], [xmax, ymax], size=(n, 2))
    P = np.column_stack((xy, np.full(n, fz)))
    inside = np.all(P @ A.T <= b + 1e-9, axis=1)
    estimate = inside.mean() * (xmax - xmin) * (ymax - ymin)
    assert sec.area == pytest.approx(estimate, rel=0.01)


@pytest.mark.parametrize("name", ["hex-tilt20", "octo-fa"])
@pytest.mark.parametrize("axis", [0, 1, 2])
def test_slice_area_continuous(name, axis):
    fs = force_set(preset(name))
    n = np.eye(3)[axis]
    lo, hi = (fs.vertices @ n).min(), (fs.vertices @ n).max()
    for b in np.linspace(lo, hi, 9)[1:-1]:
        a0 = cross_section(fs, n, b).area
        a1 = cross_section(fs, n, b + 1e-4).area
        assert abs(a1 - a0) < 0.01 * a0


# acceleration sets

def test_quad_radius_zero(quad):
    r, acc = omni_acceleration_radius(quad)
    assert r == 0.0
    assert acc.dimension == 1


def test_radius_zero_when_cannot_hover():
    heavy = preset("hex-tilt20")
    heavy = AirframeModel(rotors=heavy.rotors, mass=10.0, inertia=heavy.inertia)
    r, acc = omni_acceleration_radius(heavy)
    assert r == 0.0
    assert not acc.contains([[0, 0, 0]])[0]


def test_acceleration_set_is_affine_image(hexa):
    q = quat_from_axis_angle([1, -1, 0.5], 0.4)
    acc = acceleration_set(hexa, q)
    lo, hi = hexa.thrust_bounds
    pts = corner_images(quat_to_matrix(q) @ hexa.effectiveness[:3] / hexa.mass, lo, hi) + np.array([0, 0, -GRAVITY])
    assert max_pairing_distance(acc.vertices, hull_vertices(pts)) <= 1e-9


def test_radius_yaw_invariant(hexa):
    r0, _ = omni_acceleration_radius(hexa)
    rng = np.random.default_rng(27)
    for yaw in rng.uniform(-math.pi, math.pi, size=10):
        r, _ = omni_acceleration_radius(hexa, quat_from_yaw(yaw))
        assert r == pytest.approx(r0, abs=1e-6)


def test_radius_matches_ray_oracle_octo(octo):
    lo, hi = octo.thrust_bounds
    r, _ = omni_acceleration_radius(octo)
    est = lp_ray_radius(octo.effectiveness[:3], lo, hi, octo.mass, 500, seed=1)
    # ray lengths bound the inscribed radius from above
    assert est >= r - 1e-9
    assert est == pytest.approx(r, rel=0.02)


def test_radius_is_inscribed_ball(hexa):
    r, acc = omni_acceleration_radius(hexa)
    rng = np.random.default_rng(28)
    d = rng.normal(size=(2000, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    assert np.all(acc.contains(0.999999 * r * d))
    k = int(np.argmin(acc.offsets))
    assert not acc.contains([1.0001 * r * acc.normals[k]])[0]
