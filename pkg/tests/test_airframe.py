import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uavsim.airframe import (PRESETS, AirframeModel, RotorSpec, Wrench, actuation_rank, airframe_from_dict,
                             airframe_to_dict, effectiveness_matrix, is_fully_actuated, preset,
                             speed_from_thrust, thrust_from_speed)
from uavsim.errors import ConstraintError, UnknownKeyError
from uavsim.rotation import quat_from_axis_angle, quat_to_matrix

from conftest import random_airframe, single_rotor


def test_single_rotor_column():
    B = effectiveness_matrix(single_rotor(c=0.05))
    assert np.allclose(B[:, 0], [0, 0, 1, 0, 0, 0.05], atol=0, rtol=0)


def test_flat_quad_pattern():
    rotors = [RotorSpec(position=p, axis=(0, 0, 1), spin_direction=s, torque_to_thrust_ratio=0.0)
              for p, s in [((0.25, 0, 0), 1), ((0, 0.25, 0), -1), ((-0.25, 0, 0), 1), ((0, -0.25, 0), -1)]]
    model = AirframeModel(rotors=rotors, mass=1.0, inertia=np.eye(3) * 0.01)
    B = effectiveness_matrix(model)
    assert np.array_equal(B[:3], np.tile([[0], [0], [1]], 4))
    # Mx = y * Fz, My = -x * Fz for a vertical axis
    assert np.allclose(B[3], [0, 0.25, 0, -0.25])
    assert np.allclose(B[4], [-0.25, 0, 0.25, 0])
    assert np.allclose(B[5], 0)


def test_hex_full_rank(hexa):
    s = np.linalg.svd(effectiveness_matrix(hexa), compute_uv=False)
    assert s[5] > 1e-6
    assert actuation_rank(hexa) == 6
    assert is_fully_actuated(hexa)


def test_hex_geometry(hexa):
    for i, r in enumerate(hexa.rotors):
        psi = math.radians(60 * i)
        assert np.allclose(r.position, [0.4 * math.cos(psi), 0.4 * math.sin(psi), 0])
        # tilt of 20 degrees from vertical, rotated about the arm so the axis stays normal to it
        assert math.degrees(math.acos(r.axis[2])) == pytest.approx(20.0)
        assert abs(r.axis @ r.position) < 1e-12


def test_ranks(quad, hexa, octo):
    assert actuation_rank(quad) == 4
    assert not is_fully_actuated(quad)
    assert actuation_rank(octo) == 6
    assert actuation_rank(single_rotor()) <= 2
    assert actuation_rank(single_rotor(c=0.0)) == 1


def test_presets_by_name():
    for name in PRESETS:
        assert preset(name).name == name
    with pytest.raises(KeyError):
        preset("tricopter")


def test_thrust_speed_examples():
    spec = RotorSpec(position=(0, 0, 0), axis=(0, 0, 1), thrust_coefficient=1e-5, thrust_max=20.0)
    assert thrust_from_speed(spec, 1000.0) == pytest.approx(10.0)
    assert thrust_from_speed(spec, 0.0) == 0.0
    with pytest.raises(ValueError):
        speed_from_thrust(spec, 25.0)
    with pytest.raises(ValueError):
        speed_from_thrust(spec, -1.0)


def test_bidirectional_inverse_reports_sign():
    spec = RotorSpec(position=(0, 0, 0), axis=(1, 0, 0), thrust_min=-3.0, thrust_max=3.0)
    speed, direction = speed_from_thrust(spec, -2.0)
    assert direction == -1
    assert thrust_from_speed(spec, speed, direction) == pytest.approx(-2.0)


@given(st.floats(min_value=0.0, max_value=1400.0, allow_nan=False))
@settings(max_examples=100)
def test_speed_round_trip(speed):
    spec = RotorSpec(position=(0, 0, 0), axis=(0, 0, 1), thrust_coefficient=1e-5, thrust_max=20.0)
    back, _ = speed_from_thrust(spec, thrust_from_speed(spec, speed))
    assert back == pytest.approx(speed, rel=1e-9, abs=1e-12)


def test_linearity_in_thrust():
    rng = np.random.default_rng(1)
    for _ in range(20):
        model = random_airframe(rng)
        B = effectiveness_matrix(model)
        u1, u2 = rng.uniform(0, 5, size=(2, model.n_rotors))
        assert np.allclose(B @ (u1 + u2), B @ u1 + B @ u2, rtol=0, atol=1e-12)


def _rotated(model, R):
    rotors = [RotorSpec(position=R @ r.position, axis=R @ r.axis, spin_direction=r.spin_direction,
                        thrust_coefficient=r.thrust_coefficient,
                        torque_to_thrust_ratio=r.torque_to_thrust_ratio,
                        thrust_min=r.thrust_min, thrust_max=r.thrust_max) for r in model.rotors]
    return AirframeModel(rotors=rotors, mass=model.mass, inertia=model.inertia)


def test_wrench_equivariance():
    rng = np.random.default_rng(2)
    for _ in range(20):
        model = random_airframe(rng)
        q = rng.normal(size=4)
        R = quat_to_matrix(q / np.linalg.norm(q))
        B = effectiveness_matrix(model)
        Br = effectiveness_matrix(_rotated(model, R))
        assert np.allclose(Br[:3], R @ B[:3], atol=1e-9)
        assert np.allclose(Br[3:], R @ B[3:], atol=1e-9)


def test_rank_ignores_thrust_scaling():
    rng = np.random.default_rng(4)
    for _ in range(10):
        model = random_airframe(rng)
        scale = float(rng.uniform(0.1, 10.0))
        scaled = AirframeModel(
            rotors=[RotorSpec(position=r.position, axis=r.axis, spin_direction=r.spin_direction,
                              torque_to_thrust_ratio=r.torque_to_thrust_ratio,
                              thrust_min=r.thrust_min * scale, thrust_max=r.thrust_max * scale)
                    for r in model.rotors],
            mass=model.mass, inertia=model.inertia)
        assert actuation_rank(scaled) == actuation_rank(model)


def test_parallel_axes_give_collinear_forces(quad):
    rng = np.random.default_rng(5)
    B = effectiveness_matrix(quad)
    forces = (B[:3] @ rng.uniform(0, 5, size=(4, 30))).T
    assert np.allclose(forces[:, :2], 0)


@pytest.mark.parametrize("kwargs, match", [
    ({"axis": (0, 0, 2)}, "unit length"),
    ({"thrust_min": 1.0}, "thrust_min"),
    ({"thrust_min": 5.0, "thrust_max": 5.0}, "thrust_max"),
    ({"thrust_coefficient": 0.0}, "thrust_coefficient"),
    ({"torque_to_thrust_ratio": -0.1}, "torque_to_thrust_ratio"),
    ({"spin_direction": 0}, "spin_direction"),
])
def test_rotor_validation(kwargs, match):
    base = {"position": (0, 0, 0), "axis": (0, 0, 1)}
    with pytest.raises(ValueError, match=match):
        RotorSpec(**{**base, **kwargs})


def test_model_validation():
    rotor = RotorSpec(position=(0, 0, 0), axis=(0, 0, 1))
    with pytest.raises(ValueError, match="symmetric"):
        AirframeModel(rotors=[rotor], mass=1.0, inertia=[[1, 0.1, 0], [0, 1, 0], [0, 0, 1]])
    with pytest.raises(ValueError, match="positive definite"):
        AirframeModel(rotors=[rotor], mass=1.0, inertia=np.diag([1, -1, 1]))
    with pytest.raises(ValueError, match="mass"):
        AirframeModel(rotors=[rotor], mass=0.0, inertia=np.eye(3))
    with pytest.raises(ValueError, match="at least one rotor"):
        AirframeModel(rotors=[], mass=1.0, inertia=np.eye(3))


def test_wrench_vector_round_trip():
    w = Wrench.from_vector([1, 2, 3, 4, 5, 6])
    assert np.array_equal(w.as_vector(), [1, 2, 3, 4, 5, 6])
    with pytest.raises(ValueError):
        Wrench([np.nan, 0, 0], [0, 0, 0])


def test_dict_round_trip(hexa, octo, quad):
    for model in (hexa, octo, quad):
        assert airframe_from_dict(airframe_to_dict(model)) == model


def test_dict_preset_with_override():
    model = airframe_from_dict({"preset": "hex-tilt20", "mass": 2.5})
    assert model.mass == 2.5
    assert model.n_rotors == 6


def test_dict_errors_name_the_key():
    with pytest.raises(UnknownKeyError) as info:
        airframe_from_dict({"preset": "quad-flat", "colour": "red"})
    assert info.value.key == "colour"
    data = airframe_to_dict(preset("quad-flat"))
    data["rotors"][2]["axis"] = [0, 0, 3]
    with pytest.raises(ConstraintError) as info:
        airframe_from_dict(data)
    assert info.value.key == "rotors[2]"
    data["rotors"][2]["axis"] = [0, 0, 1]
    data["inertia"] = [1, 2]
    with pytest.raises(ConstraintError) as info:
        airframe_from_dict(data)
    assert info.value.key == "inertia"
