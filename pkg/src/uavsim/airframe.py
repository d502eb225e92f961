"""Vehicle description: rotors, mass properties and the actuation map.

Frames follow the ENU convention: body x forward, y left, z up; the world
frame is East-North-Up with gravity along -z.

Rotor reaction torque convention: a rotor with ``spin_direction = +1``
produces a drag moment ``+c * u`` along its own thrust axis, ``-1`` the
opposite. Pick the sign per rotor so that it matches the physical propeller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from functools import cached_property

import numpy as np

from .errors import ConstraintError, UnknownKeyError
from .rotation import rotation_about

GRAVITY = 9.80665
GRAVITY_VEC = np.array([0.0, 0.0, -GRAVITY])
RANK_TOL = 1e-9


def _vec(value, size=3):
    arr = np.array(value, dtype=float).reshape(size)
    arr.setflags(write=False)
    return arr


class _ArrayEq:
    """Field-wise equality for frozen dataclasses that hold numpy arrays."""

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        for f in fields(self):
            if not f.compare:
                continue
            a, b = getattr(self, f.name), getattr(other, f.name)
            if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
                if not np.array_equal(a, b):
                    return False
            elif a != b:
                return False
        return True

    __hash__ = None


@dataclass(frozen=True, eq=False)
class RotorSpec(_ArrayEq):
    position: np.ndarray
    axis: np.ndarray
    spin_direction: int = 1
    thrust_coefficient: float = 1e-5
    torque_to_thrust_ratio: float = 0.02
    thrust_min: float = 0.0
    thrust_max: float = 8.0

    def __post_init__(self):
        object.__setattr__(self, "position", _vec(self.position))
        object.__setattr__(self, "axis", _vec(self.axis))
        if abs(np.linalg.norm(self.axis) - 1.0) > 1e-9:
            raise ValueError(f"rotor axis must be unit length, got |axis| = {np.linalg.norm(self.axis)}")
        if self.spin_direction not in (1, -1):
            raise ValueError("spin_direction must be +1 or -1")
        if not self.thrust_max > self.thrust_min:
            raise ValueError("thrust_max must exceed thrust_min")
        if self.thrust_min > 0:
            raise ValueError("thrust_min must be 0 (unidirectional) or negative (bidirectional)")
        if not self.thrust_coefficient > 0:
            raise ValueError("thrust_coefficient must be positive")
        if self.torque_to_thrust_ratio < 0:
            raise ValueError("torque_to_thrust_ratio must be non-negative")

    @property
    def bidirectional(self) -> bool:
        return self.thrust_min < 0


@dataclass(frozen=True, eq=False)
class AirframeModel(_ArrayEq):
    rotors: tuple
    mass: float
    inertia: np.ndarray
    end_effector_offset: np.ndarray = field(default_factory=lambda: np.zeros(3))
    linear_drag_coefficient: float = 0.0
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "rotors", tuple(self.rotors))
        J = np.array(self.inertia, dtype=float).reshape(3, 3)
        J.setflags(write=False)
        object.__setattr__(self, "inertia", J)
        object.__setattr__(self, "end_effector_offset", _vec(self.end_effector_offset))
        if not self.rotors:
            raise ValueError("an airframe needs at least one rotor")
        if not self.mass > 0:
            raise ValueError("mass must be positive")
        if np.max(np.abs(J - J.T)) > 1e-12:
            raise ValueError("inertia must be symmetric")
        if np.linalg.eigvalsh(J).min() <= 0:
            raise ValueError("inertia must be positive definite")
        if self.linear_drag_coefficient < 0:
            raise ValueError("linear_drag_coefficient must be non-negative")

    @property
    def n_rotors(self) -> int:
        return len(self.rotors)

    @cached_property
    def effectiveness(self) -> np.ndarray:
        B = effectiveness_matrix(self)
        B.setflags(write=False)
        return B

    @cached_property
    def inertia_inv(self) -> np.ndarray:
        return np.linalg.inv(self.inertia)

    @cached_property
    def thrust_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.array([r.thrust_min for r in self.rotors])
        hi = np.array([r.thrust_max for r in self.rotors])
        return lo, hi

    @cached_property
    def rank(self) -> int:
        return actuation_rank(self)

    @property
    def fully_actuated(self) -> bool:
        return self.rank == 6


@dataclass(frozen=True)
class Wrench:
    """Force (N) and moment (N m) pair."""

    force: np.ndarray
    moment: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "force", _vec(self.force))
        object.__setattr__(self, "moment", _vec(self.moment))
        if not (np.all(np.isfinite(self.force)) and np.all(np.isfinite(self.moment))):
            raise ValueError("wrench components must be finite")

    def as_vector(self) -> np.ndarray:
        return np.concatenate((self.force, self.moment))

    @classmethod
    def from_vector(cls, w) -> "Wrench":
        w = np.asarray(w, dtype=float)
        return cls(w[:3], w[3:6])


def effectiveness_matrix(model: AirframeModel) -> np.ndarray:
    """6 x n map from rotor thrusts (N) to the body wrench [force; moment]."""
    B = np.empty((6, model.n_rotors))
    for i, rotor in enumerate(model.rotors):
        a = rotor.axis
        B[:3, i] = a
        B[3:, i] = np.cross(rotor.position, a) + rotor.spin_direction * rotor.torque_to_thrust_ratio * a
    return B


def actuation_rank(model: AirframeModel) -> int:
    s = np.linalg.svd(effectiveness_matrix(model), compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > RANK_TOL * s[0]))


def is_fully_actuated(model: AirframeModel) -> bool:
    return actuation_rank(model) == 6


def thrust_from_speed(spec: RotorSpec, speed: float, direction: int = 1) -> float:
    """Thrust for a rotor speed in rad/s; ``direction=-1`` reverses a bidirectional rotor."""
    if speed < 0:
        raise ValueError("rotor speed must be non-negative")
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    if direction < 0 and not spec.bidirectional:
        raise ValueError("only bidirectional rotors can reverse thrust")
    return direction * spec.thrust_coefficient * speed * speed


def speed_from_thrust(spec: RotorSpec, thrust: float) -> tuple[float, int]:
    """Inverse of :func:`thrust_from_speed`; returns ``(speed, direction)``."""
    if not spec.thrust_min <= thrust <= spec.thrust_max:
        raise ValueError(
            f"thrust {thrust} N outside rotor bounds [{spec.thrust_min}, {spec.thrust_max}]"
        )
    direction = -1 if thrust < 0 else 1
    return math.sqrt(abs(thrust) / spec.thrust_coefficient), direction


# ---------------------------------------------------------------------------
# presets


def _radial_airframe(name, n, arm, tilt_deg, mass, inertia, thrust_max, *,
                     c=0.02, ee=(0.0, 0.0, 0.0), drag=0.1):
    """n arms evenly spaced from +x; each axis tilted about its own arm by an alternating angle."""
    rotors = []
    for i in range(n):
        psi = 2 * math.pi * i / n
        arm_dir = np.array([math.cos(psi), math.sin(psi), 0.0])
        sign = 1 if i % 2 == 0 else -1
        axis = rotation_about(arm_dir, sign * math.radians(tilt_deg)) @ np.array([0.0, 0.0, 1.0])
        rotors.append(RotorSpec(
            position=arm * arm_dir,
            axis=axis / np.linalg.norm(axis),
            spin_direction=sign,
            thrust_coefficient=1e-5,
            torque_to_thrust_ratio=c,
            thrust_min=0.0,
            thrust_max=thrust_max,
        ))
    return AirframeModel(rotors=rotors, mass=mass, inertia=np.diag(inertia),
                         end_effector_offset=ee, linear_drag_coefficient=drag, name=name)


def quad_flat() -> AirframeModel:
    """Conventional plus-configuration quadrotor, arms 0.25 m on +-x / +-y."""
    rotors = []
    for i, (x, y) in enumerate([(0.25, 0.0), (0.0, 0.25), (-0.25, 0.0), (0.0, -0.25)]):
        rotors.append(RotorSpec(position=(x, y, 0.0), axis=(0.0, 0.0, 1.0),
                                spin_direction=1 if i % 2 == 0 else -1,
                                thrust_coefficient=1e-5, torque_to_thrust_ratio=0.02,
                                thrust_min=0.0, thrust_max=5.0))
    return AirframeModel(rotors=rotors, mass=1.0, inertia=np.diag([0.01, 0.01, 0.02]),
                         end_effector_offset=(0.2, 0.0, 0.0), linear_drag_coefficient=0.1,
                         name="quad-flat")


def hex_tilt20() -> AirframeModel:
    """Hexarotor with arms every 60 deg and rotors tilted +-20 deg about their arms."""
    return _radial_airframe("hex-tilt20", 6, 0.4, 20.0, 2.0, [0.06, 0.06, 0.1], 8.0,
                            ee=(0.4, 0.0, 0.0))


def octo_fa() -> AirframeModel:
    """Fully-actuated octorotor, rotors tilted +-30 deg about their arms."""
    return _radial_airframe("octo-fa", 8, 0.35, 30.0, 2.5, [0.1, 0.1, 0.16], 8.0,
                            ee=(0.4, 0.0, 0.0))


PRESETS = {
    "quad-flat": quad_flat,
    "hex-tilt20": hex_tilt20,
    "octo-fa": octo_fa,
}


def preset(name: str) -> AirframeModel:
    try:
        return PRESETS[name]()
    except KeyError:
        raise KeyError(f"unknown airframe preset {name!r}; choose from {sorted(PRESETS)}") from None


# ---------------------------------------------------------------------------
# dict (de)serialization, shared by the airframe file and the scenario file

_ROTOR_KEYS = {f.name for f in fields(RotorSpec)}
_MODEL_KEYS = {"name", "rotors", "mass", "inertia", "end_effector_offset", "linear_drag_coefficient"}
_ROTOR_REQUIRED = {"position", "axis"}


def _check_keys(data, allowed, prefix):
    if not isinstance(data, dict):
        raise ConstraintError(f"{prefix or 'airframe'} must be a mapping", key=prefix or None)
    for k in data:
        if k not in allowed:
            where = f"{prefix}.{k}" if prefix else str(k)
            raise UnknownKeyError(f"unknown key {where!r}", key=where)


def _num_vector(value, key, size=3):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise ConstraintError(f"{key} must be a list of {size} numbers", key=key) from None
    if arr.shape != (size,) or not np.all(np.isfinite(arr)):
        raise ConstraintError(f"{key} must be a list of {size} finite numbers", key=key)
    return arr


def _num(value, key):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConstraintError(f"{key} must be a finite number", key=key)
    return float(value)


def airframe_from_dict(data: dict, prefix: str = "") -> AirframeModel:
    """Build a model from the mapping form used by airframe files.

    A mapping holding only ``preset: <name>`` (optionally with overrides for
    ``mass``, ``end_effector_offset`` etc.) starts from the named preset.
    """
    p = f"{prefix}." if prefix else ""
    _check_keys(data, _MODEL_KEYS | {"preset"}, prefix)
    if "preset" in data:
        name = data["preset"]
        if name not in PRESETS:
            raise ConstraintError(
                f"{p}preset must be one of {sorted(PRESETS)}, got {name!r}", key=f"{p}preset")
        base = airframe_to_dict(preset(name))
        base.update({k: v for k, v in data.items() if k != "preset"})
        data = base
    if "rotors" not in data or not isinstance(data["rotors"], list) or not data["rotors"]:
        raise ConstraintError(f"{p}rotors must be a non-empty list", key=f"{p}rotors")
    rotors = []
    for i, rd in enumerate(data["rotors"]):
        rp = f"{p}rotors[{i}]"
        _check_keys(rd, _ROTOR_KEYS, rp)
        missing = _ROTOR_REQUIRED - set(rd)
        if missing:
            raise ConstraintError(f"{rp} is missing {sorted(missing)}", key=f"{rp}.{sorted(missing)[0]}")
        kw = {}
        for k, v in rd.items():
            if k in ("position", "axis"):
                kw[k] = _num_vector(v, f"{rp}.{k}")
            elif k == "spin_direction":
                if v not in (1, -1) or isinstance(v, bool):
                    raise ConstraintError(f"{rp}.spin_direction must be +1 or -1", key=f"{rp}.spin_direction")
                kw[k] = int(v)
            else:
                kw[k] = _num(v, f"{rp}.{k}")
        try:
            rotors.append(RotorSpec(**kw))
        except ValueError as exc:
            raise ConstraintError(f"{rp}: {exc}", key=rp) from None
    kw = {"rotors": rotors}
    if "mass" not in data:
        raise ConstraintError(f"{p}mass is required", key=f"{p}mass")
    kw["mass"] = _num(data["mass"], f"{p}mass")
    if "inertia" not in data:
        raise ConstraintError(f"{p}inertia is required", key=f"{p}inertia")
    J = data["inertia"]
    try:
        J = np.array(J, dtype=float)
    except (TypeError, ValueError):
        raise ConstraintError(f"{p}inertia must be numeric", key=f"{p}inertia") from None
    if J.shape == (3,):
        J = np.diag(J)
    if J.shape != (3, 3):
        raise ConstraintError(f"{p}inertia must be a 3-list (diagonal) or a 3x3 matrix", key=f"{p}inertia")
    kw["inertia"] = J
    if "end_effector_offset" in data:
        kw["end_effector_offset"] = _num_vector(data["end_effector_offset"], f"{p}end_effector_offset")
    if "linear_drag_coefficient" in data:
        kw["linear_drag_coefficient"] = _num(data["linear_drag_coefficient"], f"{p}linear_drag_coefficient")
    if "name" in data:
        kw["name"] = str(data["name"])
    try:
        return AirframeModel(**kw)
    except ValueError as exc:
        raise ConstraintError(f"{prefix or 'airframe'}: {exc}", key=prefix or None) from None


def airframe_to_dict(model: AirframeModel) -> dict:
    return {
        "name": model.name,
        "mass": float(model.mass),
        "inertia": model.inertia.tolist(),
        "end_effector_offset": model.end_effector_offset.tolist(),
        "linear_drag_coefficient": float(model.linear_drag_coefficient),
        "rotors": [
            {
                "position": r.position.tolist(),
                "axis": r.axis.tolist(),
                "spin_direction": int(r.spin_direction),
                "thrust_coefficient": float(r.thrust_coefficient),
                "torque_to_thrust_ratio": float(r.torque_to_thrust_ratio),
                "thrust_min": float(r.thrust_min),
                "thrust_max": float(r.thrust_max),
            }
            for r in model.rotors
        ],
    }
