"""Attainable force, moment and acceleration sets of an airframe."""

from __future__ import annotations

import numpy as np

from ..airframe import GRAVITY_VEC, AirframeModel
from ..errors import CapacityError
from ..rotation import IDENTITY, quat_to_matrix
from .polytope import ConvexPolytope

MAX_ROTORS = 16


def _box_image(rows: np.ndarray, model: AirframeModel) -> ConvexPolytope:
    if model.n_rotors > MAX_ROTORS:
        raise CapacityError(
            f"wrench-set enumeration supports at most {MAX_ROTORS} rotors, got {model.n_rotors}")
    lo, hi = model.thrust_bounds
    center = rows @ (0.5 * (lo + hi))
    generators = rows * (0.5 * (hi - lo))
    return ConvexPolytope.zonotope(center, generators)


def force_set(model: AirframeModel) -> ConvexPolytope:
    """Body-frame forces reachable with every rotor inside its thrust bounds."""
    return _box_image(model.effectiveness[:3], model)


def moment_set(model: AirframeModel) -> ConvexPolytope:
    """Body-frame moments reachable with every rotor inside its thrust bounds."""
    return _box_image(model.effectiveness[3:], model)


def acceleration_set(model: AirframeModel, attitude=IDENTITY, forces: ConvexPolytope | None = None) -> ConvexPolytope:
    """World-frame linear accelerations ``R f / m + g`` over the force set."""
    forces = forces if forces is not None else force_set(model)
    R = quat_to_matrix(np.asarray(attitude, dtype=float))
    return forces.affine(R / model.mass, GRAVITY_VEC)


def omni_acceleration_radius(model: AirframeModel, attitude=IDENTITY,
                             forces: ConvexPolytope | None = None) -> tuple[float, ConvexPolytope]:
    """Radius of the largest origin-centred ball inside the acceleration set.

    Zero when the set is flat or does not contain the origin (the vehicle
    cannot hover at that attitude).
    """
    acc = acceleration_set(model, attitude, forces)
    if acc.dimension < 3:
        return 0.0, acc
    r = float(acc.offsets.min())
    return (r if r > 0 else 0.0), acc
