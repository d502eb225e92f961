"""Newton-Euler rigid-body dynamics with penalty contact at the end effector.

The contact model is this package's own choice: a one-sided spring-damper
normal force (never adhesive) plus viscous tangential friction, acting at the
single end-effector point. There is no stick-slip and no impact impulse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .airframe import GRAVITY_VEC, AirframeModel, _ArrayEq, _vec
from .rotation import IDENTITY, cross3, quat_to_matrix

DEFAULT_STIFFNESS = 1000.0
DEFAULT_DAMPING = 20.0
DEFAULT_TANGENTIAL_DAMPING = 5.0
MAX_DT = 0.1


@dataclass(frozen=True, eq=False)
class RigidBodyState(_ArrayEq):
    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    attitude: np.ndarray = field(default_factory=lambda: IDENTITY.copy())
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    angular_velocity: np.ndarray = field(default_factory=lambda: np.zeros(3))
    time: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "position", _vec(self.position))
        object.__setattr__(self, "attitude", _vec(self.attitude, 4))
        object.__setattr__(self, "velocity", _vec(self.velocity))
        object.__setattr__(self, "angular_velocity", _vec(self.angular_velocity))
        object.__setattr__(self, "time", float(self.time))

    @property
    def rotation(self) -> np.ndarray:
        return quat_to_matrix(self.attitude)

    def as_vector(self) -> np.ndarray:
        return np.concatenate((self.position, self.attitude, self.velocity, self.angular_velocity))

    @classmethod
    def from_vector(cls, x, time=0.0) -> "RigidBodyState":
        return cls(x[0:3], x[3:7], x[7:10], x[10:13], time)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.as_vector())) and math.isfinite(self.time))


@dataclass(frozen=True, eq=False)
class Obstacle(_ArrayEq):
    """A planar half-space or an axis-aligned box.

    For ``kind="plane"`` the solid lies behind ``point`` opposite ``normal``.
    For ``kind="box"`` the solid is ``[box_min, box_max]``.
    """

    kind: str
    point: np.ndarray | None = None
    normal: np.ndarray | None = None
    box_min: np.ndarray | None = None
    box_max: np.ndarray | None = None
    stiffness: float = DEFAULT_STIFFNESS
    damping: float = DEFAULT_DAMPING
    tangential_damping: float = DEFAULT_TANGENTIAL_DAMPING

    def __post_init__(self):
        if self.kind == "plane":
            object.__setattr__(self, "point", _vec(self.point))
            object.__setattr__(self, "normal", _vec(self.normal))
            if abs(np.linalg.norm(self.normal) - 1.0) > 1e-9:
                raise ValueError("plane normal must be unit length")
        elif self.kind == "box":
            object.__setattr__(self, "box_min", _vec(self.box_min))
            object.__setattr__(self, "box_max", _vec(self.box_max))
            if not np.all(self.box_min < self.box_max):
                raise ValueError("box_min must be below box_max componentwise")
        else:
            raise ValueError(f"obstacle kind must be 'plane' or 'box', got {self.kind!r}")
        if not self.stiffness > 0:
            raise ValueError("stiffness must be positive")
        if self.damping < 0 or self.tangential_damping < 0:
            raise ValueError("damping coefficients must be non-negative")

    @classmethod
    def plane(cls, point, normal, **kw) -> "Obstacle":
        return cls("plane", point=point, normal=normal, **kw)

    @classmethod
    def box(cls, box_min, box_max, **kw) -> "Obstacle":
        return cls("box", box_min=box_min, box_max=box_max, **kw)

    def signed_distance(self, x) -> tuple[float, np.ndarray]:
        """Signed distance of point ``x`` to the surface (negative inside) and the outward normal."""
        if self.kind == "plane":
            return float(self.normal @ (x - self.point)), self.normal
        lo = x - self.box_min
        hi = self.box_max - x
        if np.all(lo > 0) and np.all(hi > 0):
            gaps = np.concatenate((lo, hi))
            k = int(np.argmin(gaps))
            n = np.zeros(3)
            n[k % 3] = -1.0 if k < 3 else 1.0
            return -float(gaps[k]), n
        nearest = np.clip(x, self.box_min, self.box_max)
        d = x - nearest
        dist = float(np.linalg.norm(d))
        if dist == 0.0:
            # on the surface: pick the face we sit on
            k = int(np.argmin(np.concatenate((np.abs(lo), np.abs(hi)))))
            n = np.zeros(3)
            n[k % 3] = -1.0 if k < 3 else 1.0
            return 0.0, n
        return dist, d / dist


@dataclass(frozen=True, eq=False)
class FTSensorReading(_ArrayEq):
    """Contact force and moment on the tool, body frame, at the end-effector point."""

    force: np.ndarray = field(default_factory=lambda: np.zeros(3))
    moment: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "force", _vec(self.force))
        object.__setattr__(self, "moment", _vec(self.moment))


def _contact(p, R, v, w, r_ee, obstacle):
    """World contact force at the end effector plus body moment about the COM."""
    r_world = R @ r_ee
    x = p + r_world
    s, n = obstacle.signed_distance(x)
    if s >= 0.0:
        return np.zeros(3), np.zeros(3)
    depth = -s
    v_pt = v + R @ cross3(w, r_ee)
    s_dot = float(n @ v_pt)
    f_n = obstacle.stiffness * depth + obstacle.damping * max(0.0, -s_dot)
    f = f_n * n - obstacle.tangential_damping * (v_pt - s_dot * n)
    moment_body = cross3(r_ee, R.T @ f)
    return f, moment_body


def contact_wrench(state: RigidBodyState, model: AirframeModel, obstacle: Obstacle):
    """Penalty contact between the end-effector point and one obstacle.

    Returns ``(force_world, moment_body)``: the force acts at the end effector,
    the moment is taken about the center of mass in the body frame.
    """
    return _contact(state.position, quat_to_matrix(state.attitude), state.velocity,
                    state.angular_velocity, model.end_effector_offset, obstacle)


def _contact_total(p, R, v, w, r_ee, obstacles):
    f = np.zeros(3)
    m = np.zeros(3)
    for ob in obstacles:
        fi, mi = _contact(p, R, v, w, r_ee, ob)
        f += fi
        m += mi
    return f, m


def net_wrench(state: RigidBodyState, model: AirframeModel, thrusts, obstacles=()):
    """Total external force (world) and moment (body), plus the F/T sensor reading.

    The gyroscopic term is not part of this sum; :func:`step` adds it.
    """
    u = np.asarray(thrusts, dtype=float)
    B = model.effectiveness
    R = quat_to_matrix(state.attitude)
    fc, mc = _contact_total(state.position, R, state.velocity, state.angular_velocity,
                            model.end_effector_offset, obstacles)
    force = R @ (B[:3] @ u) + model.mass * GRAVITY_VEC - model.linear_drag_coefficient * state.velocity + fc
    moment = B[3:] @ u + mc
    return force, moment, FTSensorReading(R.T @ fc, np.zeros(3))


def _derivative(x, model, f_body, m_body, obstacles):
    q = x[3:7]
    v = x[7:10]
    w = x[10:13]
    R = quat_to_matrix(q)
    fc, mc = _contact_total(x[0:3], R, v, w, model.end_effector_offset, obstacles)
    force = R @ f_body + model.mass * GRAVITY_VEC - model.linear_drag_coefficient * v + fc
    J = model.inertia
    moment = m_body + mc - cross3(w, J @ w)
    qw, qx, qy, qz = q
    wx, wy, wz = w
    qdot = 0.5 * np.array([
        -qx * wx - qy * wy - qz * wz,
        qw * wx + qy * wz - qz * wy,
        qw * wy - qx * wz + qz * wx,
        qw * wz + qx * wy - qy * wx,
    ])
    dx = np.empty(13)
    dx[0:3] = v
    dx[3:7] = qdot
    dx[7:10] = force / model.mass
    dx[10:13] = model.inertia_inv @ moment
    return dx


def step(state: RigidBodyState, model: AirframeModel, thrusts, obstacles=(), dt: float = 1e-3) -> RigidBodyState:
    """Advance one fixed RK4 step with thrusts held constant.

    Thrusts are clipped to the rotor bounds. The quaternion is renormalized
    after the step.
    """
    if not (0.0 < dt <= MAX_DT):
        raise ValueError(f"dt must be in (0, {MAX_DT}], got {dt}")
    if not state.is_finite():
        raise ValueError("state contains non-finite values")
    lo, hi = model.thrust_bounds
    u = np.clip(np.asarray(thrusts, dtype=float), lo, hi)
    B = model.effectiveness
    f_body = B[:3] @ u
    m_body = B[3:] @ u
    x = state.as_vector()
    k1 = _derivative(x, model, f_body, m_body, obstacles)
    k2 = _derivative(x + 0.5 * dt * k1, model, f_body, m_body, obstacles)
    k3 = _derivative(x + 0.5 * dt * k2, model, f_body, m_body, obstacles)
    k4 = _derivative(x + dt * k3, model, f_body, m_body, obstacles)
    x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    x[3:7] /= math.sqrt(float(x[3:7] @ x[3:7]))
    return RigidBodyState.from_vector(x, state.time + dt)


def body_sphere_penetration(state: RigidBodyState, radius: float, obstacles) -> float:
    """Deepest penetration of the COM-centred crash sphere into any obstacle (0 when clear)."""
    worst = 0.0
    for ob in obstacles:
        s, _ = ob.signed_distance(state.position)
        worst = max(worst, radius - s)
    return worst
