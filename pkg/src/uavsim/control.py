"""Cascaded PID control, pseudo-inverse allocation and hybrid force-position control.

Integrals use rectangular (forward Euler) accumulation: the integral is
advanced by ``error * dt`` and clamped *before* it is used in the output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .airframe import GRAVITY_VEC, AirframeModel, Wrench, _ArrayEq, _vec
from .dynamics import FTSensorReading, RigidBodyState
from .errors import ScenarioFault
from .rotation import cross3, quat_conj, quat_from_matrix, quat_from_yaw, quat_mul, quat_to_matrix, quat_to_rotvec

DEGENERATE_DEMAND = 1e-6
CONTACT_THRESHOLD = 0.01
UNDERACTUATED_ROWS = [2, 3, 4, 5]  # Fz, Mx, My, Mz


@dataclass(frozen=True, eq=False)
class PidGains(_ArrayEq):
    kp: np.ndarray
    ki: np.ndarray
    kd: np.ndarray
    integral_limit: np.ndarray
    output_limit: np.ndarray

    def __post_init__(self):
        for name in ("kp", "ki", "kd", "integral_limit", "output_limit"):
            value = getattr(self, name)
            arr = _vec(np.broadcast_to(np.asarray(value, dtype=float), (3,)))
            object.__setattr__(self, name, arr)
        for name in ("kp", "ki", "kd"):
            if np.any(getattr(self, name) < 0):
                raise ValueError(f"{name} must be non-negative")
        for name in ("integral_limit", "output_limit"):
            if np.any(getattr(self, name) <= 0):
                raise ValueError(f"{name} must be positive")


def default_position_gains() -> PidGains:
    return PidGains(kp=6.0, ki=1.0, kd=4.0, integral_limit=2.0, output_limit=8.0)


def default_attitude_gains() -> PidGains:
    return PidGains(kp=40.0, ki=0.0, kd=8.0, integral_limit=1.0, output_limit=5.0)


@dataclass(frozen=True, eq=False)
class HpfcConfig(_ArrayEq):
    """Hybrid force-position settings.

    ``contact_normal`` is the world direction along which the vehicle pushes;
    the measured force is the force the tool exerts on the environment along
    it. ``normal_damping`` (N s/m) adds velocity damping to the force channel
    so the approach to the surface stays gentle; it vanishes at rest.
    """

    contact_normal: np.ndarray
    force_setpoint: float = 5.0
    force_kp: float = 0.5
    force_ki: float = 2.0
    force_integral_limit: float = 2.5
    normal_damping: float = 40.0
    approach_timeout_s: float = 5.0
    position_gains: PidGains = field(default_factory=default_position_gains)
    contact_attitude: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "contact_normal", _vec(self.contact_normal))
        if abs(np.linalg.norm(self.contact_normal) - 1.0) > 1e-9:
            raise ValueError("contact_normal must be unit length")
        if self.contact_attitude is not None:
            object.__setattr__(self, "contact_attitude", _vec(self.contact_attitude, 4))
        if self.force_setpoint < 0 or self.force_kp < 0 or self.force_ki < 0 or self.normal_damping < 0:
            raise ValueError("force setpoint and gains must be non-negative")
        if not self.force_integral_limit > 0 or not self.approach_timeout_s > 0:
            raise ValueError("force_integral_limit and approach_timeout_s must be positive")


class PositionController:
    """PID on position error with derivative on measured velocity."""

    def __init__(self, gains: PidGains | None = None):
        self.gains = gains or default_position_gains()
        self.reset()

    def reset(self):
        self.integral = np.zeros(3)
        self.p_term = np.zeros(3)
        self.i_term = np.zeros(3)
        self.d_term = np.zeros(3)

    def update(self, state: RigidBodyState, setpoint, dt: float, projector=None) -> np.ndarray:
        """Desired world acceleration. ``projector`` (3x3) restricts the error and damping subspace."""
        if not dt > 0:
            raise ValueError("dt must be positive")
        g = self.gains
        e = np.asarray(setpoint, dtype=float) - state.position
        v = state.velocity
        if projector is not None:
            e = projector @ e
            v = projector @ v
        self.integral = np.clip(self.integral + e * dt, -g.integral_limit, g.integral_limit)
        self.p_term = g.kp * e
        self.i_term = g.ki * self.integral
        self.d_term = -g.kd * v
        return np.clip(self.p_term + self.i_term + self.d_term, -g.output_limit, g.output_limit)


def position_control(state, setpoint, gains, dt, controller: PositionController | None = None):
    """Functional form; pass ``controller`` to carry the integral across calls."""
    controller = controller or PositionController(gains)
    return controller.update(state, setpoint, dt)


@dataclass(frozen=True, eq=False)
class AttitudeDemand(_ArrayEq):
    attitude: np.ndarray
    thrust: float
    body_force: np.ndarray
    degenerate: bool = False


def attitude_from_accel(a_des, yaw: float, model: AirframeModel, attitude=None, previous=None) -> AttitudeDemand:
    """Turn a desired acceleration into an attitude target and a body force demand.

    Underactuated airframes tilt so body z lies along ``a_des - g`` and ask for
    collective thrust only. Fully-actuated airframes keep the level, yawed
    attitude and demand the full force ``m (a_des - g)`` expressed in the
    current body frame (``attitude``, identity when omitted).
    """
    f_world = model.mass * (np.asarray(a_des, dtype=float) - GRAVITY_VEC)
    if model.fully_actuated:
        R = np.eye(3) if attitude is None else quat_to_matrix(attitude)
        body = R.T @ f_world
        return AttitudeDemand(quat_from_yaw(yaw), float(np.linalg.norm(body)), body)
    norm = float(np.linalg.norm(f_world)) / model.mass
    if norm < DEGENERATE_DEMAND:
        held = quat_from_yaw(yaw) if previous is None else np.asarray(previous, dtype=float)
        return AttitudeDemand(held, 0.0, np.zeros(3), degenerate=True)
    z_b = f_world / np.linalg.norm(f_world)
    x_c = np.array([np.cos(yaw), np.sin(yaw), 0.0])
    y_b = np.cross(z_b, x_c)
    if np.linalg.norm(y_b) < 1e-9:
        # thrust axis along the heading; fall back to the heading's left vector
        y_b = np.array([-np.sin(yaw), np.cos(yaw), 0.0])
    y_b /= np.linalg.norm(y_b)
    x_b = np.cross(y_b, z_b)
    q = quat_from_matrix(np.column_stack((x_b, y_b, z_b)))
    thrust = model.mass * norm
    return AttitudeDemand(q, thrust, np.array([0.0, 0.0, thrust]))


class AttitudeController:
    """Quaternion-error PD (optional I) loop producing a body moment.

    The error rotation ``q_des * q^-1`` is mapped into the body frame before
    the gains apply, and the rigid-body gyroscopic term is fed forward.
    """

    def __init__(self, model: AirframeModel, gains: PidGains | None = None):
        self.model = model
        self.gains = gains or default_attitude_gains()
        self.reset()

    def reset(self):
        self.integral = np.zeros(3)
        self.error = np.zeros(3)

    def update(self, state: RigidBodyState, q_des, dt: float) -> np.ndarray:
        if not dt > 0:
            raise ValueError("dt must be positive")
        g = self.gains
        q = state.attitude
        e_world = quat_to_rotvec(quat_mul(q_des, quat_conj(q)))
        e = quat_to_matrix(q).T @ e_world
        self.error = e
        self.integral = np.clip(self.integral + e * dt, -g.integral_limit, g.integral_limit)
        w = state.angular_velocity
        J = self.model.inertia
        m = J @ (g.kp * e + g.ki * self.integral - g.kd * w) + cross3(w, J @ w)
        return np.clip(m, -g.output_limit, g.output_limit)


def attitude_control(state, q_des, gains, dt, model: AirframeModel) -> np.ndarray:
    return AttitudeController(model, gains).update(state, q_des, dt)


class Allocator:
    """Moore-Penrose allocation followed by per-rotor clamping.

    Rank-deficient airframes allocate only ``[Fz, Mx, My, Mz]``.
    """

    def __init__(self, model: AirframeModel):
        self.model = model
        B = model.effectiveness
        if model.fully_actuated:
            self.rows = list(range(6))
        else:
            self.rows = UNDERACTUATED_ROWS
        self.pinv = np.linalg.pinv(B[self.rows])
        self.lower, self.upper = model.thrust_bounds

    def unclamped(self, desired) -> np.ndarray:
        w = desired.as_vector() if isinstance(desired, Wrench) else np.asarray(desired, dtype=float)
        return self.pinv @ w[self.rows]

    def __call__(self, desired) -> np.ndarray:
        return np.clip(self.unclamped(desired), self.lower, self.upper)


def allocate(desired, model: AirframeModel) -> np.ndarray:
    return Allocator(model)(desired)


class HybridForcePositionController:
    """Force regulation along one world axis, position tracking in the plane normal to it.

    The force integral only accumulates while the tool is in contact, which
    keeps it from winding up during the approach.
    """

    def __init__(self, model: AirframeModel, config: HpfcConfig, attitude_gains: PidGains | None = None):
        if not model.fully_actuated:
            raise ValueError("hybrid force-position control needs a fully-actuated airframe")
        self.model = model
        self.config = config
        n = config.contact_normal
        self.P_n = np.outer(n, n)
        self.P_t = np.eye(3) - self.P_n
        self.position = PositionController(config.position_gains)
        self.attitude = AttitudeController(model, attitude_gains)
        self.reset()

    def reset(self):
        self.position.reset()
        self.attitude.reset()
        self.force_integral = 0.0
        self.no_contact_time = 0.0
        self.measured_force = 0.0
        self.force_p_term = 0.0
        self.force_i_term = 0.0
        self.force_command = np.zeros(3)
        self.position_force = np.zeros(3)
        self.weight_compensation = np.zeros(3)

    def measured_normal_force(self, state: RigidBodyState, ft: FTSensorReading) -> float:
        # the sensor reads the reaction on the tool; the applied force is its negative
        return -float(self.config.contact_normal @ (quat_to_matrix(state.attitude) @ ft.force))

    def update(self, state: RigidBodyState, path_setpoint, ft: FTSensorReading, dt: float,
               yaw: float = 0.0) -> Wrench:
        if not dt > 0:
            raise ValueError("dt must be positive")
        cfg = self.config
        n = cfg.contact_normal
        f_meas = self.measured_normal_force(state, ft)
        self.measured_force = f_meas
        in_contact = f_meas >= CONTACT_THRESHOLD
        if in_contact:
            self.no_contact_time = 0.0
        else:
            self.no_contact_time += dt
            if self.no_contact_time > cfg.approach_timeout_s:
                raise ScenarioFault(
                    "approach_timeout",
                    f"no contact for more than {cfg.approach_timeout_s} s (t = {state.time:.3f} s)")
        e_f = cfg.force_setpoint - f_meas
        self.force_p_term = cfg.force_kp * e_f
        self.force_i_term = cfg.force_ki * self.force_integral
        v_n = float(n @ state.velocity)
        magnitude = cfg.force_setpoint + self.force_p_term + self.force_i_term - cfg.normal_damping * v_n
        self.force_command = magnitude * n
        if in_contact:
            # the command above used the integral up to the previous step
            lim = cfg.force_integral_limit
            self.force_integral = min(lim, max(-lim, self.force_integral + e_f * dt))

        a_des = self.position.update(state, path_setpoint, dt, projector=self.P_t)
        self.position_force = self.P_t @ (self.model.mass * (a_des - GRAVITY_VEC))

        # weight along the normal would otherwise be left to the force integral
        self.weight_compensation = -self.P_n @ (self.model.mass * GRAVITY_VEC)

        R = quat_to_matrix(state.attitude)
        body_force = R.T @ (self.position_force + self.force_command + self.weight_compensation)
        q_des = cfg.contact_attitude if cfg.contact_attitude is not None else quat_from_yaw(yaw)
        moment = self.attitude.update(state, q_des, dt)
        return Wrench(body_force, moment)


def hpfc_step(state, config: HpfcConfig, path_setpoint, ft, gains, dt, model: AirframeModel,
              controller: HybridForcePositionController | None = None) -> Wrench:
    controller = controller or HybridForcePositionController(model, config, gains)
    return controller.update(state, path_setpoint, ft, dt)
