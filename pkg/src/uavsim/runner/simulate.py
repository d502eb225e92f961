"""Scenario execution and the simulation log."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..control import (Allocator, AttitudeController, HybridForcePositionController, PositionController,
                       attitude_from_accel)
from ..airframe import Wrench
from ..dynamics import FTSensorReading, _contact_total, body_sphere_penetration, step
from ..errors import ScenarioFault
from ..rotation import quat_to_matrix
from .config import ScenarioConfig

SIMLOG_VERSION = 1
SIMLOG_MAGIC = f"# simlog v{SIMLOG_VERSION}"
CRASH_PENETRATION = 0.05
MAX_DISTANCE = 1000.0
SUMMARY_WINDOW_S = 2.0

_XYZ = ("x", "y", "z")


def simlog_columns(n_rotors: int) -> list[str]:
    """Column list of a version-1 log for an airframe with ``n_rotors`` rotors."""
    cols = ["time"]
    cols += [f"pos_{a}" for a in _XYZ]
    cols += [f"quat_{a}" for a in ("w", "x", "y", "z")]
    cols += [f"vel_{a}" for a in _XYZ]
    cols += [f"angvel_{a}" for a in _XYZ]
    cols += [f"thrust_cmd_{i}" for i in range(n_rotors)]
    cols += [f"thrust_{i}" for i in range(n_rotors)]
    cols += [f"wrench_f{a}" for a in _XYZ] + [f"wrench_m{a}" for a in _XYZ]
    cols += [f"contact_f{a}" for a in _XYZ] + [f"contact_m{a}" for a in _XYZ]
    cols += [f"ft_f{a}" for a in _XYZ] + [f"ft_m{a}" for a in _XYZ]
    cols += ["waypoint_index"]
    cols += [f"setpoint_{a}" for a in _XYZ]
    cols += [f"pos_p_{a}" for a in _XYZ] + [f"pos_i_{a}" for a in _XYZ] + [f"pos_d_{a}" for a in _XYZ]
    cols += [f"att_err_{a}" for a in _XYZ]
    cols += ["force_measured", "force_p", "force_i", "saturated"]
    return cols


@dataclass
class SimLog:
    """Sampled record of a run. ``data`` has one row per logged step."""

    columns: list[str]
    data: np.ndarray
    fault: dict | None = None
    saturation_count: int = 0
    meta: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        try:
            return self.data[:, self.columns.index(name)]
        except ValueError:
            raise KeyError(f"no column {name!r} in log") from None

    def __len__(self) -> int:
        return len(self.data)

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        buf.write(SIMLOG_MAGIC + "\n")
        buf.write(",".join(self.columns) + "\n")
        for row in self.data:
            buf.write(",".join(repr(float(x)) for x in row) + "\n")
        if self.fault is not None:
            buf.write(f"# fault,{self.fault['kind']},{float(self.fault['time'])!r},{self.fault['message']}\n")
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, source) -> "SimLog":
        """Read a log written by :meth:`to_csv` (path or CSV text); plain CSVs with a header also load."""
        text = source if isinstance(source, str) and "\n" in source else Path(source).read_text()
        header = None
        rows = []
        fault = None
        for line in text.splitlines():
            if not line.strip():
                continue
            if line.startswith("#"):
                if line.startswith("# fault,"):
                    _, kind, t, msg = line.split(",", 3)
                    fault = {"kind": kind, "time": float(t), "message": msg}
                elif line.startswith("# simlog v") and line != SIMLOG_MAGIC:
                    raise ValueError(f"unsupported log version: {line[2:]}")
                continue
            if header is None:
                header = [c.strip() for c in line.split(",")]
                continue
            rows.append([float(x) for x in line.split(",")])
        if header is None:
            raise ValueError("log has no header row")
        data = np.array(rows, dtype=float).reshape(-1, len(header))
        return cls(header, data, fault)

    def summary(self) -> dict:
        t = self.column("time")
        window = t >= t[-1] - SUMMARY_WINDOW_S - 1e-12
        pos = self.data[:, [self.columns.index(f"pos_{a}") for a in _XYZ]]
        sp = self.data[:, [self.columns.index(f"setpoint_{a}") for a in _XYZ]]
        err = pos[-1] - sp[-1]
        normal = self.meta.get("contact_normal")
        if normal is not None:
            n = np.asarray(normal)
            err = err - (err @ n) * n
            force = self.column("force_measured")
        else:
            force = np.linalg.norm(
                self.data[:, [self.columns.index(f"contact_f{a}") for a in _XYZ]], axis=1)
        return {
            "final_position_error_m": float(np.linalg.norm(err)),
            "mean_contact_force_N": float(force[window].mean()),
            "saturation_count": int(self.saturation_count),
            "rows": len(self),
            "fault": None if self.fault is None else self.fault["kind"],
        }


def active_waypoint(waypoints, t: float) -> int:
    """Index of the last waypoint whose time has been reached (piecewise-constant setpoints)."""
    idx = 0
    for i, w in enumerate(waypoints):
        if w.time <= t + 1e-12:
            idx = i
        else:
            break
    return idx


def run_scenario(config: ScenarioConfig) -> SimLog:
    """Run the closed loop for the configured duration.

    Each step: pick the active setpoint, run the controller, allocate and
    clamp thrusts, integrate, and log every ``log_decimation`` steps. Crashes
    and controller faults end the run and are recorded in ``SimLog.fault``.
    """
    model = config.airframe
    dt = config.dt_s
    obstacles = config.obstacles
    allocator = Allocator(model)
    n = model.n_rotors
    columns = simlog_columns(n)
    hpfc = None
    if config.mode == "hpfc":
        hpfc = HybridForcePositionController(model, config.hpfc, config.attitude_gains)
        pos_ctrl = hpfc.position
        att_ctrl = hpfc.attitude
    else:
        pos_ctrl = PositionController(config.position_gains)
        att_ctrl = AttitudeController(model, config.attitude_gains)

    state = config.initial_state
    q_prev = state.attitude
    rows = []
    fault = None
    saturations = 0
    n_steps = config.n_steps
    for k in range(n_steps + 1):
        t = k * dt
        if k > 0:
            fault = _check_crash(state, config, t)
            if fault is not None:
                break
        wi = active_waypoint(config.waypoints, t)
        wp = config.waypoints[wi]
        R = quat_to_matrix(state.attitude)
        fc, mc = _contact_total(state.position, R, state.velocity, state.angular_velocity,
                                model.end_effector_offset, obstacles)
        ft = FTSensorReading(R.T @ fc, np.zeros(3))
        try:
            if hpfc is not None:
                desired = hpfc.update(state, wp.position, ft, dt, yaw=wp.yaw)
            else:
                a_des = pos_ctrl.update(state, wp.position, dt)
                demand = attitude_from_accel(a_des, wp.yaw, model, state.attitude, previous=q_prev)
                q_prev = demand.attitude
                moment = att_ctrl.update(state, demand.attitude, dt)
                desired = Wrench(demand.body_force, moment)
        except ScenarioFault as exc:
            fault = {"kind": exc.kind, "time": t, "message": str(exc)}
            break
        u_cmd = allocator.unclamped(desired)
        u = np.clip(u_cmd, allocator.lower, allocator.upper)
        saturated = bool(np.any(u != u_cmd))
        saturations += saturated
        if k % config.log_decimation == 0:
            rows.append(_row(t, state, u_cmd, u, desired, fc, mc, ft, wi, wp, pos_ctrl, att_ctrl, hpfc, saturated))
        if k == n_steps:
            break
        state = step(state, model, u, obstacles, dt)

    meta = {"mode": config.mode, "dt_s": dt}
    if hpfc is not None:
        meta["contact_normal"] = config.hpfc.contact_normal.tolist()
    data = np.array(rows, dtype=float).reshape(-1, len(columns))
    return SimLog(columns, data, fault, saturations, meta)


def _check_crash(state, config, t):
    if not state.is_finite():
        return {"kind": "crash", "time": t, "message": "state became non-finite"}
    if float(np.linalg.norm(state.position)) > MAX_DISTANCE:
        return {"kind": "crash", "time": t, "message": f"vehicle left the {MAX_DISTANCE:g} m arena"}
    depth = body_sphere_penetration(state, config.crash_sphere_radius, config.obstacles)
    if depth > CRASH_PENETRATION:
        return {"kind": "crash", "time": t,
                "message": f"body sphere penetrated an obstacle by {depth:.3f} m"}
    return None


def _row(t, state, u_cmd, u, desired, fc, mc, ft, wi, wp, pos_ctrl, att_ctrl, hpfc, saturated):
    if hpfc is not None:
        force_terms = [hpfc.measured_force, hpfc.force_p_term, hpfc.force_i_term]
    else:
        force_terms = [math.nan, math.nan, math.nan]
    return np.concatenate((
        [t], state.position, state.attitude, state.velocity, state.angular_velocity,
        u_cmd, u, desired.force, desired.moment, fc, mc, ft.force, ft.moment,
        [wi], wp.position, pos_ctrl.p_term, pos_ctrl.i_term, pos_ctrl.d_term, att_ctrl.error,
        force_terms, [float(saturated)],
    ))
