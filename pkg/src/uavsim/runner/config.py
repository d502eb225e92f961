"""Scenario and airframe file parsing (YAML).

See ``docs/config.md`` for the schema. Every failure raises a
:class:`~uavsim.errors.ConfigError` subclass naming the offending key.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import yaml

from ..airframe import PRESETS, AirframeModel, _ArrayEq, _check_keys, _num, _num_vector, _vec
from ..airframe import airframe_from_dict, airframe_to_dict, preset
from ..control import HpfcConfig, PidGains, default_attitude_gains, default_position_gains
from ..dynamics import (DEFAULT_DAMPING, DEFAULT_STIFFNESS, DEFAULT_TANGENTIAL_DAMPING, MAX_DT, Obstacle,
                        RigidBodyState)
from ..errors import ConfigSyntaxError, ConstraintError

MODES = ("position-pid", "hpfc")
DEFAULT_DT = 1e-3
DEFAULT_DECIMATION = 10
DEFAULT_CRASH_RADIUS = 0.25


@dataclass(frozen=True, eq=False)
class Waypoint(_ArrayEq):
    time: float
    position: np.ndarray
    yaw: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "position", _vec(self.position))


@dataclass(frozen=True, eq=False)
class ScenarioConfig(_ArrayEq):
    airframe: AirframeModel
    duration_s: float
    mode: str = "position-pid"
    position_gains: PidGains = field(default_factory=default_position_gains)
    attitude_gains: PidGains = field(default_factory=default_attitude_gains)
    hpfc: HpfcConfig | None = None
    obstacles: tuple = ()
    waypoints: tuple = ()
    dt_s: float = DEFAULT_DT
    log_decimation: int = DEFAULT_DECIMATION
    initial_state: RigidBodyState = field(default_factory=RigidBodyState)
    crash_sphere_radius: float = DEFAULT_CRASH_RADIUS
    name: str = ""

    @property
    def n_steps(self) -> int:
        ratio = self.duration_s / self.dt_s
        nearest = round(ratio)
        return int(nearest) if abs(ratio - nearest) < 1e-9 * max(1.0, ratio) else int(math.floor(ratio))


_TOP_KEYS = {"name", "airframe", "controller", "obstacles", "waypoints", "duration_s", "dt_s",
             "log_decimation", "initial_state", "crash_sphere_radius"}
_CONTROLLER_KEYS = {"mode", "position_gains", "attitude_gains", "hpfc"}
_GAIN_KEYS = {"kp", "ki", "kd", "integral_limit", "output_limit"}
_HPFC_KEYS = {"contact_normal", "force_setpoint", "force_kp", "force_ki", "force_integral_limit",
              "normal_damping", "approach_timeout_s", "contact_attitude"}
_OBSTACLE_KEYS = {"kind", "point", "normal", "min", "max", "stiffness", "damping", "tangential_damping"}
_WAYPOINT_KEYS = {"time", "position", "yaw"}
_STATE_KEYS = {"position", "attitude", "velocity", "angular_velocity"}


def load_yaml(text: str):
    try:
        return yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        line = mark.line + 1 if mark else None
        col = mark.column + 1 if mark else None
        raise ConfigSyntaxError(f"YAML syntax error: {exc.problem or exc}", line, col) from None
    except yaml.YAMLError as exc:
        raise ConfigSyntaxError(f"YAML syntax error: {exc}") from None


def _vec_or_scalar(value, key):
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return np.full(3, _num(value, key))
    return _num_vector(value, key)


def _gains(data, key, default: PidGains) -> PidGains:
    if data is None:
        return default
    _check_keys(data, _GAIN_KEYS, key)
    kw = {name: getattr(default, name) for name in _GAIN_KEYS}
    for name, value in data.items():
        kw[name] = _vec_or_scalar(value, f"{key}.{name}")
    for name in ("kp", "ki", "kd"):
        if np.any(kw[name] < 0):
            raise ConstraintError(f"{key}.{name} must be >= 0", key=f"{key}.{name}")
    for name in ("integral_limit", "output_limit"):
        if np.any(kw[name] <= 0):
            raise ConstraintError(f"{key}.{name} must be > 0", key=f"{key}.{name}")
    return PidGains(**kw)


def _unit(value, key, size=3):
    v = _num_vector(value, key, size)
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > 1e-6:
        raise ConstraintError(f"{key} must be a unit vector (|v| = {norm:g})", key=key)
    # already-normalized input is kept bit-for-bit so files round-trip exactly
    return v if abs(norm - 1.0) <= 1e-12 else v / norm


def _positive(data, name, key, default=None, allow_zero=False):
    if name not in data:
        if default is None:
            raise ConstraintError(f"{key} is required", key=key)
        return default
    v = _num(data[name], key)
    if v < 0 or (v == 0 and not allow_zero):
        raise ConstraintError(f"{key} must be {'>= 0' if allow_zero else '> 0'}", key=key)
    return v


def _hpfc(data, position_gains) -> HpfcConfig:
    key = "controller.hpfc"
    _check_keys(data, _HPFC_KEYS, key)
    if "contact_normal" not in data:
        raise ConstraintError(f"{key}.contact_normal is required", key=f"{key}.contact_normal")
    d = HpfcConfig(contact_normal=(1.0, 0.0, 0.0))
    kw = {"contact_normal": _unit(data["contact_normal"], f"{key}.contact_normal"), "position_gains": position_gains}
    for name in ("force_setpoint", "force_kp", "force_ki", "normal_damping"):
        kw[name] = _positive(data, name, f"{key}.{name}", getattr(d, name), allow_zero=True)
    for name in ("force_integral_limit", "approach_timeout_s"):
        kw[name] = _positive(data, name, f"{key}.{name}", getattr(d, name))
    if data.get("contact_attitude") is not None:
        kw["contact_attitude"] = _unit(data["contact_attitude"], f"{key}.contact_attitude", 4)
    return HpfcConfig(**kw)


def _obstacle(data, key) -> Obstacle:
    _check_keys(data, _OBSTACLE_KEYS, key)
    kind = data.get("kind")
    kw = {
        "stiffness": _positive(data, "stiffness", f"{key}.stiffness", DEFAULT_STIFFNESS),
        "damping": _positive(data, "damping", f"{key}.damping", DEFAULT_DAMPING, allow_zero=True),
        "tangential_damping": _positive(data, "tangential_damping", f"{key}.tangential_damping",
                                        DEFAULT_TANGENTIAL_DAMPING, allow_zero=True),
    }
    if kind == "plane":
        for name in ("point", "normal"):
            if name not in data:
                raise ConstraintError(f"{key}.{name} is required for a plane", key=f"{key}.{name}")
        for name in ("min", "max"):
            if name in data:
                raise ConstraintError(f"{key}.{name} is only valid for boxes", key=f"{key}.{name}")
        return Obstacle.plane(_num_vector(data["point"], f"{key}.point"),
                              _unit(data["normal"], f"{key}.normal"), **kw)
    if kind == "box":
        for name in ("min", "max"):
            if name not in data:
                raise ConstraintError(f"{key}.{name} is required for a box", key=f"{key}.{name}")
        for name in ("point", "normal"):
            if name in data:
                raise ConstraintError(f"{key}.{name} is only valid for planes", key=f"{key}.{name}")
        lo = _num_vector(data["min"], f"{key}.min")
        hi = _num_vector(data["max"], f"{key}.max")
        if not np.all(lo < hi):
            raise ConstraintError(f"{key}.min must be below {key}.max componentwise", key=f"{key}.min")
        return Obstacle.box(lo, hi, **kw)
    raise ConstraintError(f"{key}.kind must be 'plane' or 'box'", key=f"{key}.kind")


def _state(data) -> RigidBodyState:
    key = "initial_state"
    if data is None:
        return RigidBodyState()
    _check_keys(data, _STATE_KEYS, key)
    kw = {}
    for name in ("position", "velocity", "angular_velocity"):
        if name in data:
            kw[name] = _num_vector(data[name], f"{key}.{name}")
    if "attitude" in data:
        kw["attitude"] = _unit(data["attitude"], f"{key}.attitude", 4)
    return RigidBodyState(**kw)


def parse_airframe(text: str) -> AirframeModel:
    """Airframe file: the model mapping, or ``preset: <name>`` plus overrides."""
    data = load_yaml(text)
    if isinstance(data, str) and data in PRESETS:
        return preset(data)
    if not isinstance(data, dict):
        raise ConstraintError("airframe file must contain a mapping")
    return airframe_from_dict(data)


def _airframe_field(value) -> AirframeModel:
    if isinstance(value, str):
        if value not in PRESETS:
            raise ConstraintError(f"airframe must be one of {sorted(PRESETS)} or a mapping, got {value!r}",
                                  key="airframe")
        return preset(value)
    if isinstance(value, dict):
        return airframe_from_dict(value, prefix="airframe")
    raise ConstraintError("airframe must be a preset name or a mapping", key="airframe")


def config_from_dict(data) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConstraintError("scenario file must contain a mapping at the top level")
    _check_keys(data, _TOP_KEYS, "")
    if "airframe" not in data:
        raise ConstraintError("airframe is required", key="airframe")
    model = _airframe_field(data["airframe"])

    duration = _positive(data, "duration_s", "duration_s")
    dt = DEFAULT_DT
    if "dt_s" in data:
        dt = _num(data["dt_s"], "dt_s")
        if not (0 < dt <= MAX_DT):
            raise ConstraintError("dt_s must be in (0, 0.1]", key="dt_s")
    dec = data.get("log_decimation", DEFAULT_DECIMATION)
    if isinstance(dec, bool) or not isinstance(dec, int) or dec < 1:
        raise ConstraintError("log_decimation must be an integer >= 1", key="log_decimation")
    crash = _positive(data, "crash_sphere_radius", "crash_sphere_radius", DEFAULT_CRASH_RADIUS)

    ctrl = data.get("controller") or {}
    _check_keys(ctrl, _CONTROLLER_KEYS, "controller")
    mode = ctrl.get("mode", "position-pid")
    if mode not in MODES:
        raise ConstraintError(f"controller.mode must be one of {list(MODES)}", key="controller.mode")
    pos_gains = _gains(ctrl.get("position_gains"), "controller.position_gains", default_position_gains())
    att_gains = _gains(ctrl.get("attitude_gains"), "controller.attitude_gains", default_attitude_gains())
    hpfc = None
    if mode == "hpfc":
        if "hpfc" not in ctrl:
            raise ConstraintError("controller.hpfc is required when mode is hpfc", key="controller.hpfc")
        if not model.fully_actuated:
            raise ConstraintError("controller.mode hpfc requires a fully-actuated airframe (rank 6)",
                                  key="controller.mode")
        hpfc = _hpfc(ctrl["hpfc"], pos_gains)
    elif "hpfc" in ctrl:
        raise ConstraintError("controller.hpfc is only valid when mode is hpfc", key="controller.hpfc")

    obstacles = data.get("obstacles") or []
    if not isinstance(obstacles, list):
        raise ConstraintError("obstacles must be a list", key="obstacles")
    obstacles = tuple(_obstacle(o, f"obstacles[{i}]") for i, o in enumerate(obstacles))

    init = _state(data.get("initial_state"))

    raw_wps = data.get("waypoints")
    if raw_wps is None:
        waypoints = (Waypoint(0.0, init.position, 0.0),)
    else:
        if not isinstance(raw_wps, list) or not raw_wps:
            raise ConstraintError("waypoints must be a non-empty list", key="waypoints")
        wps = []
        for i, w in enumerate(raw_wps):
            key = f"waypoints[{i}]"
            _check_keys(w, _WAYPOINT_KEYS, key)
            if "time" not in w or "position" not in w:
                raise ConstraintError(f"{key} needs time and position", key=f"{key}.time")
            t = _num(w["time"], f"{key}.time")
            if t < 0:
                raise ConstraintError(f"{key}.time must be >= 0", key=f"{key}.time")
            if wps and t < wps[-1].time:
                raise ConstraintError("waypoint times must be nondecreasing", key=f"{key}.time")
            wps.append(Waypoint(t, _num_vector(w["position"], f"{key}.position"),
                                _num(w.get("yaw", 0.0), f"{key}.yaw")))
        waypoints = tuple(wps)

    return ScenarioConfig(
        airframe=model, duration_s=duration, mode=mode, position_gains=pos_gains,
        attitude_gains=att_gains, hpfc=hpfc, obstacles=obstacles, waypoints=waypoints, dt_s=dt,
        log_decimation=dec, initial_state=init, crash_sphere_radius=crash, name=str(data.get("name", "")),
    )


def parse_config(text: str) -> ScenarioConfig:
    """Parse and validate scenario YAML, filling defaults."""
    return config_from_dict(load_yaml(text))


def _floats(a):
    return [float(x) for x in np.asarray(a).ravel()]


def _gains_dict(g: PidGains) -> dict:
    return {name: _floats(getattr(g, name)) for name in ("kp", "ki", "kd", "integral_limit", "output_limit")}


def config_to_dict(cfg: ScenarioConfig) -> dict:
    model = cfg.airframe
    if model.name in PRESETS and preset(model.name) == model:
        airframe = model.name
    else:
        airframe = airframe_to_dict(model)
    ctrl = {"mode": cfg.mode, "position_gains": _gains_dict(cfg.position_gains),
            "attitude_gains": _gains_dict(cfg.attitude_gains)}
    if cfg.hpfc is not None:
        h = cfg.hpfc
        ctrl["hpfc"] = {
            "contact_normal": _floats(h.contact_normal),
            "force_setpoint": float(h.force_setpoint),
            "force_kp": float(h.force_kp),
            "force_ki": float(h.force_ki),
            "force_integral_limit": float(h.force_integral_limit),
            "normal_damping": float(h.normal_damping),
            "approach_timeout_s": float(h.approach_timeout_s),
        }
        if h.contact_attitude is not None:
            ctrl["hpfc"]["contact_attitude"] = _floats(h.contact_attitude)
    obstacles = []
    for ob in cfg.obstacles:
        d = {"kind": ob.kind}
        if ob.kind == "plane":
            d.update(point=_floats(ob.point), normal=_floats(ob.normal))
        else:
            d.update(min=_floats(ob.box_min), max=_floats(ob.box_max))
        d.update(stiffness=float(ob.stiffness), damping=float(ob.damping),
                 tangential_damping=float(ob.tangential_damping))
        obstacles.append(d)
    s = cfg.initial_state
    out = {
        "airframe": airframe,
        "controller": ctrl,
        "obstacles": obstacles,
        "waypoints": [{"time": float(w.time), "position": _floats(w.position), "yaw": float(w.yaw)}
                      for w in cfg.waypoints],
        "duration_s": float(cfg.duration_s),
        "dt_s": float(cfg.dt_s),
        "log_decimation": int(cfg.log_decimation),
        "crash_sphere_radius": float(cfg.crash_sphere_radius),
        "initial_state": {"position": _floats(s.position), "attitude": _floats(s.attitude),
                          "velocity": _floats(s.velocity), "angular_velocity": _floats(s.angular_velocity)},
    }
    if cfg.name:
        out = {"name": cfg.name, **out}
    return out


def serialize_config(cfg: ScenarioConfig) -> str:
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=False, default_flow_style=None)
