"""Simulation and capability analysis for fully-actuated multirotors."""

from .airframe import (GRAVITY, GRAVITY_VEC, PRESETS, AirframeModel, RotorSpec, Wrench, actuation_rank,
                       effectiveness_matrix, is_fully_actuated, preset, speed_from_thrust, thrust_from_speed)
from .dynamics import FTSensorReading, Obstacle, RigidBodyState, contact_wrench, net_wrench, step

__version__ = "0.1.0"

__all__ = [
    "GRAVITY", "GRAVITY_VEC", "PRESETS", "AirframeModel", "FTSensorReading", "Obstacle", "RigidBodyState",
    "RotorSpec", "Wrench", "actuation_rank", "contact_wrench", "effectiveness_matrix", "is_fully_actuated",
    "net_wrench", "preset", "speed_from_thrust", "step", "thrust_from_speed",
]
