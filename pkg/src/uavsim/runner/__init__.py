"""Scenario configuration, the closed-loop runner and the command line."""

from .config import ScenarioConfig, Waypoint, config_from_dict, config_to_dict, parse_airframe, parse_config, serialize_config
from .simulate import SIMLOG_VERSION, SimLog, active_waypoint, run_scenario, simlog_columns

__all__ = [
    "SIMLOG_VERSION", "ScenarioConfig", "SimLog", "Waypoint", "active_waypoint", "config_from_dict",
    "config_to_dict", "parse_airframe", "parse_config", "run_scenario", "serialize_config", "simlog_columns",
]
