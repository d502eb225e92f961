"""Step-response figures of merit: 10-90 % rise, 2 % settling, overshoot."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

RISE_LOW = 0.1
RISE_HIGH = 0.9
SETTLING_BAND = 0.02


class DidNotRise(ValueError):
    """The response never reached 10 % of the commanded change."""


@dataclass(frozen=True)
class StepMetrics:
    rise_time_s: float
    settling_time_s: float
    overshoot_percent: float
    steady_state_error: float


def _first_crossing(t, y, level):
    above = np.flatnonzero(y >= level)
    if len(above) == 0:
        return None
    k = int(above[0])
    if k == 0:
        return float(t[0])
    # linear interpolation between the bracketing samples
    frac = (level - y[k - 1]) / (y[k] - y[k - 1])
    return float(t[k - 1] + frac * (t[k] - t[k - 1]))


def step_metrics(times, values, setpoint: float, initial: float) -> StepMetrics:
    """Metrics of a sampled response moving from ``initial`` towards ``setpoint``.

    Settling time is measured from the first sample to the last re-entry into
    the +-2 % band (``inf`` when the final sample is still outside it). Works
    for negative steps as well.

    Raises:
        ValueError: fewer than two samples, non-increasing times or a zero step.
        DidNotRise: the response never crossed 10 % of the step.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.ndim != 1 or t.shape != y.shape or len(t) < 2:
        raise ValueError("need at least two samples with matching times and values")
    if np.any(np.diff(t) <= 0):
        raise ValueError("times must be strictly increasing")
    span = setpoint - initial
    if span == 0:
        raise ValueError("setpoint equals initial value; step size is zero")
    z = (y - initial) / span

    t_low = _first_crossing(t, z, RISE_LOW)
    if t_low is None:
        raise DidNotRise("did not rise: response never crossed 10% of the step")
    t_high = _first_crossing(t, z, RISE_HIGH)
    rise = math.inf if t_high is None else t_high - t_low

    outside = np.flatnonzero(np.abs(z - 1.0) > SETTLING_BAND)
    if len(outside) == 0:
        settling = 0.0
    elif outside[-1] == len(z) - 1:
        settling = math.inf
    else:
        k = int(outside[-1])
        edge = 1.0 + SETTLING_BAND if z[k] > 1.0 else 1.0 - SETTLING_BAND
        frac = (edge - z[k]) / (z[k + 1] - z[k])
        settling = float(t[k] + frac * (t[k + 1] - t[k]) - t[0])

    overshoot = 100.0 * max(0.0, float(z.max()) - 1.0)
    tail = y[-max(1, int(math.ceil(0.1 * len(y)))):]
    sse = abs(setpoint - float(tail.mean()))
    return StepMetrics(rise, settling, overshoot, sse)
