"""
Pushing on a wall and writing on it
===================================

Hybrid force-position control: regulate 5 N along the wall normal while
tracking a path in the wall plane. The contact model is a penalty
spring-damper at the end-effector point, and the writing path is a short
illustrative stroke rather than any particular lettering.
"""

from pathlib import Path

import numpy as np

from uavsim.runner import parse_config, run_scenario

scenarios = Path(__file__).resolve().parents[1] / "scenarios"

# %%
# Wall press: fly 1 m forward into the wall and hold 5 N.
log = run_scenario(parse_config((scenarios / "wall_press.yaml").read_text()))
t = log.column("time")
f = log.column("force_measured")
print("first contact at", t[np.argmax(f >= 0.01)], "s")
print("mean force over the last 2 s", round(f[t >= 8.0].mean(), 4), "N")

# %%
# Writing: start at the wall and trace a three-waypoint stroke at 5 N.
log = run_scenario(parse_config((scenarios / "writing.yaml").read_text()))
f = log.column("force_measured")
contact = f >= 0.01
band = (f[contact] >= 4.0) & (f[contact] <= 6.0)
print(f"{100 * band.mean():.1f} % of contact samples within 4-6 N")
for name in ("pos_y", "pos_z"):
    print(name, "at the end:", round(log.column(name)[-1], 3))
log.to_csv("writing_log.csv")
