"""
Hover and a position step
=========================

Fly the tilted hexarotor to a point 0.5 m to the side and measure the step
response of the cascaded position loop.
"""

from uavsim.analysis import step_metrics
from uavsim.runner import parse_config, run_scenario

scenario = """
airframe: hex-tilt20
duration_s: 20.0
initial_state: {position: [0, 0, 1]}
waypoints:
  - {time: 0.0, position: [0, 0, 1]}
  - {time: 1.0, position: [0.5, 0, 1]}
"""

log = run_scenario(parse_config(scenario))
print(log.summary())

# %%
# Metrics on the x position after the step command at t = 1 s. The small
# integral gain removes the last few centimetres slowly, which is what the
# long 2 % settling time reflects.
t = log.column("time")
x = log.column("pos_x")
after = t >= 1.0
m = step_metrics(t[after] - 1.0, x[after], setpoint=0.5, initial=0.0)
print(f"rise {m.rise_time_s:.3f} s, settling {m.settling_time_s:.3f} s, "
      f"overshoot {m.overshoot_percent:.2f} %, steady-state error {m.steady_state_error:.2e} m")
