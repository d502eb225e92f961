"""
Attainable force and moment sets
================================

The set of forces an airframe can produce is the image of its thrust box.
Slicing it at hover thrust shows how much lateral force is left while
holding altitude; the acceleration set gives the omni-directional radius.
"""

from pathlib import Path

from uavsim.airframe import GRAVITY, preset
from uavsim.analysis import (cross_section, force_set, moment_set, omni_acceleration_radius, write_off,
                             write_polygon_csv)

for name in ("quad-flat", "hex-tilt20", "octo-fa"):
    model = preset(name)
    forces = force_set(model)
    moments = moment_set(model)
    radius, accel = omni_acceleration_radius(model, forces=forces)
    print(f"{name}: force set dim {forces.dimension} ({len(forces.vertices)} vertices), "
          f"moment set dim {moments.dimension}, omni radius {radius:.3f} m/s^2")

# %%
# Lateral force available at hover for the tilted hexarotor.
hexa = preset("hex-tilt20")
hover = cross_section(force_set(hexa), [0, 0, 1], hexa.mass * GRAVITY)
print("hover slice area", round(hover.area, 3), "N^2")
for u, w in hover.points:
    print(f"  Fx {u:7.3f}  Fy {w:7.3f}")

# %%
# Meshes and slices for external viewers.
out = Path("wrench_sets_out")
out.mkdir(exist_ok=True)
write_off(force_set(hexa), out / "hex_force.off")
write_polygon_csv(hover, out / "hex_hover_slice.csv")
print("wrote", sorted(p.name for p in out.iterdir()))
