"""
Designing an airframe and checking its actuation
================================================

Build a rotor layout, look at its effectiveness matrix and find out whether
it can produce every force and moment independently.
"""

import numpy as np

from uavsim.airframe import AirframeModel, RotorSpec, preset

# A flat quadrotor: four vertical rotors with alternating spin.
quad = preset("quad-flat")
np.set_printoptions(precision=3, suppress=True)
print(quad.effectiveness)
print("rank", quad.rank, "fully actuated:", quad.fully_actuated)

# Tilting the rotors sideways lets a hexarotor push horizontally without
# rolling. The preset tilts each rotor 20 degrees about its arm.
hexa = preset("hex-tilt20")
print("hex-tilt20 rank", hexa.rank, "fully actuated:", hexa.fully_actuated)

# %%
# A custom layout: three coplanar vertical rotors under-actuate badly.
tri = AirframeModel(
    rotors=[RotorSpec(position=(0.3 * np.cos(a), 0.3 * np.sin(a), 0.0), axis=(0, 0, 1), spin_direction=s)
            for a, s in zip(np.radians([0, 120, 240]), [1, -1, 1])],
    mass=1.2,
    inertia=np.diag([0.015, 0.015, 0.03]),
    name="tri",
)
print("tri rank", tri.rank)

# Singular values show how close to rank loss a design is.
print("hex singular values", np.linalg.svd(hexa.effectiveness, compute_uv=False))
