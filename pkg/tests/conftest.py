import sys

import numpy as np
import pytest

from uavsim.airframe import AirframeModel, RotorSpec, hex_tilt20, octo_fa, quad_flat


@pytest.fixture
def quad():
    return quad_flat()


@pytest.fixture
def hexa():
    return hex_tilt20()


@pytest.fixture
def octo():
    return octo_fa()


def single_rotor(axis=(0.0, 0.0, 1.0), lo=0.0, hi=5.0, c=0.05, position=(0.0, 0.0, 0.0), **kw):
    rotor = RotorSpec(position=position, axis=axis, spin_direction=1, torque_to_thrust_ratio=c,
                      thrust_min=lo, thrust_max=hi)
    return AirframeModel(rotors=[rotor], mass=kw.get("mass", 1.0),
                         inertia=kw.get("inertia", np.diag([0.01, 0.01, 0.02])),
                         linear_drag_coefficient=kw.get("drag", 0.0))


def free_body(inertia, mass=1.0):
    """Model used for torque-free and free-fall checks: one idle rotor, no drag."""
    return single_rotor(mass=mass, inertia=np.asarray(inertia, dtype=float))


def random_airframe(rng, n=None, bidirectional=False):
    n = n or int(rng.integers(1, 9))
    rotors = []
    for _ in range(n):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        hi = float(rng.uniform(2.0, 10.0))
        rotors.append(RotorSpec(position=rng.uniform(-0.5, 0.5, size=3), axis=axis,
                                spin_direction=int(rng.choice([-1, 1])),
                                torque_to_thrust_ratio=float(rng.uniform(0.0, 0.05)),
                                thrust_min=-hi if bidirectional else 0.0, thrust_max=hi))
    return AirframeModel(rotors=rotors, mass=float(rng.uniform(0.5, 3.0)),
                         inertia=np.diag(rng.uniform(0.01, 0.1, size=3)))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.RESULTS:
        terminalreporter.write_line(line)
