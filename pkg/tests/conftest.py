import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fraclen import Window, make_curve

TWO_PI = 2.0 * math.pi


@pytest.fixture(scope="session")
def segment():
    return make_curve(
        {"kind": "segment", "dimension": 3, "start": [-0.5, 0, 0], "end": [0.5, 0, 0]}
    )


@pytest.fixture(scope="session")
def circle():
    return make_curve(
        {
            "kind": "circle_arc",
            "dimension": 3,
            "center": [0, 0, 0],
            "axis1": [1, 0, 0],
            "axis2": [0, 1, 0],
            "radius": 1,
            "angle_start": 0.0,
            "angle_end": TWO_PI,
        }
    )


@pytest.fixture(scope="session")
def helix():
    return make_curve(
        {
            "kind": "helix",
            "dimension": 3,
            "center": [0, 0, 0],
            "radius": 1,
            "pitch": 0.25,
            "t_start": 0.0,
            "t_end": TWO_PI,
        }
    )


@pytest.fixture(scope="session")
def window2():
    return Window(center=np.zeros(3), radius=2.0)
