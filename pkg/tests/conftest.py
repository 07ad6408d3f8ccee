import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gaitref import BezierCurve, Gait, SyntheticSpec, build_index, generate_synthetic


@pytest.fixture(scope="session")
def default_library():
    """The 39-gait default synthetic library (10 outputs, degree 7)."""
    return generate_synthetic(SyntheticSpec.default())


@pytest.fixture(scope="session")
def small_library():
    """Three gaits spanning one velocity triangle; fast to build."""
    return generate_synthetic(
        SyntheticSpec(velocities=((0.0, 0.0), (0.3, 0.0), (0.0, 0.2)))
    )


def random_curve(rng: np.random.Generator, n_rows: int = 10, degree: int = 7, scale: float = 1.0) -> BezierCurve:
    return BezierCurve(scale * rng.normal(size=(n_rows, degree + 1)))


def simple_gait(coeffs, velocity, step_duration=0.4, name="g") -> Gait:
    return Gait(curve=BezierCurve(coeffs), velocity=velocity, step_duration=step_duration, name=name)


def toy_triangle_library():
    """Three scalar-ish gaits at the canonical right triangle."""
    rng = np.random.default_rng(7)
    gaits = [
        simple_gait(rng.normal(size=(2, 8)), (0.0, 0.0), 0.4, "origin"),
        simple_gait(rng.normal(size=(2, 8)), (1.0, 0.0), 0.5, "east"),
        simple_gait(rng.normal(size=(2, 8)), (0.0, 1.0), 0.6, "north"),
    ]
    return build_index(gaits)
