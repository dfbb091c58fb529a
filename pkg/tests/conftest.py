import numpy as np
import pytest

import pointspec as ps


@pytest.fixture(scope="session")
def ginibre_ball():
    """One Ginibre realization on Ball(40), shared across the session.

    The eigenvalue solve is the expensive part, so sample once.
    """
    return ps.sample_ginibre(40.0, seed=2026)


@pytest.fixture()
def poisson_box():
    return ps.sample_poisson(ps.Box((40.0, 40.0)), 1.0 / np.pi, seed=17)


@pytest.fixture()
def small_pattern():
    window = ps.Box((6.0, 4.0))
    pts = np.array([[-2.0, -1.0], [0.5, 0.25], [2.5, 1.5], [-1.0, 1.9]])
    return ps.PointPattern(pts, window, intensity=4.0 / window.volume)
