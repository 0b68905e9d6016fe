import numpy as np
import pytest

from optilik.measures import DiscreteMeasure


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def two_atoms():
    """1/2 delta_{-1} + 1/2 delta_{1}."""
    return DiscreteMeasure(points=[[-1.0], [1.0]], weights=[0.5, 0.5])


@pytest.fixture
def spread_atoms():
    """Same mean and variance as ``two_atoms``, wider support."""
    return DiscreteMeasure(
        points=[[-2.0], [-0.5], [0.5], [2.0]], weights=[0.1, 0.4, 0.4, 0.1]
    )


@pytest.fixture
def toy_csv(tmp_path):
    """Two classes on the line, class ``a`` around -1 and class ``b`` around +1."""
    path = tmp_path / "toy.csv"
    path.write_text(
        "x,label\n"
        "-1.5,a\n-1.0,a\n-0.5,a\n-1.2,a\n"
        "1.5,b\n1.0,b\n0.5,b\n1.2,b\n"
    )
    return path


@pytest.fixture
def symmetric_csv(tmp_path):
    """Mirror-image classes: every point of class 0 reflected is a point of class 1."""
    path = tmp_path / "symmetric.csv"
    path.write_text("x,label\n-2,0\n-1,0\n-0.5,0\n2,1\n1,1\n0.5,1\n")
    return path


@pytest.fixture
def single_thread(monkeypatch):
    from optilik.config import config

    monkeypatch.setattr(config, "threads", 1)
    return config
