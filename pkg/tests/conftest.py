from __future__ import annotations

from importlib import resources

import numpy as np
import pytest

from quake_lab.io import load_laminations, load_surface

FIXTURES = resources.files("quake_lab").joinpath("fixtures")


def fixture_path(name: str) -> str:
    return str(FIXTURES / name)


def load_pair(surface: str, laminations: str):
    point = load_surface(fixture_path(surface))
    return point, load_laminations(fixture_path(laminations), point.topology)


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


@pytest.fixture(scope="session")
def torus():
    return load_surface(fixture_path("torus_surface.json"))


@pytest.fixture(scope="session")
def sphere():
    return load_surface(fixture_path("sphere_surface.json"))


@pytest.fixture(scope="session")
def torus_fixtures(torus):
    return {
        name: load_laminations(fixture_path(f"torus_{name}.json"), torus.topology)
        for name in ("compact", "spiral", "mixed", "single")
    }
