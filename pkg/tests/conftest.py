import hypothesis
import hypothesis.strategies as st
import numpy as np
import pytest

from majorana.stellar import random_constellation

hypothesis.settings.register_profile("default", max_examples=40, deadline=None, derandomize=True)
hypothesis.settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)


@st.composite
def constellations(draw, min_two_j=1, max_two_j=6):
    two_j = draw(st.integers(min_two_j, max_two_j))
    return random_constellation(two_j, np.random.default_rng(draw(seeds)))


@st.composite
def generic_constellations(draw, min_two_j=1, max_two_j=6):
    """Stars kept off the poles so the spherical frame and the +z string are harmless."""
    u = draw(constellations(min_two_j, max_two_j))
    hypothesis.assume(np.all(np.hypot(u.stars[:, 0], u.stars[:, 1]) > 0.05))
    hypothesis.assume(np.all(u.stars[:, 2] < 0.95))
    return u


@st.composite
def unit_vectors(draw):
    v = np.random.default_rng(draw(seeds)).normal(size=3)
    return v / np.linalg.norm(v)


@pytest.fixture
def rng():
    return np.random.default_rng(20120917)


def equator(phi):
    return np.array([np.cos(phi), np.sin(phi), 0.0])


Z = np.array([0.0, 0.0, 1.0])
X = np.array([1.0, 0.0, 0.0])
Y = np.array([0.0, 1.0, 0.0])


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
