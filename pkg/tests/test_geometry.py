import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import X, Z, equator, generic_constellations, seeds
from majorana import checks, oracles
from majorana.geometry import (
    DiracStringError,
    StarPath,
    batch_tensors,
    berry_connection,
    connection_from_free_energy,
    connection_vectors,
    dirac_string_potential,
    fubini_study_distance,
    geometric_phase,
    holonomy_phase,
    line_integral_phase,
    phase_difference,
    quantum_tensors,
    tangent_frame,
)
from majorana.hilbert import SpinState
from majorana.stellar import Constellation, constellation_to_state, random_constellation


def test_frame_is_orthonormal_and_right_handed(rng):
    u = random_constellation(6, rng).stars
    fr = tangent_frame(np.vstack([u, Z, -Z]))
    for i, s in enumerate(np.vstack([u, Z, -Z])):
        basis = np.array([fr.e1[i], fr.e2[i], s])
        np.testing.assert_allclose(basis @ basis.T, np.eye(3), atol=1e-14)
        assert np.linalg.det(basis) > 0


def test_frame_is_spherical_away_from_poles():
    theta, phi = 1.0, 0.4
    u = np.array([[np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)]])
    fr = tangent_frame(u)
    theta_hat = [np.cos(theta) * np.cos(phi), np.cos(theta) * np.sin(phi), -np.sin(theta)]
    np.testing.assert_allclose(fr.e1[0], theta_hat, atol=1e-15)
    np.testing.assert_allclose(fr.e2[0], [-np.sin(phi), np.cos(phi), 0], atol=1e-15)


def test_spin_half_tensors(rng):
    u = checks.generic_constellation(1, rng)
    t = quantum_tensors(u)
    np.testing.assert_allclose(t.g, np.eye(2), atol=1e-15)
    np.testing.assert_allclose(t.f, [[0, 0.5], [-0.5, 0]], atol=1e-15)


def test_spin_half_connection_is_monopole(rng):
    u = checks.generic_constellation(1, rng)
    s = u.stars[0]
    np.testing.assert_allclose(connection_vectors(u)[0], -0.5 * np.cross(Z, s) / (1 - s[2]), atol=1e-15)
    assert abs(np.linalg.norm(connection_vectors(Constellation([equator(0.7)]))) - 0.5) < 1e-15


def test_dirac_string_rejected():
    with pytest.raises(DiracStringError):
        connection_vectors(Constellation([Z, X]))


def test_dirac_string_potential_for_lone_star():
    s = equator(1.2)
    a = dirac_string_potential(s, -s)
    np.testing.assert_allclose(a, -0.5 * np.cross(Z, s), atol=1e-15)


@given(generic_constellations(1, 6))
def test_tensors_match_dense_qgt(u):
    fr = tangent_frame(u.stars)
    h = oracles.qgt(u, fr)
    t = quantum_tensors(u, fr)
    assert np.abs(t.g - 4 * h.real).max() < 1e-9
    assert np.abs(t.f + 2 * h.imag).max() < 1e-9


@given(generic_constellations(1, 6))
def test_kahler_relations_on_dense_qgt(u):
    h = oracles.qgt(u, tangent_frame(u.stars))
    n = u.two_j
    g = (4 * h.real).reshape(n, 2, n, 2)
    f = (-2 * h.imag).reshape(n, 2, n, 2)
    tol = 1e-9
    assert np.abs(2 * f[:, 0, :, 1] - g[:, 0, :, 0]).max() < tol
    assert np.abs(-2 * f[:, 1, :, 0] - g[:, 0, :, 0]).max() < tol
    assert np.abs(g[:, 1, :, 1] - g[:, 0, :, 0]).max() < tol
    assert np.abs(-2 * f[:, 0, :, 0] - g[:, 0, :, 1]).max() < tol
    assert np.abs(-2 * f[:, 1, :, 1] - g[:, 0, :, 1]).max() < tol
    assert np.abs(g[:, 1, :, 0] + g[:, 0, :, 1]).max() < tol


@given(generic_constellations(1, 8))
def test_tensor_symmetries(u):
    t = quantum_tensors(u)
    assert np.abs(t.g - t.g.T).max() < 1e-13
    assert np.abs(t.f + t.f.T).max() < 1e-13
    assert np.linalg.eigvalsh(t.g).min() > -1e-10


@given(generic_constellations(1, 8))
def test_diagonal_density_positive(u):
    t = quantum_tensors(u)
    for i in range(u.two_j):
        gi = t.g[2 * i : 2 * i + 2, 2 * i : 2 * i + 2]
        fi = t.f[2 * i : 2 * i + 2, 2 * i : 2 * i + 2]
        assert abs(gi[0, 1]) < 1e-14 and abs(fi[0, 0]) < 1e-14
        assert abs(2 * fi[0, 1] - gi[0, 0]) < 1e-14
        assert fi[0, 1] > 0


@given(generic_constellations(1, 6), seeds)
def test_metric_vs_fubini_study(u, seed):
    rng = np.random.default_rng(seed)
    fr = tangent_frame(u.stars)
    g = quantum_tensors(u, fr).g
    x = rng.normal(size=(u.two_j, 2))
    x *= 1e-3 / np.linalg.norm(x)
    d = fubini_study_distance(constellation_to_state(u), constellation_to_state(oracles.perturbed(u, fr, x)))
    quad = x.ravel() @ g @ x.ravel()
    assert abs(d**2 - quad) / quad < 1e-2


@given(generic_constellations(1, 5))
def test_curvature_is_curl_of_connection(u):
    fr = tangent_frame(u.stars)
    assert np.abs(quantum_tensors(u, fr).f - oracles.curl_of_connection(u, fr)).max() < 1e-5


@given(generic_constellations(1, 4), st.data())
def test_stokes_small_circuit(u, data):
    i = data.draw(st.integers(0, u.two_j - 1))
    fr = tangent_frame(u.stars)
    r = 1e-2
    samples = []
    for t in np.linspace(0, 2 * np.pi, 801):
        stars = np.array(u.stars)
        v = stars[i] + r * (np.cos(t) * fr.e1[i] + np.sin(t) * fr.e2[i])
        stars[i] = v / np.linalg.norm(v)
        samples.append(Constellation(stars))
    circulation = line_integral_phase(StarPath(samples))
    # projected disc has area pi r^2 / (1 + r^2) to leading order on the sphere
    flux = quantum_tensors(u, fr).f[2 * i, 2 * i + 1] * np.pi * r**2
    assert abs(circulation - flux) < 1e-5


@given(generic_constellations(1, 5))
def test_connection_two_ways(u):
    fr = tangent_frame(u.stars)
    assert np.abs(berry_connection(u, fr) - connection_from_free_energy(u, fr)).max() < 1e-8


def test_fubini_study_examples(rng):
    a = SpinState(3, rng.normal(size=4) + 1j * rng.normal(size=4))
    assert fubini_study_distance(a, SpinState(3, 2.5j * a.amplitudes)) < 1e-7
    assert abs(fubini_study_distance(SpinState(2, [1, 0, 0]), SpinState(2, [0, 0, 1])) - np.pi) < 1e-15
    with pytest.raises(ValueError):
        fubini_study_distance(a, SpinState(2, [1, 0, 0]))


def test_spin_half_flux():
    assert checks.spin_half_flux().passed


def test_batch_tensors_shape(rng):
    stars = np.array([checks.generic_constellation(3, rng).stars for _ in range(4)])
    g, f = batch_tensors(stars, [tangent_frame(s) for s in stars])
    assert g.shape == f.shape == (4, 6, 6)
    np.testing.assert_allclose(g[2], quantum_tensors(Constellation(stars[2])).g)


def test_constant_path_has_no_phase(rng):
    u = checks.generic_constellation(3, rng)
    path = StarPath([u] * 10)
    assert line_integral_phase(path) == 0.0
    assert holonomy_phase(path) == 0.0


@pytest.mark.parametrize("two_j", [1, 2, 4])
def test_coherent_latitude_loop(two_j):
    theta = 1.1
    expected = -two_j / 2 * 2 * np.pi * (1 - np.cos(theta))
    path = checks.coherent_loop(two_j, theta, 2000)
    for method in ("holonomy", "line_integral"):
        assert phase_difference(geometric_phase(path, method), expected) < 1e-4


def test_one_star_circling(rng):
    fixed = np.array([0.3, -0.5, -0.8])
    fixed /= np.linalg.norm(fixed)
    theta = 2.0
    samples = [
        Constellation([[np.sin(theta) * np.cos(p), np.sin(theta) * np.sin(p), np.cos(theta)], fixed])
        for p in np.linspace(0, 2 * np.pi, 2001)
    ]
    path = StarPath(samples)
    assert phase_difference(line_integral_phase(path), holonomy_phase(path)) < 1e-3


def test_methods_agree_on_random_loops(rng):
    for two_j in (1, 2, 3):
        path = checks.smooth_loop(two_j, rng, 1000)
        assert phase_difference(line_integral_phase(path), holonomy_phase(path)) < 1e-3


def test_phase_rejects_bad_paths(rng):
    u = checks.generic_constellation(2, rng)
    with pytest.raises(ValueError):
        geometric_phase(StarPath([u, u], closed=False))
    with pytest.raises(ValueError):
        geometric_phase(StarPath([u]), method="stokes")
    with pytest.raises(ValueError):
        StarPath([u, random_constellation(3, rng)])


def test_string_crossing_needs_holonomy():
    samples = [Constellation([[np.sin(t), 0, np.cos(t)]]) for t in np.linspace(0.5, 2 * np.pi + 0.5, 400)]
    path = StarPath(samples)
    with pytest.raises(DiracStringError):
        line_integral_phase(path)
    assert np.isfinite(holonomy_phase(path))
