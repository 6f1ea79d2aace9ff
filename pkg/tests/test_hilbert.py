import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import X, Y, Z, seeds, unit_vectors
from majorana.hilbert import (
    SpinState,
    check_hermitian,
    coherent_state,
    cs_overlap,
    discrete_holonomy,
    evolve_schrodinger,
    husimi,
    quadrupole_matrices,
    ray_fidelity,
    resolution_of_unity,
    spherical_triangle_area,
    spin_matrices,
    two_j_of,
)
from majorana.stellar import random_state, state_to_constellation

two_js = st.integers(1, 12)


def test_spin_half_matrices():
    jx, jy, jz = spin_matrices(0.5)
    np.testing.assert_allclose(jx, [[0, 0.5], [0.5, 0]])
    np.testing.assert_allclose(jy, [[0, -0.5j], [0.5j, 0]])
    np.testing.assert_allclose(jz, np.diag([0.5, -0.5]))


def test_spin_one_jz_descending():
    np.testing.assert_allclose(spin_matrices(1)[2], np.diag([1.0, 0.0, -1.0]))


@pytest.mark.parametrize("j", [0.5, 1, 1.5, 2, 3.5])
def test_commutator_and_casimir(j):
    jx, jy, jz = spin_matrices(j)
    assert np.abs(jx @ jy - jy @ jx - 1j * jz).max() < 1e-12
    casimir = jx @ jx + jy @ jy + jz @ jz
    np.testing.assert_allclose(casimir, j * (j + 1) * np.eye(len(jz)), atol=1e-12)


def test_quadrupole_traceless_symmetric():
    q = quadrupole_matrices(1.5)
    assert np.abs(sum(q[m, m] for m in range(3))).max() < 1e-12
    assert np.abs(q - q.transpose(1, 0, 2, 3)).max() < 1e-12


def test_two_j_rejects_non_half_integers():
    with pytest.raises(ValueError):
        two_j_of(0.3)


def test_zero_state_rejected():
    with pytest.raises(ValueError):
        SpinState(1, [0, 0])
    with pytest.raises(ValueError):
        SpinState(2, [1, 0])


def test_coherent_state_examples():
    np.testing.assert_allclose(coherent_state(2, Z).amplitudes, [1, 0, 0, 0, 0], atol=1e-15)
    np.testing.assert_allclose(coherent_state(0.5, X).amplitudes, [2**-0.5, 2**-0.5], atol=1e-15)


@given(two_js, unit_vectors())
def test_coherent_state_saturates_spin(two_j, n):
    cs = coherent_state(two_j / 2, n)
    assert abs(cs.norm2() - 1) < 1e-12
    jv = spin_matrices(two_j / 2)
    proj = sum(n[m] * jv[m] for m in range(3))
    assert abs(cs.expect(proj) - two_j / 2) < 1e-10


def test_cs_overlap_examples():
    assert abs(cs_overlap(2, X, X) - 1) < 1e-15
    assert abs(cs_overlap(1.5, Z, -Z)) < 1e-15
    ov = cs_overlap(0.5, X, Y)
    assert abs(abs(ov) - 2**-0.5) < 1e-12
    direct = np.vdot(coherent_state(0.5, X).amplitudes, coherent_state(0.5, Y).amplitudes)
    assert abs(ov - direct) < 1e-12


@given(two_js, unit_vectors(), unit_vectors())
def test_cs_overlap_matches_inner_product(two_j, a, b):
    j = two_j / 2
    direct = np.vdot(coherent_state(j, a).amplitudes, coherent_state(j, b).amplitudes)
    assert abs(cs_overlap(j, a, b) - direct) < 1e-10


def test_triangle_area_octant():
    assert abs(spherical_triangle_area(Z, X, Y) - np.pi / 2) < 1e-14
    assert abs(spherical_triangle_area(Z, Y, X) + np.pi / 2) < 1e-14


def test_husimi_examples():
    cs = coherent_state(1.5, Z)
    assert abs(husimi(cs, -Z)) < 1e-30
    assert abs(husimi(cs, Z) - 1) < 1e-14


@given(seeds)
def test_husimi_vanishes_at_stars(seed):
    s = random_state(4, np.random.default_rng(seed))
    for star in state_to_constellation(s).stars:
        assert husimi(s.normalized(), star) < 1e-18


@pytest.mark.parametrize("j", [0.5, 1, 1.5, 2, 3])
def test_resolution_of_unity(j):
    np.testing.assert_allclose(resolution_of_unity(j), np.eye(int(2 * j + 1)), atol=1e-8)


def test_check_hermitian():
    with pytest.raises(ValueError):
        check_hermitian(np.array([[0, 1], [0, 0]]))


def test_evolution_examples(rng):
    s = random_state(3, rng).normalized()
    out = evolve_schrodinger(s, np.zeros((4, 4)), 0.1, 5)
    assert len(out) == 6
    assert all(ray_fidelity(s, o) > 1 - 1e-15 for o in out)

    h = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = h + h.conj().T
    energies = [o.expect(h).real for o in evolve_schrodinger(s, h, 0.3, 20)]
    assert np.ptp(energies) < 1e-12


def test_spin_half_precession():
    b = 1.7
    s = coherent_state(0.5, X)
    jz = spin_matrices(0.5)[2]
    dt = 0.05
    for k, st_ in enumerate(evolve_schrodinger(s, -b * jz, dt, 40)):
        star = state_to_constellation(st_).stars[0]
        # star sits antipodal to the spin, which turns clockwise about z at rate b
        expected = -np.array([np.cos(b * k * dt), -np.sin(b * k * dt), 0])
        assert np.linalg.norm(star - expected) < 1e-12


def test_holonomy_constant_loop_and_gauge(rng):
    s = random_state(4, rng)
    assert discrete_holonomy([s] * 5) == 0.0
    theta = 1.0
    loop = [coherent_state(0.5, [np.sin(theta) * np.cos(p), np.sin(theta) * np.sin(p), np.cos(theta)])
            for p in np.linspace(0, 2 * np.pi, 2001)]
    phase = discrete_holonomy(loop)
    expected = -0.5 * 2 * np.pi * (1 - np.cos(theta))
    assert abs(np.angle(np.exp(1j * (phase - expected)))) < 1e-4
    scaled = [SpinState(s.two_j, s.amplitudes * rng.uniform(0.5, 2) * np.exp(1j * rng.uniform(0, 6)))
              for s in loop[:-1]]
    scaled.append(SpinState(loop[0].two_j, scaled[0].amplitudes * 3j))
    assert abs(discrete_holonomy(scaled) - phase) < 1e-12


def test_holonomy_rejects_open_loop(rng):
    with pytest.raises(ValueError):
        discrete_holonomy([random_state(2, rng), random_state(2, rng)])


@given(two_js, unit_vectors())
def test_cs_overlap_modulus_on_axis(two_j, n):
    j = two_j / 2
    for axis in (Z, -Z):
        direct = np.vdot(coherent_state(j, axis).amplitudes, coherent_state(j, n).amplitudes)
        assert abs(abs(cs_overlap(j, axis, n)) - abs(direct)) < 1e-12
