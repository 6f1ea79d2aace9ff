from math import factorial

import numpy as np
import pytest
from hypothesis import given

from conftest import Z, constellations, seeds
from majorana import oracles
from majorana.diagrams import free_energy
from majorana.moments import (
    MomentTable,
    batch_moments,
    dipole,
    mean_n,
    mean_nn,
    moment_set,
    quadrupole,
    reduced_average,
    reduced_moments,
)
from majorana.stellar import Constellation, constellation_to_state, random_constellation, random_rotation


def test_spin_half_mean_n(rng):
    u = random_constellation(1, rng)
    np.testing.assert_allclose(mean_n(u), -u.stars[0] / 3, atol=1e-15)


def test_spin_half_mean_nn_matches_quadrature():
    u = Constellation([Z])
    mnn = mean_nn(u)
    _, ref = oracles.husimi_averages(u)
    np.testing.assert_allclose(mnn, ref, atol=1e-12)
    a = mnn[0, 0]
    np.testing.assert_allclose(mnn, np.diag([a, a, 1 - 2 * a]), atol=1e-15)


def test_antipodal_pair_is_axial():
    mnn = mean_nn(Constellation([Z, -Z]))
    assert abs(mnn[0, 0] - mnn[1, 1]) < 1e-15
    assert np.abs(mnn - np.diag(np.diag(mnn))).max() < 1e-15
    np.testing.assert_allclose(quadrupole(Constellation([Z, -Z])), np.diag([1 / 3, 1 / 3, -2 / 3]), atol=1e-14)


def test_spin_one_closed_forms(rng):
    for _ in range(20):
        u = random_constellation(2, rng)
        u1, u2 = u.stars
        d12 = (1 - u1 @ u2) / 2
        np.testing.assert_allclose(dipole(u), -(u1 + u2) / (2 - d12), atol=1e-12)
        quad = ((np.outer(u1, u2) + np.outer(u2, u1)) / 2 - (u1 @ u2) * np.eye(3) / 3) / (2 - d12)
        np.testing.assert_allclose(quadrupole(u), quad, atol=1e-12)


@pytest.mark.parametrize("two_j", [1, 3, 6])
def test_coherent_dipole_saturates(two_j, rng):
    n0 = random_constellation(1, rng).stars[0]
    u = Constellation(np.repeat(-n0[None], two_j, axis=0))
    np.testing.assert_allclose(dipole(u), two_j / 2 * n0, atol=1e-12)


@given(constellations(1, 8))
def test_moments_match_dense_oracle(u):
    dip, quad = oracles.dense_moments(constellation_to_state(u))
    assert np.abs(dipole(u) - dip).max() < 1e-9
    assert np.abs(quadrupole(u) - quad).max() < 1e-9


@given(constellations(1, 6))
def test_averages_match_quadrature(u):
    mn, mnn = oracles.husimi_averages(u)
    assert np.abs(mean_n(u) - mn).max() < 1e-8
    assert np.abs(mean_nn(u) - mnn).max() < 1e-8


@given(constellations(1, 8))
def test_mean_nn_unit_trace_and_symmetric(u):
    mnn = mean_nn(u)
    assert abs(np.trace(mnn) - 1) < 1e-10
    assert np.abs(mnn - mnn.T).max() < 1e-14
    q = quadrupole(u)
    assert abs(np.trace(q)) < 1e-12


@given(constellations(1, 6), seeds)
def test_rotation_covariance(u, seed):
    rot = random_rotation(np.random.default_rng(seed))
    v = u.rotated(rot)
    assert np.abs(mean_n(v) - rot @ mean_n(u)).max() < 1e-10
    assert np.abs(mean_nn(v) - rot @ mean_nn(u) @ rot.T).max() < 1e-10


@given(constellations(1, 6), seeds)
def test_two_star_addition(u, seed):
    a, b = random_constellation(2, np.random.default_rng(seed)).stars
    lhs = free_energy(u.with_star(a).with_star(b)) - free_energy(u) - 2 * np.log(2)
    rhs = -np.log(1 - (a + b) @ mean_n(u) + a @ mean_nn(u) @ b)
    assert abs(lhs - rhs) < 1e-10


@pytest.mark.parametrize("two_j", [1, 2, 3, 4])
def test_p_representation_prefactors(two_j, rng):
    """Husimi averages times (2J+1+l)!/((2J+1)! 2^l) give the l = 1, 2 moments."""
    u = random_constellation(two_j, rng)
    mn, mnn = oracles.husimi_averages(u)
    dip, quad = oracles.dense_moments(constellation_to_state(u))
    pref = [factorial(two_j + 1 + l) / (factorial(two_j + 1) * 2**l) for l in (1, 2)]
    np.testing.assert_allclose(pref[0] * mn, dip, atol=1e-8)
    np.testing.assert_allclose(pref[1] * (mnn - np.eye(3) / 3), quad, atol=1e-8)


def test_reduced_average_examples(rng):
    u = random_constellation(1, rng)
    np.testing.assert_array_equal(reduced_average(u, [0]), np.zeros(3))
    np.testing.assert_allclose(reduced_average(u, [0], "nn"), np.eye(3) / 3, atol=1e-15)
    v = random_constellation(2, rng)
    np.testing.assert_allclose(reduced_average(v, [0]), -v.stars[1] / 3, atol=1e-15)
    np.testing.assert_allclose(reduced_average(v, [0, 1], "nn"), np.eye(3) / 3, atol=1e-15)


def test_reduced_average_validation(rng):
    u = random_constellation(3, rng)
    with pytest.raises(ValueError):
        reduced_average(u, [1, 1])
    with pytest.raises(IndexError):
        reduced_average(u, [5])
    with pytest.raises(ValueError):
        reduced_average(u, [0], "nnn")


@given(constellations(2, 6))
def test_reduced_moments_match_direct(u):
    m1, m2, p2 = reduced_moments(u.stars)
    for i in range(u.two_j):
        np.testing.assert_allclose(m1[i], mean_n(u.without(i)), atol=1e-12)
    for i in range(u.two_j):
        for j in range(i + 1, u.two_j):
            rest = u.without(i, j)
            ref_n = mean_n(rest) if rest.two_j else np.zeros(3)
            ref_nn = mean_nn(rest) if rest.two_j else np.eye(3) / 3
            np.testing.assert_allclose(m2[i, j], ref_n, atol=1e-12)
            np.testing.assert_allclose(p2[j, i], ref_nn, atol=1e-12)


def test_subset_fast_path_matches_open_dot_sums(rng):
    from majorana.diagrams import alternating_weights, matching_sums, star_graph

    for two_j in range(1, 7):
        u = random_constellation(two_j, rng)
        n = two_j
        den = alternating_weights(n, n, n // 2 + 1) @ matching_sums(star_graph(u.stars))
        for mu in range(3):
            d = matching_sums(star_graph(u.stars, (mu,)))
            num = alternating_weights(n, n + 1, len(d)) @ d
            assert abs(num / ((n + 2) * den) - mean_n(u)[mu]) < 1e-13
            for nu in range(3):
                d = matching_sums(star_graph(u.stars, (mu, nu)))
                num = alternating_weights(n, n + 2, len(d)) @ d
                assert abs(num / ((n + 2) * (n + 3) * den) - mean_nn(u)[mu, nu]) < 1e-13


def test_batch_matches_single(rng):
    stars = np.array([random_constellation(4, rng).stars for _ in range(5)])
    mn, mnn = batch_moments(stars)
    for b in range(5):
        np.testing.assert_allclose(mn[b], mean_n(Constellation(stars[b])), atol=1e-15)
        np.testing.assert_allclose(mnn[b], mean_nn(Constellation(stars[b])), atol=1e-15)


def test_moment_set_fields(rng):
    u = random_constellation(3, rng)
    m = moment_set(u)
    np.testing.assert_allclose(m.dipole, 2.5 * m.mean_n)
    assert isinstance(MomentTable(u.stars).averages()[0], np.ndarray)
