"""Majorana stars <-> spin states.

A star u contributes the Schwinger-boson factor a+_{-u} =
sin(theta/2) a+_up - cos(theta/2) e^{i phi} a+_down.  Up to the positive
prefactor prod sin(theta_i/2) the product of factors is the polynomial
prod (z - z_i) in the stereographic variable z = cot(theta/2) e^{i phi}, so a
star sitting exactly at +z shows up as a missing leading power.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.optimize import linear_sum_assignment

from .hilbert import SpinState, half_angles

UNIT_TOL = 1e-10
DEFICIT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Constellation:
    """Multiset of 2J unit vectors; row order carries no meaning."""

    stars: np.ndarray

    def __post_init__(self):
        stars = np.array(self.stars, dtype=float).reshape(-1, 3)
        norms = np.einsum("ij,ij->i", stars, stars)
        if np.any(np.abs(norms - 1) > UNIT_TOL):
            raise ValueError("every star must be a unit vector")
        stars /= np.sqrt(norms)[:, None]
        stars.setflags(write=False)
        object.__setattr__(self, "stars", stars)

    @property
    def two_j(self) -> int:
        return len(self.stars)

    @property
    def j(self) -> float:
        return len(self.stars) / 2

    def __len__(self):
        return len(self.stars)

    def without(self, *idx: int) -> Constellation:
        if len(set(idx)) != len(idx):
            raise ValueError("duplicate star indices")
        keep = np.setdiff1d(np.arange(len(self.stars)), idx)
        return Constellation(self.stars[keep])

    def with_star(self, u) -> Constellation:
        return Constellation(np.vstack([self.stars, np.reshape(u, (1, 3))]))

    def rotated(self, rot: np.ndarray) -> Constellation:
        return Constellation(self.stars @ np.asarray(rot).T)


def star_factors(stars: np.ndarray) -> np.ndarray:
    """Spinor (coefficient of a+_up, coefficient of a+_down) of a+_{-u} per star."""
    c, s, phase = half_angles(stars)
    return np.stack([s + 0j, -c * phase], axis=-1)


def _expand(factors: np.ndarray) -> np.ndarray:
    """Coefficients of prod_i (p_i x + q_i y) in powers x^{N-k} y^k."""
    poly = np.ones(1, dtype=complex)
    for p, q in factors:
        poly = np.convolve(poly, [p, q])
    return poly


def _fock_weights(two_j: int) -> np.ndarray:
    # x^{J+M} y^{J-M}/sqrt((2J)!) = |J,M> / sqrt(binom(2J, J-M))
    return 1 / np.sqrt(np.array([comb(two_j, k) for k in range(two_j + 1)], dtype=float))


def constellation_to_state(u: Constellation) -> SpinState:
    """Fiducial (unnormalized) state prod a+_{-u_i} |0> / sqrt((2J)!)."""
    poly = _expand(star_factors(u.stars))
    return SpinState(u.two_j, poly * _fock_weights(u.two_j))


def state_derivatives(u: Constellation, frame) -> np.ndarray:
    """d|Psi_U>/d(u_i along e_i^alpha), shape (2J, 2, 2J+1).

    The derivative is taken along the great circle leaving u_i in the
    direction of each frame vector.  Frames must not sit on the poles, where
    the spherical chart used for the spinor derivative is singular.
    """
    stars = u.stars
    c, s, phase = half_angles(stars)
    sin_t = 2 * s * c
    if np.any(sin_t < 1e-8):
        raise ValueError("state_derivatives needs stars away from the poles")
    theta_hat = np.stack([c**2 - s**2, np.zeros_like(c), -sin_t], axis=-1)
    # theta-hat in the local azimuth: rotate (cos t, 0, -sin t) by phi
    ph = np.angle(phase)
    theta_hat = np.stack(
        [np.cos(ph) * theta_hat[:, 0], np.sin(ph) * theta_hat[:, 0], theta_hat[:, 2]], axis=-1
    )
    phi_hat = np.stack([-np.sin(ph), np.cos(ph), np.zeros_like(ph)], axis=-1)
    factors = star_factors(stars)
    d_theta = np.stack([c / 2 + 0j, s / 2 * phase], axis=-1)
    d_phi = np.stack([np.zeros_like(c) + 0j, -1j * c * phase], axis=-1) / sin_t[:, None]
    weights = _fock_weights(u.two_j)
    out = np.empty((len(stars), 2, u.two_j + 1), dtype=complex)
    for i in range(len(stars)):
        for a, e in enumerate((frame.e1[i], frame.e2[i])):
            df = (e @ theta_hat[i]) * d_theta[i] + (e @ phi_hat[i]) * d_phi[i]
            fac = factors.copy()
            fac[i] = df
            out[i, a] = _expand(fac) * weights
    return out


def stereo_to_star(z: complex) -> np.ndarray:
    """Star for a root z = cot(theta/2) e^{i phi} of the Majorana polynomial."""
    if abs(z) <= 1:
        r2 = abs(z) ** 2
        return np.array([2 * z.real, 2 * z.imag, r2 - 1]) / (r2 + 1)
    w = 1 / z
    r2 = abs(w) ** 2
    return np.array([2 * w.real, -2 * w.imag, 1 - r2]) / (1 + r2)


def _polish(coeffs: np.ndarray, root: complex, steps: int = 2) -> complex:
    """Newton steps on whichever chart (z or 1/z) keeps the root inside the unit disc."""
    if abs(root) > 1:
        rev = coeffs[::-1]
        return 1 / _polish(rev, 1 / root, steps)
    deriv = np.polyder(coeffs)
    z = root
    for _ in range(steps):
        val = np.polyval(coeffs, z)
        dv = np.polyval(deriv, z)
        if dv == 0:
            break
        cand = z - val / dv
        if abs(np.polyval(coeffs, cand)) < abs(val):
            z = cand
        else:
            break
    return z


def state_to_constellation(state: SpinState) -> Constellation:
    """Stars of a state from the roots of its Majorana polynomial."""
    c = state.amplitudes
    scale = np.abs(c).max()
    poly = c / _fock_weights(state.two_j)
    lead = 0
    while lead < len(c) and abs(c[lead]) < DEFICIT_TOL * scale:
        lead += 1
    stars = [np.array([0.0, 0.0, 1.0])] * lead
    reduced = poly[lead:]
    if len(reduced) > 1:
        roots = np.roots(reduced)
        stars += [stereo_to_star(_polish(reduced, r)) for r in roots]
    return Constellation(np.array(stars).reshape(-1, 3))


def chordal_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.linalg.norm(a[:, None, :] - b[None, :, :], axis=-1)


def align_stars(reference: np.ndarray, stars: np.ndarray) -> np.ndarray:
    """Reorder ``stars`` to follow ``reference`` (minimum total chordal distance)."""
    _, cols = linear_sum_assignment(chordal_matrix(reference, stars))
    return stars[cols]


def match_constellations(a: Constellation, b: Constellation) -> float:
    """Bottleneck distance: min over pairings of the largest star displacement."""
    if a.two_j != b.two_j:
        raise ValueError("constellations have different spin")
    if a.two_j == 0:
        return 0.0
    dist = chordal_matrix(a.stars, b.stars)
    levels = np.unique(dist)
    lo, hi = 0, len(levels) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        rows, cols = linear_sum_assignment((dist > levels[mid]).astype(float))
        if np.any(dist[rows, cols] > levels[mid]):
            lo = mid + 1
        else:
            hi = mid
    return float(levels[lo])


def random_constellation(two_j: int, rng: np.random.Generator) -> Constellation:
    v = rng.normal(size=(two_j, 3))
    return Constellation(v / np.linalg.norm(v, axis=1, keepdims=True))


def random_state(two_j: int, rng: np.random.Generator) -> SpinState:
    amps = rng.normal(size=two_j + 1) + 1j * rng.normal(size=two_j + 1)
    return SpinState(two_j, amps / np.linalg.norm(amps))


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q *= np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    return q
