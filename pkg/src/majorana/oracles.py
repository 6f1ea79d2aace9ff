"""Independent reference computations used by the checks and tests.

Nothing in the library proper calls these; each one reaches its answer by
a different route (exhaustive enumeration, quadrature, dense linear
algebra, finite differences) than the closed forms it is compared with.
"""

from __future__ import annotations

import numpy as np

from .diagrams import WeightedGraph
from .geometry import TangentFrame, connection_vectors
from .hilbert import SpinState, husimi_grid, quadrupole_matrices, spin_matrices, sphere_quadrature
from .stellar import Constellation, constellation_to_state, state_derivatives


def enumerate_matchings(n_dots: int):
    """Yield every partial matching of ``range(n_dots)`` as a list of pairs."""

    def rec(free):
        if not free:
            yield []
            return
        v, rest = free[0], free[1:]
        yield from rec(rest)
        for idx, w in enumerate(rest):
            for m in rec(rest[:idx] + rest[idx + 1 :]):
                yield [(v, w)] + m

    yield from rec(list(range(n_dots)))


def brute_force_matching_sums(g: WeightedGraph) -> np.ndarray:
    """Diagram sums by listing every partial matching explicitly."""
    k, n = g.n_open, g.n_solid
    w = np.zeros((k + n, k + n))
    w[:k, :k] = g.open_open
    w[:k, k:] = g.solid_open.T
    w[k:, :k] = g.solid_open
    w[k:, k:] = g.solid_solid
    out = np.zeros((k + n) // 2 + 1)
    for m in enumerate_matchings(k + n):
        linked = {v for pair in m for v in pair}
        if any(o not in linked for o in range(k)):
            continue
        out[len(m)] += np.prod([w[a, b] for a, b in m]) if m else 1.0
    return out


def dense_moments(state: SpinState) -> tuple[np.ndarray, np.ndarray]:
    """<J_mu> and <Q_mu nu> from the operator matrices."""
    jv = spin_matrices(state.j)
    q = quadrupole_matrices(state.j)
    dip = np.array([state.expect(m).real for m in jv])
    quad = np.array([[state.expect(q[a, b]).real for b in range(3)] for a in range(3)])
    return dip, quad


def husimi_partition_function(u: Constellation, n_theta: int = 64, n_phi: int = 128) -> float:
    """(1/4 pi) * integral of the Husimi function of the fiducial state."""
    nodes, weights = sphere_quadrature(n_theta, n_phi)
    q = husimi_grid(constellation_to_state(u), nodes)
    return float(weights @ q / (4 * np.pi))


def husimi_averages(u: Constellation, n_theta: int = 64, n_phi: int = 128):
    """<n> and <n n> weighted by the Husimi function, by quadrature."""
    nodes, weights = sphere_quadrature(n_theta, n_phi)
    q = husimi_grid(constellation_to_state(u), nodes) * weights
    z = q.sum()
    return q @ nodes / z, np.einsum("k,ki,kj->ij", q, nodes, nodes) / z


def qgt(u: Constellation, frame: TangentFrame) -> np.ndarray:
    """Quantum geometric tensor h_ab of the fiducial state in the star frame, (2N, 2N)."""
    psi = constellation_to_state(u).amplitudes
    norm = np.vdot(psi, psi).real
    d = state_derivatives(u, frame).reshape(-1, len(psi))
    overlaps = d.conj() @ psi
    return (d.conj() @ d.T) / norm - np.outer(overlaps, overlaps.conj()) / norm**2


def _chart(stars: np.ndarray, basis: np.ndarray, x: np.ndarray):
    """Stars at chart coordinates x (N, 2) and the coordinate tangent vectors (N, 2, 3)."""
    v = stars + np.einsum("ia,iad->id", x, basis)
    r = np.linalg.norm(v, axis=1)
    w = v / r[:, None]
    tangents = (basis - np.einsum("id,iad->ia", w, basis)[..., None] * w[:, None, :]) / r[:, None, None]
    return w, tangents


def curl_of_connection(u: Constellation, frame: TangentFrame, step: float = 1e-4) -> np.ndarray:
    """f_ab = d_a A_b - d_b A_a by central differences in a local chart, (2N, 2N)."""
    stars = np.array(u.stars)
    basis = frame.basis
    n = len(stars)

    def potential(x):
        w, tangents = _chart(stars, basis, x)
        a = connection_vectors(Constellation(w))
        return np.einsum("id,iad->ia", a, tangents).reshape(-1)

    jac = np.zeros((2 * n, 2 * n))
    for c in range(2 * n):
        dx = np.zeros(2 * n)
        dx[c] = step
        jac[c] = (potential(dx.reshape(n, 2)) - potential(-dx.reshape(n, 2))) / (2 * step)
    return jac - jac.T


def perturbed(u: Constellation, frame: TangentFrame, x: np.ndarray) -> Constellation:
    """Move every star along the great circle through its frame displacement x (N, 2)."""
    stars = np.array(u.stars)
    out = np.empty_like(stars)
    for i in range(len(stars)):
        t = np.einsum("a,ad->d", x[i], frame.basis[i])
        ang = np.linalg.norm(t)
        out[i] = stars[i] if ang == 0 else np.cos(ang) * stars[i] + np.sin(ang) * t / ang
    return Constellation(out)
