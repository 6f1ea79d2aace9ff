"""Dense (2J+1)-dimensional Hilbert-space routines.

Everything here works directly with amplitude vectors in the |J, M> basis,
ordered by descending M (index k holds M = J - k).  These routines are the
brute-force ground truth that the closed-form star formulas are checked
against.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

HERMITIAN_TOL = 1e-12


def two_j_of(j) -> int:
    """Return 2j as an int, rejecting negative or non-half-integer spins."""
    twice = 2 * float(j)
    two_j = int(round(twice))
    if two_j < 0 or abs(twice - two_j) > 1e-12:
        raise ValueError(f"spin must be a nonnegative half-integer, got {j!r}")
    return two_j


def unit_vector(v, tol: float = 1e-12) -> np.ndarray:
    """Validate a unit 3-vector and return it as a float array."""
    v = np.asarray(v, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    if abs(v @ v - 1.0) > tol:
        raise ValueError(f"not a unit vector: |v|^2 = {v @ v!r}")
    return v


def half_angles(n):
    """Return cos(theta/2), sin(theta/2) and exp(i phi) for unit vectors.

    Works on arrays of shape (..., 3).  The branch on the hemisphere keeps
    full relative precision near both poles.
    """
    n = np.asarray(n, dtype=float)
    x, y, z = n[..., 0], n[..., 1], n[..., 2]
    rho = np.hypot(x, y)
    upper = z >= 0
    with np.errstate(divide="ignore", invalid="ignore"):
        c_up = np.sqrt((1 + np.where(upper, z, 0.0)) / 2)
        s_dn = np.sqrt((1 - np.where(upper, 0.0, z)) / 2)
        c = np.where(upper, c_up, rho / (2 * s_dn))
        s = np.where(upper, rho / (2 * c_up), s_dn)
        phase = np.where(rho > 0, (x + 1j * y) / np.where(rho > 0, rho, 1.0), 1.0 + 0j)
    return c, s, phase


@dataclass(frozen=True, eq=False)
class SpinState:
    """Pure spin-J state; ``amplitudes[k]`` multiplies |J, J-k>."""

    two_j: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if self.two_j < 0:
            raise ValueError("two_j must be nonnegative")
        if amps.shape != (self.two_j + 1,):
            raise ValueError(
                f"expected {self.two_j + 1} amplitudes for 2j={self.two_j}, got {amps.shape}"
            )
        if not np.any(amps):
            raise ValueError("the zero vector is not a physical state")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def j(self) -> float:
        return self.two_j / 2

    @property
    def dim(self) -> int:
        return self.two_j + 1

    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalized(self) -> SpinState:
        return SpinState(self.two_j, self.amplitudes / np.sqrt(self.norm2()))

    def expect(self, op: np.ndarray) -> complex:
        """<psi|op|psi> / <psi|psi>."""
        a = self.amplitudes
        return complex(np.vdot(a, op @ a) / np.vdot(a, a))


def spin_matrices(j) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Jx, Jy, Jz for spin j in the descending-M basis."""
    two_j = two_j_of(j)
    jj = two_j / 2
    m = jj - np.arange(two_j + 1)
    # <m+1|J+|m> sits one row above the diagonal in descending order
    raise_ = np.diag(np.sqrt(jj * (jj + 1) - m[1:] * (m[1:] + 1)), 1).astype(complex)
    lower = raise_.conj().T
    jx = (raise_ + lower) / 2
    jy = (raise_ - lower) / 2j
    jz = np.diag(m).astype(complex)
    return jx, jy, jz


def quadrupole_matrices(j) -> np.ndarray:
    """Array Q[mu, nu] of symmetrized traceless quadrupole operators."""
    jv = spin_matrices(j)
    jj = two_j_of(j) / 2
    eye = np.eye(len(jv[0]))
    q = np.empty((3, 3) + eye.shape, dtype=complex)
    for mu in range(3):
        for nu in range(3):
            q[mu, nu] = (jv[mu] @ jv[nu] + jv[nu] @ jv[mu]) / 2
            if mu == nu:
                q[mu, nu] -= jj * (jj + 1) / 3 * eye
    return q


def coherent_state(j, n) -> SpinState:
    """Spin coherent state |n^(J)> (unit norm, <J.n> = J)."""
    two_j = two_j_of(j)
    n = unit_vector(n, tol=1e-10)
    c, s, phase = half_angles(n)
    k = np.arange(two_j + 1)
    binom = np.array([comb(two_j, int(kk)) for kk in k], dtype=float)
    amps = np.sqrt(binom) * complex(c) ** (two_j - k) * (complex(s) * complex(phase)) ** k
    return SpinState(two_j, amps)


def spherical_triangle_area(a, b, c) -> float:
    """Oriented area of the spherical triangle (a, b, c).

    Van Oosterom-Strackee two-argument arctangent; positive when
    a . (b x c) > 0.  Returns 0 for degenerate (collinear-through-origin)
    triangles where both arguments vanish.
    """
    a, b, c = (np.asarray(v, dtype=float) for v in (a, b, c))
    num = a @ np.cross(b, c)
    den = 1 + a @ b + b @ c + c @ a
    return float(2 * np.arctan2(num, den))


def cs_overlap(j, n1, n2) -> complex:
    """<n1^(J)|n2^(J)> from the closed form ((1+n1.n2)/2)^J exp(i J Sigma)."""
    two_j = two_j_of(j)
    n1 = unit_vector(n1, tol=1e-10)
    n2 = unit_vector(n2, tol=1e-10)
    base = (1 + n1 @ n2) / 2
    if base <= 1e-15:
        return 0j
    area = spherical_triangle_area([0.0, 0.0, 1.0], n1, n2)
    # (1/2)-spin amplitude raised to 2J keeps the phase branch consistent
    half = np.sqrt(base) * np.exp(0.5j * area)
    return complex(half**two_j)


def husimi(state: SpinState, n) -> float:
    """|<n^(J)|psi>|^2 for the state as given (no normalization)."""
    cs = coherent_state(state.j, n)
    return float(abs(np.vdot(cs.amplitudes, state.amplitudes)) ** 2)


def coherent_amplitudes(two_j: int, nodes: np.ndarray) -> np.ndarray:
    """Coherent-state amplitude rows for many unit vectors at once, shape (K, 2J+1)."""
    c, s, phase = half_angles(nodes)
    k = np.arange(two_j + 1)
    binom = np.array([comb(two_j, int(kk)) for kk in k], dtype=float)
    return np.sqrt(binom) * c[:, None] ** (two_j - k) * (s * phase)[:, None] ** k


def husimi_grid(state: SpinState, nodes: np.ndarray) -> np.ndarray:
    """Husimi function at each row of ``nodes`` (shape (K, 3))."""
    rows = coherent_amplitudes(state.two_j, nodes)
    return np.abs(rows.conj() @ state.amplitudes) ** 2


def sphere_quadrature(n_theta: int = 64, n_phi: int = 128) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre in cos(theta) times uniform phi; weights sum to 4 pi.

    Exact for spherical polynomials of degree < min(2 n_theta, n_phi).
    """
    x, w = np.polynomial.legendre.leggauss(n_theta)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    sin_t = np.sqrt(1 - x**2)
    nodes = np.stack(
        [
            np.outer(sin_t, np.cos(phi)),
            np.outer(sin_t, np.sin(phi)),
            np.repeat(x[:, None], n_phi, axis=1),
        ],
        axis=-1,
    ).reshape(-1, 3)
    weights = np.repeat(w, n_phi) * (2 * np.pi / n_phi)
    return nodes, weights


def resolution_of_unity(j, n_theta: int = 64, n_phi: int = 128) -> np.ndarray:
    """(2J+1)/(4 pi) * sum_k w_k |n_k><n_k| evaluated by quadrature."""
    two_j = two_j_of(j)
    nodes, weights = sphere_quadrature(n_theta, n_phi)
    rows = coherent_amplitudes(two_j, nodes)
    return (two_j + 1) / (4 * np.pi) * (rows.T * weights) @ rows.conj()


def check_hermitian(op: np.ndarray) -> np.ndarray:
    op = np.asarray(op, dtype=complex)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise ValueError("operator must be a square matrix")
    scale = max(1.0, float(np.abs(op).max()))
    if np.abs(op - op.conj().T).max() > HERMITIAN_TOL * scale:
        raise ValueError("Hamiltonian is not Hermitian")
    return op


def propagator(h: np.ndarray, dt: float) -> np.ndarray:
    """exp(-i H dt) from the eigendecomposition of a Hermitian H."""
    h = check_hermitian(h)
    energies, vecs = np.linalg.eigh((h + h.conj().T) / 2)
    return (vecs * np.exp(-1j * energies * dt)) @ vecs.conj().T


def evolve_schrodinger(state: SpinState, h: np.ndarray, dt: float, steps: int) -> list[SpinState]:
    """Exact unitary evolution sampled every ``dt``; returns steps + 1 states."""
    h = check_hermitian(h)
    if h.shape[0] != state.dim:
        raise ValueError("Hamiltonian dimension does not match the state")
    u = propagator(h, dt)
    out = [state]
    amps = state.amplitudes
    for _ in range(steps):
        amps = u @ amps
        out.append(SpinState(state.two_j, amps))
    return out


def ray_fidelity(a, b) -> float:
    """|<a|b>|^2 / (<a|a><b|b>) for amplitude vectors or SpinStates."""
    a = getattr(a, "amplitudes", a)
    b = getattr(b, "amplitudes", b)
    return float(abs(np.vdot(a, b)) ** 2 / (np.vdot(a, a).real * np.vdot(b, b).real))


def discrete_holonomy(loop, overlap_tol: float = 1e-12) -> float:
    """Pancharatnam phase -arg prod <psi_k|psi_k+1> around a closed loop.

    The last entry must be the same ray as the first; it is replaced by the
    first representative so the result is exactly gauge invariant.
    """
    vecs = [np.asarray(getattr(s, "amplitudes", s), dtype=complex) for s in loop]
    if len(vecs) < 2:
        raise ValueError("a loop needs at least two points")
    if 1 - ray_fidelity(vecs[0], vecs[-1]) > 1e-9:
        raise ValueError("loop is not closed: first and last states differ as rays")
    vecs = vecs[:-1]
    # accumulate unit phasors to avoid underflow of long products
    total = 1.0 + 0j
    for a, b in zip(vecs, vecs[1:] + vecs[:1]):
        ov = np.vdot(a, b)
        scale = np.sqrt(np.vdot(a, a).real * np.vdot(b, b).real)
        if abs(ov) <= overlap_tol * scale:
            raise ValueError("consecutive loop states are orthogonal; phase undefined")
        total *= ov / abs(ov)
    phase = float(-np.angle(total))
    return np.pi if phase <= -np.pi else phase
