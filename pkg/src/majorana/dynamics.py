"""Star dynamics: f_ij^{ab} du_j^b/dt = dH/du_i^a.

H(U) is the expectation of -b.J + J.A.J + c, evaluated from the multipole
moments of the stars.  The curvature f from :mod:`geometry` acts as the
(non-canonical) symplectic form; velocities come from a dense solve per
Runge-Kutta stage.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .geometry import batch_tensors, tangent_frame
from .hilbert import (
    SpinState,
    evolve_schrodinger,
    quadrupole_matrices,
    spin_matrices,
)
from .moments import batch_moments
from .stellar import Constellation, align_stars, constellation_to_state, state_to_constellation

COND_LIMIT = 1e10


class SingularSymplecticForm(RuntimeError):
    """The curvature matrix cannot be inverted against the Hamiltonian gradient."""


class TrackingError(RuntimeError):
    """Stars of consecutive oracle frames cannot be matched unambiguously."""


@dataclass(frozen=True, eq=False)
class HamiltonianSpec:
    """H = -b.J + sum_{mu nu} quad[mu, nu] Q_{mu nu} + constant (hbar = 1)."""

    b_field: np.ndarray = field(default_factory=lambda: np.zeros(3))
    quad: np.ndarray = field(default_factory=lambda: np.zeros((3, 3)))
    constant: float = 0.0

    def __post_init__(self):
        b = np.asarray(self.b_field, dtype=float).reshape(3)
        q = np.asarray(self.quad, dtype=float).reshape(3, 3)
        if np.abs(q - q.T).max() > 1e-12 or abs(np.trace(q)) > 1e-12:
            raise ValueError("quad must be symmetric and traceless")
        object.__setattr__(self, "b_field", b)
        object.__setattr__(self, "quad", q)
        object.__setattr__(self, "constant", float(self.constant))

    def matrix(self, j) -> np.ndarray:
        """Dense operator in the descending-M basis."""
        jv = spin_matrices(j)
        q = quadrupole_matrices(j)
        h = -sum(self.b_field[m] * jv[m] for m in range(3))
        h = h + np.einsum("mn,mnab->ab", self.quad, q)
        return h + self.constant * np.eye(len(jv[0]))


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray
    stars: np.ndarray  # (T, N, 3)
    energies: np.ndarray

    @property
    def constellations(self) -> list[Constellation]:
        return [Constellation(s) for s in self.stars]


def _energy_batch(stars: np.ndarray, h: HamiltonianSpec) -> np.ndarray:
    j = stars.shape[1] / 2
    mn, mnn = batch_moments(stars)
    dip = (j + 1) * mn
    quad = (j + 1) * (j + 1.5) * (mnn - np.eye(3) / 3)
    return -dip @ h.b_field + np.einsum("bmn,mn->b", quad, h.quad) + h.constant


def hamiltonian_expectation(u: Constellation, h: HamiltonianSpec) -> float:
    if u.two_j == 0:
        return h.constant
    return float(_energy_batch(u.stars[None], h)[0])


def grad_H(u, h: HamiltonianSpec, frame=None, step: float = 1e-5) -> np.ndarray:
    """dH/du_i^alpha along great circles, (N, 2); Richardson over h and h/2."""
    stars = np.asarray(getattr(u, "stars", u), dtype=float)
    n = len(stars)
    if n == 0:
        return np.zeros((0, 2))
    frame = frame or tangent_frame(stars)
    ts = np.array([step, -step, step / 2, -step / 2])
    # probe[i, a, t] moves star i a distance t along frame direction a
    moved = np.cos(ts)[None, None, :, None] * stars[:, None, None, :] + np.sin(ts)[None, None, :, None] * frame.basis[:, :, None, :]
    probes = np.broadcast_to(stars, (n, 2, 4, n, 3)).copy()
    idx = np.arange(n)
    probes[idx, :, :, idx] = moved
    e = _energy_batch(probes.reshape(-1, n, 3), h).reshape(n, 2, 4)
    coarse = (e[..., 0] - e[..., 1]) / (2 * step)
    fine = (e[..., 2] - e[..., 3]) / step
    return (4 * fine - coarse) / 3


def _solve(f: np.ndarray, rhs: np.ndarray, rigid: bool = False) -> np.ndarray:
    """Velocity components v with f v = rhs.

    Generic constellations use an LU solve.  At coincident stars f loses
    rank.  When the Hamiltonian only generates rotations (``rigid``) the
    coincident stars must stay together, which is exactly the minimum-norm
    solution of the consistent singular system.  Any other Hamiltonian can
    split coincident stars non-analytically, so the solve is refused.
    """
    cond = np.linalg.cond(f)
    if cond < COND_LIMIT:
        return scipy.linalg.lu_solve(scipy.linalg.lu_factor(f), rhs)
    if not rigid:
        raise SingularSymplecticForm(
            f"curvature matrix is near-singular (cond {cond:.3g}); coincident stars under a "
            "non-rotational Hamiltonian"
        )
    sol, *_ = np.linalg.lstsq(f, rhs, rcond=1e-9)
    resid = np.linalg.norm(f @ sol - rhs)
    if resid > 1e-6 * max(np.linalg.norm(rhs), 1e-12):
        raise SingularSymplecticForm(
            f"curvature matrix is singular (cond {cond:.3g}) and the gradient is not in its range"
        )
    return sol


def star_velocity(stars: np.ndarray, h: HamiltonianSpec, truncate: bool = False) -> np.ndarray:
    """du_i/dt as ambient 3-vectors (N, 3).

    ``truncate`` keeps only the diagonal 2x2 blocks of f, dropping the
    kinematic coupling between different stars (used to show it matters).
    """
    frame = tangent_frame(stars)
    _, f = batch_tensors(stars[None], [frame])
    f = f[0]
    n = len(stars)
    if truncate:
        mask = np.kron(np.eye(n), np.ones((2, 2)))
        f = f * mask
    rhs = grad_H(stars, h, frame).reshape(-1)
    v = _solve(f, rhs, rigid=not np.any(h.quad)).reshape(n, 2)
    return np.einsum("ia,iad->id", v, frame.basis)


def _project(x: np.ndarray) -> np.ndarray:
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def rk4_step(stars: np.ndarray, h: HamiltonianSpec, dt: float, truncate: bool = False):
    k1 = star_velocity(stars, h, truncate)
    k2 = star_velocity(_project(stars + dt / 2 * k1), h, truncate)
    k3 = star_velocity(_project(stars + dt / 2 * k2), h, truncate)
    k4 = star_velocity(_project(stars + dt * k3), h, truncate)
    return _project(stars + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4))


def evolve_stars(
    u0: Constellation, h: HamiltonianSpec, dt: float, steps: int, truncate: bool = False
) -> Trajectory:
    """Classical RK4 on the star positions; stars renormalized every stage."""
    stars = np.array(u0.stars)
    out = [stars]
    for _ in range(steps):
        stars = rk4_step(stars, h, dt, truncate)
        out.append(stars)
    out = np.array(out)
    energies = _energy_batch(out, h) if u0.two_j else np.full(len(out), h.constant)
    return Trajectory(dt * np.arange(steps + 1), out, energies)


def oracle_trajectory(u0: Constellation, h: HamiltonianSpec, dt: float, steps: int) -> Trajectory:
    """Star trajectory extracted from exact Schrodinger evolution.

    Stars are matched frame to frame by minimum total displacement; a frame
    where some star moves farther than half the closest star separation is
    reported as a tracking failure instead of being guessed.
    """
    psi0 = constellation_to_state(u0)
    states = evolve_schrodinger(psi0, h.matrix(u0.j), dt, steps)
    prev = np.array(u0.stars)
    out = [prev]
    for k, st in enumerate(states[1:], start=1):
        cur = align_stars(prev, np.array(state_to_constellation(st).stars))
        if len(prev) > 1:
            sep = np.linalg.norm(prev[:, None] - prev[None], axis=-1)
            sep = sep[~np.eye(len(prev), dtype=bool)].min()
            if np.linalg.norm(cur - prev, axis=1).max() > sep / 2:
                raise TrackingError(f"ambiguous star matching at step {k}")
        out.append(cur)
        prev = cur
    out = np.array(out)
    energies = np.array([st.expect(h.matrix(u0.j)).real for st in states])
    return Trajectory(dt * np.arange(steps + 1), out, energies)


def max_displacement(a: Trajectory, b: Trajectory) -> float:
    return float(np.linalg.norm(a.stars - b.stars, axis=-1).max())


def characteristic_period(h: HamiltonianSpec, j) -> float:
    """2 pi over the smallest nonzero level spacing of the Hamiltonian."""
    levels = np.linalg.eigvalsh(h.matrix(j))
    gaps = np.abs(levels[:, None] - levels[None, :])
    scale = max(1.0, np.abs(levels).max())
    gaps = gaps[gaps > 1e-9 * scale]
    if gaps.size == 0:
        return np.inf
    return float(2 * np.pi / gaps.min())


def landau_lifshitz_reference(n0, b_field, dt: float, steps: int) -> np.ndarray:
    """RK4 for dn/dt = n x b, shape (steps + 1, 3); n is renormalized after each step."""
    b = np.asarray(b_field, dtype=float)
    n = np.asarray(n0, dtype=float)
    n = n / np.linalg.norm(n)

    def rhs(x):
        return np.cross(x, b)

    out = [n]
    for _ in range(steps):
        k1 = rhs(n)
        k2 = rhs(n + dt / 2 * k1)
        k3 = rhs(n + dt / 2 * k2)
        k4 = rhs(n + dt * k3)
        n = n + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        n = n / np.linalg.norm(n)
        out.append(n)
    return np.array(out)


def spin_direction(traj: Trajectory) -> np.ndarray:
    """<J>/J along a star trajectory."""
    j = traj.stars.shape[1] / 2
    mn, _ = batch_moments(traj.stars)
    return (j + 1) * mn / j


def state_of(u: Constellation) -> SpinState:
    return constellation_to_state(u).normalized()
