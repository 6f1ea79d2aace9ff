"""Berry connection, curvature and Fubini-Study metric in star coordinates.

Components are taken in an orthonormal tangent frame per star, (e1, e2)
with e2 = u x e1.  Flattened tensors use the index 2*i + alpha (alpha = 0
for e1, 1 for e2).  The curvature f is the exterior derivative of the
connection in that frame, so that f^{12} of a lone star is +1/2 and the
geometric phase of a loop equals the flux of f through any surface it
bounds.  With this orientation the Kahler relations read

    2 f^{12} = -2 f^{21} = g^{11} = g^{22},
   -2 f^{11} = -2 f^{22} = g^{12} = -g^{21}.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diagrams import free_energy
from .hilbert import SpinState, discrete_holonomy, ray_fidelity
from .moments import reduced_moments
from .stellar import Constellation, align_stars, constellation_to_state

Z_HAT = np.array([0.0, 0.0, 1.0])
POLE_TOL = 1e-6
STRING_TOL = 1e-6


class DiracStringError(ValueError):
    """A star sits on the +z Dirac string where the connection is singular."""


@dataclass(frozen=True, eq=False)
class TangentFrame:
    e1: np.ndarray
    e2: np.ndarray

    @property
    def basis(self) -> np.ndarray:
        """Frame vectors stacked as (N, 2, 3)."""
        return np.stack([self.e1, self.e2], axis=1)


def tangent_frame(stars) -> TangentFrame:
    """e1 = theta-hat, e2 = phi-hat; near the poles e1 comes from the x axis."""
    u = np.asarray(getattr(stars, "stars", stars), dtype=float).reshape(-1, 3)
    cz = u[:, 2]
    e1 = cz[:, None] * u - Z_HAT
    polar = np.hypot(u[:, 0], u[:, 1]) < POLE_TOL
    ref = np.array([1.0, 0.0, 0.0])
    e1[polar] = ref - (u[polar] @ ref)[:, None] * u[polar]
    e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
    e2 = np.cross(u, e1)
    return TangentFrame(e1, e2)


def frame_rotation(frame: TangentFrame) -> np.ndarray:
    """Per-star complex structure: maps (e1, e2) to (e2, -e1)."""
    return np.stack([frame.e2, -frame.e1], axis=1)


def _string_term(u: np.ndarray) -> np.ndarray:
    den = 1 - u[:, 2]
    if np.any(den < STRING_TOL):
        raise DiracStringError(
            "a star lies on the +z Dirac string; rotate the constellation or use the holonomy method"
        )
    return np.cross(Z_HAT, u) / den[:, None]


def connection_vectors(u: Constellation) -> np.ndarray:
    """Berry connection a_i as ambient 3-vectors tangent at each star, (N, 3).

    Uses the average of n over the state with star i removed, which keeps
    the expression free of the integrable singularity at n = u_i.
    """
    stars = u.stars
    m1, _, _ = reduced_moments(stars)
    inner = np.cross(m1, stars) / (1 - np.einsum("ij,ij->i", m1, stars))[:, None]
    return -0.5 * (_string_term(stars) - inner)


def berry_connection(u: Constellation, frame: TangentFrame | None = None) -> np.ndarray:
    """Frame components a_i^alpha, shape (N, 2)."""
    frame = frame or tangent_frame(u.stars)
    return np.einsum("iad,id->ia", frame.basis, connection_vectors(u))


def free_energy_gradient(u: Constellation, frame: TangentFrame, step: float = 1e-4) -> np.ndarray:
    """Tangential gradient of F(U) at each star, as 3-vectors (N, 3).

    F is affine-log in each star vector, so straight (unnormalized)
    displacements are valid; Richardson over steps h and h/2.
    """
    stars = np.array(u.stars)
    grad = np.zeros_like(stars)

    def f_at(i, vec):
        moved = stars.copy()
        moved[i] = vec
        return free_energy(_raw(moved))

    for i in range(len(stars)):
        for e in (frame.e1[i], frame.e2[i]):
            def central(h):
                return (f_at(i, stars[i] + h * e) - f_at(i, stars[i] - h * e)) / (2 * h)

            grad[i] += (4 * central(step / 2) - central(step)) / 3 * e
    return grad


def _raw(stars: np.ndarray):
    """Constellation-like object without the unit-norm check (for ambient derivatives)."""
    obj = object.__new__(Constellation)
    object.__setattr__(obj, "stars", stars)
    return obj


def connection_from_free_energy(u: Constellation, frame: TangentFrame | None = None) -> np.ndarray:
    """Frame components of a_i from the free-energy gradient form."""
    frame = frame or tangent_frame(u.stars)
    grad = free_energy_gradient(u, frame)
    vec = -0.5 * (_string_term(u.stars) - np.cross(grad, u.stars))
    return np.einsum("iad,id->ia", frame.basis, vec)


def dirac_string_potential(u, n) -> np.ndarray:
    """Vector potential at star u of a unit-flux string entering at +z and leaving at n.

    Visualization helper only.
    """
    u = np.asarray(u, dtype=float)
    n = np.asarray(n, dtype=float)
    return -0.5 * (np.cross(Z_HAT, u) / (1 - u[2]) - np.cross(n, u) / (1 - n @ u))


@dataclass(frozen=True, eq=False)
class GeometricTensors:
    g: np.ndarray
    f: np.ndarray
    frame: TangentFrame = field(repr=False)


def _metric_blocks(stars: np.ndarray, basis: np.ndarray, rot: np.ndarray) -> np.ndarray:
    """g[b, i, alpha, j, beta] for a batch of constellations (B, N, 3)."""
    b, n = stars.shape[:2]
    m1, m2, p2 = reduced_moments(stars)
    denom1 = 1 - np.einsum("bid,bid->bi", m1, stars)
    w = m1 / denom1[..., None]
    # i != j: connected correlator of n/(1-u_i.n) and n/(1-u_j.n)
    den2 = (
        1
        - np.einsum("bid,bijd->bij", stars, m2)
        - np.einsum("bjd,bijd->bij", stars, m2)
        + np.einsum("bid,bijde,bje->bij", stars, p2, stars)
    )
    off = np.eye(n, dtype=bool)
    den2[:, off] = 1.0
    dbar = p2 / den2[..., None, None] - np.einsum("bid,bje->bijde", w, w)
    g = np.einsum("biad,bijde,bjce->biajc", basis, dbar, basis)
    g += np.einsum("biad,bijde,bjce->biajc", rot, dbar, rot)
    diag = (1 - np.einsum("bid,bid->bi", m1, m1)) / denom1**2
    idx = np.arange(n)
    g[:, idx, :, idx, :] = diag.T[..., None, None] * np.eye(2)
    return g


def _curvature_from_metric(g: np.ndarray) -> np.ndarray:
    f = np.empty_like(g)
    g11 = g[..., 0, :, 0]
    g12 = g[..., 0, :, 1]
    f[..., 0, :, 1] = g11 / 2
    f[..., 1, :, 0] = -g11 / 2
    f[..., 0, :, 0] = -g12 / 2
    f[..., 1, :, 1] = -g12 / 2
    return f


def batch_tensors(stars: np.ndarray, frames: list[TangentFrame]):
    """Flattened (B, 2N, 2N) metric and curvature for a batch of constellations."""
    stars = np.asarray(stars, dtype=float)
    basis = np.stack([fr.basis for fr in frames])
    rot = np.stack([frame_rotation(fr) for fr in frames])
    g = _metric_blocks(stars, basis, rot)
    f = _curvature_from_metric(g)
    b, n = stars.shape[:2]
    return g.reshape(b, 2 * n, 2 * n), f.reshape(b, 2 * n, 2 * n)


def quantum_tensors(u: Constellation, frame: TangentFrame | None = None) -> GeometricTensors:
    """Metric g and curvature f (each 4J x 4J) of the constellation."""
    if u.two_j < 1:
        raise ValueError("need at least one star")
    frame = frame or tangent_frame(u.stars)
    g, f = batch_tensors(u.stars[None], [frame])
    return GeometricTensors(g[0], f[0], frame)


def fubini_study_distance(a: SpinState, b: SpinState) -> float:
    """2 arccos(|<a|b>| / (|a||b|)); zero on the same ray, pi when orthogonal."""
    if a.two_j != b.two_j:
        raise ValueError("states have different spin")
    fid = np.sqrt(min(1.0, ray_fidelity(a, b)))
    return float(2 * np.arccos(fid))


@dataclass(frozen=True, eq=False)
class StarPath:
    """Sampled path of constellations with stars tracked by row."""

    samples: list
    closed: bool = True

    def __post_init__(self):
        samples = list(self.samples)
        if not samples:
            raise ValueError("empty path")
        two_j = samples[0].two_j
        if any(s.two_j != two_j for s in samples):
            raise ValueError("all samples must have the same spin")
        object.__setattr__(self, "samples", samples)

    @property
    def two_j(self) -> int:
        return self.samples[0].two_j

    def tracked(self, max_step: float = 0.2) -> np.ndarray:
        """Star positions (K, N, 3) with rows matched between consecutive samples."""
        out = [np.array(self.samples[0].stars)]
        for s in self.samples[1:]:
            nxt = align_stars(out[-1], np.array(s.stars))
            if self.two_j and np.linalg.norm(nxt - out[-1], axis=1).max() > max_step:
                raise ValueError("path is not continuous: a star jumps more than the allowed step")
            out.append(nxt)
        return np.array(out)


def _loop_points(path: StarPath) -> np.ndarray:
    """Tracked samples of a closed path without the repeated endpoint."""
    if not path.closed:
        raise ValueError("geometric phase needs a closed path")
    pts = path.tracked()
    if len(pts) > 1 and np.abs(pts[-1] - align_stars(pts[-1], pts[0])).max() < 1e-9:
        pts = pts[:-1]
    return pts


def _arc_distance_to_pole(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Chordal distance from +z to each great-circle arc p -> q (vectorized over leading axes)."""
    n = np.cross(p, q)
    nn = np.linalg.norm(n, axis=-1, keepdims=True)
    n = np.divide(n, nn, out=np.zeros_like(n), where=nn > 0)
    w = Z_HAT - n[..., 2:3] * n
    inside = (np.einsum("...d,...d->...", np.cross(p, w), n) >= 0) & (
        np.einsum("...d,...d->...", np.cross(w, q), n) >= 0
    )
    wn = np.linalg.norm(w, axis=-1, keepdims=True)
    w = np.divide(w, wn, out=np.tile(Z_HAT, w.shape[:-1] + (1,)), where=wn > 0)
    ends = np.minimum(np.linalg.norm(p - Z_HAT, axis=-1), np.linalg.norm(q - Z_HAT, axis=-1))
    mid = np.linalg.norm(w - Z_HAT, axis=-1)
    return np.where(inside & (nn[..., 0] > 0), np.minimum(mid, ends), ends)


def line_integral_phase(path: StarPath, string_margin: float = 5.0) -> float:
    """Trapezoidal sum of a_i . du_i around the loop (Dirac string gauge).

    A step whose arc passes within ``string_margin`` step lengths of +z is
    rejected: the gauge potential is too steep there (or the loop crosses
    the string) for the trapezoid rule.
    """
    pts = _loop_points(path)
    if len(pts) == 1:
        return 0.0
    closing = align_stars(pts[-1], pts[0])
    if np.linalg.norm(closing - pts[-1], axis=1).max() > 0.2:
        raise ValueError("path does not close: last sample far from the first")
    ring = np.concatenate([pts, closing[None]])
    steps = np.linalg.norm(np.diff(ring, axis=0), axis=-1)
    near = _arc_distance_to_pole(ring[:-1], ring[1:]) < np.maximum(string_margin * steps, STRING_TOL)
    if np.any(near):
        raise DiracStringError(
            "path passes through or too close to the +z Dirac string; use the holonomy method"
        )
    a = np.array([connection_vectors(Constellation(p)) for p in ring])
    du = np.diff(ring, axis=0)
    total = 0.5 * np.einsum("kid,kid->", a[:-1] + a[1:], du)
    return float(np.angle(np.exp(1j * total)))


def holonomy_phase(path: StarPath) -> float:
    """Pancharatnam phase of the fiducial states along the loop."""
    pts = _loop_points(path)
    states = [constellation_to_state(Constellation(p)).normalized() for p in pts]
    return discrete_holonomy(states + states[:1])


def geometric_phase(path: StarPath, method: str = "holonomy") -> float:
    if method == "line_integral":
        return line_integral_phase(path)
    if method == "holonomy":
        return holonomy_phase(path)
    raise ValueError(f"unknown method {method!r}")


def phase_difference(a: float, b: float) -> float:
    """|a - b| reduced modulo 2 pi into [0, pi]."""
    return float(abs(np.angle(np.exp(1j * (a - b)))))
