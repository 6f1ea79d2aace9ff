"""Acceptance checks, shared by the test suite and ``majorana selftest``.

Each check takes its sample sizes as arguments so the CLI can run a
reduced (j <= 2) version; the defaults are the full acceptance sizes.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import oracles
from .diagrams import (
    WeightedGraph,
    chordal_weights,
    free_energy,
    matching_sums,
    matching_tables,
    partition_function,
    star_graph,
)
from .dynamics import (
    HamiltonianSpec,
    characteristic_period,
    evolve_stars,
    landau_lifshitz_reference,
    max_displacement,
    oracle_trajectory,
    spin_direction,
)
from .geometry import (
    StarPath,
    batch_tensors,
    fubini_study_distance,
    holonomy_phase,
    line_integral_phase,
    phase_difference,
    quantum_tensors,
    tangent_frame,
)
from .hilbert import ray_fidelity
from .moments import dipole, mean_n, mean_nn, quadrupole
from .stellar import (
    Constellation,
    constellation_to_state,
    random_constellation,
    random_state,
    state_to_constellation,
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    worst: float
    tolerance: float
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.name}: worst {self.worst:.3e} (tol {self.tolerance:.0e})"


def _result(name, errors, tol, **detail) -> CheckResult:
    worst = float(np.max(errors)) if len(errors) else 0.0
    return CheckResult(name, worst < tol, worst, tol, detail)


def _rng(seed):
    return np.random.default_rng(seed)


# 1 -----------------------------------------------------------------------

def round_trip(n_states=500, max_two_j=12, seed=1) -> CheckResult:
    rng = _rng(seed)
    errs = []
    for k in range(n_states):
        two_j = 1 + k % max_two_j
        s = random_state(two_j, rng)
        back = constellation_to_state(state_to_constellation(s))
        errs.append(1 - ray_fidelity(s, back))
    return _result("round trip state -> stars -> state (1 - fidelity)", errs, 1e-10)


# 2 -----------------------------------------------------------------------

def partition_vs_norm(n_samples=100, max_two_j=10, seed=2) -> CheckResult:
    rng = _rng(seed)
    errs = []
    for k in range(n_samples):
        u = random_constellation(1 + k % max_two_j, rng)
        z = partition_function(u)
        ref = constellation_to_state(u).norm2() / (u.two_j + 1)
        errs.append(abs(z - ref) / ref)
    return _result("pairing expansion vs dense norm (rel)", errs, 1e-10)


def partition_vs_quadrature(n_samples=60, max_two_j=6, seed=3) -> CheckResult:
    rng = _rng(seed)
    errs = []
    for k in range(n_samples):
        u = random_constellation(1 + k % max_two_j, rng)
        z = partition_function(u)
        errs.append(abs(z - oracles.husimi_partition_function(u)) / z)
    return _result("pairing expansion vs Husimi quadrature (rel)", errs, 1e-8)


# 3 -----------------------------------------------------------------------

def moments_vs_oracle(n_samples=200, max_two_j=8, seed=4) -> CheckResult:
    rng = _rng(seed)
    errs = []
    for k in range(n_samples):
        u = random_constellation(1 + k % max_two_j, rng)
        dip, quad = oracles.dense_moments(constellation_to_state(u))
        errs.append(np.abs(dipole(u) - dip).max())
        errs.append(np.abs(quadrupole(u) - quad).max())
    return _result("dipole/quadrupole vs dense expectation", errs, 1e-9)


def spin_one_closed_forms(n_samples=50, seed=5) -> CheckResult:
    rng = _rng(seed)
    errs = []
    for _ in range(n_samples):
        u = random_constellation(2, rng)
        u1, u2 = u.stars
        d12 = (1 - u1 @ u2) / 2
        dip_cf = -(u1 + u2) / (2 - d12)
        quad_cf = ((np.outer(u1, u2) + np.outer(u2, u1)) / 2 - (u1 @ u2) * np.eye(3) / 3) / (2 - d12)
        dip, quad = oracles.dense_moments(constellation_to_state(u))
        errs += [
            np.abs(dip_cf - dip).max(),
            np.abs(quad_cf - quad).max(),
            np.abs(dip_cf - dipole(u)).max(),
            np.abs(quad_cf - quadrupole(u)).max(),
        ]
    return _result("spin-1 closed forms vs oracle and diagrams", errs, 1e-12)


# 4 -----------------------------------------------------------------------

def star_addition(n_samples=100, max_two_j=6, seed=6) -> CheckResult:
    rng = _rng(seed)
    errs = []
    for k in range(n_samples):
        u = random_constellation(1 + k % max_two_j, rng)
        extra = random_constellation(2, rng).stars
        f0 = free_energy(u)
        mn, mnn = mean_n(u), mean_nn(u)
        one = u.with_star(extra[0])
        two = one.with_star(extra[1])
        lhs1 = free_energy(one) - f0 - np.log(2)
        rhs1 = -np.log(1 - extra[0] @ mn)
        lhs2 = free_energy(two) - f0 - 2 * np.log(2)
        rhs2 = -np.log(1 - (extra[0] + extra[1]) @ mn + extra[0] @ mnn @ extra[1])
        errs += [abs(lhs1 - rhs1), abs(lhs2 - rhs2)]
    return _result("free-energy star addition (one and two stars)", errs, 1e-10)


# 5 -----------------------------------------------------------------------

def generic_constellation(two_j, rng):
    """Random constellation with every star away from both poles."""
    while True:
        u = random_constellation(two_j, rng)
        if np.all(np.hypot(u.stars[:, 0], u.stars[:, 1]) > 0.05) and np.all(u.stars[:, 2] < 0.95):
            return u


def kahler_identities(n_samples=200, max_two_j=6, seed=7) -> CheckResult:
    """Kahler relations on the dense-state tensor, plus closed forms vs that tensor."""
    rng = _rng(seed)
    errs = []
    for k in range(n_samples):
        u = generic_constellation(1 + k % max_two_j, rng)
        fr = tangent_frame(u.stars)
        h = oracles.qgt(u, fr)
        n = u.two_j
        g = (4 * h.real).reshape(n, 2, n, 2)
        f = (-2 * h.imag).reshape(n, 2, n, 2)
        g11, g12, g21, g22 = g[:, 0, :, 0], g[:, 0, :, 1], g[:, 1, :, 0], g[:, 1, :, 1]
        f11, f12, f21, f22 = f[:, 0, :, 0], f[:, 0, :, 1], f[:, 1, :, 0], f[:, 1, :, 1]
        errs += [
            np.abs(2 * f12 - g11).max(),
            np.abs(-2 * f21 - g11).max(),
            np.abs(g22 - g11).max(),
            np.abs(-2 * f11 - g12).max(),
            np.abs(-2 * f22 - g12).max(),
            np.abs(g21 + g12).max(),
        ]
        t = quantum_tensors(u, fr)
        errs += [np.abs(t.g - 4 * h.real).max(), np.abs(t.f + 2 * h.imag).max()]
    return _result("Kahler relations and closed-form g, f vs dense tensor", errs, 1e-9)


def metric_vs_distance(n_samples=40, max_two_j=6, delta=1e-3, seed=8) -> CheckResult:
    rng = _rng(seed)
    errs = []
    for k in range(n_samples):
        u = generic_constellation(1 + k % max_two_j, rng)
        fr = tangent_frame(u.stars)
        g = quantum_tensors(u, fr).g
        x = rng.normal(size=(u.two_j, 2))
        x *= delta / np.linalg.norm(x)
        d = fubini_study_distance(constellation_to_state(u), constellation_to_state(oracles.perturbed(u, fr, x)))
        quad = x.reshape(-1) @ g @ x.reshape(-1)
        errs.append(abs(d**2 - quad) / quad)
    return _result("metric vs Fubini-Study distance at 1e-3 (rel)", errs, 1e-2)


def curvature_vs_curl(n_samples=30, max_two_j=6, seed=9) -> CheckResult:
    rng = _rng(seed)
    errs = []
    for k in range(n_samples):
        u = generic_constellation(1 + k % max_two_j, rng)
        fr = tangent_frame(u.stars)
        f = quantum_tensors(u, fr).f
        errs.append(np.abs(f - oracles.curl_of_connection(u, fr)).max())
    return _result("curvature vs finite-difference curl of the connection", errs, 1e-5)


def spin_half_flux(n_theta=200, n_phi=400) -> CheckResult:
    theta = (np.arange(n_theta) + 0.5) * np.pi / n_theta
    phi = (np.arange(n_phi) + 0.5) * 2 * np.pi / n_phi
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    stars = np.stack([np.sin(tt) * np.cos(pp), np.sin(tt) * np.sin(pp), np.cos(tt)], -1).reshape(-1, 1, 3)
    frames = [tangent_frame(s) for s in stars]
    _, f = batch_tensors(stars, frames)
    density = f[:, 0, 1].reshape(n_theta, n_phi)
    flux = np.sum(density * np.sin(tt)) * (np.pi / n_theta) * (2 * np.pi / n_phi)
    ok_sign = bool(np.all(density > 0))
    res = _result("spin-1/2 total curvature flux = 2 pi", [abs(flux - 2 * np.pi)], 1e-3, flux=flux)
    res.passed = res.passed and ok_sign
    return res


# 6 -----------------------------------------------------------------------

def coherent_loop(two_j: int, theta: float, samples: int) -> StarPath:
    """Coherent state whose spin direction circles the latitude ``theta``."""
    phi = 2 * np.pi * np.arange(samples + 1) / samples
    spin = np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.full_like(phi, np.cos(theta))], -1)
    return StarPath([Constellation(np.repeat(-s[None], two_j, axis=0)) for s in spin])


def coherent_loop_phase(two_js=(1, 2, 4), theta=1.1, samples=2000) -> CheckResult:
    errs, halving = [], []
    for two_j in two_js:
        omega = 2 * np.pi * (1 - np.cos(theta))
        expected = -two_j / 2 * omega
        e_fine = phase_difference(holonomy_phase(coherent_loop(two_j, theta, samples)), expected)
        e_coarse = phase_difference(holonomy_phase(coherent_loop(two_j, theta, samples // 2)), expected)
        errs.append(e_fine)
        halving.append(e_fine <= e_coarse / 2)
    res = _result("coherent latitude loop phase = -J * solid angle", errs, 1e-4, refinement_halves=halving)
    res.passed = res.passed and all(halving)
    return res


def smooth_loop(two_j: int, rng, samples: int = 2000) -> StarPath:
    """Each star traces its own small smooth loop away from the +z string."""
    while True:
        base = random_constellation(two_j, rng).stars
        if np.all(base[:, 2] < 0.3):
            break
    fr = tangent_frame(base)
    radius = rng.uniform(0.2, 0.5, size=two_j)
    freq = rng.integers(1, 3, size=two_j)
    shift = rng.uniform(0, 2 * np.pi, size=(two_j, 2))
    t = 2 * np.pi * np.arange(samples + 1) / samples
    frames = []
    for tk in t:
        v = base + radius[:, None] * (
            np.cos(tk + shift[:, 0])[:, None] * fr.e1 + np.sin(freq * tk + shift[:, 1])[:, None] * fr.e2
        )
        frames.append(Constellation(v / np.linalg.norm(v, axis=1, keepdims=True)))
    return StarPath(frames)


def line_vs_holonomy(n_loops=20, max_two_j=4, samples=2000, seed=10) -> CheckResult:
    rng = _rng(seed)
    errs = []
    for k in range(n_loops):
        path = smooth_loop(1 + k % max_two_j, rng, samples)
        errs.append(phase_difference(line_integral_phase(path), holonomy_phase(path)))
    return _result("line integral vs holonomy on random loops", errs, 1e-3)


# 7 -----------------------------------------------------------------------

def random_quadrupole(rng, scale=0.5):
    """Random symmetric traceless 3x3 coupling."""
    q = rng.normal(size=(3, 3))
    q = q + q.T
    q -= np.trace(q) / 3 * np.eye(3)
    return scale * q


def resolved_steps(h, j, per_fast=1000):
    """(dt, steps) spanning one characteristic period with ``per_fast`` steps per fastest period."""
    levels = np.linalg.eigvalsh(h.matrix(j))
    period = characteristic_period(h, j)
    fast = 2 * np.pi / (levels.max() - levels.min())
    steps = int(np.ceil(per_fast * period / fast))
    return period / steps, steps


def zeeman_dynamics(two_js=(1, 2, 3, 4), per_j=2, seed=11) -> CheckResult:
    rng = _rng(seed)
    errs = []
    for two_j in two_js:
        for _ in range(per_j):
            u = generic_constellation(two_j, rng)
            h = HamiltonianSpec(b_field=rng.normal(size=3))
            period = characteristic_period(h, u.j)
            dt = period / 1000
            errs.append(max_displacement(evolve_stars(u, h, dt, 1000), oracle_trajectory(u, h, dt, 1000)))
    return _result("Zeeman star dynamics vs Schrodinger oracle (one period)", errs, 1e-6)


def quadrupolar_dynamics(two_js=(2, 3), per_j=2, seed=12) -> CheckResult:
    rng = _rng(seed)
    errs = []
    for two_j in two_js:
        for _ in range(per_j):
            u = generic_constellation(two_j, rng)
            h = HamiltonianSpec(quad=random_quadrupole(rng))
            dt, steps = resolved_steps(h, u.j)
            errs.append(max_displacement(evolve_stars(u, h, dt, steps), oracle_trajectory(u, h, dt, steps)))
    return _result("quadrupolar star dynamics vs Schrodinger oracle", errs, 1e-5)


def energy_drift(periods=10, seed=13) -> CheckResult:
    rng = _rng(seed)
    errs = []
    cases = [
        (generic_constellation(2, rng), HamiltonianSpec(b_field=rng.normal(size=3))),
        (generic_constellation(2, rng), HamiltonianSpec(b_field=rng.normal(size=3), quad=random_quadrupole(rng, scale=0.2))),
    ]
    for u, h in cases:
        dt, steps = resolved_steps(h, u.j)
        traj = evolve_stars(u, h, dt, steps * periods)
        errs.append(np.abs(traj.energies - traj.energies[0]).max() / max(1.0, abs(traj.energies[0])))
    return _result(f"energy drift over {periods} periods", errs, 1e-8)


def coherent_stays_coherent(two_js=(2, 4), seed=14) -> list[CheckResult]:
    rng = _rng(seed)
    spread, ll = [], []
    for two_j in two_js:
        n0 = random_constellation(1, rng).stars[0]
        u = Constellation(np.repeat(-n0[None], two_j, axis=0))
        b = rng.normal(size=3)
        h = HamiltonianSpec(b_field=b)
        period = 2 * np.pi / np.linalg.norm(b)
        traj = evolve_stars(u, h, period / 1000, 1000)
        spread.append(np.linalg.norm(traj.stars - traj.stars[:, :1], axis=-1).max())
        ref = landau_lifshitz_reference(n0, b, period / 1000, 1000)
        ll.append(np.linalg.norm(spin_direction(traj) - ref, axis=-1).max())
    res = _result("coherent state stays coherent under Zeeman (star spread)", spread, 1e-8)
    res_ll = _result("Landau-Lifshitz vs coherent-sector spin direction", ll, 1e-6)
    return [res, res_ll]


# 8 -----------------------------------------------------------------------

def dp_vs_enumeration(max_dots=8, seed=15) -> CheckResult:
    rng = _rng(seed)
    errs = []
    for n in range(1, max_dots + 1):
        u = random_constellation(n, rng).stars
        graphs = [star_graph(u), star_graph(u, (0,)), star_graph(u, (1, 1)), star_graph(u, (0, 2))]
        w = rng.uniform(-1, 1, size=(n, n))
        graphs.append(WeightedGraph((w + w.T) * (1 - np.eye(n)), np.zeros((n, 0)), np.zeros((0, 0))))
        for g in graphs:
            if g.n_solid + g.n_open > max_dots:
                continue
            dp = matching_sums(g)
            ref = oracles.brute_force_matching_sums(g)
            # graphs with more open dots than solid ones have identically zero sums
            scale = np.abs(ref).max() or 1.0
            errs.append(np.abs(dp - ref).max() / scale)
    return _result("subset DP vs exhaustive enumeration (rel)", errs, 1e-12)


def matching_counts(max_dots=12) -> CheckResult:
    from math import factorial

    errs = []
    for n in range(1, max_dots + 1):
        ones = np.ones((n, n)) - np.eye(n)
        sums = matching_tables(ones)[0, -1]
        for k, val in enumerate(sums):
            exact = factorial(n) // (factorial(k) * 2**k * factorial(n - 2 * k))
            errs.append(abs(val - exact) / exact)
    return _result("all-ones matching counts (2J)!/(n! 2^n (2J-2n)!)", errs, 1e-15)


def dp_timing(two_j=20, seed=16) -> CheckResult:
    rng = _rng(seed)
    matching_tables(chordal_weights(random_constellation(4, rng).stars))  # compile
    u = random_constellation(two_j, rng)
    start = time.perf_counter()
    partition_function(u)
    elapsed = time.perf_counter() - start
    return _result(f"DP at 2J = {two_j} wall time (s)", [elapsed], 10.0)


def full_suite() -> list[CheckResult]:
    out = [
        round_trip(),
        partition_vs_norm(),
        partition_vs_quadrature(),
        moments_vs_oracle(),
        spin_one_closed_forms(),
        star_addition(),
        kahler_identities(),
        metric_vs_distance(),
        curvature_vs_curl(),
        spin_half_flux(),
        coherent_loop_phase(),
        line_vs_holonomy(),
        zeeman_dynamics(),
        quadrupolar_dynamics(),
        energy_drift(),
        *coherent_stays_coherent(),
        dp_vs_enumeration(),
        matching_counts(),
        dp_timing(),
    ]
    return out


def quick_suite(seed: int = 0) -> list[CheckResult]:
    """Oracle-equivalence checks restricted to j <= 2 with small samples."""
    s = seed
    return [
        round_trip(n_states=40, max_two_j=4, seed=s + 1),
        partition_vs_norm(n_samples=20, max_two_j=4, seed=s + 2),
        partition_vs_quadrature(n_samples=8, max_two_j=4, seed=s + 3),
        moments_vs_oracle(n_samples=20, max_two_j=4, seed=s + 4),
        spin_one_closed_forms(n_samples=10, seed=s + 5),
        star_addition(n_samples=20, max_two_j=4, seed=s + 6),
        kahler_identities(n_samples=20, max_two_j=4, seed=s + 7),
        metric_vs_distance(n_samples=10, max_two_j=4, seed=s + 8),
        curvature_vs_curl(n_samples=5, max_two_j=4, seed=s + 9),
        coherent_loop_phase(two_js=(1, 2, 4), samples=2000),
        line_vs_holonomy(n_loops=3, max_two_j=4, samples=1000, seed=s + 10),
        zeeman_dynamics(two_js=(1, 2), per_j=1, seed=s + 11),
        *coherent_stays_coherent(two_js=(2,), seed=s + 14),
        dp_vs_enumeration(max_dots=6, seed=s + 15),
        matching_counts(max_dots=8),
    ]
