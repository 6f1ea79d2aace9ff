"""Majorana stellar representation of spin-J states."""

from .diagrams import diagram_sums, free_energy, partition_function
from .dynamics import HamiltonianSpec, Trajectory, evolve_stars, oracle_trajectory
from .geometry import (
    StarPath,
    berry_connection,
    geometric_phase,
    quantum_tensors,
    tangent_frame,
)
from .hilbert import SpinState, coherent_state, spin_matrices
from .moments import dipole, mean_n, mean_nn, moment_set, quadrupole, reduced_average
from .stellar import (
    Constellation,
    constellation_to_state,
    match_constellations,
    random_constellation,
    random_state,
    state_to_constellation,
)

__all__ = [
    "Constellation",
    "HamiltonianSpec",
    "SpinState",
    "StarPath",
    "Trajectory",
    "berry_connection",
    "coherent_state",
    "constellation_to_state",
    "diagram_sums",
    "dipole",
    "evolve_stars",
    "free_energy",
    "geometric_phase",
    "match_constellations",
    "mean_n",
    "mean_nn",
    "moment_set",
    "oracle_trajectory",
    "partition_function",
    "quadrupole",
    "quantum_tensors",
    "random_constellation",
    "random_state",
    "reduced_average",
    "spin_matrices",
    "state_to_constellation",
    "tangent_frame",
]
