"""Pairing-diagram sums, partition function and fictitious free energy.

A diagram is a partial matching on a set of dots.  Solid dots are the stars,
open dots carry a Cartesian index and must all be linked.  Link weights:
solid-solid d_ij = (1 - u_i.u_j)/2, solid-open u_i[mu], open-open
-2 delta(mu, nu).  The sums are evaluated by dynamic programming over
subsets of dots, grouped by the number of links.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numba
import numpy as np

from .stellar import Constellation

MAX_DOTS = 24


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Link weights for a diagram set with ``n_open`` <= 2 open dots."""

    solid_solid: np.ndarray
    solid_open: np.ndarray
    open_open: np.ndarray

    def __post_init__(self):
        ss = np.asarray(self.solid_solid, dtype=float)
        n = ss.shape[0]
        oo = np.atleast_2d(np.asarray(self.open_open, dtype=float))
        k = oo.shape[0] if oo.size else 0
        oo = oo.reshape(k, k)
        so = np.asarray(self.solid_open, dtype=float).reshape(n, k)
        if k > 2:
            raise ValueError("at most two open dots are supported")
        if ss.shape != (n, n) or not np.allclose(ss, ss.T):
            raise ValueError("solid_solid must be a symmetric square matrix")
        object.__setattr__(self, "solid_solid", ss)
        object.__setattr__(self, "solid_open", so)
        object.__setattr__(self, "open_open", oo)

    @property
    def n_solid(self) -> int:
        return self.solid_solid.shape[0]

    @property
    def n_open(self) -> int:
        return self.solid_open.shape[1]

    def max_links(self) -> int:
        return (self.n_solid + self.n_open) // 2


def chordal_weights(stars: np.ndarray) -> np.ndarray:
    """d_ij = (1 - u_i.u_j)/2 with a zero diagonal; works on (..., N, 3)."""
    d = (1 - np.einsum("...ik,...jk->...ij", stars, stars)) / 2
    n = stars.shape[-2]
    d[..., np.arange(n), np.arange(n)] = 0.0
    return d


def star_graph(stars: np.ndarray, open_axes: tuple[int, ...] = ()) -> WeightedGraph:
    """Graph for the stars plus one open dot per entry of ``open_axes``."""
    stars = np.asarray(stars, dtype=float)
    so = stars[:, list(open_axes)] if open_axes else np.zeros((len(stars), 0))
    k = len(open_axes)
    oo = np.zeros((k, k))
    if k == 2 and open_axes[0] == open_axes[1]:
        oo[0, 1] = oo[1, 0] = -2.0
    return WeightedGraph(chordal_weights(stars), so, oo)


@numba.njit(cache=True)
def _matching_tables(weights, unlinked, n_links):
    """T[b, mask, n]: sum over n-link partial matchings of the dots in ``mask``.

    Each matching contributes the product of its link weights times
    ``unlinked[v]`` for every dot v of the mask left without a partner.
    """
    n_batch, n = weights.shape[0], weights.shape[1]
    size = 1 << n
    table = np.zeros((n_batch, size, n_links + 1))
    for b in range(n_batch):
        table[b, 0, 0] = 1.0
        for mask in range(1, size):
            v = 0
            while not (mask >> v) & 1:
                v += 1
            rest = mask ^ (1 << v)
            uv = unlinked[b, v]
            for k in range(n_links + 1):
                table[b, mask, k] = uv * table[b, rest, k]
            bits = rest
            while bits:
                w = 0
                while not (bits >> w) & 1:
                    w += 1
                bits ^= 1 << w
                wt = weights[b, v, w]
                if wt != 0.0:
                    sub = rest ^ (1 << w)
                    for k in range(1, n_links + 1):
                        table[b, mask, k] += wt * table[b, sub, k - 1]
    return table


def matching_tables(weights: np.ndarray, unlinked: np.ndarray | None = None) -> np.ndarray:
    """Batched subset tables for dots with pairwise ``weights`` (B, N, N)."""
    weights = np.ascontiguousarray(weights, dtype=float)
    if weights.ndim == 2:
        weights = weights[None]
    n = weights.shape[-1]
    if n > MAX_DOTS:
        raise ValueError(f"subset DP limited to {MAX_DOTS} dots, got {n}")
    if unlinked is None:
        unlinked = np.ones(weights.shape[:2])
    unlinked = np.ascontiguousarray(np.broadcast_to(unlinked, weights.shape[:2]), dtype=float)
    return _matching_tables(weights, unlinked, n // 2)


def matching_sums(g: WeightedGraph) -> np.ndarray:
    """Diagram sums indexed by link count n = 0 .. max_links.

    Open dots are placed first so the recursion always meets them before any
    solid dot; an open dot left unlinked contributes the factor 0.
    """
    k, n = g.n_open, g.n_solid
    w = np.zeros((k + n, k + n))
    w[:k, :k] = g.open_open
    w[:k, k:] = g.solid_open.T
    w[k:, :k] = g.solid_open
    w[k:, k:] = g.solid_solid
    unlinked = np.r_[np.zeros(k), np.ones(n)]
    table = matching_tables(w, unlinked)
    return table[0, -1]


@lru_cache(maxsize=None)
def _fact_ratio(a: int, b: int) -> float:
    """a!/b! as a product of factors (or reciprocals), never forming a! itself."""
    if a >= b:
        return float(np.prod(np.arange(b + 1, a + 1, dtype=float)))
    return float(np.prod(1.0 / np.arange(a + 1, b + 1, dtype=float)))


def alternating_weights(n_dots: int, top: int, n_terms: int) -> np.ndarray:
    """(-1)^n top_n!/n_dots! with top_n = top - n, for n = 0 .. n_terms-1."""
    return np.array(
        [(-1) ** n * _fact_ratio(top - n, n_dots) for n in range(n_terms)], dtype=float
    )


def diagram_sums(u: Constellation) -> np.ndarray:
    """D_U^(J, n) for n = 0 .. [J]."""
    return matching_sums(star_graph(u.stars))


def partition_function(u: Constellation) -> float:
    """Rescaled norm <Psi_U|Psi_U>/(2J+1) from the pairing expansion."""
    n = u.two_j
    d = diagram_sums(u)
    return float(alternating_weights(n, n, len(d)) @ d / (n + 1))


def free_energy(u: Constellation) -> float:
    return -float(np.log(partition_function(u)))
