"""Husimi averages and multipole moments from the stars.

The averages <n> and <n n> weighted by the Husimi function follow from the
pairing sums with one or two open dots.  An open dot must be linked, either
to a star k (weight u_k) or to the other open dot (weight -2 delta), so
every sum reduces to star-only sums on sub-constellations.  One subset table
per constellation therefore serves the full averages and the reduced ones
with one or two stars removed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .diagrams import _fact_ratio, chordal_weights, matching_tables
from .stellar import Constellation


@lru_cache(maxsize=None)
def _weight_row(size: int, shift: int, n_terms: int) -> np.ndarray:
    row = np.zeros(n_terms)
    for n in range(min(n_terms, size + shift + 1)):
        row[n] = (-1) ** n * _fact_ratio(size + shift - n, size)
    row.setflags(write=False)
    return row


def _weights(sizes: np.ndarray, shift: int, n_terms: int) -> np.ndarray:
    """w[K, n] = (-1)^n (N'_K + shift - n)!/N'_K!, zero where the factorial would be negative."""
    return np.array([_weight_row(int(s), shift, n_terms) for s in sizes]).reshape(len(sizes), n_terms)


@lru_cache(maxsize=256)
def _layout(n: int, removed: tuple):
    """Subset-table indices for the constellations left after each removal."""
    full = (1 << n) - 1
    masks = np.array([full ^ sum(1 << i for i in r) for r in removed], dtype=np.int64)
    sizes = np.array([n - len(r) for r in removed])
    bits = 1 << np.arange(n)
    member = (masks[:, None] & bits[None, :]) != 0
    idx1 = masks[:, None] ^ bits[None, :]
    idx2 = masks[:, None, None] ^ bits[None, :, None] ^ bits[None, None, :]
    pair = member[:, :, None] & member[:, None, :] & ~np.eye(n, dtype=bool)[None]
    if n == 0:
        idx1 = np.zeros((len(masks), 0), dtype=np.int64)
        idx2 = np.zeros((len(masks), 0, 0), dtype=np.int64)
    return masks, sizes, member, idx1, idx2, pair


class MomentTable:
    """Subset table for a (batch of) constellation(s) with moment readout.

    ``stars`` has shape (N, 3) or (B, N, 3).  :meth:`averages` returns
    <n> and <n n> for the constellations left after removing each requested
    index set.
    """

    def __init__(self, stars):
        stars = np.asarray(stars, dtype=float)
        self.batched = stars.ndim == 3
        self.stars = stars if self.batched else stars[None]
        self.n = self.stars.shape[1]
        self.table = matching_tables(chordal_weights(self.stars))

    def averages(self, removed=((),)):
        removed = tuple(tuple(r) for r in removed)
        masks, sizes, member, idx1, idx2, pair = _layout(self.n, removed)

        tab = self.table
        n_links = tab.shape[-1]
        t0 = tab[:, masks, :]
        t1 = tab[:, idx1, :] * member[None, :, :, None]
        t2 = tab[:, idx2, :] * pair[None, :, :, :, None]

        den = np.einsum("bkn,kn->bk", t0, _weights(sizes, 0, n_links))
        u = self.stars
        # open dot linked to star i, the rest is any matching of mask minus i
        d_mu = np.einsum("bid,bkin->bknd", u, t1)
        num_mu = np.einsum("bknd,kn->bkd", d_mu, _weights(sizes, 1, n_links + 1)[:, 1:])
        w2 = _weights(sizes, 2, n_links + 2)
        d_pair = np.einsum("bid,bje,bkijn->bknde", u, u, t2)
        num_nn = np.einsum("bknde,kn->bkde", d_pair, w2[:, 2:])
        num_nn += (-2.0 * np.einsum("bkn,kn->bk", t0, w2[:, 1 : n_links + 1]))[..., None, None] * np.eye(3)

        mean_n = num_mu / ((sizes + 2) * den)[..., None]
        mean_nn = num_nn / ((sizes + 2) * (sizes + 3) * den)[..., None, None]
        if not self.batched:
            return mean_n[0], mean_nn[0]
        return mean_n, mean_nn


def _full(u) -> tuple[np.ndarray, np.ndarray]:
    mn, mnn = MomentTable(u.stars).averages()
    return mn[0], mnn[0]


def mean_n(u: Constellation) -> np.ndarray:
    """Husimi-weighted average of the unit vector n."""
    return _full(u)[0]


def mean_nn(u: Constellation) -> np.ndarray:
    """Husimi-weighted average of n (x) n; unit trace."""
    return _full(u)[1]


def dipole_from(j: float, mn: np.ndarray) -> np.ndarray:
    return (j + 1) * mn


def quadrupole_from(j: float, mnn: np.ndarray) -> np.ndarray:
    # tr <n n> = 1 analytically; subtracting the computed trace keeps Q exactly traceless
    return (j + 1) * (j + 1.5) * (mnn - np.trace(mnn) * np.eye(3) / 3)


def dipole(u: Constellation) -> np.ndarray:
    """<J_mu> = (J+1) <n_mu>."""
    return dipole_from(u.j, mean_n(u))


def quadrupole(u: Constellation) -> np.ndarray:
    """<Q_mu nu> = (J+1)(J+3/2)(<n_mu n_nu> - delta/3)."""
    return quadrupole_from(u.j, mean_nn(u))


def reduced_average(u: Constellation, remove, what: str = "n"):
    """Average over the constellation with the stars in ``remove`` taken out."""
    remove = tuple(int(i) for i in remove)
    if len(set(remove)) != len(remove):
        raise ValueError("duplicate indices in remove")
    if not 1 <= len(remove) <= 2:
        raise ValueError("remove one or two stars")
    if any(i < 0 or i >= u.two_j for i in remove):
        raise IndexError("star index out of range")
    if what not in ("n", "nn"):
        raise ValueError("what must be 'n' or 'nn'")
    mn, mnn = MomentTable(u.stars).averages([remove])
    return mn[0] if what == "n" else mnn[0]


def reduced_moments(stars: np.ndarray):
    """All single- and pair-removed averages from one subset table.

    Returns (m1, m2, p2) with m1[i] = <n>'_i, m2[i, j] = <n>'_ij and
    p2[i, j] = <n n>'_ij (the i == j entries of m2, p2 are left at zero).
    Batched input (B, N, 3) gives a leading batch axis on every output.
    """
    stars = np.asarray(stars, dtype=float)
    batched = stars.ndim == 3
    s = stars if batched else stars[None]
    b, n = s.shape[:2]
    pairs = list(combinations(range(n), 2))
    table = MomentTable(s)
    sets = [(i,) for i in range(n)] + pairs
    mn, mnn = table.averages(sets)
    m1 = mn[:, :n]
    m2 = np.zeros((b, n, n, 3))
    p2 = np.zeros((b, n, n, 3, 3))
    for k, (i, j) in enumerate(pairs):
        m2[:, i, j] = m2[:, j, i] = mn[:, n + k]
        p2[:, i, j] = p2[:, j, i] = mnn[:, n + k]
    if batched:
        return m1, m2, p2
    return m1[0], m2[0], p2[0]


@dataclass(frozen=True, eq=False)
class MomentSet:
    mean_n: np.ndarray
    mean_nn: np.ndarray
    dipole: np.ndarray
    quadrupole: np.ndarray


def moment_set(u: Constellation) -> MomentSet:
    mn, mnn = _full(u)
    return MomentSet(mn, mnn, dipole_from(u.j, mn), quadrupole_from(u.j, mnn))


def batch_moments(stars: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """<n> and <n n> for a batch of equal-size constellations (B, N, 3)."""
    mn, mnn = MomentTable(np.asarray(stars, dtype=float)).averages()
    return mn[:, 0], mnn[:, 0]
