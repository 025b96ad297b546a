"""Determinant bitmask algebra and fixed-(N_alpha, N_beta) sector bases.

A determinant is an occupation bitmask over 2n spin orbitals in block
layout: bit p set means spin orbital p occupied, with alpha spin orbitals
on bits [0, n) and beta on [n, 2n).  The fermionic phase convention is
(-1)^(number of occupied spin orbitals with index below p), evaluated on
the occupation the operator acts on, with operator strings applied
right-to-left.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

__all__ = [
    "SectorBasis",
    "enumerate_sector",
    "apply_excitation",
    "occupied_orbitals",
]


def _phase(mask: int, p: int) -> int:
    """(-1)^(number of set bits below position p)."""
    below = mask & ((1 << p) - 1)
    return -1 if (bin(below).count("1") & 1) else 1


def occupied_orbitals(mask: int) -> list[int]:
    """Indices of occupied spin orbitals, ascending."""
    occ = []
    p = 0
    while mask:
        if mask & 1:
            occ.append(p)
        mask >>= 1
        p += 1
    return occ


def apply_excitation(
    det: int, create: Sequence[int], annihilate: Sequence[int]
) -> tuple[int, int] | None:
    """Apply a creation/annihilation string to a determinant bitmask.

    Annihilation operators are applied first, in list order, then creation
    operators in list order (i.e. the lists are given innermost-first for
    the conventional a†...a†...a...a ordering).  Returns the resulting
    determinant and accumulated phase, or None when the string annihilates
    the state (removing from an empty orbital or adding to a filled one).
    None is a valid algebraic outcome, not an error.
    """
    phase = 1
    for q in annihilate:
        if not (det >> q) & 1:
            return None
        phase *= _phase(det, q)
        det &= ~(1 << q)
    for p in create:
        if (det >> p) & 1:
            return None
        phase *= _phase(det, p)
        det |= 1 << p
    return det, phase


@dataclass(frozen=True, eq=False)
class SectorBasis:
    """All determinants with fixed per-spin electron counts, in canonical order.

    Determinants are sorted ascending by bitmask; ``index_of`` is the inverse
    lookup.  Immutable, so instances are safe to share across threads.
    """

    n_spatial: int
    n_alpha: int
    n_beta: int
    determinants: tuple[int, ...]
    index_of: dict[int, int] = field(repr=False)

    def __len__(self) -> int:
        return len(self.determinants)

    @property
    def n_spin_orbitals(self) -> int:
        return 2 * self.n_spatial

    @property
    def sz(self) -> float:
        return 0.5 * (self.n_alpha - self.n_beta)

    def spin_of(self, p: int) -> int:
        """0 for alpha spin orbitals, 1 for beta."""
        return 0 if p < self.n_spatial else 1

    def index(self, det: int) -> int:
        try:
            return self.index_of[det]
        except KeyError:
            raise KeyError(f"determinant {det:#x} not in sector "
                           f"({self.n_alpha}, {self.n_beta})") from None


def enumerate_sector(n_spatial: int, n_alpha: int, n_beta: int) -> SectorBasis:
    """Enumerate the (N_alpha, N_beta) determinant basis, lexicographic by bitmask."""
    if not (0 <= n_alpha <= n_spatial and 0 <= n_beta <= n_spatial):
        raise ValueError(
            f"electron counts ({n_alpha}, {n_beta}) outside [0, {n_spatial}]"
        )
    n = n_spatial

    def half_masks(count):
        masks = [sum(1 << i for i in occ) for occ in combinations(range(n), count)]
        return sorted(masks)

    dets = sorted(
        a | (b << n) for b in half_masks(n_beta) for a in half_masks(n_alpha)
    )
    return SectorBasis(
        n_spatial=n_spatial,
        n_alpha=n_alpha,
        n_beta=n_beta,
        determinants=tuple(dets),
        index_of={d: i for i, d in enumerate(dets)},
    )
