"""Canonical spin-orbital pair indexing and packed two-body coefficients.

Two-body operators are parameterized on ordered pairs I = (p < q) of spin
orbitals.  A quadruple (I, J) conserves S_z exactly when the two pairs have
the same spin signature (alpha-alpha, alpha-beta or beta-beta), so the
coefficient matrix over pair indices is block diagonal in the pair type.
Anti-Hermitian operators carry an antisymmetric pair matrix (A_IJ = -A_JI,
zero diagonal), which makes the generated transformation exactly unitary.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

__all__ = ["PairBasis", "pair_basis", "TwoBodyCoefficients"]


@dataclass(frozen=True, eq=False)
class PairBasis:
    """Canonical (p < q) pairs over 2n spin orbitals in block spin layout."""

    n_spatial: int
    pairs: tuple[tuple[int, int], ...]
    pair_type: np.ndarray            # 0 alpha-alpha, 1 alpha-beta, 2 beta-beta
    allowed: np.ndarray              # bool (P, P): same-type (S_z conserving) mask

    def __len__(self) -> int:
        return len(self.pairs)

    def index(self, p: int, q: int) -> int:
        if p > q:
            p, q = q, p
        return self._index[(p, q)]

    @property
    def _index(self) -> dict[tuple[int, int], int]:
        idx = getattr(self, "_index_cache", None)
        if idx is None:
            idx = {pq: i for i, pq in enumerate(self.pairs)}
            object.__setattr__(self, "_index_cache", idx)
        return idx


@lru_cache(maxsize=None)
def pair_basis(n_spatial: int) -> PairBasis:
    n_so = 2 * n_spatial
    pairs = tuple(combinations(range(n_so), 2))
    ptype = np.array(
        [(p >= n_spatial) + (q >= n_spatial) for p, q in pairs], dtype=np.int8
    )
    allowed = ptype[:, None] == ptype[None, :]
    return PairBasis(n_spatial=n_spatial, pairs=pairs, pair_type=ptype, allowed=allowed)


@dataclass(eq=False)
class TwoBodyCoefficients:
    """Packed coefficients of a two-body generator on canonical pair indices.

    ``matrix[I, J]`` multiplies the excitation that creates pair I and
    annihilates pair J.  The stored matrix must vanish on S_z-breaking
    (different-type) slots; ``require_anti_hermitian`` additionally enforces
    the antisymmetric packing used for unitary generators.
    """

    pair_basis: PairBasis
    matrix: np.ndarray

    def __post_init__(self):
        P = len(self.pair_basis)
        if self.matrix.shape != (P, P):
            raise ValueError(f"pair matrix must be ({P}, {P}), got {self.matrix.shape}")
        if np.abs(self.matrix[~self.pair_basis.allowed]).max(initial=0.0) != 0.0:
            raise ValueError("non-S_z-conserving coefficient present")

    def require_anti_hermitian(self, tol: float = 1e-12) -> None:
        dev = np.abs(self.matrix + self.matrix.T).max(initial=0.0)
        if dev > tol:
            raise ValueError(f"pair matrix not antisymmetric (deviation {dev:.2e})")

    @property
    def norm(self) -> float:
        """Frobenius norm over the full pair matrix."""
        return float(np.linalg.norm(self.matrix))

    def dot(self, other: "TwoBodyCoefficients") -> float:
        """Frobenius inner product; the metric used for gradients and BFGS."""
        return float(np.sum(self.matrix * other.matrix))

    def scaled(self, factor: float) -> "TwoBodyCoefficients":
        return TwoBodyCoefficients(self.pair_basis, factor * self.matrix)

    @classmethod
    def zeros(cls, basis: PairBasis) -> "TwoBodyCoefficients":
        P = len(basis)
        return cls(basis, np.zeros((P, P)))
