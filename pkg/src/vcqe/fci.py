"""Exact diagonalization of the sector Hamiltonian (the FCI reference)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .statevector import HamiltonianOperator, StateVector

__all__ = ["SpectrumResult", "diagonalize", "eigenstate_overlap"]

DENSE_DIMENSION_CAP = 10_000


@dataclass(eq=False)
class SpectrumResult:
    """Ascending eigenvalues (hartree) with matching normalized eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: list[StateVector]

    def __len__(self) -> int:
        return len(self.eigenvalues)


def diagonalize(H: HamiltonianOperator) -> SpectrumResult:
    """Full real-symmetric eigendecomposition of the dense sector matrix.

    Intended for desk-scale sectors; refuses dimensions above
    DENSE_DIMENSION_CAP rather than silently thrashing.
    """
    dim = len(H.basis)
    if dim > DENSE_DIMENSION_CAP:
        raise ValueError(
            f"sector dimension {dim} exceeds the dense cap {DENSE_DIMENSION_CAP}; "
            "restrict to a smaller (N_alpha, N_beta) sector"
        )
    dense = H.matrix.toarray()
    eigenvalues, vectors = np.linalg.eigh(dense)
    eigenvectors = [StateVector(H.basis, vectors[:, k]) for k in range(dim)]
    return SpectrumResult(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def eigenstate_overlap(psi: StateVector, spectrum: SpectrumResult) -> np.ndarray:
    """Squared overlaps |<v_k|psi>|^2 against every eigenvector; sums to one."""
    return np.array([psi.dot(v) ** 2 for v in spectrum.eigenvectors])
