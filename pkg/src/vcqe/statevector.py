"""Exact statevector engine: Hamiltonian action, two-body operators and
their exponentials, reduced density matrices, and spin observables.

All operators act within one (N_alpha, N_beta) determinant sector.  The
engine precomputes, once per sector, the sparse coupling structure of every
S_z-conserving two-body excitation a†_p a†_q a_t a_s on canonical pairs;
the Hamiltonian matrix, two-body operator actions, 2-RDMs, transition
kernels and the CSE residual norm all reuse this table.  Everything here is
real arithmetic; complex amplitudes appear only in the measurement module.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np
import scipy.sparse

from .fock import SectorBasis, apply_excitation, enumerate_sector, occupied_orbitals
from .integrals import MolecularIntegrals
from .pairs import PairBasis, TwoBodyCoefficients, pair_basis

__all__ = [
    "StateVector",
    "HamiltonianOperator",
    "TwoRDM",
    "ExponentialSeriesError",
    "build_hamiltonian",
    "apply_hamiltonian",
    "expectation",
    "variance",
    "apply_two_body",
    "exp_apply",
    "compute_2rdm",
    "spin_expectations",
    "cse_norm",
    "pair_transition_matrix",
    "two_body_matrix",
]

NORM_TOL = 1e-10


class ExponentialSeriesError(RuntimeError):
    """Taylor series for an operator exponential failed to converge."""


@dataclass(eq=False)
class StateVector:
    """Real amplitudes over a sector basis; solver-facing states have norm 1."""

    basis: SectorBasis
    coefficients: np.ndarray

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=float)
        if self.coefficients.shape != (len(self.basis),):
            raise ValueError(
                f"coefficient length {self.coefficients.shape} does not match "
                f"basis size {len(self.basis)}"
            )

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coefficients))

    def normalized(self) -> "StateVector":
        n = self.norm
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.basis, self.coefficients / n)

    def dot(self, other: "StateVector") -> float:
        _check_same_sector(self.basis, other.basis)
        return float(self.coefficients @ other.coefficients)


def _check_same_sector(a: SectorBasis, b: SectorBasis) -> None:
    if (a.n_spatial, a.n_alpha, a.n_beta) != (b.n_spatial, b.n_alpha, b.n_beta):
        raise ValueError(
            f"sector mismatch: ({a.n_spatial}, {a.n_alpha}, {a.n_beta}) vs "
            f"({b.n_spatial}, {b.n_alpha}, {b.n_beta})"
        )


def _check_normalized(psi: StateVector) -> None:
    if abs(psi.norm - 1.0) > NORM_TOL:
        raise ValueError(f"state not normalized (norm {psi.norm!r})")


@dataclass(frozen=True, eq=False)
class _CouplingTable:
    """Sparse action of every canonical S_z-conserving two-body excitation.

    Entry e means: the operator creating pair ``pair_i[e]`` and annihilating
    pair ``pair_j[e]`` maps determinant ``col[e]`` to ``sign[e]`` times
    determinant ``row[e]``.  The one-body arrays play the same role for
    same-spin a†_p a_q strings.
    """

    basis: SectorBasis
    pairs: PairBasis
    pair_i: np.ndarray
    pair_j: np.ndarray
    row: np.ndarray
    col: np.ndarray
    sign: np.ndarray
    one_p: np.ndarray
    one_q: np.ndarray
    one_row: np.ndarray
    one_col: np.ndarray
    one_sign: np.ndarray


@lru_cache(maxsize=None)
def _coupling_table(n_spatial: int, n_alpha: int, n_beta: int) -> _CouplingTable:
    basis = enumerate_sector(n_spatial, n_alpha, n_beta)
    pb = pair_basis(n_spatial)
    by_type: dict[int, list[int]] = {0: [], 1: [], 2: []}
    for idx, t in enumerate(pb.pair_type):
        by_type[int(t)].append(idx)

    ei, ej, erow, ecol, esign = [], [], [], [], []
    for c, det in enumerate(basis.determinants):
        occ = occupied_orbitals(det)
        for s, t in combinations(occ, 2):
            j_idx = pb.index(s, t)
            j_type = int(pb.pair_type[j_idx])
            for i_idx in by_type[j_type]:
                p, q = pb.pairs[i_idx]
                res = apply_excitation(det, create=[q, p], annihilate=[s, t])
                if res is None:
                    continue
                new_det, phase = res
                ei.append(i_idx)
                ej.append(j_idx)
                erow.append(basis.index_of[new_det])
                ecol.append(c)
                esign.append(phase)

    op, oq, orow, ocol, osign = [], [], [], [], []
    n = n_spatial
    for c, det in enumerate(basis.determinants):
        for q in occupied_orbitals(det):
            block = range(n) if q < n else range(n, 2 * n)
            for p in block:
                res = apply_excitation(det, create=[p], annihilate=[q])
                if res is None:
                    continue
                new_det, phase = res
                op.append(p)
                oq.append(q)
                orow.append(basis.index_of[new_det])
                ocol.append(c)
                osign.append(phase)

    as_i = lambda xs: np.asarray(xs, dtype=np.intp)
    return _CouplingTable(
        basis=basis, pairs=pb,
        pair_i=as_i(ei), pair_j=as_i(ej), row=as_i(erow), col=as_i(ecol),
        sign=np.asarray(esign, dtype=float),
        one_p=as_i(op), one_q=as_i(oq), one_row=as_i(orow), one_col=as_i(ocol),
        one_sign=np.asarray(osign, dtype=float),
    )


def coupling_table(basis: SectorBasis) -> _CouplingTable:
    return _coupling_table(basis.n_spatial, basis.n_alpha, basis.n_beta)


@dataclass(frozen=True, eq=False)
class HamiltonianOperator:
    """Sector Hamiltonian with its action cached as a sparse coupling matrix."""

    integrals: MolecularIntegrals
    basis: SectorBasis
    matrix: scipy.sparse.csr_array


def _pair_interaction(integrals: MolecularIntegrals, pb: PairBasis) -> np.ndarray:
    """Antisymmetrized spin-orbital interaction <pq||rs> on canonical pairs.

    The two-electron part of H is sum_IJ W[I, J] a†_p a†_q a_s a_r with
    I = (p < q), J = (r < s); W is symmetric for real orbitals.
    """
    n = integrals.n_spatial
    v = integrals.v

    def spat(x):
        return x % n

    def spin(x):
        return x >= n

    P = len(pb)
    W = np.zeros((P, P))
    for I, (p, q) in enumerate(pb.pairs):
        for J, (r, s) in enumerate(pb.pairs):
            if pb.pair_type[I] != pb.pair_type[J]:
                continue
            w = 0.0
            if spin(p) == spin(r) and spin(q) == spin(s):
                w += v[spat(p), spat(r), spat(q), spat(s)]
            if spin(p) == spin(s) and spin(q) == spin(r):
                w -= v[spat(p), spat(s), spat(q), spat(r)]
            W[I, J] = w
    return W


def build_hamiltonian(
    integrals: MolecularIntegrals, basis: SectorBasis
) -> HamiltonianOperator:
    """Assemble the sector Hamiltonian from the second-quantized operator form."""
    if integrals.n_spatial != basis.n_spatial:
        raise ValueError("integral and basis orbital counts differ")
    table = coupling_table(basis)
    dim = len(basis)
    n = basis.n_spatial

    h_so = np.zeros((2 * n, 2 * n))
    h_so[:n, :n] = integrals.h
    h_so[n:, n:] = integrals.h
    one_vals = h_so[table.one_p, table.one_q] * table.one_sign

    W = _pair_interaction(integrals, table.pairs)
    two_vals = W[table.pair_i, table.pair_j] * table.sign

    rows = np.concatenate([table.one_row, table.row, np.arange(dim)])
    cols = np.concatenate([table.one_col, table.col, np.arange(dim)])
    vals = np.concatenate([one_vals, two_vals,
                           np.full(dim, integrals.core_energy)])
    mat = scipy.sparse.coo_array((vals, (rows, cols)), shape=(dim, dim)).tocsr()
    return HamiltonianOperator(integrals=integrals, basis=basis, matrix=mat)


def apply_hamiltonian(H: HamiltonianOperator, psi: StateVector) -> np.ndarray:
    """H|psi> as a raw (unnormalized) coefficient vector."""
    _check_same_sector(H.basis, psi.basis)
    return H.matrix @ psi.coefficients


def expectation(psi: StateVector, H: HamiltonianOperator) -> float:
    """<psi|H|psi> in hartree."""
    _check_normalized(psi)
    return float(psi.coefficients @ apply_hamiltonian(H, psi))


def variance(psi: StateVector, H: HamiltonianOperator) -> float:
    """<psi|(H - E)^2|psi> = ||(H - E)|psi>||^2 with E = <psi|H|psi>."""
    _check_normalized(psi)
    hpsi = apply_hamiltonian(H, psi)
    e = float(psi.coefficients @ hpsi)
    r = hpsi - e * psi.coefficients
    return float(r @ r)


def two_body_matrix(F: TwoBodyCoefficients, basis: SectorBasis) -> np.ndarray:
    """Dense sector matrix of the operator defined by packed pair coefficients."""
    table = coupling_table(basis)
    if F.pair_basis.n_spatial != basis.n_spatial:
        raise ValueError("pair coefficients and basis orbital counts differ")
    dim = len(basis)
    vals = F.matrix[table.pair_i, table.pair_j] * table.sign
    flat = np.bincount(table.row * dim + table.col, weights=vals,
                       minlength=dim * dim)
    return flat.reshape(dim, dim)


def apply_two_body(F: TwoBodyCoefficients, psi: StateVector) -> np.ndarray:
    """F|psi> (unnormalized), summing phase-correct excitations."""
    table = coupling_table(psi.basis)
    if F.pair_basis.n_spatial != psi.basis.n_spatial:
        raise ValueError("pair coefficients and state orbital counts differ")
    vals = F.matrix[table.pair_i, table.pair_j] * table.sign
    contrib = vals * psi.coefficients[table.col]
    return np.bincount(table.row, weights=contrib, minlength=len(psi.basis))


def taylor_exp_action(
    mat, vec: np.ndarray, scale: float = 1.0,
    rtol: float = 1e-15, max_terms: int = 200,
) -> np.ndarray:
    """exp(scale * mat) @ vec by an adaptively truncated Taylor series.

    Terminates when the next term's norm drops below rtol times the
    accumulated result; raises ExponentialSeriesError past max_terms.
    """
    result = vec.copy()
    term = vec.copy()
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, max_terms + 1):
            term = (scale / k) * (mat @ term)
            result = result + term
            term_norm = np.linalg.norm(term)
            if not np.isfinite(term_norm):
                break
            if term_norm < rtol * np.linalg.norm(result):
                return result
    raise ExponentialSeriesError(
        f"series did not converge within {max_terms} terms; reduce the scale"
    )


def exp_apply(A: TwoBodyCoefficients, scale: float, psi: StateVector) -> StateVector:
    """e^(scale * A)|psi> for an anti-Hermitian packed generator A.

    Unitarity keeps the norm drift below 1e-12 before the defensive
    renormalization of the returned state.
    """
    _check_normalized(psi)
    A.require_anti_hermitian()
    mat = two_body_matrix(A, psi.basis)
    out = taylor_exp_action(mat, psi.coefficients, scale=scale)
    return StateVector(psi.basis, out / np.linalg.norm(out))


def pair_transition_matrix(
    psi: StateVector, w: np.ndarray, table: _CouplingTable | None = None
) -> np.ndarray:
    """Kernel K[I, J] = <psi| a†_p a†_q a_t a_s |w> on canonical pairs.

    ``w`` is a raw coefficient vector over the same sector (it need not be
    normalized).  With w = psi this is the 2-RDM pair matrix; with
    w = (H - E)^2 psi it is the variance-gradient kernel.
    """
    if table is None:
        table = coupling_table(psi.basis)
    P = len(table.pairs)
    contrib = table.sign * psi.coefficients[table.row] * w[table.col]
    flat = np.bincount(table.pair_i * P + table.pair_j, weights=contrib,
                       minlength=P * P)
    return flat.reshape(P, P)


@dataclass(eq=False)
class TwoRDM:
    """Two-particle reduced density matrix on canonical pair indices.

    ``pair_matrix[I, J]`` is D^{pq}_{st} for I = (p < q), J = (s < t);
    arbitrary index orders follow from antisymmetry in each pair.
    """

    pair_basis: PairBasis
    pair_matrix: np.ndarray

    def element(self, p: int, q: int, s: int, t: int) -> float:
        if p == q or s == t:
            return 0.0
        sign = 1.0
        if p > q:
            p, q, sign = q, p, -sign
        if s > t:
            s, t, sign = t, s, -sign
        i = self.pair_basis.index(p, q)
        j = self.pair_basis.index(s, t)
        return float(sign * self.pair_matrix[i, j])

    def tensor(self) -> np.ndarray:
        """Full D[p, q, s, t] with antisymmetry partners expanded."""
        n_so = 2 * self.pair_basis.n_spatial
        D = np.zeros((n_so, n_so, n_so, n_so))
        for i, (p, q) in enumerate(self.pair_basis.pairs):
            for j, (s, t) in enumerate(self.pair_basis.pairs):
                val = self.pair_matrix[i, j]
                D[p, q, s, t] = val
                D[q, p, s, t] = -val
                D[p, q, t, s] = -val
                D[q, p, t, s] = val
        return D

    def trace(self) -> float:
        """sum_pq D^{pq}_{pq}; equals N(N-1) for an N-electron state."""
        return 2.0 * float(np.trace(self.pair_matrix))


def compute_2rdm(psi: StateVector) -> TwoRDM:
    _check_normalized(psi)
    table = coupling_table(psi.basis)
    K = pair_transition_matrix(psi, psi.coefficients, table)
    return TwoRDM(pair_basis=table.pairs, pair_matrix=K)


def spin_expectations(psi: StateVector) -> tuple[float, float]:
    """(<S_z>, <S^2>) from the sector counts and S_z^2 + S_z + S_-S_+."""
    _check_normalized(psi)
    basis = psi.basis
    n = basis.n_spatial
    sz = basis.sz

    raised: dict[int, float] = {}
    for c, det in zip(psi.coefficients, basis.determinants):
        if c == 0.0:
            continue
        for p in range(n):
            res = apply_excitation(det, create=[p], annihilate=[p + n])
            if res is None:
                continue
            new_det, phase = res
            raised[new_det] = raised.get(new_det, 0.0) + c * phase
    s_minus_s_plus = sum(val * val for val in raised.values())
    s_squared = sz * sz + sz + s_minus_s_plus
    return sz, float(s_squared)


def cse_norm(psi: StateVector, H: HamiltonianOperator) -> float:
    """Least-squares residual of the contracted equation's unitary part.

    Projects the two-body residual <psi| a†_p a†_q a_t a_s (H - E) |psi>
    onto its anti-Hermitian component (the part a unitary two-body flow can
    still reduce, and the part whose vanishing the solver's stationarity
    implies) and sums the squares of the independent canonical-pair
    components.  Zero exactly at eigenstates.
    """
    _check_normalized(psi)
    _check_same_sector(H.basis, psi.basis)
    hpsi = apply_hamiltonian(H, psi)
    e = float(psi.coefficients @ hpsi)
    r = hpsi - e * psi.coefficients
    K = pair_transition_matrix(psi, r)
    A = 0.5 * (K - K.T)
    return 0.5 * float(np.sum(A * A))
