"""Restricted Hartree-Fock, MO transformation and frozen-core folding."""

from __future__ import annotations

import numpy as np

__all__ = ["restricted_hartree_fock", "mo_integrals", "fold_frozen_core"]


def nuclear_repulsion(charges, centers) -> float:
    e = 0.0
    for i in range(len(charges)):
        for j in range(i):
            r = np.linalg.norm(np.asarray(centers[i]) - np.asarray(centers[j]))
            e += charges[i] * charges[j] / r
    return e


def restricted_hartree_fock(S, T, V, eri, n_electrons, e_nuc,
                            max_cycles=200, tol=1e-12):
    """Closed-shell SCF with DIIS; returns (energy, mo_coeffs, mo_energies).

    After converging from the core-Hamiltonian guess, re-converges from
    every single occupied/virtual swap of the solution and keeps the lowest
    energy found; the plain core guess can land in an excited SCF basin at
    short bond distances.  Raises RuntimeError if nothing converges.
    """
    if n_electrons % 2:
        raise ValueError("restricted SCF needs an even electron count")
    n_occ = n_electrons // 2
    nao = S.shape[0]
    hcore = T + V

    s_val, s_vec = np.linalg.eigh(S)
    if s_val.min() < 1e-10:
        raise RuntimeError("near-singular AO overlap")
    X = s_vec @ np.diag(s_val**-0.5) @ s_vec.T

    def fock(D):
        J = np.einsum("pqrs,rs->pq", eri, D)
        K = np.einsum("prqs,rs->pq", eri, D)
        return hcore + J - 0.5 * K

    def density(F):
        _, C = np.linalg.eigh(X.T @ F @ X)
        C = X @ C
        Cocc = C[:, :n_occ]
        return 2.0 * Cocc @ Cocc.T, C

    def converge(D):
        energy = 0.0
        C = None
        diis_F, diis_err = [], []
        for _ in range(max_cycles):
            F = fock(D)
            diis_F.append(F)
            diis_err.append(F @ D @ S - S @ D @ F)
            if len(diis_F) > 8:
                diis_F.pop(0)
                diis_err.pop(0)
            if len(diis_F) > 1:
                m = len(diis_F)
                B = -np.ones((m + 1, m + 1))
                B[m, m] = 0.0
                for i in range(m):
                    for j in range(m):
                        B[i, j] = np.sum(diis_err[i] * diis_err[j])
                rhs = np.zeros(m + 1)
                rhs[m] = -1.0
                try:
                    w = np.linalg.solve(B, rhs)[:m]
                    F = sum(wi * Fi for wi, Fi in zip(w, diis_F))
                except np.linalg.LinAlgError:
                    pass
            D_new, C = density(F)
            e_new = 0.5 * np.sum(D_new * (hcore + fock(D_new))) + e_nuc
            if abs(e_new - energy) < tol and np.abs(D_new - D).max() < np.sqrt(tol):
                mo_e = np.diag(C.T @ fock(D_new) @ C).copy()
                return e_new, C, mo_e
            D, energy = D_new, e_new
        raise RuntimeError(f"SCF not converged in {max_cycles} cycles")

    D0, _ = density(hcore)
    best = converge(D0)
    improved = True
    while improved:
        improved = False
        _, C, _ = best
        for i in range(n_occ):
            for a in range(n_occ, nao):
                Cswap = C.copy()
                Cswap[:, [i, a]] = Cswap[:, [a, i]]
                D = 2.0 * Cswap[:, :n_occ] @ Cswap[:, :n_occ].T
                try:
                    cand = converge(D)
                except RuntimeError:
                    continue
                if cand[0] < best[0] - 1e-10:
                    best = cand
                    improved = True
                    break
            if improved:
                break
    return best


def mo_integrals(hcore, eri, C):
    """Transform AO integrals to the MO basis; (pq|rs) stays chemists'."""
    h_mo = C.T @ hcore @ C
    v = np.einsum("pi,pqrs->iqrs", C, eri, optimize=True)
    v = np.einsum("qj,iqrs->ijrs", C, v, optimize=True)
    v = np.einsum("rk,ijrs->ijks", C, v, optimize=True)
    v_mo = np.einsum("sl,ijks->ijkl", C, v, optimize=True)
    return h_mo, v_mo


def fold_frozen_core(h_mo, v_mo, e_nuc, n_frozen):
    """Fold doubly occupied core orbitals into effective active integrals.

    Returns (core_energy, h_active, v_active) over the remaining orbitals.
    """
    core = range(n_frozen)
    e_core = e_nuc
    for c in core:
        e_core += 2.0 * h_mo[c, c]
        for c2 in core:
            e_core += 2.0 * v_mo[c, c, c2, c2] - v_mo[c, c2, c2, c]
    act = slice(n_frozen, h_mo.shape[0])
    h_act = h_mo[act, act].copy()
    for c in core:
        h_act += 2.0 * v_mo[act, act, c, c] - v_mo[act, c, c, act]
    v_act = v_mo[act, act, act, act].copy()
    return e_core, h_act, v_act
