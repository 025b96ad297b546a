"""Gaussian integrals over contracted s/p shells (McMurchie-Davidson).

One- and two-electron integrals over Cartesian Gaussian AOs are assembled
from Hermite-Gaussian expansion coefficients and Boys-function recursions.
Only angular momenta up to p are needed here, but the recursions are
general.  All quantities in atomic units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = ["AtomicOrbital", "boys", "build_ao_integrals"]


@dataclass(frozen=True)
class AtomicOrbital:
    """One contracted Cartesian Gaussian: sum_k c_k N_k x^l y^m z^n e^{-a_k r^2}.

    ``coefs`` multiply *normalized* primitives; contraction renormalization
    is applied when integrals are assembled.
    """

    center: tuple[float, float, float]
    powers: tuple[int, int, int]
    exps: tuple[float, ...]
    coefs: tuple[float, ...]


def _prim_norm(alpha: float, powers) -> float:
    l, m, n = powers
    df = lambda k: math.prod(range(k, 0, -2)) if k > 0 else 1
    num = (2.0 * alpha / math.pi) ** 0.75 * (4.0 * alpha) ** ((l + m + n) / 2.0)
    den = math.sqrt(df(2 * l - 1) * df(2 * m - 1) * df(2 * n - 1))
    return num / den


def boys(n: int, x: float) -> float:
    if x < 1e-13:
        return 1.0 / (2 * n + 1) - x / (2 * n + 3)
    a = n + 0.5
    return 0.5 * special.gamma(a) * special.gammainc(a, x) / x**a


def _hermite_e(i: int, j: int, t: int, Q: float, a: float, b: float) -> float:
    """1D Hermite expansion coefficient E_t^{ij} for exponents a, b and A-B = Q."""
    p = a + b
    q = a * b / p
    if t < 0 or t > i + j:
        return 0.0
    if i == j == t == 0:
        return math.exp(-q * Q * Q)
    if j == 0:
        return (
            _hermite_e(i - 1, j, t - 1, Q, a, b) / (2 * p)
            - (q * Q / a) * _hermite_e(i - 1, j, t, Q, a, b)
            + (t + 1) * _hermite_e(i - 1, j, t + 1, Q, a, b)
        )
    return (
        _hermite_e(i, j - 1, t - 1, Q, a, b) / (2 * p)
        + (q * Q / b) * _hermite_e(i, j - 1, t, Q, a, b)
        + (t + 1) * _hermite_e(i, j - 1, t + 1, Q, a, b)
    )


def _hermite_r(t, u, v, n, p, PC, cache):
    """Hermite Coulomb integral R^n_{tuv} at composite exponent p."""
    key = (t, u, v, n)
    if key in cache:
        return cache[key]
    if t == u == v == 0:
        r2 = PC[0] ** 2 + PC[1] ** 2 + PC[2] ** 2
        val = (-2.0 * p) ** n * boys(n, p * r2)
    elif t > 0:
        val = (t - 1) * _hermite_r(t - 2, u, v, n + 1, p, PC, cache) if t > 1 else 0.0
        val += PC[0] * _hermite_r(t - 1, u, v, n + 1, p, PC, cache)
    elif u > 0:
        val = (u - 1) * _hermite_r(t, u - 2, v, n + 1, p, PC, cache) if u > 1 else 0.0
        val += PC[1] * _hermite_r(t, u - 1, v, n + 1, p, PC, cache)
    else:
        val = (v - 1) * _hermite_r(t, u, v - 2, n + 1, p, PC, cache) if v > 1 else 0.0
        val += PC[2] * _hermite_r(t, u, v - 1, n + 1, p, PC, cache)
    cache[key] = val
    return val


def _prim_overlap(a, la, A, b, lb, B):
    p = a + b
    s = (math.pi / p) ** 1.5
    for d in range(3):
        s *= _hermite_e(la[d], lb[d], 0, A[d] - B[d], a, b)
    return s


def _prim_kinetic(a, la, A, b, lb, B):
    l2, m2, n2 = lb

    def shifted(d, dl):
        lb2 = list(lb)
        lb2[d] += dl
        if lb2[d] < 0:
            return 0.0
        return _prim_overlap(a, la, A, b, tuple(lb2), B)

    term = b * (2 * (l2 + m2 + n2) + 3) * _prim_overlap(a, la, A, b, lb, B)
    term -= 2.0 * b * b * (shifted(0, 2) + shifted(1, 2) + shifted(2, 2))
    term -= 0.5 * (
        l2 * (l2 - 1) * shifted(0, -2)
        + m2 * (m2 - 1) * shifted(1, -2)
        + n2 * (n2 - 1) * shifted(2, -2)
    )
    return term


def _prim_nuclear(a, la, A, b, lb, B, C):
    p = a + b
    P = tuple((a * A[d] + b * B[d]) / p for d in range(3))
    PC = tuple(P[d] - C[d] for d in range(3))
    cache = {}
    val = 0.0
    for t in range(la[0] + lb[0] + 1):
        Ex = _hermite_e(la[0], lb[0], t, A[0] - B[0], a, b)
        for u in range(la[1] + lb[1] + 1):
            Ey = _hermite_e(la[1], lb[1], u, A[1] - B[1], a, b)
            for v in range(la[2] + lb[2] + 1):
                Ez = _hermite_e(la[2], lb[2], v, A[2] - B[2], a, b)
                val += Ex * Ey * Ez * _hermite_r(t, u, v, 0, p, PC, cache)
    return 2.0 * math.pi / p * val


class _HermitePair:
    """Hermite representation of one primitive pair: coefficients over (t,u,v)."""

    __slots__ = ("p", "P", "coef")

    def __init__(self, a, la, A, b, lb, B, weight):
        self.p = a + b
        self.P = tuple((a * A[d] + b * B[d]) / self.p for d in range(3))
        self.coef = {}
        for t in range(la[0] + lb[0] + 1):
            Ex = _hermite_e(la[0], lb[0], t, A[0] - B[0], a, b)
            for u in range(la[1] + lb[1] + 1):
                Ey = _hermite_e(la[1], lb[1], u, A[1] - B[1], a, b)
                for v in range(la[2] + lb[2] + 1):
                    Ez = _hermite_e(la[2], lb[2], v, A[2] - B[2], a, b)
                    c = weight * Ex * Ey * Ez
                    if c != 0.0:
                        self.coef[(t, u, v)] = c


def _pair_list(ao_i: AtomicOrbital, ao_j: AtomicOrbital, norm_i, norm_j):
    pairs = []
    for a, ca, na in zip(ao_i.exps, ao_i.coefs, norm_i):
        for b, cb, nb in zip(ao_j.exps, ao_j.coefs, norm_j):
            w = ca * na * cb * nb
            pairs.append(
                _HermitePair(a, ao_i.powers, ao_i.center, b, ao_j.powers,
                             ao_j.center, w)
            )
    return pairs


def _eri_pairs(bra: list[_HermitePair], ket: list[_HermitePair]) -> float:
    total = 0.0
    for hp in bra:
        for hq in ket:
            p, q = hp.p, hq.p
            alpha = p * q / (p + q)
            PQ = tuple(hp.P[d] - hq.P[d] for d in range(3))
            pref = 2.0 * math.pi**2.5 / (p * q * math.sqrt(p + q))
            cache = {}
            acc = 0.0
            for (t, u, v), cb in hp.coef.items():
                for (tt, uu, vv), ck in hq.coef.items():
                    sign = -1.0 if (tt + uu + vv) % 2 else 1.0
                    acc += cb * ck * sign * _hermite_r(
                        t + tt, u + uu, v + vv, 0, alpha, PQ, cache
                    )
            total += pref * acc
    return total


def build_ao_integrals(aos: list[AtomicOrbital], charges, centers):
    """Return (S, T, V, ERI) over the AO list; ERI in chemists' (ij|kl) order.

    Contracted AOs are renormalized to unit self-overlap.
    """
    nao = len(aos)
    prim_norms = [tuple(_prim_norm(a, ao.powers) for a in ao.exps) for ao in aos]

    def contracted(f, ao_i, ao_j, ni, nj):
        val = 0.0
        for a, ca, na in zip(ao_i.exps, ao_i.coefs, ni):
            for b, cb, nb in zip(ao_j.exps, ao_j.coefs, nj):
                val += ca * na * cb * nb * f(a, ao_i.powers, ao_i.center,
                                             b, ao_j.powers, ao_j.center)
        return val

    raw_self = [
        contracted(_prim_overlap, ao, ao, prim_norms[i], prim_norms[i])
        for i, ao in enumerate(aos)
    ]
    renorm = [1.0 / math.sqrt(s) for s in raw_self]

    S = np.zeros((nao, nao))
    T = np.zeros((nao, nao))
    V = np.zeros((nao, nao))
    for i in range(nao):
        for j in range(i + 1):
            fac = renorm[i] * renorm[j]
            S[i, j] = S[j, i] = fac * contracted(
                _prim_overlap, aos[i], aos[j], prim_norms[i], prim_norms[j])
            T[i, j] = T[j, i] = fac * contracted(
                _prim_kinetic, aos[i], aos[j], prim_norms[i], prim_norms[j])
            vij = 0.0
            for Z, C in zip(charges, centers):
                vij -= Z * contracted(
                    lambda a, la, A, b, lb, B: _prim_nuclear(a, la, A, b, lb, B, C),
                    aos[i], aos[j], prim_norms[i], prim_norms[j])
            V[i, j] = V[j, i] = fac * vij

    pair_cache = {}

    def pairs(i, j):
        key = (i, j) if i >= j else (j, i)
        if key not in pair_cache:
            a, b = key
            pair_cache[key] = _pair_list(aos[a], aos[b], prim_norms[a], prim_norms[b])
        return pair_cache[key]

    eri = np.zeros((nao, nao, nao, nao))
    for i in range(nao):
        for j in range(i + 1):
            for k in range(i + 1):
                lmax = j if k == i else k
                for l in range(lmax + 1):
                    val = _eri_pairs(pairs(i, j), pairs(k, l))
                    val *= renorm[i] * renorm[j] * renorm[k] * renorm[l]
                    for a, b, c, d in (
                        (i, j, k, l), (j, i, k, l), (i, j, l, k), (j, i, l, k),
                        (k, l, i, j), (l, k, i, j), (k, l, j, i), (l, k, j, i),
                    ):
                        eri[a, b, c, d] = val
    return S, T, V, eri
