"""STO-6G basis data, rederived from the defining least-squares fit.

Each Slater-type orbital is expanded in six normalized Gaussian primitives
chosen to maximize the overlap with the Slater function; 2s and 2p share
one exponent set, fitted to maximize the summed overlap.  The zeta = 1
expansions below were obtained with ``refit_expansions`` (converged to
~1e-12 in the objective) and are frozen here so fixture generation is
deterministic; element basis sets follow by scaling the exponents with the
standard molecular Slater exponents zeta (H 1s: 1.24; B 1s: 4.68,
2sp: 1.45) as exps * zeta**2.
"""

from __future__ import annotations

import numpy as np

from mdints import AtomicOrbital

__all__ = [
    "EXP_1S", "COEF_1S", "EXP_2SP", "COEF_2S", "COEF_2P",
    "SLATER_ZETA", "atom_orbitals", "refit_expansions",
]

# zeta = 1 expansions (exponents descending; coefficients for normalized
# primitives).  Overlaps with the target Slater functions: 1s 0.99999938,
# 2s 0.99999899, 2p 0.99999939.
EXP_1S = (23.103024448467, 4.235917261983, 1.185056049206,
          0.407098815825, 0.158088383415, 0.065109503114)
COEF_1S = (0.009163589039, 0.049361499213, 0.168538407095,
           0.370562741280, 0.416491631719, 0.130333940930)

EXP_2SP = (10.308680470169, 2.040359820093, 0.634142290033,
           0.243977450010, 0.105959590004, 0.048569020001)
COEF_2S = (-0.013252793346, -0.046991693164, -0.033785375751,
           0.250241489767, 0.595117288820, 0.240706432484)
COEF_2P = (0.003759697409, 0.037679358626, 0.173896705439,
           0.418036195276, 0.425859697043, 0.101708435130)

# Standard molecular Slater exponents (zeta_1s, zeta_2sp).
SLATER_ZETA = {
    "H": (1.24, None),
    "B": (4.68, 1.45),
}


def atom_orbitals(symbol: str, center) -> list[AtomicOrbital]:
    """Contracted STO-6G AOs for one atom at the given center (bohr)."""
    center = tuple(float(x) for x in center)
    z1s, z2sp = SLATER_ZETA[symbol]
    scale1 = z1s * z1s
    aos = [AtomicOrbital(center, (0, 0, 0),
                         tuple(a * scale1 for a in EXP_1S), COEF_1S)]
    if z2sp is not None:
        scale2 = z2sp * z2sp
        exps2 = tuple(a * scale2 for a in EXP_2SP)
        aos.append(AtomicOrbital(center, (0, 0, 0), exps2, COEF_2S))
        for powers in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
            aos.append(AtomicOrbital(center, powers, exps2, COEF_2P))
    return aos


ATOMIC_NUMBER = {"H": 1, "B": 5}
CORE_ORBITALS = {"H": 0, "B": 1}


def _radial(k, slater_exp, gauss_exp):
    from scipy import integrate

    val, _ = integrate.quad(
        lambda r: r**k * np.exp(-slater_exp * r - gauss_exp * r * r),
        0, np.inf, epsabs=1e-14, epsrel=1e-13, limit=200,
    )
    return val


def refit_expansions(n_prim: int = 6):
    """Recompute the zeta = 1 expansions from the defining fit.

    Returns (exp_1s, coef_1s, exp_2sp, coef_2s, coef_2p); used to validate
    the frozen constants above, not during fixture generation.
    """
    from scipy import optimize

    def s_target(alpha):
        return (np.sqrt(1 / np.pi) * (2 * alpha / np.pi) ** 0.75
                * 4 * np.pi * _radial(2, 1.0, alpha))

    def s2_target(alpha):
        return (np.sqrt(1 / (3 * np.pi)) * (2 * alpha / np.pi) ** 0.75
                * 4 * np.pi * _radial(3, 1.0, alpha))

    def p_target(alpha):
        return (np.sqrt(1 / np.pi) * (128 * alpha**5 / np.pi**3) ** 0.25
                * (4 * np.pi / 3) * _radial(4, 1.0, alpha))

    def best(alphas, target, power):
        t = np.array([target(a) for a in alphas])
        S = (2 * np.sqrt(np.outer(alphas, alphas))
             / np.add.outer(alphas, alphas)) ** power
        c = np.linalg.solve(S, t)
        c /= np.sqrt(c @ S @ c)
        return float(t @ c), c

    def neg_1s(log_a):
        return -best(np.exp(log_a), s_target, 1.5)[0]

    def neg_2sp(log_a):
        a = np.exp(log_a)
        return -(best(a, s2_target, 1.5)[0] + best(a, p_target, 2.5)[0])

    opts = dict(xatol=1e-12, fatol=1e-15, maxiter=60000, maxfev=60000)
    r1 = optimize.minimize(neg_1s, np.log(EXP_1S), method="Nelder-Mead", options=opts)
    a1 = np.sort(np.exp(r1.x))[::-1]
    _, c1 = best(a1, s_target, 1.5)
    r2 = optimize.minimize(neg_2sp, np.log(EXP_2SP), method="Nelder-Mead", options=opts)
    a2 = np.sort(np.exp(r2.x))[::-1]
    _, c2s = best(a2, s2_target, 1.5)
    _, c2p = best(a2, p_target, 2.5)
    return a1, c1, a2, c2s, c2p
