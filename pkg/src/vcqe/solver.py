"""Variance-minimizing contracted-equation solver.

Each iteration builds the gradient of the energy variance with respect to
the anti-Hermitian two-body generator, forms a search direction with a
single-memory BFGS update, minimizes the variance exactly along that
direction, and applies the resulting unitary two-body exponential to the
state.  Iteration stops when the variance drops below the configured
tolerance; excited states are reached simply by starting from a determinant
(or spin-adapted two-determinant combination) dominating the target state.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
from typing import Callable, Sequence

import numpy as np
import scipy.optimize
from sklearn.base import BaseEstimator

from .fock import SectorBasis
from .pairs import TwoBodyCoefficients, pair_basis
from .statevector import (
    HamiltonianOperator,
    StateVector,
    apply_hamiltonian,
    compute_2rdm,
    cse_norm,
    expectation,
    pair_transition_matrix,
    spin_expectations,
    taylor_exp_action,
    two_body_matrix,
    variance,
)

__all__ = [
    "OccupationSpec",
    "SolverConfig",
    "ConvergenceRecord",
    "SolveResult",
    "LineSearchError",
    "initial_state",
    "variance_gradient",
    "bfgs_direction",
    "line_search",
    "solve",
    "VarianceCQE",
]

MIN_PROBE_STEP = 1e-12


class LineSearchError(RuntimeError):
    """No variance decrease found along the search direction."""


@dataclass(frozen=True)
class OccupationSpec:
    """Initial-guess occupation lists (spatial orbitals) per spin channel.

    ``combo`` of "singlet" (+1) or "triplet" (-1) requests the equal-weight
    combination (|d> ± |dbar>)/sqrt(2) where dbar swaps the alpha and beta
    occupation lists.
    """

    alpha: tuple[int, ...]
    beta: tuple[int, ...]
    combo: str | None = None


@dataclass(frozen=True)
class SolverConfig:
    epsilon: float = 1e-6
    max_iterations: int = 200
    alpha_max: float = 1.0
    line_search_tol: float = 1e-10
    gradient_mode: str = "exact"
    deltas: tuple[float, ...] = (0.1, 0.05, 0.025)

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.alpha_max <= 0:
            raise ValueError("alpha_max must be positive")
        if self.gradient_mode not in ("exact", "emulated"):
            raise ValueError(f"unknown gradient_mode {self.gradient_mode!r}")


@dataclass
class ConvergenceRecord:
    iteration: int
    energy: float
    variance: float
    cse_norm: float
    gradient_norm: float
    step_length: float
    sz: float
    s_squared: float

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(eq=False)
class SolveResult:
    state: StateVector
    records: list[ConvergenceRecord]
    converged: bool
    reason: str

    @property
    def n_iterations(self) -> int:
        return len(self.records) - 1


def _determinant_mask(basis: SectorBasis, alpha, beta) -> int:
    n = basis.n_spatial
    for name, occ, count in (("alpha", alpha, basis.n_alpha),
                             ("beta", beta, basis.n_beta)):
        if len(set(occ)) != len(occ):
            raise ValueError(f"duplicate {name} occupation in {occ}")
        if len(occ) != count:
            raise ValueError(
                f"{name} occupation {occ} has {len(occ)} orbitals; "
                f"sector requires {count}"
            )
        if any(not 0 <= o < n for o in occ):
            raise ValueError(f"{name} occupation {occ} outside [0, {n})")
    return sum(1 << o for o in alpha) | sum(1 << (o + n) for o in beta)


def initial_state(basis: SectorBasis, spec: OccupationSpec) -> StateVector:
    """Build the determinant (or spin-adapted pair) initial guess."""
    det = _determinant_mask(basis, spec.alpha, spec.beta)
    coeff = np.zeros(len(basis))
    if spec.combo is None:
        coeff[basis.index(det)] = 1.0
        return StateVector(basis, coeff)

    if spec.combo not in ("singlet", "triplet"):
        raise ValueError(f"combo must be 'singlet' or 'triplet', got {spec.combo!r}")
    phase = 1.0 if spec.combo == "singlet" else -1.0
    partner = _determinant_mask(basis, spec.beta, spec.alpha)
    if partner == det:
        if phase < 0:
            raise ValueError("triplet combination of a self-paired determinant is null")
        coeff[basis.index(det)] = 1.0
        return StateVector(basis, coeff)
    coeff[basis.index(det)] = 1.0 / np.sqrt(2.0)
    coeff[basis.index(partner)] = phase / np.sqrt(2.0)
    return StateVector(basis, coeff)


def variance_gradient(
    psi: StateVector, H: HamiltonianOperator
) -> TwoBodyCoefficients:
    """Gradient of the variance over the anti-Hermitian pair parameters.

    Computes w = (H - E)^2 |psi> exactly, contracts the transition kernel
    K[I, J] = <psi| a†a†aa |w> against the 2-RDM term, and projects onto the
    antisymmetric pair matrix.  The returned packing A satisfies
    d/dt Var(e^{tB} psi)|_0 = sum_IJ A[I, J] B[I, J] for any anti-Hermitian B.
    """
    hpsi = apply_hamiltonian(H, psi)
    e = float(psi.coefficients @ hpsi)
    r = hpsi - e * psi.coefficients
    w = (H.matrix @ r) - e * r

    K = pair_transition_matrix(psi, w)
    D = pair_transition_matrix(psi, psi.coefficients)
    G = 2.0 * (K - D * float(psi.coefficients @ w))
    A = 0.5 * (G.T - G)
    return TwoBodyCoefficients(pair_basis(psi.basis.n_spatial), A)


def bfgs_direction(
    gradient: TwoBodyCoefficients,
    memory: tuple[np.ndarray, np.ndarray] | None,
) -> TwoBodyCoefficients:
    """Limited-memory BFGS direction with a single stored (s, y) pair.

    Falls back to steepest descent on the first iteration, on zero gradient,
    or when the stored pair has non-positive curvature.
    """
    g = gradient.matrix
    if memory is not None:
        s, y = memory
        sy = float(np.sum(s * y))
        if sy > 0.0:
            rho = 1.0 / sy
            a = rho * float(np.sum(s * g))
            q = g - a * y
            z = (sy / float(np.sum(y * y))) * q
            b = rho * float(np.sum(y * z))
            z = z + (a - b) * s
            return TwoBodyCoefficients(gradient.pair_basis, -z)
    return TwoBodyCoefficients(gradient.pair_basis, -g)


def line_search(
    psi: StateVector,
    direction: TwoBodyCoefficients,
    H: HamiltonianOperator,
    alpha_max: float = 1.0,
    tol: float = 1e-10,
    objective: Callable[[StateVector], float] | None = None,
) -> tuple[float, StateVector]:
    """Exact minimization of the variance along e^{alpha * direction}|psi>.

    Brackets a decrease starting from alpha = min(1, 1/||direction||), then
    refines with bounded golden-section/parabolic search down to ``tol`` in
    the step length.  The returned step never increases the objective.  If
    no probed step down to 1e-12 decreases it (in either direction along the
    line), raises LineSearchError.
    """
    if objective is None:
        objective = lambda st: variance(st, H)

    dir_norm = direction.norm
    if dir_norm == 0.0:
        return 0.0, psi

    direction.require_anti_hermitian()
    mat = two_body_matrix(direction, psi.basis)
    cache: dict[float, tuple[float, StateVector]] = {}

    def evaluate(alpha: float) -> float:
        if alpha not in cache:
            vec = taylor_exp_action(mat, psi.coefficients, scale=alpha)
            state = StateVector(psi.basis, vec / np.linalg.norm(vec))
            cache[alpha] = (objective(state), state)
        return cache[alpha][0]

    f0 = evaluate(0.0)

    def first_decrease(sgn: float) -> float | None:
        a = min(1.0, 1.0 / dir_norm, alpha_max)
        while a >= MIN_PROBE_STEP:
            if evaluate(sgn * a) < f0:
                return a
            a /= 4.0
        return None

    sgn = 1.0
    a = first_decrease(sgn)
    if a is None:
        sgn = -1.0
        a = first_decrease(sgn)
    if a is None:
        raise LineSearchError(
            f"no variance decrease along the search direction (f0={f0:.3e})"
        )

    while 2.0 * a <= alpha_max and evaluate(sgn * 2.0 * a) < evaluate(sgn * a):
        a *= 2.0
    hi = min(alpha_max, 2.0 * a)

    refined = scipy.optimize.minimize_scalar(
        lambda t: evaluate(sgn * t), bounds=(0.0, hi), method="bounded",
        options={"xatol": tol},
    ).x
    best = min(cache, key=lambda k: cache[k][0])
    if evaluate(sgn * refined) <= cache[best][0]:
        best = sgn * refined
    return best, cache[best][1]


def _exact_measurements(H: HamiltonianOperator):
    grad = lambda psi: variance_gradient(psi, H)
    obj = lambda psi: variance(psi, H)
    return grad, obj


def _emulated_measurements(H: HamiltonianOperator, deltas: Sequence[float]):
    from .measurement import MeasurementConfig, measure_gradient_kernel, measure_variance

    config = MeasurementConfig(deltas=tuple(deltas))

    def grad(psi: StateVector) -> TwoBodyCoefficients:
        var, kernel = measure_gradient_kernel(psi, H, config)
        D = compute_2rdm(psi).pair_matrix
        G = 2.0 * (kernel - D * var)
        A = 0.5 * (G.T - G)
        return TwoBodyCoefficients(pair_basis(psi.basis.n_spatial), A)

    obj = lambda psi: measure_variance(psi, H, config)
    return grad, obj


def solve(
    H: HamiltonianOperator,
    initial: StateVector,
    config: SolverConfig = SolverConfig(),
) -> SolveResult:
    """Run the variance-minimization loop from the given initial state.

    Returns the final state with the full per-iteration trace; never raises
    on non-convergence (the result carries converged=False and the reason).
    """
    if config.gradient_mode == "exact":
        grad_fn, objective = _exact_measurements(H)
    else:
        grad_fn, objective = _emulated_measurements(H, config.deltas)

    psi = initial.normalized()

    def make_record(m: int, step: float) -> ConvergenceRecord:
        sz, s2 = spin_expectations(psi)
        return ConvergenceRecord(
            iteration=m,
            energy=expectation(psi, H),
            variance=objective(psi),
            cse_norm=cse_norm(psi, H),
            gradient_norm=0.0,
            step_length=step,
            sz=sz,
            s_squared=s2,
        )

    records = [make_record(0, 0.0)]
    memory = None
    prev: tuple[np.ndarray, np.ndarray] | None = None  # (s, previous gradient)
    reason = "converged"

    while records[-1].variance >= config.epsilon:
        if len(records) - 1 >= config.max_iterations:
            reason = "max_iterations"
            break
        g = grad_fn(psi)
        records[-1].gradient_norm = g.norm
        if g.norm == 0.0:
            reason = "stationary_point"
            break
        if prev is not None:
            s, g_old = prev
            y = g.matrix - g_old
            memory = (s, y) if float(np.sum(s * y)) > 0.0 else None
        d = bfgs_direction(g, memory)
        try:
            alpha, psi = line_search(
                psi, d, H,
                alpha_max=config.alpha_max,
                tol=config.line_search_tol,
                objective=objective,
            )
        except LineSearchError:
            reason = "line_search_stagnation"
            break
        prev = (alpha * d.matrix, g.matrix)
        records.append(make_record(len(records), alpha))

    converged = records[-1].variance < config.epsilon
    if records[-1].gradient_norm == 0.0:
        records[-1].gradient_norm = grad_fn(psi).norm
    return SolveResult(
        state=psi,
        records=records,
        converged=converged,
        reason=reason if not converged else "converged",
    )


class VarianceCQE(BaseEstimator):
    """Estimator interface to the variance-based solver.

    Parameters mirror SolverConfig; ``fit`` consumes a HamiltonianOperator
    and an initial StateVector and exposes the converged state and
    diagnostics as fitted attributes.
    """

    def __init__(
        self,
        tol: float = 1e-6,
        max_iter: int = 200,
        alpha_max: float = 1.0,
        line_search_tol: float = 1e-10,
        gradient_mode: str = "exact",
        deltas: tuple[float, ...] = (0.1, 0.05, 0.025),
    ):
        self.tol = tol
        self.max_iter = max_iter
        self.alpha_max = alpha_max
        self.line_search_tol = line_search_tol
        self.gradient_mode = gradient_mode
        self.deltas = deltas

    def _config(self) -> SolverConfig:
        return SolverConfig(
            epsilon=self.tol,
            max_iterations=self.max_iter,
            alpha_max=self.alpha_max,
            line_search_tol=self.line_search_tol,
            gradient_mode=self.gradient_mode,
            deltas=tuple(self.deltas),
        )

    def fit(self, H: HamiltonianOperator, initial: StateVector) -> "VarianceCQE":
        result = solve(H, initial, self._config())
        self.result_ = result
        self.state_ = result.state
        self.records_ = result.records
        self.converged_ = result.converged
        self.n_iter_ = result.n_iterations
        self.energy_ = result.records[-1].energy
        self.variance_ = result.records[-1].variance
        self.cse_norm_ = result.records[-1].cse_norm
        return self

    def fit_state(self, H: HamiltonianOperator, initial: StateVector) -> StateVector:
        return self.fit(H, initial).state_
