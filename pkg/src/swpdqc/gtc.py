"""
Ground-state preparation by a short Chebyshev expansion of a matrix power.

For a Hamiltonian ``Ht`` with spectrum in ``[0, 1]`` and a lower bound ``E``
on its ground energy, ``H = (1 + E) I - Ht`` has its largest eigenvalue on
the ground state, so ``H^{M0} |phi>`` filters a trial state towards it.
``H^{M0}`` with ``M0 = 2 m0`` equals ``sum_i alpha_i T_{2i}(H)``; keeping the
first ``M`` terms gives an LCU program whose gates are the walk-operator
powers ``L^{2i}`` (top-left block ``T_{2i}(H)``) on one extra ancilla.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np
import numpy.typing as npt

from .errors import (
    BadLowerBound,
    BadParameters,
    DegenerateGroundState,
    DimensionMismatch,
    SpectrumOutOfRange,
    ZeroProbabilityProjection,
)
from .lcu import chebyshev_weights, check_contraction, even_chebyshev_terms, walk_operator
from .linalg import ComplexMatrix, StateVector, check_hermitian, check_state, hermitian_eig, resolve_tol
from .simulator import LcuProgram, RunTrace, run_swp_exact

# constants inside the logarithms of the iteration-count rules
M0_LOG_CONSTANT = 2.0
M_LOG_CONSTANT = 4.0


@dataclass(frozen=True)
class GroundStateProblem:
    """Inputs of the preparation pipeline.

    ``gap`` and ``phi0`` are treated as known, as the algorithm assumes; when
    the caller does not provide them :meth:`create` measures them with a
    dense eigensolver. ``ground_state`` is that eigensolver's answer and is
    used only for validation and fidelity reporting.
    """

    h_tilde: ComplexMatrix
    e_bound: float
    delta_e: float
    gap: float
    trial: StateVector
    phi0: float
    epsilon: float
    ground_state: StateVector

    @classmethod
    def create(
        cls,
        h_tilde: npt.ArrayLike,
        e_bound: float,
        epsilon: float,
        trial: npt.ArrayLike | None = None,
        gap: float | None = None,
        phi0: float | None = None,
        tol: float | None = None,
    ) -> "GroundStateProblem":
        t = resolve_tol(tol)
        h_tilde = check_hermitian(h_tilde, tol)
        dim = h_tilde.shape[0]
        if dim < 2 or dim & (dim - 1):
            raise DimensionMismatch(f"Hamiltonian dimension {dim} must be a power of two >= 2")
        values, vectors = hermitian_eig(h_tilde, tol)
        if values[0] < -t or values[-1] > 1 + t:
            raise SpectrumOutOfRange(f"spectrum [{values[0]:.6g}, {values[-1]:.6g}] not inside [0, 1]")
        if values[1] - values[0] <= t:
            raise DegenerateGroundState(f"lowest eigenvalues {values[0]:.6g} and {values[1]:.6g} coincide")
        lam0 = float(values[0])
        if not 0 <= e_bound <= lam0 + t:
            raise BadLowerBound(f"E = {e_bound} must lie in [0, lambda_0 = {lam0:.6g}]")
        if not 0 < epsilon < 1:
            raise BadParameters(f"epsilon must lie in (0, 1), got {epsilon}")
        if trial is None:
            trial = np.full(dim, 1 / math.sqrt(dim), dtype=np.complex128)
        trial = check_state(trial, tol)
        if trial.shape != (dim,):
            raise DimensionMismatch(f"trial state has dimension {trial.shape[0]}, Hamiltonian {dim}")
        ground = vectors[:, 0]
        phi0 = abs(complex(np.vdot(ground, trial))) if phi0 is None else float(phi0)
        if not phi0 > t:
            raise BadParameters("trial state has no overlap with the ground state")
        gap = float(values[1] - values[0]) if gap is None else float(gap)
        return cls(
            h_tilde=h_tilde,
            e_bound=float(e_bound),
            delta_e=lam0 - float(e_bound),
            gap=gap,
            trial=trial,
            phi0=min(phi0, 1.0),
            epsilon=float(epsilon),
            ground_state=ground,
        )

    @property
    def n(self) -> int:
        return self.h_tilde.shape[0].bit_length() - 1


def shift_hamiltonian(h_tilde: npt.ArrayLike, e_bound: float, tol: float | None = None) -> ComplexMatrix:
    """``(1 + E) I - Ht``; the ground state of ``Ht`` becomes the top eigenvector."""
    t = resolve_tol(tol)
    h_tilde = check_hermitian(h_tilde, tol)
    values, _ = hermitian_eig(h_tilde, tol)
    if values[0] < -t or values[-1] > 1 + t:
        raise SpectrumOutOfRange(f"spectrum [{values[0]:.6g}, {values[-1]:.6g}] not inside [0, 1]")
    if not 0 <= e_bound <= values[0] + t:
        raise BadLowerBound(f"E = {e_bound} must lie in [0, lambda_0 = {values[0]:.6g}]")
    return (1 + e_bound) * np.eye(h_tilde.shape[0]) - h_tilde


def choose_iteration_counts(
    gap: float,
    phi0: float,
    epsilon: float,
    m0_constant: float = M0_LOG_CONSTANT,
    M_constant: float = M_LOG_CONSTANT,
) -> tuple[int, int]:
    """Power ``M0`` and number of Chebyshev terms ``M``.

    ``M0`` is the smallest even integer (at least 2) above
    ``ln(m0_constant / (phi0 eps)) / gap``; ``M`` is
    ``ceil(sqrt(2 m0 ln(M_constant / (phi0 eps))))`` capped at ``m0 + 1``.
    """
    if not 0 < gap <= 1 or not 0 < phi0 <= 1 or not 0 < epsilon < 1:
        raise BadParameters(f"need gap in (0,1], phi0 in (0,1], epsilon in (0,1); got {gap}, {phi0}, {epsilon}")
    bound = math.log(m0_constant / (phi0 * epsilon)) / gap
    m0 = max(1, math.ceil(bound / 2))
    return 2 * m0, truncation_length(m0, phi0, epsilon, M_constant)


def truncation_length(m0: int, phi0: float, epsilon: float, M_constant: float = M_LOG_CONSTANT) -> int:
    terms = math.ceil(math.sqrt(2 * m0 * math.log(M_constant / (phi0 * epsilon))))
    return max(1, min(m0 + 1, terms))


@dataclass(frozen=True)
class GtcPlan:
    h: ComplexMatrix
    m0: int
    M: int
    alphas: tuple[float, ...]
    alpha_sum: float
    program: LcuProgram

    @property
    def M0(self) -> int:
        return 2 * self.m0


def build_gtc_program(h: npt.ArrayLike, m0: int, M: int, tol: float | None = None) -> GtcPlan:
    """LCU program for ``sum_{i<M} alpha_i T_{2i}(H)``.

    Gate ``i`` is the controlled ``L^{2i}`` on one garbage qubit, built by
    repeated multiplication with ``L^2``; its cost is ``2i`` multiplications
    (at least 1).
    """
    h = check_contraction(check_hermitian(h, tol), tol)
    alphas, alpha_sum = chebyshev_weights(m0, M)
    walk = walk_operator(h, tol)
    step = walk @ walk
    dilations = [np.eye(walk.shape[0], dtype=np.complex128)]
    for _ in range(1, M):
        dilations.append(dilations[-1] @ step)
    program = LcuProgram.build(
        weights=alphas,
        operators=even_chebyshev_terms(h, M, tol),
        times=[max(1.0, 2.0 * i) for i in range(M)],
        p=1,
        dilations=dilations,
    )
    return GtcPlan(h=h, m0=m0, M=M, alphas=tuple(alphas), alpha_sum=alpha_sum, program=program)


class GroundStateResult(NamedTuple):
    state: StateVector
    fidelity: float
    trace: RunTrace
    plan: GtcPlan


def fidelity(a: npt.ArrayLike, b: npt.ArrayLike) -> float:
    return abs(complex(np.vdot(a, b)))


def prepare_ground_state(
    problem: GroundStateProblem,
    m0: int | None = None,
    M: int | None = None,
    m0_constant: float = M0_LOG_CONSTANT,
    M_constant: float = M_LOG_CONSTANT,
) -> GroundStateResult:
    """Shift, size, build and run the preparation program."""
    h = shift_hamiltonian(problem.h_tilde, problem.e_bound)
    if m0 is None:
        M0, _ = choose_iteration_counts(problem.gap, problem.phi0, problem.epsilon, m0_constant, M_constant)
        m0 = M0 // 2
    if M is None:
        M = truncation_length(m0, problem.phi0, problem.epsilon, M_constant)
    plan = build_gtc_program(h, m0, M)
    trace = run_swp_exact(plan.program, problem.trial)
    if trace.annihilated:
        raise ZeroProbabilityProjection("the trial state is annihilated by the filter", trace.step_probabilities[-1])
    return GroundStateResult(trace.final_state, fidelity(problem.ground_state, trace.final_state), trace, plan)


@dataclass(frozen=True)
class ConvergenceRow:
    m0: int
    error: float
    fidelity: float
    leakage: float


def verify_projector_convergence(problem: GroundStateProblem, m0_values: Iterable[int]) -> list[ConvergenceRow]:
    """Distance of the normalized ``H^{2 m0} phi`` from the ground state.

    ``error`` is the norm distance after aligning the global phase,
    ``leakage`` the ratio of the excited to the ground-state component, which
    shrinks at least by ``((1 - delta_E - gap) / (1 - delta_E))^2`` per
    increment of ``m0``.
    """
    h = shift_hamiltonian(problem.h_tilde, problem.e_bound)
    ground = problem.ground_state
    rows = []
    for m0 in m0_values:
        v = np.linalg.matrix_power(h, 2 * m0) @ problem.trial
        v = v / np.linalg.norm(v)
        overlap = complex(np.vdot(ground, v))
        fid = min(abs(overlap), 1.0)
        rest = v - overlap * ground
        leakage = float(np.linalg.norm(rest)) / abs(overlap) if abs(overlap) > 0 else math.inf
        rows.append(ConvergenceRow(m0=m0, error=math.sqrt(max(0.0, 2 - 2 * fid)), fidelity=fid, leakage=leakage))
    return rows


def qubit_budget(n: int, M: int) -> dict[str, int]:
    """Qubit counts of this construction and of the doubled-space walk it replaces."""
    m = max(0, math.ceil(math.log2(M))) if M > 1 else 0
    return {"optimized": n + m + 1, "doubled_space": 2 * n + m + 3}
