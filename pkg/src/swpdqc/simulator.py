"""
Statevector simulation of duality quantum computing with subwave projections.

The register is ``[slits (m qubits) | garbage (p qubits) | work (n qubits)]``
with the slit index most significant, so a full state reshapes to an array
of shape ``(2**m, 2**p, 2**n)`` and a controlled gate on slit ``i`` is a
matrix multiply on the contiguous block ``state[i]``.

Two runners are provided: :func:`run_swp_exact` projects the garbage qubits
back onto ``|0>`` after every controlled gate, :func:`run_final_projection`
measures everything once at the end. Both compute ``A psi / ||A psi||`` with
``A = sum_i c_i B_i``. :func:`run_swp_montecarlo` samples the restart
process.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
import numpy.typing as npt

from .errors import (
    DimensionMismatch,
    InvalidProgram,
    NotUnitary,
    SlitOutOfRange,
    ZeroProbabilityProjection,
)
from .lcu import DividerCombiner, build_divider_combiner, check_contraction, dilate_contraction
from .linalg import (
    ComplexMatrix,
    StateVector,
    as_square,
    check_state,
    check_unitary,
    is_unitary,
    resolve_tol,
)

# below this a projection is treated as annihilating the state
ZERO_PROBABILITY = 1e-14


@dataclass(frozen=True)
class RegisterLayout:
    m: int
    p: int
    n: int

    def __post_init__(self):
        if min(self.m, self.p, self.n) < 0:
            raise DimensionMismatch(f"qubit counts must be nonnegative: {self}")

    @property
    def slits(self) -> int:
        return 2**self.m

    @property
    def garbage(self) -> int:
        return 2**self.p

    @property
    def work(self) -> int:
        return 2**self.n

    @property
    def dim(self) -> int:
        return 2 ** (self.m + self.p + self.n)

    @property
    def qubits(self) -> int:
        return self.m + self.p + self.n

    def split(self, state: StateVector) -> np.ndarray:
        if state.shape != (self.dim,):
            raise DimensionMismatch(f"state has shape {state.shape}, layout needs ({self.dim},)")
        return state.reshape(self.slits, self.garbage, self.work)


def slit_qubits(count: int) -> int:
    """Smallest ``m`` with ``2**m >= count``."""
    return max(0, math.ceil(math.log2(count))) if count > 1 else 0


def _embed(u: ComplexMatrix, size: int) -> ComplexMatrix:
    out = np.eye(size, dtype=np.complex128)
    out[: u.shape[0], : u.shape[1]] = u
    return out


@dataclass(frozen=True)
class LcuProgram:
    """A linear combination ``sum_i c_i B_i`` ready to run.

    ``weights`` are the coefficients as given (nonnegative, not necessarily
    normalized); ``divider_combiner`` holds the normalized, padded version.
    ``dilations[i]`` is a unitary on ``p + n`` qubits whose top-left block is
    ``operators[i]``. ``times[i]`` is the cost of the controlled gate ``i``
    and ``order`` the sequence in which gates are applied.
    """

    layout: RegisterLayout
    weights: tuple[float, ...]
    operators: tuple[ComplexMatrix, ...]
    dilations: tuple[ComplexMatrix, ...]
    divider_combiner: DividerCombiner
    times: tuple[float, ...]
    order: tuple[int, ...]

    def __post_init__(self):
        M = len(self.operators)
        lay = self.layout
        if M == 0:
            raise InvalidProgram("program needs at least one operator")
        if len(self.weights) != M or len(self.dilations) != M or len(self.times) != M:
            raise InvalidProgram(
                f"weights ({len(self.weights)}), dilations ({len(self.dilations)}) and "
                f"times ({len(self.times)}) must match the {M} operators"
            )
        if M > lay.slits:
            raise InvalidProgram(f"{M} operators do not fit in 2**{lay.m} slits")
        if sorted(self.order) != list(range(M)):
            raise InvalidProgram(f"order {list(self.order)} is not a permutation of 0..{M - 1}")
        if any(not t > 0 for t in self.times):
            raise InvalidProgram(f"gate times must be positive, got {list(self.times)}")
        if self.divider_combiner.slits != lay.slits:
            raise DimensionMismatch("divider does not match the slit register")
        tol = resolve_tol(None)
        size = lay.garbage * lay.work
        for i, (b, u) in enumerate(zip(self.operators, self.dilations)):
            if b.shape != (lay.work, lay.work):
                raise DimensionMismatch(f"operator {i} has shape {b.shape}, expected {lay.work}x{lay.work}")
            check_contraction(b)
            if u.shape != (size, size):
                raise DimensionMismatch(f"dilation {i} has shape {u.shape}, expected {size}x{size}")
            check_unitary(u)
            if np.abs(u[: lay.work, : lay.work] - b).max() > tol:
                raise InvalidProgram(f"dilation {i} does not carry operator {i} in its top-left block")

    @classmethod
    def build(
        cls,
        weights: Sequence[float],
        operators: Sequence[npt.ArrayLike],
        times: Sequence[float] | None = None,
        order: Sequence[int] | None = None,
        m: int | None = None,
        p: int = 1,
        dilations: Sequence[npt.ArrayLike] | None = None,
    ) -> "LcuProgram":
        """Assemble a program, dilating each operator unless dilations are given.

        With ``p = 0`` the operators must already be unitary and act as their
        own dilations. For ``p > 1`` the one-ancilla dilation is padded with
        the identity.
        """
        ops = tuple(as_square(b) for b in operators)
        if not ops:
            raise InvalidProgram("program needs at least one operator")
        M = len(ops)
        work = ops[0].shape[0]
        if work & (work - 1) or any(b.shape != (work, work) for b in ops):
            raise DimensionMismatch("operators must share one power-of-two dimension")
        n = work.bit_length() - 1
        m = slit_qubits(M) if m is None else m
        layout = RegisterLayout(m=m, p=p, n=n)
        size = layout.garbage * work
        if dilations is not None:
            dil = tuple(as_square(u) for u in dilations)
        elif p == 0:
            for i, b in enumerate(ops):
                if not is_unitary(b):
                    raise NotUnitary(f"operator {i} is not unitary and p = 0 leaves no room for a dilation")
            dil = ops
        else:
            dil = tuple(_embed(dilate_contraction(b).u, size) for b in ops)
        return cls(
            layout=layout,
            weights=tuple(float(c) for c in weights),
            operators=ops,
            dilations=dil,
            divider_combiner=build_divider_combiner(weights, m),
            times=tuple(float(t) for t in (times if times is not None else [1.0] * M)),
            order=tuple(int(i) for i in (order if order is not None else range(M))),
        )

    @property
    def M(self) -> int:
        return len(self.operators)

    @property
    def coefficients(self) -> np.ndarray:
        """Normalized coefficients ``c_i`` of the ``M`` operators."""
        return self.divider_combiner.weights[: self.M]

    def with_order(self, order: Sequence[int]) -> "LcuProgram":
        return replace(self, order=tuple(int(i) for i in order))

    def combined_operator(self) -> ComplexMatrix:
        """``A = sum_i c_i B_i`` by dense arithmetic."""
        return sum(c * b for c, b in zip(self.coefficients, self.operators))

    def survival(self, psi: npt.ArrayLike) -> np.ndarray:
        """``b_i = <psi| B_i^dagger B_i |psi>`` for every operator."""
        psi = np.asarray(psi, dtype=np.complex128)
        return np.array([float(np.vdot(b @ psi, b @ psi).real) for b in self.operators])


@dataclass
class RunTrace:
    """Outcome of one execution.

    ``step_probabilities`` lists one conditional probability per projection:
    ``M`` garbage projections then the final slit projection for the SWP
    runner, a single entry for the final-projection runner. When a
    projection annihilates the state the list stops at that step (with its
    near-zero probability), ``annihilated`` is set and ``final_state`` is
    ``None``.
    """

    runner: str
    order: tuple[int, ...]
    step_probabilities: list[float]
    overall_probability: float
    final_state: StateVector | None
    elapsed_time: float
    restarts: int = 0
    outcomes: list[bool] | None = None
    annihilated: bool = False

    @property
    def cumulative_probabilities(self) -> list[float]:
        return list(np.cumprod(self.step_probabilities)) if self.step_probabilities else []


def init_register(layout: RegisterLayout, psi: npt.ArrayLike) -> StateVector:
    """``|0>_m |0>_p |psi>`` as a full register state."""
    psi = check_state(psi)
    if psi.shape != (layout.work,):
        raise DimensionMismatch(f"work state has dimension {psi.shape[0]}, layout needs {layout.work}")
    state = np.zeros(layout.dim, dtype=np.complex128)
    state[: layout.work] = psi
    return state


def apply_first_group(
    state: StateVector, u: npt.ArrayLike, layout: RegisterLayout, check: bool = True
) -> StateVector:
    """Apply ``u (x) I`` with ``u`` acting on the slit qubits only."""
    u = as_square(u)
    if u.shape != (layout.slits, layout.slits):
        raise DimensionMismatch(f"slit unitary must be {layout.slits}x{layout.slits}, got {u.shape}")
    if check:
        check_unitary(u)
    blocks = layout.split(state).reshape(layout.slits, -1)
    return (u @ blocks).reshape(-1)


def apply_controlled(
    state: StateVector, slit: int, u_dilated: npt.ArrayLike, layout: RegisterLayout, check: bool = True
) -> StateVector:
    """Apply ``u_dilated`` to the garbage+work block of slit ``slit`` only."""
    if not 0 <= slit < layout.slits:
        raise SlitOutOfRange(f"slit {slit} outside 0..{layout.slits - 1}")
    u = as_square(u_dilated)
    size = layout.garbage * layout.work
    if u.shape != (size, size):
        raise DimensionMismatch(f"controlled unitary must be {size}x{size}, got {u.shape}")
    if check:
        check_unitary(u)
    blocks = layout.split(state).reshape(layout.slits, size).copy()
    blocks[slit] = u @ blocks[slit]
    return blocks.reshape(-1)


def _project(state: StateVector, layout: RegisterLayout, mask: np.ndarray, what: str) -> tuple[float, StateVector]:
    blocks = layout.split(state)
    total = float(np.vdot(blocks, blocks).real)
    kept = np.where(mask, blocks, 0).reshape(-1)
    weight = float(np.vdot(kept, kept).real)
    probability = weight / total if total > 0 else 0.0
    if probability < ZERO_PROBABILITY:
        raise ZeroProbabilityProjection(
            f"projection of the {what} onto |0> has probability {probability:.3e}", probability
        )
    return probability, kept / math.sqrt(weight)


def _mask(layout: RegisterLayout, slit: bool, garbage: bool) -> np.ndarray:
    mask = np.ones((layout.slits, layout.garbage, layout.work), dtype=bool)
    if slit:
        mask[1:] = False
    if garbage:
        mask[:, 1:] = False
    return mask


def project_second_group(state: StateVector, layout: RegisterLayout) -> tuple[float, StateVector]:
    """Post-select the garbage qubits on ``|0...0>``.

    The probability is the squared norm of the kept slice divided by the
    squared norm of the whole state.
    """
    return _project(state, layout, _mask(layout, slit=False, garbage=True), "second ancilla group")


def project_first_group(state: StateVector, layout: RegisterLayout) -> tuple[float, StateVector]:
    """Post-select the slit qubits on ``|0...0>``."""
    return _project(state, layout, _mask(layout, slit=True, garbage=False), "first ancilla group")


def _work_block(state: StateVector, layout: RegisterLayout) -> StateVector:
    out = layout.split(state)[0, 0].copy()
    return out / np.linalg.norm(out)


def run_swp_exact(program: LcuProgram, psi: npt.ArrayLike) -> RunTrace:
    """Run the subwave-projection algorithm, conditioning on every success.

    Divider, then for each gate in ``program.order`` the controlled dilation
    followed by a garbage projection, then the combiner and the slit
    projection. Every conditional probability is recorded; nothing is
    sampled.
    """
    lay = program.layout
    state = apply_first_group(init_register(lay, psi), program.divider_combiner.v, lay, check=False)
    probs: list[float] = []
    elapsed = 0.0
    try:
        for gate in program.order:
            state = apply_controlled(state, gate, program.dilations[gate], lay, check=False)
            elapsed += program.times[gate]
            prob, state = project_second_group(state, lay)
            probs.append(prob)
        state = apply_first_group(state, program.divider_combiner.w, lay, check=False)
        prob, state = project_first_group(state, lay)
        probs.append(prob)
    except ZeroProbabilityProjection as exc:
        probs.append(exc.probability)
        return RunTrace(
            runner="swp",
            order=program.order,
            step_probabilities=probs,
            overall_probability=float(np.prod(probs)),
            final_state=None,
            elapsed_time=elapsed,
            annihilated=True,
        )
    return RunTrace(
        runner="swp",
        order=program.order,
        step_probabilities=probs,
        overall_probability=float(np.prod(probs)),
        final_state=_work_block(state, lay),
        elapsed_time=elapsed,
    )


def run_final_projection(program: LcuProgram, psi: npt.ArrayLike) -> RunTrace:
    """Plain duality computation: all gates, combiner, then one joint projection."""
    lay = program.layout
    state = apply_first_group(init_register(lay, psi), program.divider_combiner.v, lay, check=False)
    for gate in program.order:
        state = apply_controlled(state, gate, program.dilations[gate], lay, check=False)
    state = apply_first_group(state, program.divider_combiner.w, lay, check=False)
    elapsed = float(sum(program.times))
    try:
        prob, state = _project(state, lay, _mask(lay, slit=True, garbage=True), "ancilla register")
    except ZeroProbabilityProjection as exc:
        return RunTrace(
            runner="final",
            order=program.order,
            step_probabilities=[exc.probability],
            overall_probability=exc.probability,
            final_state=None,
            elapsed_time=elapsed,
            annihilated=True,
        )
    return RunTrace(
        runner="final",
        order=program.order,
        step_probabilities=[prob],
        overall_probability=prob,
        final_state=_work_block(state, lay),
        elapsed_time=elapsed,
    )


@dataclass
class MonteCarloSummary:
    trials: int
    seed: int
    exact_probabilities: list[float]
    step_attempts: np.ndarray
    step_successes: np.ndarray
    attempts: np.ndarray = field(repr=False)
    elapsed: np.ndarray = field(repr=False)
    final_state: StateVector | None = None

    @property
    def empirical_rates(self) -> np.ndarray:
        with np.errstate(invalid="ignore", divide="ignore"):
            return self.step_successes / self.step_attempts

    @property
    def mean_attempts(self) -> float:
        return float(self.attempts.mean())

    @property
    def mean_restarts(self) -> float:
        return self.mean_attempts - 1.0

    @property
    def mean_elapsed_time(self) -> float:
        return float(self.elapsed.mean())

    def standard_error(self, values: np.ndarray) -> float:
        return float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0

    @property
    def attempts_stderr(self) -> float:
        return self.standard_error(self.attempts)

    @property
    def elapsed_stderr(self) -> float:
        return self.standard_error(self.elapsed)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent generator for one trial, derived from ``(seed, trial)``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


def run_swp_montecarlo(program: LcuProgram, psi: npt.ArrayLike, seed: int, trials: int) -> MonteCarloSummary:
    """Sample the restart process of the subwave-projection algorithm.

    After a run of successes the register state is fixed, so the conditional
    probability of each projection comes from the exact statevector run and
    each outcome is drawn with that probability. A failed attempt costs the
    gate times up to and including the failing step (divider, combiner and
    measurements are free) and restarts from the divider.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    exact = run_swp_exact(program, psi)
    if exact.annihilated:
        raise ZeroProbabilityProjection(
            "a projection annihilates the state; the restart process never succeeds",
            exact.step_probabilities[-1],
        )
    probs = np.asarray(exact.step_probabilities)
    gate_times = np.array([program.times[g] for g in program.order])
    # cost of an attempt that stops at step j; the final projection adds nothing
    cost = np.concatenate([np.cumsum(gate_times), [gate_times.sum()]])
    steps = probs.size
    step_attempts = np.zeros(steps, dtype=np.int64)
    step_successes = np.zeros(steps, dtype=np.int64)
    attempts = np.zeros(trials, dtype=np.int64)
    elapsed = np.zeros(trials)
    for trial in range(trials):
        rng = trial_rng(seed, trial)
        total = 0.0
        count = 0
        while True:
            count += 1
            draws = rng.random(steps)
            failed = np.flatnonzero(draws >= probs)
            stop = int(failed[0]) if failed.size else steps - 1
            step_attempts[: stop + 1] += 1
            step_successes[:stop] += 1
            total += cost[stop]
            if not failed.size:
                step_successes[stop] += 1
                break
        attempts[trial] = count
        elapsed[trial] = total
    return MonteCarloSummary(
        trials=trials,
        seed=seed,
        exact_probabilities=list(exact.step_probabilities),
        step_attempts=step_attempts,
        step_successes=step_successes,
        attempts=attempts,
        elapsed=elapsed,
        final_state=exact.final_state,
    )
