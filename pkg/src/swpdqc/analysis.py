"""
Closed-form success probabilities and the expected-runtime model.

Notation: ``w_i = |V_i0|^2`` are the normalized slit weights, ``b_i`` the
survival probabilities ``<psi|B_i^dagger B_i|psi>``. Before the ``l``-th
projection the garbage-free part of the register has squared norm

    D_l = sum_{done} b_i w_i + sum_{pending} w_i,

the ``l``-th projection succeeds with ``D_{l+1} / D_l`` and the final one
with ``<A^dagger A> / D_M``. Because ``D_0 = 1`` the prefix products of the
step probabilities are exactly the ``D_l``, which turns the expected runtime
into a single-machine scheduling cost (see :func:`greedy_order`).
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import BadProbability, LengthMismatch

log = logging.getLogger(__name__)

EXHAUSTIVE_LIMIT = 8


def closed_form_step_probs(
    weights: Sequence[float],
    b_values: Sequence[float],
    order: Sequence[int],
    expectation: float,
) -> list[float]:
    """Conditional success probability of every projection, in execution order.

    Parameters
    ----------
    weights
        Normalized slit weights ``|V_i0|^2``.
    b_values
        Survival probabilities ``b_i``.
    order
        Gate execution order, a permutation of ``range(len(weights))``.
    expectation
        ``<psi|A^dagger A|psi>``, computed by the caller.

    Returns
    -------
    list of float
        ``[p_0, ..., p_{M-1}, p_M]``. A step whose running denominator has
        already vanished is reported as 0.
    """
    w = np.asarray(weights, dtype=float)
    b = np.asarray(b_values, dtype=float)
    if w.shape != b.shape or len(order) != w.size:
        raise LengthMismatch(
            f"weights ({w.size}), b values ({b.size}) and order ({len(order)}) must have equal length"
        )
    if sorted(order) != list(range(w.size)):
        raise LengthMismatch(f"order {list(order)} is not a permutation of 0..{w.size - 1}")
    probs = []
    denominator = float(w.sum())
    for gate in order:
        numerator = denominator - w[gate] * (1.0 - b[gate])
        probs.append(float(numerator / denominator) if denominator > 0 else 0.0)
        denominator = numerator
    probs.append(float(expectation / denominator) if denominator > 0 else 0.0)
    return probs


def mean_time_swp(probs: Sequence[float], times: Sequence[float], order: Sequence[int] | None = None) -> float:
    """Expected total runtime with a restart after any failed projection.

    ``probs`` are ``p_0..p_M`` in execution order and ``times[g]`` the cost of
    gate ``g``; ``order`` maps execution step to gate (identity by default).
    Returns ``inf`` when some step can never succeed.
    """
    p = np.asarray(probs, dtype=float)
    order = list(range(len(times))) if order is None else list(order)
    if p.size != len(order) + 1 or len(order) != len(times):
        raise LengthMismatch(f"need {len(times) + 1} probabilities for {len(times)} gates, got {p.size}")
    if np.any(p < 0) or np.any(p > 1 + 1e-12):
        raise BadProbability(f"probabilities must lie in [0, 1], got {p.tolist()}")
    total = float(np.prod(p))
    if total <= 0:
        return math.inf
    return swp_numerator(p, times, order) / total


def swp_numerator(probs: Sequence[float], times: Sequence[float], order: Sequence[int]) -> float:
    """``t_0 + p_0 t_1 + p_0 p_1 t_2 + ...`` in execution order."""
    prefix = np.concatenate([[1.0], np.cumprod(np.asarray(probs, dtype=float)[: len(order) - 1])])
    return float(sum(pref * times[g] for pref, g in zip(prefix, order)))


def mean_time_final(overall_prob: float, times: Sequence[float]) -> float:
    """Expected runtime with a single final projection: ``sum(times) / P``."""
    if not 0 <= overall_prob <= 1 + 1e-12:
        raise BadProbability(f"probability {overall_prob} outside [0, 1]")
    if overall_prob <= 0:
        return math.inf
    return float(sum(times)) / overall_prob


@dataclass(frozen=True)
class TimingModel:
    step_probs: tuple[float, ...]
    gate_times: tuple[float, ...]
    order: tuple[int, ...]
    et_swp: float
    et_final: float

    @property
    def degenerate(self) -> bool:
        """True when the success probability is zero and both runtimes are infinite."""
        return math.isinf(self.et_swp)

    @property
    def ratio(self) -> float:
        if self.degenerate:
            return math.nan
        return self.et_final / self.et_swp


def timing_model(step_probs: Sequence[float], times: Sequence[float], order: Sequence[int] | None = None) -> TimingModel:
    order = tuple(range(len(times))) if order is None else tuple(order)
    overall = float(np.prod(step_probs))
    return TimingModel(
        step_probs=tuple(float(p) for p in step_probs),
        gate_times=tuple(float(t) for t in times),
        order=order,
        et_swp=mean_time_swp(step_probs, times, order),
        et_final=mean_time_final(overall, times),
    )


@dataclass(frozen=True)
class OrderSearchResult:
    best_order: tuple[int, ...]
    best_et: float
    method: str
    evaluated: int
    identity_et: float
    best_probs: tuple[float, ...] = ()


@dataclass(frozen=True)
class OrderCandidate:
    order: tuple[int, ...]
    probs: tuple[float, ...]
    model: TimingModel


def program_inputs(program, psi) -> tuple[np.ndarray, np.ndarray, float]:
    """Normalized weights, survival probabilities and ``<A^dagger A>`` for a program."""
    psi = np.asarray(psi, dtype=np.complex128)
    a_psi = program.combined_operator() @ psi
    return program.coefficients, program.survival(psi), float(np.vdot(a_psi, a_psi).real)


def evaluate_order(weights, b_values, times, order, expectation) -> OrderCandidate:
    probs = closed_form_step_probs(weights, b_values, order, expectation)
    return OrderCandidate(order=tuple(order), probs=tuple(probs), model=timing_model(probs, times, order))


def greedy_order(weights: Sequence[float], b_values: Sequence[float], times: Sequence[float]) -> tuple[int, ...]:
    """Gate order sorted by descending ``w_i (1 - b_i) / t_i``.

    The prefix products of the step probabilities are ``D_l = 1 - sum of
    w_i (1 - b_i)`` over the gates already applied, so the runtime numerator
    is ``sum t - sum_{i before j} w_i (1 - b_i) t_j``. An adjacent swap
    argument shows this ordering minimizes it: the gates that lose the most
    amplitude per unit time go first. Ties keep index order.
    """
    w = np.asarray(weights, dtype=float)
    b = np.asarray(b_values, dtype=float)
    t = np.asarray(times, dtype=float)
    key = w * (1.0 - b) / t
    return tuple(int(i) for i in sorted(range(w.size), key=lambda i: (-key[i], i)))


def all_orders(weights, b_values, times, expectation) -> Iterable[OrderCandidate]:
    for order in itertools.permutations(range(len(weights))):
        yield evaluate_order(weights, b_values, times, order, expectation)


def search_orders(
    weights: Sequence[float],
    b_values: Sequence[float],
    times: Sequence[float],
    expectation: float,
    method: str | None = None,
) -> OrderSearchResult:
    """Minimize the expected runtime over gate orders.

    ``method`` is ``"exhaustive"`` (every permutation), ``"greedy"`` or
    ``None``, which picks exhaustive search up to eight gates. Among orders
    with equal runtime the lexicographically first one wins, so symmetric
    instances return the identity order.
    """
    M = len(weights)
    if method is None:
        method = "exhaustive" if M <= EXHAUSTIVE_LIMIT else "greedy"
    identity = evaluate_order(weights, b_values, times, range(M), expectation)
    if method == "greedy":
        order = greedy_order(weights, b_values, times)
        best = evaluate_order(weights, b_values, times, order, expectation)
        # greedy never reports worse than the default order
        if not best.model.et_swp < identity.model.et_swp * (1 - 1e-12):
            best = identity
        return OrderSearchResult(best.order, best.model.et_swp, "greedy", 2, identity.model.et_swp, best.probs)
    if method != "exhaustive":
        raise ValueError(f"unknown order search method {method!r}")
    best = identity
    evaluated = 0
    for cand in all_orders(weights, b_values, times, expectation):
        evaluated += 1
        if cand.model.et_swp < best.model.et_swp * (1 - 1e-12):
            best = cand
    return OrderSearchResult(best.order, best.model.et_swp, "exhaustive", evaluated, identity.model.et_swp, best.probs)


def order_search(program, psi, method: str | None = None) -> OrderSearchResult:
    """Best gate order for ``program`` acting on ``psi`` under the runtime model."""
    weights, b_values, expectation = program_inputs(program, psi)
    result = search_orders(weights, b_values, program.times, expectation, method)
    log.debug("order search (%s): best %s Et=%.6g, identity Et=%.6g",
              result.method, result.best_order, result.best_et, result.identity_et)
    return result


@dataclass(frozen=True)
class SweepRow:
    M: int
    p: float
    et: float
    et_prime: float
    ratio: float


def uniform_et(p: float, M: int) -> float:
    """``(1 - p^M) / (p^{M+1} (1 - p))``: unit gate times, every step succeeding with ``p``."""
    return (1 - p**M) / (p ** (M + 1) * (1 - p))


def uniform_speedup(p: float, M: int) -> float:
    """``M (1 - p) / (1 - p^M)``, the exact ratio of the two runtimes in the uniform model."""
    return M * (1 - p) / (1 - p**M)


def speedup_sweep(p: float, m_values: Iterable[int]) -> list[SweepRow]:
    """Both runtimes for ``M`` unit-time gates whose ``M + 1`` projections all succeed with ``p``.

    ``Et`` is evaluated through :func:`mean_time_swp` and ``Et'`` as
    ``M / p^{M+1}``.
    """
    if not 0 < p < 1:
        raise BadProbability(f"p must lie in (0, 1), got {p}")
    m_values = list(m_values)
    if not m_values:
        raise ValueError("m_values must not be empty")
    rows = []
    for M in m_values:
        if M < 1:
            raise ValueError(f"M must be positive, got {M}")
        probs = [p] * (M + 1)
        times = [1.0] * M
        et = mean_time_swp(probs, times)
        et_prime = mean_time_final(float(np.prod(probs)), times)
        rows.append(SweepRow(M=M, p=p, et=et, et_prime=et_prime, ratio=et_prime / et))
    return rows
