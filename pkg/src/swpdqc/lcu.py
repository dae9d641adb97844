"""
Building blocks for linear combinations of (non-)unitary operators.

* two-unitary averaging of any contraction,
* wave divider / combiner unitaries from nonnegative weights,
* one-ancilla unitary dilations of contractions,
* the Chebyshev walk operator and Chebyshev matrix polynomials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
import numpy.typing as npt

from .errors import (
    AllZeroWeights,
    BadTruncation,
    NegativeWeight,
    NotContraction,
    TooManyWeights,
)
from .linalg import (
    ComplexMatrix,
    resolve_tol,
    as_square,
    check_hermitian,
    dagger,
    hermitian_eig,
    operator_norm,
    polar_decompose,
)


@dataclass(frozen=True)
class TwoUnitaryDecomposition:
    """``a == (u0 + u1) / 2`` with both factors unitary."""

    u0: ComplexMatrix
    u1: ComplexMatrix

    def recombine(self) -> ComplexMatrix:
        return (self.u0 + self.u1) / 2


@dataclass(frozen=True)
class DividerCombiner:
    """Wave divider ``v`` and combiner ``w`` acting on the slit register.

    ``weights`` are the normalized, zero-padded coefficients; ``scale`` is the
    sum of the weights as given, before normalization.
    """

    v: ComplexMatrix
    w: ComplexMatrix
    weights: np.ndarray
    scale: float

    @property
    def slits(self) -> int:
        return self.v.shape[0]


@dataclass(frozen=True)
class Dilation:
    b: ComplexMatrix
    u: ComplexMatrix


def check_contraction(a: npt.ArrayLike, tol: float | None = None) -> ComplexMatrix:
    a = as_square(a)
    norm = operator_norm(a)
    if norm > 1 + resolve_tol(tol):
        raise NotContraction(f"operator norm {norm:.6g} exceeds 1")
    return a


def _complement(x: np.ndarray) -> np.ndarray:
    """``sqrt(1 - x^2)`` for singular values or eigenvalues in ``[-1, 1]`` (up to roundoff)."""
    return np.sqrt(np.clip((1.0 - x) * (1.0 + x), 0.0, None))


def _hermitian_defect(h: ComplexMatrix, tol: float | None) -> tuple[ComplexMatrix, ComplexMatrix]:
    """``h`` and ``(I - h^2)^{1/2}`` rebuilt from one eigenbasis.

    Taking both from the same eigenvectors keeps ``h^2 + s^2 = I`` and
    ``[h, s] = 0`` at machine precision; two separate square roots would
    amplify roundoff in eigenvalues near +-1 to about ``sqrt(eps)``.
    """
    values, q = hermitian_eig(h, tol)
    h = (q * values) @ dagger(q)
    s = (q * _complement(values)) @ dagger(q)
    return (h + dagger(h)) / 2, (s + dagger(s)) / 2


def decompose_contraction(a: npt.ArrayLike, tol: float | None = None) -> TwoUnitaryDecomposition:
    """Write a contraction as the average of two unitaries.

    With the polar decomposition ``a = U P`` and ``S = (I - P^2)^{1/2}``
    the factors are ``U (P + iS)`` and ``U (P - iS)``; they are unitary
    because ``P`` and ``S`` commute.
    """
    a = check_contraction(a, tol)
    u, p = polar_decompose(a)
    p, s = _hermitian_defect(p, tol)
    return TwoUnitaryDecomposition(u0=u @ (p + 1j * s), u1=u @ (p - 1j * s))


def _householder_to(column: np.ndarray) -> ComplexMatrix:
    """Unitary whose first column is ``column`` (unit norm, real, nonnegative)."""
    dim = column.shape[0]
    e0 = np.zeros(dim, dtype=np.complex128)
    e0[0] = 1.0
    diff = e0 - column
    norm2 = float(np.vdot(diff, diff).real)
    if norm2 < 1e-30:
        return np.eye(dim, dtype=np.complex128)
    # Householder reflection sending e0 to column; v[0, 0] = column[0] >= 0
    return np.eye(dim, dtype=np.complex128) - 2.0 * np.outer(diff, diff.conj()) / norm2


def build_divider_combiner(weights: Sequence[float], m: int) -> DividerCombiner:
    """Divider ``V`` and combiner ``W = V^dagger`` for nonnegative weights.

    The first column of ``V`` (and first row of ``W``) is ``sqrt(c_i / sum c)``
    over ``2**m`` slits, zero padded.
    """
    if m < 0:
        raise TooManyWeights("qubit count must be nonnegative")
    c = np.asarray(weights, dtype=float).ravel()
    size = 2**m
    if c.size > size:
        raise TooManyWeights(f"{c.size} weights do not fit in 2**{m} = {size} slits")
    if np.any(c < 0):
        raise NegativeWeight(f"weights must be nonnegative, got {c.tolist()}")
    total = float(c.sum())
    if c.size == 0 or total <= 0:
        raise AllZeroWeights("at least one weight must be positive")
    padded = np.zeros(size)
    padded[: c.size] = c / total
    v = _householder_to(np.sqrt(padded).astype(np.complex128))
    return DividerCombiner(v=v, w=dagger(v), weights=padded, scale=total)


def dilate_contraction(b: npt.ArrayLike, tol: float | None = None) -> Dilation:
    """One-ancilla unitary dilation

    ``u = [[b, -(I - b b^dagger)^{1/2}], [(I - b^dagger b)^{1/2}, b^dagger]]``.

    The upper half of ``u (|0> (x) psi)`` is ``b psi``.
    """
    b = check_contraction(b, tol)
    # both defects share the singular vectors of b, so the blocks cancel exactly
    left, sigma, right_h = np.linalg.svd(b)
    d = _complement(sigma)
    upper = (left * d) @ dagger(left)
    lower = (dagger(right_h) * d) @ right_h
    u = np.block([[b, -upper], [lower, dagger(b)]])
    return Dilation(b=b, u=u)


def _hermitian_contraction(h: npt.ArrayLike, tol: float | None) -> ComplexMatrix:
    h = check_hermitian(h, tol)
    return check_contraction(h, tol)


def walk_operator(h: npt.ArrayLike, tol: float | None = None) -> ComplexMatrix:
    """The walk unitary ``L = [[H, -S], [S, H]]`` with ``S = (I - H^2)^{1/2}``."""
    h = _hermitian_contraction(h, tol)
    h, s = _hermitian_defect(h, tol)
    return np.block([[h, -s], [s, h]])


def _chebyshev(n: int, h: ComplexMatrix, first: ComplexMatrix) -> ComplexMatrix:
    if n < 0:
        raise ValueError("Chebyshev degree must be nonnegative")
    prev = np.eye(h.shape[0], dtype=np.complex128)
    if n == 0:
        return prev
    cur = first
    for _ in range(n - 1):
        prev, cur = cur, 2 * h @ cur - prev
    return cur


def chebyshev_T(n: int, h: npt.ArrayLike, tol: float | None = None) -> ComplexMatrix:
    """Chebyshev polynomial of the first kind evaluated at a Hermitian contraction."""
    h = _hermitian_contraction(h, tol)
    return _chebyshev(n, h, h.copy())


def chebyshev_U(n: int, h: npt.ArrayLike, tol: float | None = None) -> ComplexMatrix:
    """Chebyshev polynomial of the second kind; ``U_{-1}`` is the zero matrix."""
    h = _hermitian_contraction(h, tol)
    if n == -1:
        return np.zeros_like(h)
    return _chebyshev(n, h, 2 * h)


def chebyshev_weights(m0: int, M: int) -> tuple[list[float], float]:
    """Weights of ``x^{2 m0}`` in the even Chebyshev basis, truncated to ``M`` terms.

    ``alpha_i = 2^{1-2 m0} C(2 m0, m0 + i)`` halved for ``i = 0``; with
    ``M = m0 + 1`` the expansion is exact and the weights sum to 1.
    """
    if m0 < 1:
        raise BadTruncation(f"m0 must be at least 1, got {m0}")
    if not 1 <= M <= m0 + 1:
        raise BadTruncation(f"M must lie in [1, {m0 + 1}], got {M}")
    scale = Fraction(2, 4**m0)
    alphas = []
    for i in range(M):
        a = scale * math.comb(2 * m0, m0 + i)
        if i == 0:
            a /= 2
        alphas.append(a)
    return [float(a) for a in alphas], float(sum(alphas))


def even_chebyshev_terms(h: npt.ArrayLike, count: int, tol: float | None = None) -> list[ComplexMatrix]:
    """``[T_0(H), T_2(H), ..., T_{2(count-1)}(H)]`` from a single recurrence pass."""
    h = _hermitian_contraction(h, tol)
    eye = np.eye(h.shape[0], dtype=np.complex128)
    out = []
    prev, cur = eye, h.copy()
    for n in range(2 * count - 1):
        if n % 2 == 0:
            out.append(prev)
        prev, cur = cur, 2 * h @ cur - prev
    return out


def power_approx_error(h: npt.ArrayLike, m0: int, M: int, tol: float | None = None) -> float:
    """Operator-norm error of the truncated Chebyshev expansion of ``H^{2 m0}``."""
    h = _hermitian_contraction(h, tol)
    alphas, _ = chebyshev_weights(m0, M)
    approx = sum(a * t for a, t in zip(alphas, even_chebyshev_terms(h, M, tol)))
    target = np.linalg.matrix_power(h, 2 * m0)
    return operator_norm(target - approx)
