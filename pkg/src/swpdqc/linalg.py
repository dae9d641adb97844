"""
Dense complex linear algebra used by every other module.

Matrices and state vectors are plain complex ``numpy`` arrays. Functions
never mutate their inputs. Structural checks (Hermitian, unitary,
contraction) use a shared tolerance that defaults to 1e-9 and can be
overridden with the ``DQC_TOLERANCE`` environment variable or, for a block
of code, with the :func:`tolerance` context manager.
"""

from __future__ import annotations

import contextlib
import contextvars
import os
from typing import Iterator

import math

import numpy as np
import numpy.typing as npt

from .errors import NotHermitian, NotPSD, NotSquare, NotUnitary, UnnormalizedInput

ComplexMatrix = npt.NDArray[np.complex128]
StateVector = npt.NDArray[np.complex128]

DEFAULT_TOLERANCE = 1e-9

_tolerance_override: contextvars.ContextVar[float | None] = contextvars.ContextVar(
    "dqc_tolerance", default=None
)


def default_tolerance() -> float:
    """Return the active structural-check tolerance."""
    value = _tolerance_override.get()
    if value is not None:
        return value
    env = os.environ.get("DQC_TOLERANCE")
    if env:
        return float(env)
    return DEFAULT_TOLERANCE


@contextlib.contextmanager
def tolerance(value: float) -> Iterator[float]:
    """Temporarily set the structural-check tolerance for the current context."""
    if not value > 0:
        raise ValueError("tolerance must be positive")
    token = _tolerance_override.set(float(value))
    try:
        yield value
    finally:
        _tolerance_override.reset(token)


def resolve_tol(tol: float | None) -> float:
    return default_tolerance() if tol is None else tol


def as_matrix(a: npt.ArrayLike) -> ComplexMatrix:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise NotSquare(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def as_square(a: npt.ArrayLike) -> ComplexMatrix:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise NotSquare(f"expected a square matrix, got shape {m.shape}")
    return m


def dagger(a: ComplexMatrix) -> ComplexMatrix:
    return a.conj().T


def is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def hermitian_residual(h: ComplexMatrix) -> float:
    return float(np.linalg.norm(h - dagger(h), 2))


def unitarity_residual(u: ComplexMatrix) -> float:
    u = as_square(u)
    return float(np.linalg.norm(dagger(u) @ u - np.eye(u.shape[0]), 2))


def is_unitary(u: npt.ArrayLike, tol: float | None = None) -> bool:
    return unitarity_residual(as_square(u)) <= resolve_tol(tol)


def check_hermitian(h: npt.ArrayLike, tol: float | None = None) -> ComplexMatrix:
    """Validate ``h`` and return its exactly Hermitian part."""
    h = as_square(h)
    residual = hermitian_residual(h)
    if residual > resolve_tol(tol):
        raise NotHermitian(f"||H - H^dagger|| = {residual:.3e} exceeds tolerance")
    return (h + dagger(h)) / 2


def check_unitary(u: npt.ArrayLike, tol: float | None = None) -> ComplexMatrix:
    u = as_square(u)
    residual = unitarity_residual(u)
    if residual > resolve_tol(tol):
        raise NotUnitary(f"||U^dagger U - I|| = {residual:.3e} exceeds tolerance")
    return u


def hermitian_eig(h: npt.ArrayLike, tol: float | None = None) -> tuple[np.ndarray, ComplexMatrix]:
    """
    Eigendecomposition of a Hermitian matrix.

    Returns
    -------
    eigenvalues : ndarray of float, ascending
    eigenvectors : ComplexMatrix
        Unitary ``Q`` whose columns are the eigenvectors, so that
        ``H = Q diag(eigenvalues) Q^dagger``.
    """
    h = check_hermitian(h, tol)
    values, vectors = np.linalg.eigh(h)
    return values, vectors


def operator_norm(a: npt.ArrayLike) -> float:
    """Largest singular value of a square matrix."""
    a = as_square(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def matrix_sqrt_psd(p: npt.ArrayLike, tol: float | None = None) -> ComplexMatrix:
    """
    Principal square root of a positive-semidefinite Hermitian matrix.

    Eigenvalues in ``[-tol, 0)`` are treated as roundoff and clamped to zero
    (typical for ``I - H^2`` when ``||H||`` is 1).

    Raises
    ------
    NotPSD
        If an eigenvalue is below ``-tol``.
    """
    t = resolve_tol(tol)
    values, vectors = hermitian_eig(p, tol)
    if values.size and values[0] < -t:
        raise NotPSD(f"smallest eigenvalue {values[0]:.3e} is negative")
    roots = np.sqrt(np.clip(values, 0.0, None))
    s = (vectors * roots) @ dagger(vectors)
    return (s + dagger(s)) / 2


def _phase_factor(vec: np.ndarray, eps: float = 1e-12) -> complex:
    # unit factor making the first entry above eps real positive
    idx = np.flatnonzero(np.abs(vec) > eps)
    if idx.size == 0:
        return 1.0
    z = vec[idx[0]]
    return abs(z) / z


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    return vec * _phase_factor(vec)


def _canonical_basis(basis: ComplexMatrix, eps: float = 1e-8) -> ComplexMatrix:
    """Orthonormal basis of span(basis) that depends only on the subspace.

    Built by Gram-Schmidt over the projected standard basis vectors in index
    order, then phase fixed.
    """
    dim, k = basis.shape
    if k == 0:
        return basis
    proj = basis @ dagger(basis)
    out: list[np.ndarray] = []
    for j in range(dim):
        r = proj[:, j].copy()
        for q in out:
            r -= q * np.vdot(q, r)
        norm = np.linalg.norm(r)
        if norm > eps:
            out.append(_fix_phase(r / norm))
            if len(out) == k:
                break
    return np.column_stack(out)


def polar_decompose(a: npt.ArrayLike) -> tuple[ComplexMatrix, ComplexMatrix]:
    """
    Deterministic polar decomposition ``A = U P``.

    Uses the SVD ``A = W S V^dagger`` with ``U = W V^dagger`` and
    ``P = V S V^dagger``. Left singular vectors are phase fixed (first
    nonzero entry real positive) and the right ones follow. When ``A`` is
    rank deficient the kernel of ``A`` is mapped onto the orthogonal
    complement of its range through canonical bases of both subspaces, so
    ``U`` does not depend on the LAPACK driver.
    """
    a = as_square(a)
    n = a.shape[0]
    if n == 0:
        return a.copy(), a.copy()
    w, s, vh = np.linalg.svd(a)
    v = dagger(vh)
    cutoff = max(s[0], 1.0) * n * np.finfo(float).eps * 16
    rank = int(np.sum(s > cutoff))

    w = w.copy()
    v = v.copy()
    for k in range(rank):
        phase = _phase_factor(w[:, k])
        w[:, k] *= phase
        v[:, k] *= phase
    if rank < n:
        w[:, rank:] = _canonical_basis(w[:, rank:])
        v[:, rank:] = _canonical_basis(v[:, rank:])

    u = w @ dagger(v)
    p = (v * s) @ dagger(v)
    return u, (p + dagger(p)) / 2


def normalize(v: npt.ArrayLike) -> StateVector:
    v = np.asarray(v, dtype=np.complex128)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise UnnormalizedInput("cannot normalize the zero vector")
    return v / norm


def check_state(v: npt.ArrayLike, tol: float | None = None) -> StateVector:
    v = np.asarray(v, dtype=np.complex128)
    if v.ndim != 1:
        raise UnnormalizedInput(f"state must be a flat vector, got shape {v.shape}")
    err = abs(np.linalg.norm(v) - 1.0)
    if err > resolve_tol(tol):
        raise UnnormalizedInput(f"state norm deviates from 1 by {err:.3e}")
    return v


def canonical_phase(v: npt.ArrayLike) -> StateVector:
    """Remove the global phase: the largest-magnitude amplitude becomes real positive."""
    v = np.asarray(v, dtype=np.complex128)
    if not v.size:
        return v
    z = v[int(np.argmax(np.abs(v)))]
    if z == 0:
        return v
    return v * (abs(z) / z)


def phase_distance(a: npt.ArrayLike, b: npt.ArrayLike) -> float:
    """``min over theta of ||a - e^{i theta} b||``, the distance up to a global phase."""
    a = np.asarray(a, dtype=np.complex128).ravel()
    b = np.asarray(b, dtype=np.complex128).ravel()
    overlap = complex(np.vdot(b, a))
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(a - phase * b))
