import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randutil import random_contraction, random_hermitian_contraction
from swpdqc.errors import AllZeroWeights, BadTruncation, NegativeWeight, NotContraction, NotHermitian, TooManyWeights
from swpdqc.lcu import (
    build_divider_combiner,
    chebyshev_T,
    chebyshev_U,
    chebyshev_weights,
    decompose_contraction,
    dilate_contraction,
    even_chebyshev_terms,
    power_approx_error,
    walk_operator,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)


def unitary_residual(u):
    return np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]), 2)


def spectral_apply(h, f):
    """Oracle: apply a scalar function through the eigendecomposition."""
    values, q = np.linalg.eigh(h)
    return q @ np.diag(f(values)) @ q.conj().T


def test_decompose_identity():
    d = decompose_contraction(np.eye(2))
    assert np.allclose(d.u0, np.eye(2)) and np.allclose(d.u1, np.eye(2))


def test_decompose_projector():
    d = decompose_contraction(np.diag([1.0, 0.0]))
    assert np.allclose(d.u0, np.diag([1, 1j]))
    assert np.allclose(d.u1, np.diag([1, -1j]))
    assert np.allclose(d.recombine(), np.diag([1, 0]))


def test_decompose_half_pauli_x():
    d = decompose_contraction(X / 2)
    assert np.allclose(d.u0, (0.5 + 1j * math.sqrt(3) / 2) * X)
    assert np.allclose(d.recombine(), X / 2)


def test_decompose_rejects_expansion():
    with pytest.raises(NotContraction):
        decompose_contraction(np.diag([1.5, 0.0]))


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 8), kind=st.sampled_from(["generic", "unit", "singular"]))
def test_decompose_property(seed, n, kind):
    a = random_contraction(np.random.default_rng(seed), n, kind)
    d = decompose_contraction(a)
    assert np.linalg.norm(d.recombine() - a, 2) <= 1e-10
    assert unitary_residual(d.u0) <= 1e-10
    assert unitary_residual(d.u1) <= 1e-10


def test_divider_examples():
    dc = build_divider_combiner([1, 1], 1)
    assert np.allclose(dc.v[:, 0], [1 / math.sqrt(2)] * 2)
    dc = build_divider_combiner([3, 1], 1)
    assert np.allclose(dc.v[:, 0], [math.sqrt(0.75), 0.5])
    assert dc.scale == 4
    dc = build_divider_combiner([1, 2, 1], 2)
    assert np.allclose(dc.v[:, 0], [0.5, math.sqrt(0.5), 0.5, 0])
    assert np.allclose(dc.w, dc.v.conj().T)
    assert unitary_residual(dc.v) <= 1e-12


def test_divider_single_slit():
    dc = build_divider_combiner([0.3], 0)
    assert np.allclose(dc.v, [[1]])


def test_divider_errors():
    with pytest.raises(AllZeroWeights):
        build_divider_combiner([0, 0], 1)
    with pytest.raises(TooManyWeights):
        build_divider_combiner([1, 1, 1], 1)
    with pytest.raises(NegativeWeight):
        build_divider_combiner([1, -1], 1)


@settings(max_examples=40, deadline=None)
@given(weights=st.lists(st.floats(0, 10), min_size=1, max_size=8).filter(lambda w: sum(w) > 1e-3))
def test_divider_property(weights):
    m = max(0, math.ceil(math.log2(len(weights))))
    dc = build_divider_combiner(weights, m)
    expected = np.zeros(2**m)
    expected[: len(weights)] = np.sqrt(np.array(weights) / sum(weights))
    assert np.allclose(dc.v[:, 0], expected, atol=1e-12)
    assert np.allclose(dc.w[0], expected, atol=1e-12)
    assert unitary_residual(dc.v) <= 1e-10


def test_dilation_examples():
    u = dilate_contraction(np.eye(2)).u
    assert np.allclose(u, np.kron(np.eye(2), np.eye(2)))
    u = dilate_contraction([[0.5]]).u
    s = math.sqrt(0.75)
    assert np.allclose(u, [[0.5, -s], [s, 0.5]])
    with pytest.raises(NotContraction):
        dilate_contraction([[2.0]])


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 8), kind=st.sampled_from(["generic", "unit", "singular"]))
def test_dilation_property(seed, n, kind):
    rng = np.random.default_rng(seed)
    b = random_contraction(rng, n, kind)
    u = dilate_contraction(b).u
    assert unitary_residual(u) <= 1e-10
    psi = rng.normal(size=n) + 1j * rng.normal(size=n)
    out = u @ np.concatenate([psi, np.zeros(n)])
    assert np.allclose(out[:n], b @ psi, atol=1e-10)


def test_walk_examples():
    assert np.allclose(walk_operator(np.eye(2)), np.eye(4))
    assert np.allclose(walk_operator(np.zeros((1, 1))), [[0, -1], [1, 0]])
    with pytest.raises(NotHermitian):
        walk_operator([[0, 1], [0, 0]])
    with pytest.raises(NotContraction):
        walk_operator(2 * np.eye(2))


@pytest.mark.parametrize("seed", range(5))
def test_walk_power_blocks(seed):
    rng = np.random.default_rng(seed)
    n = 4
    h = random_hermitian_contraction(rng, n)
    walk = walk_operator(h)
    s = spectral_apply(h, lambda x: np.sqrt(1 - x**2))
    for k in range(1, 9):
        lk = np.linalg.matrix_power(walk, k)
        t_k = spectral_apply(h, lambda x: np.cos(k * np.arccos(np.clip(x, -1, 1))))
        assert np.linalg.norm(lk[:n, :n] - t_k, 2) <= 1e-9
        assert np.linalg.norm(lk[n:, :n] - s @ chebyshev_U(k - 1, h), 2) <= 1e-9


def test_chebyshev_examples():
    h = np.diag([0.5, -1.0])
    assert np.allclose(chebyshev_T(0, h), np.eye(2))
    assert np.allclose(chebyshev_T(1, h), h)
    assert np.allclose(chebyshev_T(2, h), np.diag([-0.5, 1]))
    assert np.allclose(chebyshev_U(-1, h), 0)
    assert np.allclose(chebyshev_U(1, h), 2 * h)


@pytest.mark.parametrize("seed", range(3))
def test_chebyshev_against_trig_oracle(seed):
    h = random_hermitian_contraction(np.random.default_rng(seed), 5, unit=True)
    for k in range(8):
        theta_fn = lambda x: np.arccos(np.clip(x, -1, 1))  # noqa: E731
        t_k = spectral_apply(h, lambda x: np.cos(k * theta_fn(x)))
        assert np.linalg.norm(chebyshev_T(k, h) - t_k, 2) <= 1e-9
    terms = even_chebyshev_terms(h, 4)
    for i, t in enumerate(terms):
        assert np.allclose(t, chebyshev_T(2 * i, h), atol=1e-12)


def test_chebyshev_weights_examples():
    w, total = chebyshev_weights(1, 2)
    assert w == [0.5, 0.5] and total == 1
    w, total = chebyshev_weights(2, 3)
    assert w == [0.375, 0.5, 0.125] and total == 1
    w, total = chebyshev_weights(2, 2)
    assert total == 0.875
    with pytest.raises(BadTruncation):
        chebyshev_weights(2, 4)
    with pytest.raises(BadTruncation):
        chebyshev_weights(0, 1)


@pytest.mark.parametrize("m0", range(1, 12))
def test_chebyshev_weights_reproduce_power(m0):
    # oracle: expand cos^{2 m0} in cos(2 i theta) on a grid by exact rationals
    w, total = chebyshev_weights(m0, m0 + 1)
    assert total == 1
    exact = [Fraction(math.comb(2 * m0, m0 + i), 4**m0) * (1 if i == 0 else 2) for i in range(m0 + 1)]
    assert w == [float(x) for x in exact]
    theta = np.linspace(0, np.pi, 17)
    series = sum(a * np.cos(2 * i * theta) for i, a in enumerate(w))
    assert np.allclose(series, np.cos(theta) ** (2 * m0), atol=1e-12)


def test_power_approx_error_example():
    assert power_approx_error(np.diag([1.0, 0.0]), 2, 2) == pytest.approx(0.125)
    assert power_approx_error(np.diag([1.0, 0.0]), 2, 3) <= 1e-12


@pytest.mark.parametrize("seed", range(3))
def test_power_approx_error_matches_scalar_oracle(seed):
    h = random_hermitian_contraction(np.random.default_rng(seed), 4)
    values = np.linalg.eigvalsh(h)
    m0, M = 4, 2
    w, _ = chebyshev_weights(m0, M)
    theta = np.arccos(np.clip(values, -1, 1))
    scalar = np.abs(values ** (2 * m0) - sum(a * np.cos(2 * i * theta) for i, a in enumerate(w)))
    assert power_approx_error(h, m0, M) == pytest.approx(scalar.max(), abs=1e-10)
