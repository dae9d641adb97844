"""Random instances shared by the test modules."""

import numpy as np


def complex_normal(rng, shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def random_unitary(rng, n):
    q, r = np.linalg.qr(complex_normal(rng, (n, n)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_hermitian(rng, n):
    a = complex_normal(rng, (n, n))
    return (a + a.conj().T) / 2


def random_contraction(rng, n, kind="generic"):
    """Contraction with norm in (0, 1]; ``kind`` selects a strict, unit-norm or rank-deficient case."""
    a = complex_normal(rng, (n, n))
    if kind == "singular" and n > 1:
        u, s, vh = np.linalg.svd(a)
        s[rng.integers(1, n) :] = 0
        a = (u * s) @ vh
    norm = np.linalg.norm(a, 2)
    if kind == "unit":
        return a / norm
    return a / (norm * rng.uniform(1.0, 2.0))


def random_hermitian_contraction(rng, n, unit=False):
    h = random_hermitian(rng, n)
    return h / (np.linalg.norm(h, 2) * (1.0 if unit else rng.uniform(1.0, 1.5)))


def random_state(rng, n):
    v = complex_normal(rng, n)
    return v / np.linalg.norm(v)


def random_program_inputs(rng, max_M=4, max_n=3):
    """Weights, operators and a state for a random subwave-projection program."""
    M = int(rng.integers(1, max_M + 1))
    n = int(rng.integers(0, max_n + 1))
    dim = 2**n
    weights = rng.uniform(0.05, 1.0, M)
    kinds = ["generic", "unit", "singular"]
    ops = [random_contraction(rng, dim, kinds[rng.integers(0, 3)]) for _ in range(M)]
    times = rng.uniform(0.5, 3.0, M)
    return weights, ops, times, random_state(rng, dim)
