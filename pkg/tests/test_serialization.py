import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randutil import random_program_inputs
from swpdqc.errors import DimensionMismatch, InvalidInput
from swpdqc.serialization import (
    decode_complex,
    decode_matrix,
    encode_matrix,
    load_matrix,
    load_problem,
    load_program,
    program_to_json,
)
from swpdqc.simulator import LcuProgram

DATA = __import__("pathlib").Path(__file__).resolve().parent.parent / "data"


def test_decode_complex_forms():
    assert decode_complex(2) == 2
    assert decode_complex([0.5, -1]) == 0.5 - 1j
    for bad in (True, "1", [1, 2, 3], None):
        with pytest.raises(InvalidInput):
            decode_complex(bad)


def test_decode_matrix_errors():
    with pytest.raises(InvalidInput):
        decode_matrix([])
    with pytest.raises(InvalidInput):
        decode_matrix([[1, 2], [3]])


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 6))
def test_matrix_round_trip(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    back = decode_matrix(json.loads(json.dumps(encode_matrix(a))))
    assert np.abs(back - a).max() <= 1e-12


@pytest.mark.parametrize("seed", range(5))
def test_program_round_trip(seed, tmp_path):
    rng = np.random.default_rng(seed)
    weights, ops, times, psi = random_program_inputs(rng)
    program = LcuProgram.build(weights, ops, times=times, order=rng.permutation(len(ops)))
    path = tmp_path / "prog.json"
    path.write_text(json.dumps(program_to_json(program, psi)))
    loaded, psi2 = load_program(path)
    assert loaded.order == program.order and loaded.times == program.times
    assert loaded.layout == program.layout
    for a, b in zip(loaded.operators, program.operators):
        assert np.abs(a - b).max() <= 1e-12
    assert np.abs(psi2 - psi).max() <= 1e-12


def test_load_sample_files():
    program, psi = load_program(DATA / "half_identity.json")
    assert program.M == 2 and np.allclose(psi, [1 / math.sqrt(2)] * 2)
    assert load_matrix(DATA / "identity.json").shape == (2, 2)
    problem, overrides = load_problem(DATA / "ground_state_diag.json")
    assert overrides == {"m0": 1, "M": 2}
    assert problem.gap == pytest.approx(1)


def test_load_errors(tmp_path):
    with pytest.raises(InvalidInput):
        load_program(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InvalidInput):
        load_program(bad)
    bad.write_text(json.dumps({"weights": [1]}))
    with pytest.raises(InvalidInput, match="operators"):
        load_program(bad)
    bad.write_text(json.dumps({"weights": [1], "operators": [[[1, 0], [0, 1]]], "initial_state": [1, 0], "n": 3}))
    with pytest.raises(DimensionMismatch):
        load_program(bad)
