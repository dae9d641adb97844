"""
JSON encoding of matrices and vectors, and loaders for program and problem files.

A complex scalar is ``[re, im]`` (a bare real number is also accepted on
input), a matrix is a list of rows and a vector a flat list.
"""

from __future__ import annotations

import json
import os
from typing import Any

import numpy as np
import numpy.typing as npt

from .errors import DimensionMismatch, InvalidInput
from .gtc import GroundStateProblem
from .linalg import normalize
from .simulator import LcuProgram


def encode_complex(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def encode_vector(v: npt.ArrayLike) -> list[list[float]]:
    return [encode_complex(z) for z in np.asarray(v).ravel()]


def encode_matrix(a: npt.ArrayLike) -> list[list[list[float]]]:
    return [encode_vector(row) for row in np.asarray(a)]


def decode_complex(x: Any) -> complex:
    if isinstance(x, bool):
        raise InvalidInput(f"not a number: {x!r}")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(isinstance(c, (int, float)) for c in x):
        return complex(x[0], x[1])
    raise InvalidInput(f"cannot read {x!r} as a complex number; use [re, im]")


def decode_vector(obj: Any) -> np.ndarray:
    if not isinstance(obj, list):
        raise InvalidInput("a vector must be a JSON array")
    return np.array([decode_complex(x) for x in obj], dtype=np.complex128)


def decode_matrix(obj: Any) -> np.ndarray:
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise InvalidInput("a matrix must be a non-empty array of rows")
    rows = [decode_vector(r) for r in obj]
    if len({r.size for r in rows}) != 1:
        raise InvalidInput("matrix rows have different lengths")
    return np.vstack(rows)


def read_json(source: str | os.PathLike | dict) -> Any:
    if isinstance(source, dict):
        return source
    try:
        with open(source) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidInput(f"cannot read {source}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{source} is not valid JSON: {exc}") from None


def _require(data: dict, key: str) -> Any:
    if key not in data:
        raise InvalidInput(f"missing field {key!r}")
    return data[key]


def load_matrix(source) -> np.ndarray:
    """A matrix file holds either the bare matrix or ``{"matrix": ...}``."""
    data = read_json(source)
    if isinstance(data, dict):
        data = _require(data, "matrix")
    return decode_matrix(data)


def load_program(source) -> tuple[LcuProgram, np.ndarray]:
    """Read a program file; returns the program and its initial work state.

    Required fields are ``weights``, ``operators`` and ``initial_state``.
    ``m``, ``p`` (default 1), ``n``, ``times`` (default all 1) and ``order``
    (default identity) are optional; ``m`` and ``n`` are checked when given.
    """
    data = read_json(source)
    if not isinstance(data, dict):
        raise InvalidInput("a program file must hold a JSON object")
    operators = [decode_matrix(b) for b in _require(data, "operators")]
    weights = [float(c) for c in _require(data, "weights")]
    psi = decode_vector(_require(data, "initial_state"))
    p = int(data.get("p", 1))
    program = LcuProgram.build(
        weights=weights,
        operators=operators,
        times=data.get("times"),
        order=data.get("order"),
        m=data.get("m"),
        p=p,
    )
    if "n" in data and int(data["n"]) != program.layout.n:
        raise DimensionMismatch(f"n = {data['n']} but operators act on {program.layout.n} qubits")
    return program, psi


def program_to_json(program: LcuProgram, psi: npt.ArrayLike) -> dict:
    lay = program.layout
    return {
        "m": lay.m,
        "p": lay.p,
        "n": lay.n,
        "weights": list(program.weights),
        "operators": [encode_matrix(b) for b in program.operators],
        "times": list(program.times),
        "order": list(program.order),
        "initial_state": encode_vector(psi),
    }


def load_problem(source) -> tuple[GroundStateProblem, dict]:
    """Read a ground-state problem file.

    Returns the problem and the overrides ``{"m0": ..., "M": ...}`` (values
    may be ``None``). ``gap`` and ``phi0`` may be supplied; otherwise they
    are measured.
    """
    data = read_json(source)
    if not isinstance(data, dict):
        raise InvalidInput("a problem file must hold a JSON object")
    trial = data.get("trial_state")
    if trial is not None:
        trial = normalize(decode_vector(trial))
    problem = GroundStateProblem.create(
        h_tilde=decode_matrix(_require(data, "hamiltonian")),
        e_bound=float(_require(data, "E")),
        epsilon=float(_require(data, "epsilon")),
        trial=trial,
        gap=data.get("gap"),
        phi0=data.get("phi0"),
    )
    overrides = {"m0": data.get("m0_override"), "M": data.get("M_override")}
    return problem, overrides
