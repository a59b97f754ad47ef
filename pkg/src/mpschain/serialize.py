"""Deterministic JSON and binary codecs for the command-line front end.

The JSON writer here exists because repeated runs must produce
byte-identical output: floats are always rendered with 17 significant
digits (enough to round-trip IEEE doubles), negative zero is folded
into zero, and non-finite values are rejected outright.  Complex
numbers are always a two-element [re, im] array.
"""

from __future__ import annotations

import json
import struct

import numpy as np

MAGIC = b"MPSH"


class FormatError(ValueError):
    """Malformed serialized input."""


def format_float(x: float) -> str:
    """17-significant-digit decimal rendering, stable across runs."""
    x = float(x)
    if not np.isfinite(x):
        raise FormatError(f"non-finite value {x!r} cannot be serialized")
    # x + 0.0 folds -0.0 into +0.0 so the sign of zero never leaks out.
    return format(x + 0.0, ".17g")


def encode_complex(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def dumps(obj) -> str:
    """Serialize to JSON with deterministic float formatting.

    Accepts dicts (string keys, insertion order kept), lists/tuples,
    strings, bools, None, ints, floats, and complex values (emitted as
    [re, im]).  numpy scalars and arrays are coerced.
    """
    pieces: list[str] = []
    _write(obj, pieces)
    return "".join(pieces)


def _write(obj, out: list) -> None:
    if isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif obj is None:
        out.append("null")
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_float(float(obj)))
    elif isinstance(obj, (complex, np.complexfloating)):
        _write(encode_complex(obj), out)
    elif isinstance(obj, dict):
        out.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if not isinstance(key, str):
                raise FormatError("JSON object keys must be strings")
            if i:
                out.append(", ")
            out.append(json.dumps(key))
            out.append(": ")
            _write(value, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, value in enumerate(obj):
            if i:
                out.append(", ")
            _write(value, out)
        out.append("]")
    elif isinstance(obj, np.ndarray):
        _write(obj.tolist(), out)
    else:
        raise FormatError(f"cannot serialize {type(obj).__name__}")


# ---------------------------------------------------------------------------
# complex scalars, vectors, matrices


def decode_complex(value) -> complex:
    """Accept a real number or a two-element [re, im] array."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (isinstance(value, (list, tuple)) and len(value) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool)
                    for v in value)):
        return complex(value[0], value[1])
    raise FormatError(f"expected a number or [re, im] pair, got {value!r}")


def encode_vector(vec) -> list:
    return [encode_complex(z) for z in np.asarray(vec, dtype=complex).ravel()]


def decode_vector(value) -> np.ndarray:
    if not isinstance(value, list):
        raise FormatError("expected a JSON array of [re, im] pairs")
    return np.array([decode_complex(v) for v in value], dtype=complex)


def encode_matrix(mat) -> list:
    m = np.atleast_2d(np.asarray(mat, dtype=complex))
    return [[encode_complex(z) for z in row] for row in m]


def decode_matrix(value) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise FormatError("expected a non-empty JSON array of rows")
    rows = []
    width = None
    for row in value:
        if not isinstance(row, list):
            raise FormatError("matrix rows must be JSON arrays")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise FormatError("matrix rows have unequal lengths")
        rows.append([decode_complex(v) for v in row])
    return np.array(rows, dtype=complex)


# ---------------------------------------------------------------------------
# quartets and constraint spaces

_QUARTET_KEYS = ("v0", "v1", "v2", "u")


def encode_quartet(q) -> dict:
    return {key: encode_complex(getattr(q, key)) for key in _QUARTET_KEYS}


def decode_quartet(value):
    from .pauli import PauliQuartet
    if not isinstance(value, dict):
        raise FormatError("expected an object with v0, v1, v2, u")
    missing = [k for k in _QUARTET_KEYS if k not in value]
    if missing:
        raise FormatError(f"quartet is missing {missing}")
    extra = set(value) - set(_QUARTET_KEYS)
    if extra:
        raise FormatError(f"quartet has unknown keys {sorted(extra)}")
    return PauliQuartet(*(decode_complex(value[k]) for k in _QUARTET_KEYS))


def encode_space(space) -> dict:
    return {"basis": [encode_quartet(q) for q in space.basis]}


def decode_space(value):
    from .pauli import CSpace
    if not isinstance(value, dict) or "basis" not in value:
        raise FormatError('expected an object with a "basis" array')
    basis = value["basis"]
    if not isinstance(basis, list):
        raise FormatError('"basis" must be a JSON array')
    return CSpace([decode_quartet(q) for q in basis])


# ---------------------------------------------------------------------------
# binary matrix dump: b"MPSH" | u32 n_sites LE | row-major complex128 LE


def pack_chain(n_sites: int, matrix: np.ndarray) -> bytes:
    m = np.asarray(matrix, dtype="<c16")
    dim = 2 ** n_sites
    if m.shape != (dim, dim):
        raise FormatError(
            f"matrix shape {m.shape} does not match n_sites={n_sites}")
    return MAGIC + struct.pack("<I", n_sites) + m.tobytes(order="C")


def unpack_chain(data: bytes) -> tuple[int, np.ndarray]:
    if len(data) < 8 or data[:4] != MAGIC:
        raise FormatError("missing MPSH header")
    (n_sites,) = struct.unpack("<I", data[4:8])
    dim = 2 ** n_sites
    expected = 8 + 16 * dim * dim
    if len(data) != expected:
        raise FormatError(
            f"expected {expected} bytes for n_sites={n_sites}, "
            f"got {len(data)}")
    flat = np.frombuffer(data, dtype="<c16", offset=8)
    return n_sites, flat.reshape(dim, dim).astype(complex)
