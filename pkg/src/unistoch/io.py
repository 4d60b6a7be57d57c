"""JSON formats for matrices, processes and Kraus sets.

Matrix literals are arrays of rows.  A real entry is a bare number and a
complex entry is a ``[re, im]`` pair; the two may be mixed.  Vectors follow
the same entry rule.
"""
import json
import math
from numbers import Real

import numpy as np

from .core import DimensionError, ValidationError
from .stochastic import Process, TransitionMatrix

__all__ = [
    "parse_matrix",
    "parse_vector",
    "matrix_to_json",
    "vector_to_json",
    "process_from_json",
    "process_to_json",
    "load_json",
]


def _entry(x, where):
    if isinstance(x, bool):
        raise ValidationError(f"{where}: booleans are not matrix entries")
    if isinstance(x, Real):
        return complex(float(x), 0.0)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(
        isinstance(v, Real) and not isinstance(v, bool) for v in x
    ):
        return complex(float(x[0]), float(x[1]))
    raise ValidationError(f"{where}: expected a number or a [re, im] pair, got {x!r}")


def parse_matrix(obj) -> np.ndarray:
    """Matrix literal to ``complex128`` array (``float64`` if every entry is a bare number)."""
    if not isinstance(obj, (list, tuple)) or not obj:
        raise ValidationError("matrix literal must be a non-empty array of rows")
    rows, real = [], True
    for r, row in enumerate(obj):
        if not isinstance(row, (list, tuple)) or not row:
            raise ValidationError(f"row {r}: expected a non-empty array")
        real = real and all(isinstance(x, Real) and not isinstance(x, bool) for x in row)
        rows.append([_entry(x, f"row {r}, column {c}") for c, x in enumerate(row)])
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise DimensionError("matrix literal rows have different lengths")
    m = np.array(rows, dtype=complex)
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix literal contains non-finite entries")
    return m.real.copy() if real else m


def parse_vector(obj) -> np.ndarray:
    if not isinstance(obj, (list, tuple)) or not obj:
        raise ValidationError("vector literal must be a non-empty array")
    real = all(isinstance(x, Real) and not isinstance(x, bool) for x in obj)
    v = np.array([_entry(x, f"component {k}") for k, x in enumerate(obj)], dtype=complex)
    return v.real.copy() if real else v


def _num(x: float):
    x = float(x)
    if not math.isfinite(x):
        raise ValidationError("cannot serialize non-finite value")
    # normalise -0.0 so reports are byte-stable
    return 0.0 if x == 0 else x


def matrix_to_json(m) -> list:
    """Real arrays become bare numbers, complex arrays ``[re, im]`` pairs."""
    m = np.asarray(m)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-D array, got shape {m.shape}")
    if np.iscomplexobj(m):
        return [[[_num(z.real), _num(z.imag)] for z in row] for row in m]
    return [[_num(x) for x in row] for row in m]


def vector_to_json(v) -> list:
    v = np.asarray(v)
    if np.iscomplexobj(v):
        return [[_num(z.real), _num(z.imag)] for z in v]
    return [_num(x) for x in v]


def process_from_json(obj, tol=None) -> Process:
    """Build a :class:`Process` from ``{dim, anchor_time, initial, samples: [{t, gamma}]}``."""
    try:
        dim = int(obj["dim"])
        anchor = float(obj.get("anchor_time", 0.0))
        initial = parse_vector(obj["initial"])
        raw = obj["samples"]
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"process file is missing field {exc}") from None
    samples = []
    for k, s in enumerate(raw):
        g = parse_matrix(s["gamma"])
        if g.shape != (dim, dim):
            raise DimensionError(f"sample {k}: gamma has shape {g.shape}, expected {(dim, dim)}")
        samples.append(TransitionMatrix(g, t=float(s["t"]), anchor_time=anchor, tol=tol))
    if initial.size != dim:
        raise DimensionError(f"initial distribution has {initial.size} entries, expected {dim}")
    return Process(tuple(samples), initial, anchor, tol)


def process_to_json(proc: Process) -> dict:
    return {
        "dim": proc.dim,
        "anchor_time": proc.anchor_time,
        "initial": vector_to_json(proc.initial),
        "samples": [{"t": s.t, "gamma": matrix_to_json(s.gamma)} for s in proc.samples],
    }


def load_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
