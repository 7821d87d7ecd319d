"""JSON tensor files: structure constants and 2-, 3- and 4-forms.

Rational values are written as ``"p/q"`` strings so exactness survives the
file boundary; float values are written as JSON numbers.  Antisymmetric
kinds store only strictly increasing index tuples, symmetric 2-forms only
``i <= j``.
"""

from __future__ import annotations

import itertools
import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import exact
from .structure import FLOAT, RATIONAL, StructureConstants

STRUCTURE = "structure-constants"
FORM = "form"


def value_to_json(v, scalar: str):
    if scalar == RATIONAL:
        v = Fraction(v)
        return f"{v.numerator}/{v.denominator}"
    return float(v)


def value_from_json(v, scalar: str):
    if scalar == RATIONAL:
        if isinstance(v, float):
            raise ValueError(f"rational file holds a float value {v!r}")
        return Fraction(v)
    return float(v)


def _perm_parity(seq) -> int:
    sign = 1
    seq = list(seq)
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                sign = -sign
    return sign


# ------------------------------------------------------------------ emitting

def structure_to_json(sc: StructureConstants) -> dict:
    return {
        "name": sc.name,
        "dim": sc.dim,
        "scalar": sc.scalar,
        "kind": STRUCTURE,
        "entries": [[i, j, k, value_to_json(v, sc.scalar)] for i, j, k, v in sc.entries],
        "metadata": sc.metadata,
    }


def form_to_json(name: str, array, degree: int | None = None, symmetric: bool | None = None,
                 metadata: dict | None = None) -> dict:
    """Serialize a dense form.  Degree 3 and 4 forms must be totally antisymmetric."""
    a = np.asarray(array)
    degree = a.ndim if degree is None else degree
    if a.ndim != degree or degree not in (2, 3, 4) or len(set(a.shape)) != 1:
        raise ValueError(f"form must be a square array of degree 2, 3 or 4, got shape {a.shape}")
    d = a.shape[0]
    scalar = RATIONAL if a.dtype == object or a.dtype.kind in "iu" else FLOAT
    if scalar == RATIONAL:
        a = exact.fractions(a)
    out = {"name": name, "dim": d, "scalar": scalar, "kind": FORM, "degree": degree}
    if degree == 2:
        if symmetric is None:
            symmetric = bool(np.all(a == a.T))
        out["symmetric"] = symmetric
        idx = ((i, j) for i in range(d) for j in range(i if symmetric else 0, d))
    else:
        _check_antisymmetric(a)
        idx = itertools.combinations(range(d), degree)
    out["entries"] = [[*t, value_to_json(a[t], scalar)] for t in idx if a[t] != 0]
    out["metadata"] = dict(metadata or {})
    return out


def _check_antisymmetric(a: np.ndarray) -> None:
    for perm in itertools.permutations(range(a.ndim)):
        sign = _perm_parity(perm)
        diff = a - sign * a.transpose(perm)
        if a.dtype == object:
            bad = np.any(diff != 0)
        else:
            bad = np.abs(diff).max(initial=0.0) > 1e-12 * max(1.0, np.abs(a).max(initial=0.0))
        if bad:
            raise ValueError("form is not totally antisymmetric")


# ------------------------------------------------------------------ parsing

def structure_from_json(data: dict) -> StructureConstants:
    _require(data, STRUCTURE)
    scalar = data["scalar"]
    d = int(data["dim"])
    brackets: dict = {}
    for row in data["entries"]:
        if len(row) != 4:
            raise ValueError(f"structure-constant entry needs 4 fields, got {row!r}")
        i, j, k, v = int(row[0]), int(row[1]), int(row[2]), value_from_json(row[3], scalar)
        if not i < j:
            raise ValueError(f"structure-constant entry indices must satisfy i < j, got {row!r}")
        brackets.setdefault((i, j), {})[k] = v
    return StructureConstants.from_brackets(data.get("name", "unnamed"), d, brackets, scalar,
                                            data.get("metadata") or {})


def form_from_json(data: dict) -> np.ndarray:
    _require(data, FORM)
    scalar = data["scalar"]
    d = int(data["dim"])
    degree = int(data["degree"])
    if degree not in (2, 3, 4):
        raise ValueError(f"unsupported form degree {degree}")
    if scalar == RATIONAL:
        a = np.empty((d,) * degree, dtype=object)
        a[...] = Fraction(0)
    else:
        a = np.zeros((d,) * degree)
    symmetric = bool(data.get("symmetric", False))
    for row in data["entries"]:
        if len(row) != degree + 1:
            raise ValueError(f"form entry needs {degree + 1} fields, got {row!r}")
        idx = tuple(int(x) for x in row[:-1])
        v = value_from_json(row[-1], scalar)
        if degree == 2:
            a[idx] = v
            if symmetric:
                a[idx[::-1]] = v
            continue
        if list(idx) != sorted(set(idx)):
            raise ValueError(f"antisymmetric entry indices must increase strictly, got {row!r}")
        for perm in itertools.permutations(range(degree)):
            a[tuple(idx[p] for p in perm)] = _perm_parity(perm) * v
    return a


def _require(data: dict, kind: str) -> None:
    if data.get("kind") != kind:
        raise ValueError(f"expected a {kind} file, got kind {data.get('kind')!r}")
    if data.get("scalar") not in (RATIONAL, FLOAT):
        raise ValueError(f"unknown scalar {data.get('scalar')!r}")


# ------------------------------------------------------------------ files

def dumps(data: dict) -> str:
    return json.dumps(data, indent=1, sort_keys=False)


def write(path, data: dict) -> None:
    Path(path).write_text(dumps(data) + "\n")


def read(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ValueError(f"{path}: not valid JSON ({e})") from None


def load_structure(path) -> StructureConstants:
    return structure_from_json(read(path))


def load_form(path) -> np.ndarray:
    return form_from_json(read(path))
