"""JSON interchange for symbols, matrices, fields and factor families.

Complex numbers are [re, im] pairs everywhere; entry lists are row-major in
the package's fixed index orders.  Schemas:

* matrix        {"kind": "matrix",  "dims": [rows, cols],   "entries": [[re, im], ...]}
* Schur kernel  {"kind": "schur",   "dims": [n1, n2, n3],   "entries": ...}
* general       {"kind": "general", "dims": [d1, d2, d3],   "entries": ...}
                 entries in the 6-index order (a1, b1, a2, b2, a3, b3)
* pair symbol   {"dims": [da, db], "entries": ...}           4-index (p, q, r, s)
* family        {"count": m, "a": [pair...], "b": [pair...]} (optional "dims" for m = 0)
* vector field  {"dims": [na, nb], "k": k, "vectors": ...}
"""

from __future__ import annotations

import json

import numpy as np

from .factorize import FactorFamily, VectorField
from .multiplier import PairSymbol
from .symbols import SchurSymbol, Symbol3


class ParseError(ValueError):
    """Malformed input file or schema violation; carries a position string."""

    def __init__(self, message: str, position: str = ""):
        super().__init__(f"{message}" + (f" (at {position})" if position else ""))
        self.position = position


def load_json_file(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc.msg}",
                         position=f"line {exc.lineno}, column {exc.colno}") from exc


def complex_to_pairs(arr: np.ndarray) -> list:
    flat = np.asarray(arr, dtype=np.complex128).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in flat]


def pairs_to_complex(entries, count: int, where: str) -> np.ndarray:
    if not isinstance(entries, list) or len(entries) != count:
        got = len(entries) if isinstance(entries, list) else type(entries).__name__
        raise ParseError(f"expected {count} [re, im] entries, got {got}", position=where)
    out = np.empty(count, dtype=np.complex128)
    for i, pair in enumerate(entries):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ParseError("entry is not an [re, im] pair", position=f"{where}[{i}]")
        try:
            out[i] = complex(float(pair[0]), float(pair[1]))
        except (TypeError, ValueError) as exc:
            raise ParseError(f"non-numeric entry: {exc}", position=f"{where}[{i}]") from exc
    if not np.all(np.isfinite(out)):
        raise ParseError("non-finite entry", position=where)
    return out


def _dims(obj, key: str, length: int, where: str) -> tuple[int, ...]:
    dims = obj.get(key)
    if (not isinstance(dims, list) or len(dims) != length
            or not all(isinstance(d, int) and d > 0 for d in dims)):
        raise ParseError(f"'{key}' must be {length} positive integers", position=where)
    return tuple(dims)


def matrix_from_json(obj, where: str = "matrix") -> np.ndarray:
    if not isinstance(obj, dict) or obj.get("kind") != "matrix":
        raise ParseError("expected an object with kind 'matrix'", position=where)
    r, c = _dims(obj, "dims", 2, where)
    flat = pairs_to_complex(obj.get("entries"), r * c, f"{where}.entries")
    return flat.reshape(r, c)


def matrix_to_json(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    return {"kind": "matrix", "dims": [int(m.shape[0]), int(m.shape[1])],
            "entries": complex_to_pairs(m)}


def symbol_from_json(obj, where: str = "symbol"):
    """Parse either symbol kind; returns SchurSymbol or Symbol3."""
    if not isinstance(obj, dict):
        raise ParseError("expected a JSON object", position=where)
    kind = obj.get("kind")
    if kind == "schur":
        n1, n2, n3 = _dims(obj, "dims", 3, where)
        flat = pairs_to_complex(obj.get("entries"), n1 * n2 * n3, f"{where}.entries")
        return SchurSymbol(flat.reshape(n1, n2, n3))
    if kind == "general":
        d1, d2, d3 = _dims(obj, "dims", 3, where)
        count = (d1 * d2 * d3) ** 2
        flat = pairs_to_complex(obj.get("entries"), count, f"{where}.entries")
        return Symbol3(flat.reshape(d1, d1, d2, d2, d3, d3))
    raise ParseError(f"unknown symbol kind {kind!r}", position=where)


def schur_to_json(s: SchurSymbol) -> dict:
    return {"kind": "schur", "dims": list(s.dims), "entries": complex_to_pairs(s.data)}


def symbol3_to_json(phi: Symbol3) -> dict:
    return {"kind": "general", "dims": list(phi.dims), "entries": complex_to_pairs(phi.data)}


def _pair_from_json(obj, where: str) -> PairSymbol:
    if not isinstance(obj, dict):
        raise ParseError("pair symbol must be an object", position=where)
    da, db = _dims(obj, "dims", 2, where)
    flat = pairs_to_complex(obj.get("entries"), (da * db) ** 2, f"{where}.entries")
    return PairSymbol(flat.reshape(da, da, db, db))


def _pair_to_json(p: PairSymbol) -> dict:
    return {"dims": list(p.leg_dims), "entries": complex_to_pairs(p.data)}


def family_from_json(obj, where: str = "family") -> FactorFamily:
    if not isinstance(obj, dict) or not isinstance(obj.get("count"), int):
        raise ParseError("expected an object with integer 'count'", position=where)
    count = obj["count"]
    a_raw = obj.get("a")
    b_raw = obj.get("b")
    if not isinstance(a_raw, list) or not isinstance(b_raw, list) \
            or len(a_raw) != count or len(b_raw) != count:
        raise ParseError("'a' and 'b' must be lists of length 'count'", position=where)
    a_list = tuple(_pair_from_json(p, f"{where}.a[{i}]") for i, p in enumerate(a_raw))
    b_list = tuple(_pair_from_json(p, f"{where}.b[{i}]") for i, p in enumerate(b_raw))
    if count > 0:
        d1, d2 = a_list[0].leg_dims
        _, d3 = b_list[0].leg_dims
        dims = (d1, d2, d3)
    else:
        dims = tuple(_dims(obj, "dims", 3, where)) if "dims" in obj else (1, 1, 1)
    try:
        return FactorFamily(a_list=a_list, b_list=b_list, dims=dims)
    except ValueError as exc:
        raise ParseError(f"inconsistent family: {exc}", position=where) from exc


def family_to_json(f: FactorFamily) -> dict:
    return {"count": f.count, "dims": list(f.dims),
            "a": [_pair_to_json(p) for p in f.a_list],
            "b": [_pair_to_json(p) for p in f.b_list]}


def vector_field_from_json(obj, where: str = "field") -> VectorField:
    if not isinstance(obj, dict):
        raise ParseError("expected a JSON object", position=where)
    na, nb = _dims(obj, "dims", 2, where)
    k = obj.get("k")
    if not isinstance(k, int) or k < 0:
        raise ParseError("'k' must be a nonnegative integer", position=where)
    flat = pairs_to_complex(obj.get("vectors"), na * nb * k, f"{where}.vectors")
    return VectorField(flat.reshape(na, nb, k))


def vector_field_to_json(v: VectorField) -> dict:
    return {"dims": list(v.grid_dims), "k": v.k, "vectors": complex_to_pairs(v.vectors)}
