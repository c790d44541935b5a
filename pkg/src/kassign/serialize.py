"""JSON encodings shared by the command line and tests.

Scalars are written as ``"p/q"`` strings and read from either strings or
JSON numbers (decimal numbers are read exactly).  Matrix positions in JSON
are 1-based; the library itself is 0-based.

Input documents::

    CostMatrix / RateMatrix   {"rows": m, "cols": n, "entries": [[scalar, ...], ...]}
    RankOneRates              {"r": [scalar, ...], "c": [scalar, ...]}

A RateMatrix may also be given as RankOneRates, meaning a_ij = r_i c_j.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .arith import ModScalar, format_rational, parse_rational
from .errors import DomainError, KAssignError


class MalformedInput(KAssignError, ValueError):
    """Input is not valid JSON or does not match the expected document shape."""


def loads(text: str):
    try:
        return json.loads(text, parse_float=Fraction, parse_int=Fraction)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc}") from exc


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True) + "\n"


def _scalar(x) -> Fraction:
    if isinstance(x, (Fraction, str)) and not isinstance(x, bool):
        try:
            return parse_rational(x)
        except DomainError as exc:
            raise MalformedInput(str(exc)) from exc
    raise MalformedInput(f"expected a number or 'p/q' string, got {x!r}")


def _vector(obj, name) -> list[Fraction]:
    if not isinstance(obj, list) or not obj:
        raise MalformedInput(f"{name!r} must be a nonempty list")
    return [_scalar(x) for x in obj]


def _int(obj, name) -> int:
    if not isinstance(obj, Fraction) or obj.denominator != 1:
        raise MalformedInput(f"{name!r} must be an integer")
    return int(obj)


def parse_cost_matrix(doc) -> list[list[Fraction]]:
    if not isinstance(doc, dict) or "entries" not in doc:
        raise MalformedInput('matrix document needs an "entries" field')
    entries = doc["entries"]
    if not isinstance(entries, list) or not entries or not all(isinstance(r, list) for r in entries):
        raise MalformedInput('"entries" must be a nonempty list of rows')
    X = [[_scalar(x) for x in row] for row in entries]
    n = len(X[0])
    if n == 0 or any(len(row) != n for row in X):
        raise MalformedInput("matrix rows must be nonempty and of equal length")
    if "rows" in doc and _int(doc["rows"], "rows") != len(X):
        raise MalformedInput(f'"rows" says {doc["rows"]} but entries has {len(X)} rows')
    if "cols" in doc and _int(doc["cols"], "cols") != n:
        raise MalformedInput(f'"cols" says {doc["cols"]} but entries has {n} columns')
    return X


def parse_rank_one(doc) -> tuple[list[Fraction], list[Fraction]]:
    if not isinstance(doc, dict) or "r" not in doc or "c" not in doc:
        raise MalformedInput('rates document needs "r" and "c" fields')
    r, c = _vector(doc["r"], "r"), _vector(doc["c"], "c")
    if not all(x > 0 for x in r + c):
        raise DomainError("rates must be positive")
    return r, c


def parse_rate_matrix(doc) -> list[list[Fraction]]:
    if isinstance(doc, dict) and "entries" not in doc and "r" in doc:
        r, c = parse_rank_one(doc)
        return [[ri * cj for cj in c] for ri in r]
    A = parse_cost_matrix(doc)
    if not all(a > 0 for row in A for a in row):
        raise DomainError("rates must be positive")
    return A


def scalar_out(x):
    if isinstance(x, ModScalar):
        return str(x.residue)
    if isinstance(x, float):
        return x
    return format_rational(x)


def matrix_out(X) -> dict:
    return {"rows": len(X), "cols": len(X[0]), "entries": [[scalar_out(x) for x in row] for row in X]}


def positions_out(cells) -> list[list[int]]:
    return [[i + 1, j + 1] for i, j in cells]


def indices_out(indices) -> list[int]:
    return sorted(i + 1 for i in indices)
