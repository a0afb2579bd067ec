"""JSON schemas for operators.

Finite:  ``{"kind": "finite", "dim": d, "points": [{"x": [...], "xstar": [...]}, ...]}``
Linear:  ``{"kind": "linear", "dim": d, "basis": [[x..., xstar...], ...]}``
Matrix:  ``{"kind": "matrix", "dim": d, "matrix": [[...], ...]}``
Affine:  a linear or matrix object with ``"base": {"x": [...], "xstar": [...]}``
"""

from __future__ import annotations

import json

import numpy as np

from .finite_op import FiniteOperator, Pair
from .linear_rel import AffineRelation, LinearRelation


class ParseError(ValueError):
    """Raised for operator files that do not follow the schemas."""


def load_operator(data):
    """Build an operator from a parsed JSON object."""
    try:
        kind = data["kind"]
        d = int(data["dim"])
        if kind == "finite":
            return FiniteOperator([Pair.from_dict(p) for p in data["points"]],
                                  dim=d)
        if kind == "linear":
            rows = data.get("basis", [])
            rel = LinearRelation.from_basis(rows, d) if len(rows) else \
                LinearRelation.zero(d)
        elif kind == "matrix":
            rel = LinearRelation.from_matrix(data["matrix"])
            if rel.dim != d:
                raise ParseError(f"matrix is {rel.dim}x{rel.dim}, dim is {d}")
        else:
            raise ParseError(f"unknown operator kind {kind!r}")
        if "base" in data:
            return AffineRelation(Pair.from_dict(data["base"]), rel)
        return rel
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"invalid operator: {exc}") from exc


def loads(text: str):
    try:
        return load_operator(json.loads(text))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


def dumps(obj) -> str:
    """Deterministic JSON text for an operator or report."""
    data = obj.to_dict() if hasattr(obj, "to_dict") else obj
    return json.dumps(data, indent=2, allow_nan=False, default=_default) + "\n"


def _default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"{type(o).__name__} is not JSON serializable")
