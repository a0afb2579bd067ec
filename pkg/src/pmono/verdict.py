"""Decision records shared by every checker."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Any

import numpy as np


class Decision(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    INCONCLUSIVE = "inconclusive"


@dataclass
class Verdict:
    """Outcome of a check together with what justifies it.

    ``certificate`` is whatever makes a ``FAILS`` re-checkable: an index
    tuple for finite operators, a list of pairs for relations.  ``note``
    carries qualifiers such as ``"sample-verified"`` for one-sided checks.
    """

    decision: Decision
    certificate: Any = None
    value: float = math.nan
    tol: float = 0.0
    note: str = ""
    report: Any = None

    @property
    def holds(self) -> bool:
        return self.decision is Decision.HOLDS

    @property
    def fails(self) -> bool:
        return self.decision is Decision.FAILS

    def to_dict(self) -> dict:
        out = {"decision": self.decision.value,
               "value": jsonable(self.value),
               "tol": jsonable(self.tol)}
        if self.certificate is not None:
            out["certificate"] = jsonable(self.certificate)
        if self.note:
            out["note"] = self.note
        if self.report is not None:
            out["report"] = jsonable(self.report)
        return out


def jsonable(obj):
    """Convert numpy values, pairs and infinities to plain JSON types.

    Infinities become the strings ``"inf"``/``"-inf"``; NaN becomes ``None``.
    """
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if math.isnan(f):
            return None
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [jsonable(t) for t in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(t) for t in obj]
    if isinstance(obj, enum.Enum):
        return obj.value
    return obj


def parse_float(value) -> float:
    """Inverse of the infinity encoding used by :func:`jsonable`."""
    if isinstance(value, str):
        return float(value)
    if value is None:
        return math.nan
    return float(value)


__all__ = ["Decision", "Verdict", "jsonable", "parse_float"]
