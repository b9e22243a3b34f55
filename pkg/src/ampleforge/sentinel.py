"""The minus-infinity sentinel for identically-vanishing regularity.

An enumerated value, never a number: comparisons place it below every int
and arithmetic with it saturates.
"""

from __future__ import annotations


class _NegInf:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __lt__(self, other) -> bool:
        return other is not self

    def __le__(self, other) -> bool:
        return True

    def __gt__(self, other) -> bool:
        return False

    def __ge__(self, other) -> bool:
        return other is self

    def __eq__(self, other) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash("NEG_INF")

    def __add__(self, other):
        return self

    __radd__ = __add__
    __sub__ = __add__

    def __neg__(self):
        raise ArithmeticError("negating the -inf sentinel is not meaningful")

    def __repr__(self) -> str:
        return "-inf"


NEG_INF = _NegInf()


def sat_max(*values):
    """Max that tolerates the sentinel (returns NEG_INF for empty input)."""
    out = NEG_INF
    for v in values:
        if out is NEG_INF or (v is not NEG_INF and v > out):
            out = v
    return out


def as_jsonable(v):
    return "-inf" if v is NEG_INF else v
