"""Result containers shared by the estimators and the formula calculators."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

from gmpy2 import mpq

FINITE_SCALE = "finite-scale evidence"


def log2_int(n) -> float:
    """``log2(n)`` for a positive big integer, accurate to double precision."""
    n = int(n)
    if n <= 0:
        raise ValueError("log2 of a non-positive integer")
    b = n.bit_length()
    if b <= 1000:
        return math.log2(n)
    shift = b - 64
    return math.log2(n >> shift) + shift


def log2_rat(r) -> float:
    r = mpq(r)
    return log2_int(r.numerator) - log2_int(r.denominator)


def slope(value, x) -> float:
    """``-log(value) / log(x)`` for a positive rational ``value`` and integer ``x >= 2``."""
    return -log2_rat(value) / log2_int(x)


@dataclass(frozen=True)
class Sample:
    scale: int
    value: float
    witness: Any


@dataclass
class ExponentReport:
    kind: str
    k: int
    samples: list[Sample] = field(default_factory=list)
    extrapolated: float | None = None
    caveat: str = FINITE_SCALE
    tolerance: float | None = None
    flags: list[str] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def last_three(self) -> list[float]:
        return [s.value for s in self.samples[-3:]]


INFINITY = "inf"


@dataclass(frozen=True)
class FormulaResult:
    """A closed-form value; ``value`` is an exact rational, ``INFINITY``, or a ``(lo, hi)`` bracket."""

    name: str
    inputs: dict
    value: Any
    regime_note: str
    citation: str
    extra: dict = field(default_factory=dict)

    @property
    def is_bracket(self) -> bool:
        return isinstance(self.value, tuple)


def is_inf(v) -> bool:
    return v == INFINITY or (isinstance(v, float) and math.isinf(v))


__all__ = [
    "ExponentReport", "FormulaResult", "Sample", "INFINITY", "FINITE_SCALE",
    "log2_int", "log2_rat", "slope", "is_inf",
]
