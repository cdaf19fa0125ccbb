"""Exact number kernel.

Rationals are GMP rationals (``gmpy2.mpq``), always kept in lowest terms.
Lacunary numbers ``sum c * b**(-a_n)`` are represented by their parameters
and evaluated through certified truncations ``[S_N, S_N + tail_N]``.
Nothing in this module touches floating point.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Union

import gmpy2
from gmpy2 import mpq, mpz

from .errors import AmbiguousDistance, InvalidSpec, PrecisionExhausted

BigRat = type(mpq(0))
RationalLike = Union[int, str, Fraction, "mpq"]

INF = math.inf

#: Exponents beyond this many base-b digits are never materialised; the tail
#: bound is clamped to ``b**(-MAX_EXPONENT)`` instead (still a valid majorant).
MAX_EXPONENT = 1 << 20

#: Extra deepening levels tried before an ambiguous enclosure is surfaced.
DEFAULT_MAX_DEEPEN = 12


def as_rat(value: RationalLike) -> mpq:
    """Coerce ints, fractions, ``"p/q"`` strings and mpq values to mpq."""
    if isinstance(value, BigRat):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (int, type(mpz(0)))):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        f = Fraction(value.strip())
        return mpq(f.numerator, f.denominator)
    if isinstance(value, float):
        raise TypeError("floats are not accepted as exact rationals; pass a string or Fraction")
    raise TypeError(f"cannot interpret {value!r} as a rational")


def format_rat(value) -> str:
    """Canonical ``"p/q"`` string (denominator always written)."""
    if value == INF:
        return "inf"
    r = as_rat(value)
    return f"{r.numerator}/{r.denominator}"


def floor_rat(r: mpq) -> mpz:
    return r.numerator // r.denominator


def ceil_rat(r: mpq) -> mpz:
    return -((-r.numerator) // r.denominator)


# ---------------------------------------------------------------------------
# Exponent rules


@dataclass(frozen=True)
class Explicit:
    """A finite list of exponents, optionally continued by ``a_{n+1} = ceil(ratio * a_n)``.

    The declared ratio records the limit claim ``a_{n+1}/a_n -> ratio``, which
    no finite prefix can verify.
    """

    terms: tuple[int, ...]
    ratio: mpq | None = None

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(int(t) for t in self.terms))
        if self.ratio is not None:
            object.__setattr__(self, "ratio", as_rat(self.ratio))
            if self.ratio <= 1:
                raise InvalidSpec("extension ratio must exceed 1")
        if not self.terms:
            raise InvalidSpec("explicit rule needs at least one exponent")

    def term(self, n: int) -> int:
        if n <= len(self.terms):
            return self.terms[n - 1]
        if self.ratio is None:
            raise PrecisionExhausted(
                f"precision exhausted: explicit exponent list has {len(self.terms)} terms, index {n} requested"
            )
        a = self.terms[-1]
        for _ in range(n - len(self.terms)):
            a = max(a + 1, int(ceil_rat(self.ratio * a)))
        return a

    @property
    def limit_ratio(self):
        return self.ratio


@dataclass(frozen=True)
class GeometricCeil:
    """``a_n = ceil(alpha * q**n)`` for ``n >= 1``."""

    alpha: mpq
    q: mpq

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_rat(self.alpha))
        object.__setattr__(self, "q", as_rat(self.q))
        if self.alpha <= 0:
            raise InvalidSpec("alpha must be positive")
        if self.q <= 1:
            raise InvalidSpec("growth ratio q must exceed 1")

    def term(self, n: int) -> int:
        return int(ceil_rat(self.alpha * self.q**n))

    @property
    def limit_ratio(self):
        return self.q


@dataclass(frozen=True)
class DoublyExponential:
    """``a_n = outer ** (inner ** n)``; the ratio ``a_{n+1}/a_n`` tends to infinity."""

    outer: int = 2
    inner: int = 2

    def __post_init__(self):
        if self.outer < 2 or self.inner < 2:
            raise InvalidSpec("doubly exponential rule needs outer, inner >= 2")

    def term(self, n: int) -> int:
        e = self.inner**n
        if e > 1 << 16:
            raise PrecisionExhausted(f"precision exhausted: exponent {self.outer}^{e} is not representable")
        return self.outer**e

    @property
    def limit_ratio(self):
        return INF


ExponentRule = Union[Explicit, GeometricCeil, DoublyExponential]


@dataclass(frozen=True)
class LacunarySpec:
    """``zeta = sum_{n>=1} coeff * base**(-a_n)`` with a strictly increasing exponent rule."""

    base: int
    coeff: int
    rule: ExponentRule
    check_terms: int = 8

    def __post_init__(self):
        if self.base < 2:
            raise InvalidSpec("base must be at least 2")
        if not 1 <= self.coeff <= self.base - 1:
            raise InvalidSpec("coefficient must lie in [1, base-1]")
        if self.term(1) < 1:
            raise InvalidSpec("exponents must be positive integers")
        self.check_prefix(self.check_terms)

    def term(self, n: int) -> int:
        if n < 1:
            raise ValueError("exponent index starts at 1")
        return self.rule.term(n)

    def exponents(self, n: int) -> list[int]:
        return [self.term(i) for i in range(1, n + 1)]

    def check_prefix(self, n: int) -> None:
        """Raise InvalidSpec unless a_1 < a_2 < ... < a_n."""
        prev = 0
        for i in range(1, n + 1):
            try:
                a = self.term(i)
            except PrecisionExhausted:
                return
            if a <= prev:
                raise InvalidSpec(f"exponent sequence not strictly increasing at index {i}: {prev} -> {a}")
            prev = a

    @property
    def limit_ratio(self):
        return self.rule.limit_ratio

    def tail_bound(self, depth: int) -> mpq:
        """``c * b**(-a_{N+1}) * (1 - 1/b)**(-1)``."""
        a_next = min(self.term(depth + 1), MAX_EXPONENT)
        return mpq(self.coeff * self.base, (self.base - 1) * mpz(self.base) ** a_next)

    def partial_sum(self, depth: int) -> mpq:
        exps = self.exponents(depth)
        top = exps[-1]
        if top > MAX_EXPONENT:
            raise PrecisionExhausted("precision exhausted: exponent beyond representable range")
        b = mpz(self.base)
        num = sum(b ** (top - a) for a in exps) * self.coeff
        return mpq(num, b**top)

    def depth_for_bits(self, bits: int) -> int:
        """Smallest depth whose tail bound is at most ``2**-bits`` (up to a 2-bit margin)."""
        need = bits + math.log2(2 * self.coeff) + 1
        lb = math.log2(self.base)
        n = 1
        while min(self.term(n + 1), MAX_EXPONENT) * lb < need:
            if self.term(n + 1) >= MAX_EXPONENT:
                raise PrecisionExhausted(f"precision exhausted: cannot reach 2^-{bits} below the exponent cap")
            n += 1
        return n


# ---------------------------------------------------------------------------
# Intervals


@dataclass(frozen=True)
class Interval:
    lo: mpq
    hi: mpq

    def __post_init__(self):
        lo, hi = as_rat(self.lo), as_rat(self.hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, r) -> "Interval":
        r = as_rat(r)
        return cls(r, r)

    @property
    def width(self) -> mpq:
        return self.hi - self.lo

    @property
    def mid(self) -> mpq:
        return (self.lo + self.hi) / 2

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, other) -> bool:
        if isinstance(other, Interval):
            return self.lo <= other.lo and other.hi <= self.hi
        r = as_rat(other)
        return self.lo <= r <= self.hi

    def scale(self, m) -> "Interval":
        m = as_rat(m)
        a, b = self.lo * m, self.hi * m
        return Interval(min(a, b), max(a, b))

    def shift(self, s) -> "Interval":
        s = as_rat(s)
        return Interval(self.lo + s, self.hi + s)

    def __mul__(self, other: "Interval") -> "Interval":
        if not isinstance(other, Interval):
            return self.scale(other)
        ps = (self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi)
        return Interval(min(ps), max(ps))

    def __add__(self, other: "Interval") -> "Interval":
        if not isinstance(other, Interval):
            return self.shift(other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def intersects(self, other: "Interval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def __str__(self):
        return f"[{format_rat(self.lo)}, {format_rat(self.hi)}]"


# ---------------------------------------------------------------------------
# Real handles


class RealHandle:
    """A computable real: an exact rational or a lacunary series.

    Truncations are memoised per depth; the cache is guarded by a lock so a
    handle can be shared between worker threads.
    """

    __slots__ = ("value", "spec", "_cache", "_lock")

    def __init__(self, value: mpq | None = None, spec: LacunarySpec | None = None):
        if (value is None) == (spec is None):
            raise InvalidSpec("RealHandle needs exactly one of value or spec")
        self.value = None if value is None else as_rat(value)
        self.spec = spec
        self._cache: dict[int, Interval] = {}
        self._lock = threading.Lock()

    @classmethod
    def rational(cls, value: RationalLike) -> "RealHandle":
        return cls(value=as_rat(value))

    @classmethod
    def lacunary(cls, spec: LacunarySpec) -> "RealHandle":
        return cls(spec=spec)

    @property
    def is_rational(self) -> bool:
        return self.value is not None

    def truncate(self, depth: int) -> Interval:
        return truncate(self, depth)

    def depth_for_bits(self, bits: int) -> int:
        return 1 if self.is_rational else self.spec.depth_for_bits(bits)

    def enclosure(self, bits: int) -> Interval:
        """Enclosure of width at most ``2**-bits``."""
        return self.truncate(self.depth_for_bits(bits))

    def describe(self) -> str:
        if self.is_rational:
            return f"rational:{format_rat(self.value)}"
        s = self.spec
        rule = s.rule
        if isinstance(rule, GeometricCeil):
            r = f"geom(alpha={format_rat(rule.alpha)},q={format_rat(rule.q)})"
        elif isinstance(rule, Explicit):
            r = "explicit(" + ";".join(map(str, rule.terms))
            r += f",ratio={format_rat(rule.ratio)})" if rule.ratio is not None else ")"
        else:
            r = f"doubly({rule.outer}^{rule.inner}^n)"
        return f"lacunary:b={s.base},c={s.coeff},{r}"

    def __repr__(self):
        return f"RealHandle({self.describe()})"


def truncate(z: RealHandle, depth: int) -> Interval:
    """Certified enclosure ``[S_N, S_N + tail_N]`` of a lacunary number.

    Rational handles return their exact point interval at any depth.
    """
    if depth < 1:
        raise ValueError("truncation depth must be >= 1")
    if z.is_rational:
        return Interval.point(z.value)
    cached = z._cache.get(depth)
    if cached is not None:
        return cached
    s = z.spec.partial_sum(depth)
    iv = Interval(s, s + z.spec.tail_bound(depth))
    with z._lock:
        z._cache.setdefault(depth, iv)
    return iv


def power_enclosure(iv: Interval, j: int) -> Interval:
    """Enclosure of ``{x**j : x in iv}`` by exact endpoint arithmetic."""
    if j < 1:
        raise ValueError("power must be >= 1")
    lo, hi = iv.lo, iv.hi
    if lo >= 0 or j % 2 == 1:
        return Interval(lo**j, hi**j)
    if hi <= 0:
        return Interval(hi**j, lo**j)
    return Interval(mpq(0), max(lo**j, hi**j))


def nearest_int(r) -> mpz:
    """Nearest integer; exact half-integers go to the even neighbour."""
    r = as_rat(r)
    f = floor_rat(r)
    frac = r - f
    if frac < mpq(1, 2):
        return f
    if frac > mpq(1, 2):
        return f + 1
    return f if f % 2 == 0 else f + 1


def nearest_int_dist(r) -> mpq:
    """``||r||``, the distance to the nearest integer."""
    r = as_rat(r)
    return abs(r - nearest_int(r))


class DistEnclosure(NamedTuple):
    interval: Interval
    straddles_half: bool


def dist_enclosure(iv: Interval) -> DistEnclosure:
    """Certified enclosure of ``||x||`` over ``x in iv``.

    Raises AmbiguousDistance when the interval is at least 1/2 wide.
    """
    if iv.width >= mpq(1, 2):
        raise AmbiguousDistance("ambiguous distance: enclosure width >= 1/2")
    dlo, dhi = nearest_int_dist(iv.lo), nearest_int_dist(iv.hi)
    if ceil_rat(iv.lo - mpq(1, 2)) + mpq(1, 2) <= iv.hi:
        return DistEnclosure(Interval(min(dlo, dhi), mpq(1, 2)), True)
    if ceil_rat(iv.lo) <= iv.hi:
        return DistEnclosure(Interval(mpq(0), max(dlo, dhi)), False)
    return DistEnclosure(Interval(min(dlo, dhi), max(dlo, dhi)), False)


class CertifiedRound(NamedTuple):
    """Nearest integer ``y`` to a quantity and the enclosure of ``|t - y|``."""

    y: mpz
    err: Interval


def certified_round(iv: Interval) -> CertifiedRound:
    """Nearest integer of every point in ``iv``, if it is the same for all of them."""
    lo_y, hi_y = nearest_int(iv.lo), nearest_int(iv.hi)
    if lo_y != hi_y:
        raise AmbiguousDistance("ambiguous distance: enclosure straddles a half-integer")
    a, b = abs(iv.lo - lo_y), abs(iv.hi - lo_y)
    if iv.lo <= lo_y <= iv.hi:
        return CertifiedRound(lo_y, Interval(mpq(0), max(a, b)))
    return CertifiedRound(lo_y, Interval(min(a, b), max(a, b)))


def powers_enclosure(z: RealHandle, k: int, depth: int) -> list[Interval]:
    """``[zeta, zeta**2, ..., zeta**k]`` enclosed at one truncation depth."""
    base = truncate(z, depth)
    return [power_enclosure(base, j) for j in range(1, k + 1)]


def isqrt_enclosure(n: int, bits: int) -> Interval:
    """Enclosure of ``sqrt(n)`` of width ``2**-bits`` by integer square roots."""
    scaled = mpz(n) << (2 * bits)
    s = gmpy2.isqrt(scaled)
    d = mpz(1) << bits
    return Interval(mpq(s, d), mpq(s + 1, d))


def depth_schedule(z: RealHandle, bits: int, max_deepen: int = DEFAULT_MAX_DEEPEN):
    """Truncation depths to try: the depth reaching ``bits``, then every second one beyond.

    Rational handles need a single pass. Stops quietly when the exponent rule
    cannot be extended further.
    """
    if z.is_rational:
        yield 1
        return
    start = z.depth_for_bits(bits)
    for extra in range(0, max_deepen + 1, 2):
        depth = start + extra
        try:
            usable = z.spec.term(depth) <= MAX_EXPONENT
        except PrecisionExhausted:
            usable = False
        if not usable:
            if extra == 0:
                raise PrecisionExhausted(f"precision exhausted: depth {depth} exceeds the exponent cap")
            return
        yield depth
