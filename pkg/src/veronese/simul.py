"""Simultaneous approximation of ``(zeta, zeta**2, ..., zeta**k)`` by fractions with a common denominator.

``M_x`` denotes ``max_{1<=j<=k} ||zeta**j x||``. Every verdict here is an
exact rational comparison on certified enclosures; the fixed-point kernels
only discard values of ``x`` that provably cannot pass a threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import gcd

import numpy as np
import gmpy2
from gmpy2 import mpq, mpz

from . import kernels
from .contfrac import Decomposition, certified_distance, convergents, decompose, is_convergent
from .errors import AmbiguousDistance, BoxTooLarge, ExactHit, InvalidSpec, PrecisionExhausted
from .exactnum import (
    DEFAULT_MAX_DEEPEN,
    Interval,
    LacunarySpec,
    RealHandle,
    certified_round,
    depth_schedule,
    floor_rat,
    power_enclosure,
    powers_enclosure,
    truncate,
)

SCAN_CAP = 10**6
_UNIT = float(1 << 64)


@dataclass(frozen=True)
class Approximant:
    x: int
    ys: tuple[int, ...]
    errs: tuple[Interval, ...]
    Mx: Interval
    exact_hit: bool
    depth: int


@dataclass
class Lemma2Hit:
    x: int
    decomposition: Decomposition | None
    divides: bool
    convergents_ok: bool
    scaling_ok: bool


@dataclass
class Lemma2Report:
    k: int
    xmax: int
    C: mpq
    hits: list[Lemma2Hit] = field(default_factory=list)
    violations: list[tuple[int, str]] = field(default_factory=list)
    scaling_checks: list[tuple[int, int, bool]] = field(default_factory=list)
    exact_hits: list[int] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


@dataclass
class Lemma3Report:
    k: int
    xmax: int
    exponent: mpq
    small_x: int
    hits: list[tuple[int, int, int, int]] = field(default_factory=list)
    small_x_exceptions: list[tuple[int, int]] = field(default_factory=list)
    violations: list[tuple[int, int]] = field(default_factory=list)


@dataclass
class LiouvilleReport:
    """``families`` holds ``(q**k, N_max)``: every ``N q**k`` with ``N <= N_max`` is a witness."""

    k: int
    xmax: int
    C: mpq
    witness: int | None
    families: list[tuple[int, int]]
    exhaustive: bool
    note: str


# ---------------------------------------------------------------------------
# constants


def _abs_upper(z: RealHandle) -> mpq:
    if z.is_rational:
        return abs(z.value)
    iv = z.enclosure(128)
    return max(abs(iv.lo), abs(iv.hi))


def _dyadic_floor(r: mpq, bits: int = 128) -> mpq:
    return mpq(floor_rat(r * (mpz(1) << bits)), mpz(1) << bits)


def C0(k: int, z: RealHandle, mode: str = "standard", eps=mpq(1, 1000)) -> mpq:
    """Threshold constant of the divisibility check; for irrational ``zeta`` a certified lower bound.

    ``standard``: ``1/(2k) * (1+|zeta|)**(1-k)``.
    ``refined``: ``1/(2 L) - eps`` with ``L = max_j j|zeta|**(j-1)``, and exactly
    ``1/2`` when ``|zeta| < 1/2`` (valid only for large ``x``).
    """
    if k < 1:
        raise InvalidSpec("k must be >= 1")
    a = _abs_upper(z)
    if mode == "standard":
        val = mpq(1, 2 * k) / (1 + a) ** (k - 1)
    elif mode == "refined":
        if a < mpq(1, 2):
            return mpq(1, 2)
        L = max(j * a ** (j - 1) for j in range(1, k + 1))
        val = 1 / (2 * L) - mpq(eps)
        if val <= 0:
            raise InvalidSpec("eps too large for the refined constant")
    else:
        raise InvalidSpec(f"unknown C0 mode {mode!r}")
    return val if z.is_rational else _dyadic_floor(val)


# ---------------------------------------------------------------------------
# single-x evaluation


def _approximant_at(z: RealHandle, k: int, x: int, depth: int) -> Approximant:
    base = truncate(z, depth)
    ys, errs = [], []
    for j in range(1, k + 1):
        r = certified_round(power_enclosure(base, j).scale(x))
        ys.append(int(r.y))
        errs.append(r.err)
    Mx = Interval(max(e.lo for e in errs), max(e.hi for e in errs))
    exact = any(e.hi == 0 for e in errs)
    return Approximant(int(x), tuple(ys), tuple(errs), Mx, exact, depth)


def _start_bits(k: int, x: int) -> int:
    return 2 * (int(x).bit_length() + k.bit_length()) + 64


def scan_Mx(z: RealHandle, k: int, x: int, max_deepen: int = DEFAULT_MAX_DEEPEN) -> Approximant:
    """Certified nearest integers and errors for ``zeta**j x``, ``j = 1..k``.

    Deepens until every error enclosure is narrower than an eighth of its lower
    end or than ``2**-128``. Exact hits are flagged, not raised.
    """
    if k < 1 or x < 1:
        raise ValueError("k and x must be positive")
    tiny = mpq(1, 1 << 128)
    last = None
    for depth in depth_schedule(z, _start_bits(k, x), max_deepen):
        try:
            ap = _approximant_at(z, k, x, depth)
        except AmbiguousDistance:
            continue
        last = ap
        if all(e.width == 0 or e.width * 8 < e.lo or e.width < tiny for e in ap.errs):
            return ap
    if last is not None:
        return last
    raise PrecisionExhausted(f"precision exhausted: nearest integers for x={x} undecided")


def decide_Mx(z: RealHandle, k: int, x: int, test, max_deepen: int = DEFAULT_MAX_DEEPEN, strict: bool = True):
    """Deepen until ``test(Mx)`` returns True or False.

    Returns ``(verdict, approximant)``; with ``strict=False`` an undecided test
    yields ``(None, last approximant)`` instead of raising.
    """
    last = None
    for depth in depth_schedule(z, _start_bits(k, x), max_deepen):
        try:
            ap = _approximant_at(z, k, x, depth)
        except AmbiguousDistance:
            continue
        last = ap
        verdict = test(ap.Mx)
        if verdict is not None:
            return verdict, ap
    if strict:
        raise PrecisionExhausted(f"precision exhausted: comparison for x={x} undecided")
    return None, last


def below_C_over_x(C: mpq, x: int):
    """Test factory for ``M_x < C/x``."""

    def test(M: Interval):
        if M.hi * x < C:
            return True
        if M.lo * x >= C:
            return False
        return None

    return test


def at_most_power(T: mpq, x: int):
    """Test factory for ``M_x <= x**(-T)``, compared as ``M**d * x**p <= 1``."""
    T = mpq(T)
    p, d = int(T.numerator), int(T.denominator)
    xp = mpz(x) ** p

    def test(M: Interval):
        if M.hi**d * xp <= 1:
            return True
        if M.lo**d * xp > 1:
            return False
        return None

    return test


# ---------------------------------------------------------------------------
# range prefilter


def _fixed_point_powers(z: RealHandle, k: int):
    depth = next(depth_schedule(z, 140))
    return kernels.fixed_point_arrays(powers_enclosure(z, k, depth))


def prefilter(z, k, start, stop, threshold_units, workers=1, backend=None):
    """Ascending ``x`` in ``[start, stop)`` whose certified lower bound of ``M_x`` may pass.

    ``threshold_units(x)`` maps a float array of ``x`` to the threshold in
    units of ``2**-64``; a relative slack of ``1e-9`` absorbs float rounding.
    """
    A, W = _fixed_point_powers(z, k)
    out = []
    for x0, m_lo, _ in kernels.iter_mx_bounds(A, W, start, stop, workers=workers, backend=backend):
        xs = np.arange(x0, x0 + m_lo.shape[0], dtype=np.float64)
        keep = m_lo.astype(np.float64) <= threshold_units(xs) * (1 + 1e-9) + 2.0
        out.extend((np.nonzero(keep)[0] + x0).tolist())
    return out


def _check_cap(xmax: int, cap: int):
    if xmax > cap:
        raise BoxTooLarge(f"Xmax={xmax} exceeds the scan cap {cap}")


# ---------------------------------------------------------------------------
# divisibility structure below C0/x


def verify_lemma2(z: RealHandle, k: int, xmax: int, workers: int = 1, cap: int = SCAN_CAP,
                  backend=None) -> Lemma2Report:
    """Scan ``x <= xmax`` with ``M_x < C0/x`` and check the divisibility structure.

    For each qualifying ``x``: the reduced fraction ``y/x = y0/x0`` agrees with
    the convergent decomposition, ``x0**k`` divides ``x``, ``y0**j/x0**j`` is a
    convergent of ``zeta**j``, and ``M_x = N * M_{x0**k}`` for ``x = N x0**k``.
    """
    if k < 2:
        raise InvalidSpec("verify_lemma2 needs k >= 2")
    _check_cap(xmax, cap)
    C = C0(k, z)
    report = Lemma2Report(k, xmax, C)
    Cu = float(C) * _UNIT
    survivors = prefilter(z, k, 1, xmax + 1, lambda xs: Cu / xs, workers, backend)
    for x in survivors:
        ok, ap = decide_Mx(z, k, x, below_C_over_x(C, x))
        if not ok:
            continue
        if ap.exact_hit:
            report.exact_hits.append(x)
            continue
        report.hits.append(_check_divisibility_hit(z, k, ap, report))
    if report.exact_hits:
        report.notes.append(
            f"{len(report.exact_hits)} values of x give an exact hit (some zeta^j x is an integer); "
            "they are excluded because the exponents only count nonzero distances"
        )
    return report


def _check_divisibility_hit(z, k, ap: Approximant, report: Lemma2Report) -> Lemma2Hit:
    x = ap.x
    y = ap.ys[0]
    g = gcd(x, y)
    rx, ry = x // g, y // g
    try:
        dec = decompose(z, x)
    except ExactHit:
        dec = None
    if dec is None or (dec.x0, dec.y0) != (rx, ry):
        report.violations.append((x, f"reduced fraction {ry}/{rx} differs from decomposition {dec}"))
        return Lemma2Hit(x, dec, False, False, False)
    x0, y0 = dec.x0, dec.y0
    divides = x % x0**k == 0
    if not divides:
        report.violations.append((x, f"x0^k = {x0}^{k} does not divide x"))
    conv_ok = all(is_convergent(z, y0**j, x0**j, power=j) for j in range(1, k + 1))
    if not conv_ok:
        report.violations.append((x, f"some y0^j/x0^j with y0/x0 = {y0}/{x0} is not a convergent of zeta^j"))
    scaled = False
    if divides:
        scaled = _check_scaling(z, k, ap, x0, y0)
        report.scaling_checks.append((x // x0**k, x0, scaled))
        if not scaled:
            report.violations.append((x, "M_x != N * M_{x0^k}"))
    return Lemma2Hit(x, dec, divides, conv_ok, scaled)


def _check_scaling(z, k, ap: Approximant, x0: int, y0: int) -> bool:
    """``M_x = N M_{x0^k}``: nearest integers scale exactly and endpoint errors agree as rationals."""
    base_x = x0**k
    N = ap.x // base_x
    expected = tuple(N * x0 ** (k - j) * y0**j for j in range(1, k + 1))
    if ap.ys != expected:
        return False
    try:
        ref = _approximant_at(z, k, base_x, ap.depth)
    except AmbiguousDistance:
        ref = scan_Mx(z, k, base_x)
        ap = _approximant_at(z, k, ap.x, ref.depth)
    if tuple(N * v for v in ref.ys) != ap.ys:
        return False
    lo = truncate(z, ap.depth).lo
    lhs = max(abs(lo**j * ap.x - ap.ys[j - 1]) for j in range(1, k + 1))
    rhs = max(abs(lo**j * base_x - ref.ys[j - 1]) for j in range(1, k + 1))
    return lhs == N * rhs


# ---------------------------------------------------------------------------
# candidates for M_x <= x^-T


def _split(T) -> tuple[int, int]:
    T = mpq(T)
    if T <= 1:
        raise InvalidSpec("T must exceed 1")
    return int(T.numerator), int(T.denominator)


def _xhat(C: mpq, T: mpq, xmax: int) -> int:
    """Largest ``x <= xmax`` with ``x**(T-1) <= 1/C``; beyond it ``M_x <= x**-T`` forces ``M_x < C/x``."""
    p, d = _split(T)
    e = p - d

    def small(x):
        return mpq(x) ** e * C**d <= 1

    guess = min(xmax, int(math.exp(-math.log(float(C)) / float(mpq(e, d)))) + 2)
    while guess > 1 and not small(guess):
        guess -= 1
    while guess < xmax and small(guess + 1):
        guess += 1
    return guess


def good_candidates(z: RealHandle, k: int, xmax: int, T, workers: int = 1, backend=None,
                    cap: int = SCAN_CAP) -> list[int]:
    """Superset of all ``x <= xmax`` with ``M_x <= x**(-T)``.

    Small ``x`` (where ``x**-T`` is not below ``C0/x``) are scanned directly.
    Beyond that every solution has the form ``N q**k`` with ``q`` a convergent
    denominator, ``||zeta q|| <= q**(-kT-k+1)`` and
    ``N**(1+T) q**(kT+k-1) ||zeta q|| <= 1``; these are listed from the
    continued fraction without scanning.
    """
    p, d = _split(T)
    C = C0(k, z)
    found: set[int] = set()
    xh = _xhat(C, mpq(p, d), xmax)
    if xh >= 1:
        _check_cap(xh, cap)
        Tf = p / d
        for x in prefilter(z, k, 1, xh + 1, lambda xs: _UNIT * xs ** (-Tf), workers, backend):
            verdict, ap = decide_Mx(z, k, x, at_most_power(mpq(p, d), x), strict=False)
            if verdict is False or (ap is not None and ap.exact_hit):
                continue
            found.add(x)
    qmax = int(gmpy2.iroot(mpz(xmax), k)[0]) if k > 1 else xmax
    e = k * p + (k - 1) * d
    for c in convergents(z, max(qmax, 1)):
        q = c.q
        dist = _distance_lower(z, q)
        if dist is None:
            continue
        if mpq(q) ** e * dist**d > 1:
            continue
        N = 1
        while N * q**k <= xmax and mpq(N) ** (p + d) * mpq(q) ** e * dist**d <= 1:
            found.add(N * q**k)
            N += 1
    return sorted(found)


def _distance_lower(z: RealHandle, q: int) -> mpq | None:
    """Positive certified lower bound of ``||zeta q||`` within a factor 9/8; None for an exact hit."""
    last = None
    for depth in depth_schedule(z, _start_bits(1, q)):
        try:
            r = certified_round(truncate(z, depth).scale(q))
        except AmbiguousDistance:
            continue
        if r.err.hi == 0:
            return None
        last = r.err.lo
        if last > 0 and r.err.width * 8 < last:
            return last
    if last:
        return last
    raise PrecisionExhausted(f"precision exhausted: ||zeta*{q}|| not separated from 0")


# ---------------------------------------------------------------------------
# multiples of the lacunary witnesses


def defining_vectors(spec: LacunarySpec, xmax: int) -> list[tuple[int, int, int]]:
    """``(n, b**a_n, c * sum_{i<=n} b**(a_n - a_i))`` for every ``b**a_n <= xmax``."""
    out = []
    n = 1
    while True:
        a = spec.term(n)
        if a > xmax.bit_length() or spec.base**a > xmax:
            break
        y = spec.coeff * sum(spec.base ** (a - spec.term(i)) for i in range(1, n + 1))
        out.append((n, spec.base**a, y))
        n += 1
    return out


def verify_lemma3(spec: LacunarySpec, k: int, xmax: int, exponent=None, small_x: int | None = None,
                  workers: int = 1, cap: int = SCAN_CAP, backend=None) -> Lemma3Report:
    """Check that every ``x <= xmax`` with ``||zeta x|| <= x**-exponent`` is a multiple of a defining vector.

    ``exponent`` defaults to ``k/(k-1)``. Pairs with ``x < small_x`` (default
    ``b**a_1``) that are not multiples are reported as small-x exceptions.
    """
    if k < 2:
        raise InvalidSpec("verify_lemma3 needs k >= 2")
    _check_cap(xmax, cap)
    e = mpq(k, k - 1) if exponent is None else mpq(exponent)
    if small_x is None:
        small_x = spec.base ** spec.term(1)
    z = RealHandle.lacunary(spec)
    report = Lemma3Report(k, xmax, e, small_x)
    vectors = defining_vectors(spec, xmax)
    ef = float(e)
    for x in prefilter(z, 1, 1, xmax + 1, lambda xs: _UNIT * xs ** (-ef), workers, backend):
        ok, ap = decide_Mx(z, 1, x, at_most_power(e, x))
        if not ok:
            continue
        y = ap.ys[0]
        match = next(((n, x // vx) for n, vx, vy in reversed(vectors)
                      if x % vx == 0 and y == (x // vx) * vy), None)
        if match is not None:
            report.hits.append((x, y, match[0], match[1]))
        elif x < small_x:
            report.small_x_exceptions.append((x, y))
        else:
            report.violations.append((x, y))
    return report


# ---------------------------------------------------------------------------
# Liouville witnesses


def liouville_witness(z: RealHandle, k: int, xmax: int, exhaustive_cap: int = SCAN_CAP,
                      workers: int = 1, backend=None) -> LiouvilleReport:
    """Smallest ``x <= xmax`` with certified ``M_x < C0/x``.

    Every such ``x`` equals ``N q**k`` for a convergent denominator ``q`` with
    ``N**2 q**(2k-1) ||zeta q|| < C0``, so the convergent list is complete.
    Within one ``q`` the witnesses form a prefix ``N = 1..N_max``, found by
    bisection. Ranges up to ``exhaustive_cap`` are also scanned directly.
    """
    if k < 1:
        raise InvalidSpec("k must be >= 1")
    C = C0(k, z)
    if z.is_rational:
        # the criterion characterises irrational Liouville numbers; rationals never are
        return LiouvilleReport(k, xmax, C, None, [], False, "rational input: not a Liouville number")

    def is_witness(x):
        ok, ap = decide_Mx(z, k, x, below_C_over_x(C, x))
        return ok and not ap.exact_hit

    families = []
    qmax = int(gmpy2.iroot(mpz(xmax), k)[0]) if k > 1 else xmax
    for c in convergents(z, max(qmax, 1)):
        q = c.q
        base = q**k
        dist = _distance_lower(z, q)
        if dist is None or base > xmax:
            continue
        bound = C / (mpq(q) ** (2 * k - 1) * dist)
        top = int(gmpy2.isqrt(floor_rat(bound)))
        while top > 0 and top * top >= bound:
            top -= 1
        top = min(top, xmax // base)
        if top < 1 or not is_witness(base):
            continue
        lo, hi = 1, top
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if is_witness(mid * base):
                lo = mid
            else:
                hi = mid - 1
        families.append((base, lo))
    families = sorted(set(families))
    smallest = families[0][0] if families else None
    exhaustive = xmax <= exhaustive_cap
    if exhaustive:
        Cu = float(C) * _UNIT
        for x in prefilter(z, k, 1, xmax + 1, lambda xs: Cu / xs, workers, backend):
            if smallest is not None and x >= smallest:
                break
            if is_witness(x):
                smallest = x
                break
    note = ("witness found" if smallest is not None else
            "no witness up to Xmax; finite-scale evidence only, not a proof of non-Liouville")
    return LiouvilleReport(k, xmax, C, smallest, families, exhaustive, note)
