"""Certified continued fractions, best approximations and the ``x = M0 * x0`` decomposition."""

from __future__ import annotations

from math import gcd
from typing import NamedTuple

from gmpy2 import mpq

from .errors import AmbiguousDistance, ExactHit, PrecisionExhausted, PreconditionViolated, VeroneseError
from .exactnum import (
    DEFAULT_MAX_DEEPEN,
    Interval,
    RealHandle,
    certified_round,
    floor_rat,
    depth_schedule,
    dist_enclosure,
    power_enclosure,
    truncate,
)


class Convergent(NamedTuple):
    p: int
    q: int
    index: int
    certified: bool


class Decomposition(NamedTuple):
    """``x = M0 * x0`` where ``y0/x0`` is the last convergent with ``x0 <= x``."""

    x0: int
    y0: int
    M0: int

    @property
    def x(self) -> int:
        return self.M0 * self.x0


class Prop1Verdict(NamedTuple):
    Q: int
    consistent: bool
    directions: list
    witnesses: tuple | None


def partial_quotients(r) -> list[int]:
    """Finite continued fraction of a rational, last quotient >= 2 unless the expansion has one term."""
    r = mpq(r)
    p, q = r.numerator, r.denominator
    out = []
    while q:
        a = p // q
        out.append(int(a))
        p, q = q, p - a * q
    return out


def _convergents_from(quotients, Qmax, certified, start_index=0):
    out = []
    p0, q0, p1, q1 = 1, 0, 0, 1
    for i, a in enumerate(quotients):
        p0, q0, p1, q1 = a * p0 + p1, a * q0 + q1, p0, q0
        if q0 > Qmax:
            return out, True
        out.append(Convergent(int(p0), int(q0), start_index + i, certified))
    return out, False


def _common_prefix(lo: mpq, hi: mpq) -> list[int]:
    """Quotients shared by every real in ``[lo, hi]``.

    Each endpoint's final quotient is dropped because a rational has two
    expansions; what remains pins down a cylinder containing both endpoints.
    """
    a = partial_quotients(lo)[:-1]
    b = partial_quotients(hi)[:-1]
    out = []
    for u, v in zip(a, b):
        if u != v:
            break
        out.append(u)
    return out


def _enclosure(z: RealHandle, depth: int, power: int) -> Interval:
    base = truncate(z, depth)
    return base if power == 1 else power_enclosure(base, power)


def _bits_for(Qmax: int, power: int) -> int:
    return 2 * int(Qmax).bit_length() + power.bit_length() + 16


def convergents(z: RealHandle, Qmax: int, power: int = 1, max_deepen: int = DEFAULT_MAX_DEEPEN) -> list[Convergent]:
    """All convergents ``p/q`` of ``zeta**power`` with ``q <= Qmax``, in order."""
    if Qmax < 1:
        raise ValueError("Qmax must be >= 1")
    if z.is_rational:
        out, _ = _convergents_from(partial_quotients(z.value**power), Qmax, True)
        return out
    for depth in depth_schedule(z, _bits_for(Qmax, power), max_deepen):
        iv = _enclosure(z, depth, power)
        out, complete = _convergents_from(_common_prefix(iv.lo, iv.hi), Qmax, True)
        if complete:
            return out
    raise PrecisionExhausted(f"precision exhausted: continued fraction not certified up to q = {Qmax}")


def is_convergent(z: RealHandle, p: int, q: int, power: int = 1) -> bool:
    """Whether ``p/q`` (in lowest terms) is a convergent of ``zeta**power``."""
    g = gcd(p, q)
    p, q = p // g, q // g
    return any(c.p == p and c.q == q for c in convergents(z, q, power))


def best_approximations(z: RealHandle, Qmax: int) -> list[int]:
    """Denominators ``x <= Qmax`` at which ``||zeta x||`` reaches a new strict minimum."""
    out = []
    for c in convergents(z, Qmax):
        if not out or c.q != out[-1]:
            out.append(c.q)
    return out


def certified_distance(z: RealHandle, x: int, power: int = 1, max_deepen: int = DEFAULT_MAX_DEEPEN):
    """Nearest integer ``y`` to ``zeta**power * x`` and an enclosure of ``|zeta**power * x - y|``.

    Deepens until the nearest integer is unambiguous and the enclosure is
    narrower than an eighth of its lower end (or below ``2**-128``).
    """
    bits = 2 * int(x).bit_length() + 32
    last = None
    for depth in depth_schedule(z, bits, max_deepen):
        iv = _enclosure(z, depth, power).scale(x)
        try:
            r = certified_round(iv)
        except AmbiguousDistance as exc:
            last = exc
            continue
        w = r.err.width
        if w == 0 or w * 8 < r.err.lo or w < mpq(1, 1 << 128):
            return r
        last = r
    if isinstance(last, tuple):
        return last
    raise PrecisionExhausted(f"precision exhausted: nearest integer to zeta^{power}*{x} undecided") from last


def _strictly_below(z: RealHandle, x: int, bound: mpq, max_deepen: int = DEFAULT_MAX_DEEPEN):
    """Three-way certified test of ``||zeta x|| < bound``: True, False, or raise."""
    bits = 2 * int(x).bit_length() + 32
    for depth in depth_schedule(z, bits, max_deepen):
        iv = _enclosure(z, depth, 1).scale(x)
        try:
            d = dist_enclosure(iv).interval
        except AmbiguousDistance:
            continue
        if d.hi < bound:
            return True, d
        if d.lo >= bound:
            return False, d
    raise PrecisionExhausted(f"precision exhausted: cannot compare ||zeta*{x}|| with {bound}")


def decompose(z: RealHandle, x: int) -> Decomposition:
    """Split ``x`` as ``M0 * x0`` with ``y0/x0`` the last convergent of denominator ``<= x``.

    Requires ``||zeta x|| < 1/(2x)``. The identity ``||zeta x|| = M0 ||zeta x0||``
    is confirmed through the nearest integers: ``y = M0 * y0``.
    """
    x = int(x)
    if x < 1:
        raise ValueError("x must be positive")
    ok, dist = _strictly_below(z, x, mpq(1, 2 * x))
    if dist.hi == 0:
        raise ExactHit(f"exact hit: zeta*{x} is an integer")
    if not ok:
        raise PreconditionViolated(f"precondition violated: ||zeta*{x}|| >= 1/(2*{x})")
    conv = convergents(z, x)[-1]
    x0, y0 = conv.q, conv.p
    if x % x0:
        raise VeroneseError(f"internal: convergent denominator {x0} does not divide {x}")
    M0 = x // x0
    y = certified_distance(z, x).y
    if y != M0 * y0:
        raise VeroneseError(f"internal: nearest integer {y} != {M0}*{y0}")
    return Decomposition(x0, y0, M0)


def _err_interval(iv: Interval, n: int) -> Interval:
    """Enclosure of ``|t - n|`` over ``t in iv``."""
    a, b = abs(iv.lo - n), abs(iv.hi - n)
    if iv.lo <= n <= iv.hi:
        return Interval(mpq(0), max(a, b))
    return Interval(min(a, b), max(a, b))


def check_prop1(z: RealHandle, Q: int) -> Prop1Verdict:
    """Search ``1 <= m <= Q`` with ``|zeta m - n| < 1/(2Q)`` and collect primitive directions.

    Negative ``m`` give the same directions up to sign, so they are skipped.
    More than one direction would be a pair of independent solutions.
    """
    Q = int(Q)
    if Q < 1:
        raise ValueError("Q must be >= 1")
    bound = mpq(1, 2 * Q)
    bits = 2 * Q.bit_length() + 48
    directions: dict[tuple[int, int], tuple[int, int]] = {}
    pending = list(range(1, Q + 1))
    half = mpq(1, 2)
    for depth in depth_schedule(z, bits):
        base = truncate(z, depth)
        undecided = []
        for m in pending:
            iv = base.scale(m)
            verdict = None
            for n in {int(floor_rat(iv.lo + half)), int(floor_rat(iv.hi + half))}:
                e = _err_interval(iv, n)
                if e.hi < bound:
                    g = gcd(m, n)
                    directions.setdefault((m // g, n // g), (m, n))
                    verdict = True
                elif e.lo < bound and verdict is None:
                    verdict = False
            if verdict is False:
                undecided.append(m)
        pending = undecided
        if not pending:
            break
    if pending:
        raise PrecisionExhausted(f"precision exhausted: {len(pending)} values of m undecided for Q={Q}")
    dirs = sorted(directions)
    witnesses = None
    if len(dirs) > 1:
        witnesses = (directions[dirs[0]], directions[dirs[1]])
    return Prop1Verdict(Q, len(dirs) <= 1, dirs, witnesses)
