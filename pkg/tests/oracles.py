"""Independent reference computations using only the standard library.

Nothing here imports the package under test. Lacunary numbers are truncated
far enough that the neglected tail is below every quantity compared.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction


def lacunary(base: int, coeff: int, exponents: list[int]) -> Fraction:
    return sum((Fraction(coeff, base**a) for a in exponents), Fraction(0))


def geom_exponents(alpha: Fraction, q: Fraction, count: int) -> list[int]:
    return [math.ceil(alpha * q**n) for n in range(1, count + 1)]


def dist(t: Fraction) -> Fraction:
    """Distance to the nearest integer."""
    f = t - math.floor(t)
    return min(f, 1 - f)


def Mx(z: Fraction, k: int, x: int) -> Fraction:
    return max(dist(z**j * x) for j in range(1, k + 1))


def continued_fraction(r: Fraction) -> list[int]:
    out = []
    p, q = r.numerator, r.denominator
    while q:
        a, rem = divmod(p, q)
        out.append(a)
        p, q = q, rem
    return out


def convergent_denominators(r: Fraction, qmax: int) -> list[int]:
    out = []
    prev, cur = 1, 0
    for a in continued_fraction(r):
        prev, cur = cur, a * cur + prev
        if cur > qmax:
            break
        out.append(cur)
    return out


def best_approximation_denominators(z: Fraction, qmax: int) -> list[int]:
    """Brute force: x where ``||z x||`` strictly improves on every smaller x."""
    out, best = [], None
    for x in range(1, qmax + 1):
        d = dist(z * x)
        if best is None or d < best:
            best = d
            out.append(x)
    return out


def records(z: Fraction, k: int, stop: int) -> list[int]:
    out, best = [], None
    for x in range(1, stop):
        m = Mx(z, k, x)
        if best is None or m < best:
            best = m
            out.append(x)
    return out


def linear_form_min(z: Fraction, k: int, X: int) -> Fraction:
    """Smallest nonzero ``|x0 + x1 z + ... + xk z^k|`` over the full box, by enumeration."""
    powers = [z**j for j in range(1, k + 1)]
    best = None
    for xs in itertools.product(range(-X, X + 1), repeat=k):
        s = sum((p * x for p, x in zip(powers, xs)), Fraction(0))
        for x0 in range(-X, X + 1):
            v = abs(x0 + s)
            if v and (best is None or v < best):
                best = v
    return best


def independent_pair(z: Fraction, Q: int) -> bool:
    """Whether ``|m| <= Q, |z m - n| < 1/(2Q)`` has two independent solutions."""
    sols = []
    for m in range(1, Q + 1):
        n = round(z * m)
        for cand in (n - 1, n, n + 1):
            if abs(z * m - cand) < Fraction(1, 2 * Q):
                sols.append((m, cand))
    return any(a[0] * b[1] != a[1] * b[0] for a, b in itertools.combinations(sols, 2))


def base_digits(r: Fraction, base: int, depth: int) -> list[int]:
    out = []
    p, q = r.numerator, r.denominator
    for _ in range(depth):
        p *= base
        d, p = divmod(p, q)
        out.append(d)
    return out


# the workhorse number: sum 2^(-4^n)
Z4_EXPONENTS = [4**n for n in range(1, 8)]
Z4 = lacunary(2, 1, Z4_EXPONENTS)
Z2 = lacunary(2, 1, [2**n for n in range(1, 14)])
CANTOR4 = lacunary(3, 2, [4**n for n in range(1, 7)])
