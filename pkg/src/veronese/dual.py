"""Minimisation of the linear form ``|x0 + x1 zeta + ... + xk zeta**k|`` over integer boxes."""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from gmpy2 import mpq

from . import kernels
from .errors import BoxTooLarge, InvalidSpec, PrecisionExhausted, VeroneseError
from .exactnum import (
    DEFAULT_MAX_DEEPEN,
    Interval,
    RealHandle,
    ceil_rat,
    depth_schedule,
    floor_rat,
    nearest_int,
    powers_enclosure,
)
from .reports import ExponentReport, Sample, log2_int, log2_rat

DUAL_CAP = 10**8
_SATURATED = (1 << 64) - 1


@dataclass(frozen=True)
class LinearFormHit:
    """Minimiser of the linear form; ``coeffs = (x0, x1, ..., xk)``."""

    coeffs: tuple[int, ...]
    value: Interval
    height: int
    vanishing: bool = False


def box_size(k: int, X: int) -> int:
    """Number of ``(x1..xk)`` vectors enumerated; ``x0`` is solved for, not enumerated."""
    return (2 * X + 1) ** k


def _check(k: int, X: int, cap: int):
    if int(k) != k or k < 1:
        raise InvalidSpec("k must be a positive integer")
    if int(X) != X or X < 1:
        raise InvalidSpec("height bound X must be a positive integer")
    if box_size(k, X) > cap:
        raise BoxTooLarge(f"box too large: (2X+1)^k = {box_size(k, X)} exceeds the cap {cap}")


def _x0_options(S: Interval, X: int) -> list[int]:
    """Values of ``x0`` in ``[-X, X]`` that can minimise ``|x0 + s|`` for some ``s`` in ``S``."""
    opts = {-int(floor_rat(S.lo)), -int(ceil_rat(S.lo)), -int(floor_rat(S.hi)), -int(ceil_rat(S.hi))}
    return sorted({max(-X, min(X, o)) for o in opts})


def _abs_interval(iv: Interval) -> Interval:
    if iv.lo >= 0:
        return iv
    if iv.hi <= 0:
        return Interval(-iv.hi, -iv.lo)
    return Interval(mpq(0), max(-iv.lo, iv.hi))


def _signed_sum(powers: list[Interval], xs) -> Interval:
    acc = Interval.point(0)
    for p, x in zip(powers, xs):
        if x:
            acc = acc + p.scale(int(x))
    return acc


def _form_value(powers: list[Interval], x0: int, xs) -> Interval:
    return _abs_interval(_signed_sum(powers, xs).shift(x0))


def _height(coeffs) -> int:
    return max(abs(c) for c in coeffs)


def _hit_key(value: Interval, coeffs):
    return (value.hi, _height(coeffs), coeffs)


# ---------------------------------------------------------------------------
# rational zeta: plain enumeration


def _scan_rational(z: RealHandle, k: int, X: int) -> LinearFormHit:
    powers = [z.value**j for j in range(1, k + 1)]
    best = None
    for xs in itertools.product(range(-X, X + 1), repeat=k):
        nz = next((x for x in xs if x), 0)
        if nz < 0:
            continue
        S = sum((p * x for p, x in zip(powers, xs)), mpq(0))
        x0 = max(-X, min(X, -int(nearest_int(S))))
        v = abs(x0 + S)
        if v == 0:
            # exact zero is excluded; the next integer is at distance 1
            x0 = x0 + 1 if x0 + 1 <= X else x0 - 1
            v = abs(x0 + S)
        coeffs = (x0,) + tuple(int(x) for x in xs)
        if not any(coeffs):
            continue
        key = (v, _height(coeffs), coeffs)
        if best is None or key < best:
            best = key
    v, h, coeffs = best
    return LinearFormHit(coeffs, Interval.point(v), h)


# ---------------------------------------------------------------------------
# irrational zeta: fixed-point branch and bound, exact confirmation


def _tail_bounds(powers: list[Interval], X: int) -> np.ndarray:
    k = len(powers)
    R = np.zeros(k + 1, dtype=np.uint64)
    acc = mpq(0)
    for i in range(k - 1, -1, -1):
        acc += max(abs(powers[i].lo), abs(powers[i].hi))
        R[i] = min(_SATURATED, int(ceil_rat(acc * X * (1 << 64))))
    return R


def _chunks(X: int, workers: int) -> list[tuple[int, int]]:
    if workers <= 1:
        return [(0, X)]
    n = min(X + 1, 4 * workers)
    edges = [round(i * (X + 1) / n) for i in range(n + 1)]
    return [(edges[i], edges[i + 1] - 1) for i in range(n) if edges[i + 1] > edges[i]]


def _kernel_candidates(z, k, X, workers, backend):
    depth = next(depth_schedule(z, 140))
    powers = powers_enclosure(z, k, depth)
    A, W = kernels.fixed_point_arrays(powers)
    R = _tail_bounds(powers, X)
    zf = np.array([float(p.mid) for p in powers], dtype=np.float64)

    def run(rng):
        lo1, hi1 = rng
        size = 1 << 16
        for _ in range(3):
            c, b, _, overflow = kernels.linear_form_search(A, W, R, zf, X, lo1, hi1, max_cands=size,
                                                           backend=backend)
            if not overflow:
                return c, b
            size <<= 4
        raise VeroneseError("internal: linear form candidate buffer overflow")

    ranges = _chunks(X, workers)
    if len(ranges) == 1:
        parts = [run(ranges[0])]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, ranges))
    vecs = set()
    for c, b in parts:
        vecs.update(tuple(int(v) for v in row) for row in c)
        vecs.update(tuple(int(v) for v in row) for row in b)
    return sorted(vecs)


def _scan_irrational(z, k, X, workers, backend, max_deepen) -> LinearFormHit:
    vecs = _kernel_candidates(z, k, X, workers, backend)
    bits = 2 * k * int(X).bit_length() + 96
    last = None
    for depth in depth_schedule(z, bits, max_deepen):
        powers = powers_enclosure(z, k, depth)
        scored = [((1,) + (0,) * k, Interval.point(1))]
        for xs in vecs:
            S = _signed_sum(powers, xs)
            for x0 in _x0_options(S, X):
                scored.append(((x0,) + xs, _form_value(powers, x0, xs)))
        if any(v.is_point and v.lo == 0 for _, v in scored):
            raise VeroneseError("internal: exact zero of the linear form at an irrational zeta")
        scored.sort(key=lambda cv: _hit_key(cv[1], cv[0]))
        coeffs, value = scored[0]
        last = (coeffs, value)
        if value.lo == 0:
            continue
        rivals = [v for c, v in scored[1:] if c != coeffs]
        if all(v.lo > value.hi for v in rivals) and value.width * (1 << 20) < value.lo:
            return LinearFormHit(coeffs, value, _height(coeffs))
    if last is None or last[1].lo == 0:
        raise PrecisionExhausted(f"precision exhausted: linear form minimum at X={X} not separated from zero")
    coeffs, value = last
    return LinearFormHit(coeffs, value, _height(coeffs))


def scan_linear_form(z: RealHandle, k: int, X: int, cap: int = DUAL_CAP, workers: int = 1, backend=None,
                     max_deepen: int = DEFAULT_MAX_DEEPEN) -> LinearFormHit:
    """Nonzero minimum of ``|x0 + sum_j xj zeta**j|`` over ``max |xj| <= X``.

    Ties on the certified upper bound go to the smaller height, then to the
    lexicographically smaller coefficient vector.
    """
    _check(k, X, cap)
    if z.is_rational:
        return _scan_rational(z, k, X)
    return _scan_irrational(z, k, X, workers, backend, max_deepen)


def estimate_w(z: RealHandle, k: int, heights, cap: int = DUAL_CAP, workers: int = 1, backend=None) -> ExponentReport:
    """Samples ``nu(X) = -log(min value)/log X`` at each height ``X >= 2``.

    ``extrapolated`` is the deepest sample; ``extra`` holds the running maximum
    (asymptotic reading) and the running minimum (uniform reading).
    """
    heights = [int(h) for h in heights]
    if heights != sorted(heights) or not heights:
        raise InvalidSpec("heights must be a non-empty ascending list")
    for h in heights:
        _check(k, h, cap)
    rep = ExponentReport("w", k, tolerance=0.2)
    if z.is_rational:
        rep.flags.append("rational: dual exponent not defined, samples only reflect the finite structure")
    for X in heights:
        if X < 2:
            continue
        hit = scan_linear_form(z, k, X, cap, workers, backend)
        nu = -log2_rat(hit.value.mid) / log2_int(X)
        rep.samples.append(Sample(X, nu, hit.coeffs))
    vals = [s.value for s in rep.samples]
    rep.extra["running_max"] = list(itertools.accumulate(vals, max))
    rep.extra["running_min"] = list(itertools.accumulate(vals, min))
    if vals and not z.is_rational:
        rep.extrapolated = vals[-1]
    return rep
