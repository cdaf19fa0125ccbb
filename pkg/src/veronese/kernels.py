"""Fixed-point scan kernels.

Every real ``t`` handed to a kernel is represented by two unsigned 64-bit
integers ``(A, W)`` with ``frac(t)`` contained in ``[A, A + W] * 2**-64``.
Products ``x * A`` are reduced modulo ``2**64`` by ordinary unsigned
wrap-around, so ``||x t||`` is enclosed by ``||x A|| +- x W`` in the same
units.  The kernels never decide anything on their own: they return
certified lower/upper bounds, and callers confirm survivors with exact
arithmetic.

Set ``VERONESE_DISABLE_NUMBA=1`` to force the pure-numpy path.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .exactnum import Interval, ceil_rat, floor_rat

UNIT_BITS = 64
_ONE = 1 << UNIT_BITS
_HALF = np.uint64(1 << 63)

_disabled = os.environ.get("VERONESE_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")
try:
    if _disabled:
        raise ImportError
    from numba import njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"

BLOCK = 1 << 18


def fixed_point(iv: Interval) -> tuple[int, int]:
    """``(A, W)`` with ``frac(t) in [A, A+W] / 2**64`` for every ``t`` in ``iv``."""
    lo = floor_rat(iv.lo * _ONE)
    hi = ceil_rat(iv.hi * _ONE)
    return int(lo % _ONE), int(hi - lo)


def fixed_point_arrays(ivs: list[Interval]) -> tuple[np.ndarray, np.ndarray]:
    pairs = [fixed_point(iv) for iv in ivs]
    return (np.array([p[0] for p in pairs], dtype=np.uint64),
            np.array([p[1] for p in pairs], dtype=np.uint64))


# ---------------------------------------------------------------------------
# M_x bounds over a contiguous range of x


def _mx_bounds_numpy(A, W, start, stop):
    x = np.arange(start, stop, dtype=np.uint64)
    m_lo = np.zeros(x.shape, dtype=np.uint64)
    m_hi = np.zeros(x.shape, dtype=np.uint64)
    for j in range(A.shape[0]):
        r = x * A[j]
        d = np.minimum(r, -r)
        e = x * W[j]
        lo = np.where(d > e, d - e, np.uint64(0))
        np.maximum(m_lo, lo, out=m_lo)
        np.maximum(m_hi, d + e, out=m_hi)
    return m_lo, m_hi


def _mx_bounds_loop(A, W, start, stop, m_lo, m_hi):
    k = A.shape[0]
    zero = np.uint64(0)
    for i in range(stop - start):
        x = np.uint64(start + i)
        blo = zero
        bhi = zero
        for j in range(k):
            r = x * A[j]
            d = r if r <= _HALF else zero - r
            e = x * W[j]
            lo = d - e if d > e else zero
            hi = d + e
            if lo > blo:
                blo = lo
            if hi > bhi:
                bhi = hi
        m_lo[i] = blo
        m_hi[i] = bhi


if HAVE_NUMBA:
    _mx_bounds_jit = njit(cache=True, nogil=True)(_mx_bounds_loop)

    def _mx_bounds_numba(A, W, start, stop):
        m_lo = np.empty(stop - start, dtype=np.uint64)
        m_hi = np.empty(stop - start, dtype=np.uint64)
        _mx_bounds_jit(A, W, start, stop, m_lo, m_hi)
        return m_lo, m_hi


def mx_bounds_block(A, W, start, stop, backend=None):
    """Certified ``(lower, upper)`` bounds of ``M_x * 2**64`` for ``start <= x < stop``."""
    backend = backend or BACKEND
    if stop <= start:
        return np.zeros(0, dtype=np.uint64), np.zeros(0, dtype=np.uint64)
    if stop >= 1 << 40:
        raise ValueError("fixed-point scans are limited to x < 2**40")
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but unavailable")
        return _mx_bounds_numba(A, W, start, stop)
    return _mx_bounds_numpy(A, W, start, stop)


def iter_mx_bounds(A, W, start, stop, workers=1, backend=None, block=BLOCK):
    """Yield ``(x0, m_lo, m_hi)`` blocks in ascending order.

    Blocks are computed by ``workers`` threads; output order does not depend
    on the worker count.
    """
    ranges = [(s, min(s + block, stop)) for s in range(start, stop, block)]
    if workers <= 1 or len(ranges) <= 1:
        for s, e in ranges:
            lo, hi = mx_bounds_block(A, W, s, e, backend)
            yield s, lo, hi
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(mx_bounds_block, A, W, s, e, backend) for s, e in ranges]
        for (s, _), fut in zip(ranges, futures):
            lo, hi = fut.result()
            yield s, lo, hi


# ---------------------------------------------------------------------------
# Record candidates: x whose M_x may undercut every earlier M_v


def _record_scan_loop(A, W, start, stop, out):
    """Keep ``x`` when its lower bound is below the running minimum of upper bounds.

    Any true record (``M_x < min_{v<x} M_v``, over the block) passes this test.
    Returns (count, overflow).
    """
    k = A.shape[0]
    zero = np.uint64(0)
    best = np.uint64(0xFFFFFFFFFFFFFFFF)
    n = 0
    overflow = False
    for i in range(stop - start):
        x = np.uint64(start + i)
        blo = zero
        bhi = zero
        for j in range(k):
            r = x * A[j]
            d = r if r <= _HALF else zero - r
            e = x * W[j]
            lo = d - e if d > e else zero
            hi = d + e
            if lo > blo:
                blo = lo
            if hi > bhi:
                bhi = hi
        if blo < best:
            if n < out.shape[0]:
                out[n] = start + i
                n += 1
            else:
                overflow = True
            if bhi < best:
                best = bhi
    return n, overflow


if HAVE_NUMBA:
    _record_scan_jit = njit(cache=True, nogil=True)(_record_scan_loop)


def _record_scan_numpy(A, W, start, stop):
    m_lo, m_hi = _mx_bounds_numpy(A, W, start, stop)
    prev_best = np.minimum.accumulate(m_hi)
    prev_best = np.concatenate(([np.uint64(0xFFFFFFFFFFFFFFFF)], prev_best[:-1]))
    return np.nonzero(m_lo < prev_best)[0].astype(np.int64) + start


def record_candidates_block(A, W, start, stop, backend=None, max_out=1 << 20):
    backend = backend or BACKEND
    if stop <= start:
        return np.zeros(0, dtype=np.int64)
    if stop >= 1 << 40:
        raise ValueError("fixed-point scans are limited to x < 2**40")
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but unavailable")
        out = np.empty(max_out, dtype=np.int64)
        n, overflow = _record_scan_jit(A, W, start, stop, out)
        if overflow:
            raise RuntimeError("record candidate buffer overflow")
        return out[:n].copy()
    return _record_scan_numpy(A, W, start, stop)


def record_candidates(A, W, start, stop, workers=1, backend=None, block=1 << 22):
    """Superset of the records of ``M_x`` on ``[start, stop)``, ascending.

    Each block starts from an empty running minimum, which can only add
    candidates, so blocks are independent and the result does not depend on
    ``workers``.
    """
    ranges = [(s, min(s + block, stop)) for s in range(start, stop, block)]
    if workers <= 1 or len(ranges) <= 1:
        parts = [record_candidates_block(A, W, s, e, backend) for s, e in ranges]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda r: record_candidates_block(A, W, r[0], r[1], backend), ranges))
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


# ---------------------------------------------------------------------------
# Linear form branch and bound


def _linear_form_loop(A, W, R, zf, X, lo1, hi1, cands, bounds):
    """Depth-first search over (x_1..x_k) in [-X, X]^k, first nonzero coordinate positive.

    The first coordinate is restricted to ``lo1 <= x_1 <= hi1``.
    R[m] bounds |sum_{j>m} x_j zeta^j| in units. Leaves whose lower bound does
    not exceed the running incumbent are written to ``cands``; leaves whose
    nearest integer may leave the box go to ``bounds``. Returns
    (n_cands, n_bounds, incumbent_hi, overflow).
    """
    k = A.shape[0]
    zero = np.uint64(0)
    best = np.uint64(0xFFFFFFFFFFFFFFFF)
    coords = np.zeros(k, dtype=np.int64)
    partial = np.zeros(k + 1, dtype=np.uint64)
    perr = np.zeros(k + 1, dtype=np.uint64)
    pf = np.zeros(k + 1, dtype=np.float64)
    allzero = np.zeros(k + 1, dtype=np.bool_)
    allzero[0] = True
    nc = 0
    nb = 0
    overflow = False
    m = 0
    coords[0] = lo1 - 1
    while m >= 0:
        coords[m] += 1
        if coords[m] > (hi1 if m == 0 else X):
            m -= 1
            continue
        x = coords[m]
        ax = x if x >= 0 else -x
        partial[m + 1] = partial[m] + np.uint64(x) * A[m]
        perr[m + 1] = perr[m] + np.uint64(ax) * W[m]
        pf[m + 1] = pf[m] + x * zf[m]
        allzero[m + 1] = allzero[m] and x == 0
        r = partial[m + 1]
        d = r if r <= _HALF else zero - r
        e = perr[m + 1]
        if m + 1 == k:
            if allzero[k]:
                continue
            y = np.floor(pf[k] + 0.5)
            if abs(y) > X - 1:
                if nb < bounds.shape[0]:
                    for j in range(k):
                        bounds[nb, j] = coords[j]
                    nb += 1
                else:
                    overflow = True
                continue
            lo = d - e if d > e else zero
            hi = d + e
            if lo <= best:
                if nc < cands.shape[0]:
                    for j in range(k):
                        cands[nc, j] = coords[j]
                    nc += 1
                else:
                    overflow = True
                if hi < best:
                    best = hi
            continue
        slack = e + R[m + 1]
        if slack < e:
            slack = np.uint64(0xFFFFFFFFFFFFFFFF)
        if d > slack and d - slack > best:
            continue
        m += 1
        coords[m] = (0 if allzero[m] else -X) - 1
    return nc, nb, best, overflow


if HAVE_NUMBA:
    _linear_form_jit = njit(cache=True, nogil=True)(_linear_form_loop)


def linear_form_search(A, W, R, zf, X, lo1=0, hi1=None, max_cands=1 << 16, backend=None):
    """Run the box search; returns ``(candidates, boundary, incumbent_hi, overflow)``."""
    hi1 = X if hi1 is None else hi1
    backend = backend or BACKEND
    k = A.shape[0]
    cands = np.zeros((max_cands, k), dtype=np.int64)
    bounds = np.zeros((max_cands, k), dtype=np.int64)
    fn = _linear_form_jit if backend == "numba" else _linear_form_loop
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but unavailable")
    with np.errstate(over="ignore"):
        nc, nb, best, overflow = fn(A, W, R, np.asarray(zf, dtype=np.float64), np.int64(X), np.int64(lo1), np.int64(hi1), cands, bounds)
    return cands[:nc].copy(), bounds[:nb].copy(), int(best), bool(overflow)
