"""Finite-scale estimators for the simultaneous exponents, plus re-exported closed forms.

Slopes ``-log M / log x`` are descriptive only: they are taken at the
midpoint of a certified enclosure and never used for a pass/fail verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from gmpy2 import mpq

from . import kernels
from .contfrac import convergents
from .errors import AmbiguousDistance, BoxTooLarge, InvalidSpec, PrecisionExhausted
from .exactnum import RealHandle, depth_schedule
from .formulas import (
    bestens_bounds,
    besten_transfer,
    conjecture_inequality,
    hausdorff_dim,
    holds_lower_bound,
    neuko_bound,
    spectrum_formula,
    theo_bound,
    transference_check,
    uniform_bounds,
)
from .reports import ExponentReport, Sample, log2_int, log2_rat, slope
from .simul import _approximant_at, _fixed_point_powers, _start_bits, scan_Mx

LAMBDA_TOL = 0.15
LAMBDA_HAT_TOL = 0.10
DENSE_LIMIT = 1 << 20
RECORD_CAP = 1 << 34
_TOP = 4

__all__ = [
    "estimate_lambda", "estimate_lambda_hat", "conjecture_evidence", "ConjectureEvidence",
    "record_sequence", "spectrum_formula", "bestens_bounds", "besten_transfer", "holds_lower_bound",
    "theo_bound", "uniform_bounds", "hausdorff_dim", "transference_check", "neuko_bound",
]


def _scales(scales) -> list[int]:
    out = [int(s) for s in scales]
    if not out or out != sorted(out) or len(set(out)) != len(out) or out[0] < 2:
        raise InvalidSpec("scales must be a strictly ascending list of integers >= 2")
    return out


def _exact_slope(z, k, x):
    ap = scan_Mx(z, k, x)
    if ap.exact_hit:
        return math.inf, ap
    return slope(ap.Mx.mid, x), ap


# ---------------------------------------------------------------------------
# asymptotic exponent


def _structured_candidates(z: RealHandle, k: int, X: int) -> list[int]:
    """Convergent denominators ``q`` of zeta and their powers ``q**j``, ``j <= k``, up to ``X``."""
    out = set()
    for c in convergents(z, X):
        p = c.q
        for _ in range(k):
            if p > X:
                break
            out.add(p)
            p *= c.q
    out.discard(1)
    return sorted(out)


def _dense_best(z, k, lo, hi, workers, backend):
    """Exactly confirmed best slope over ``lo <= x <= hi`` (small ``x``), via kernel preselection."""
    A, W = _fixed_point_powers(z, k)
    pool = []
    for x0, m_lo, m_hi in kernels.iter_mx_bounds(A, W, lo, hi + 1, workers=workers, backend=backend):
        xs = np.arange(x0, x0 + m_lo.shape[0], dtype=np.float64)
        mid = (m_lo.astype(np.float64) + m_hi.astype(np.float64)) / 2 + 0.5
        est = (64 - np.log2(mid)) / np.log2(xs)
        top = np.argsort(-est, kind="stable")[:_TOP]
        pool.extend((float(est[i]), int(x0 + i)) for i in top)
    pool.sort(key=lambda t: (-t[0], t[1]))
    return [x for _, x in pool[:_TOP]]


def estimate_lambda(z: RealHandle, k: int, scales, workers: int = 1, backend=None,
                    dense_limit: int = DENSE_LIMIT) -> ExponentReport:
    """Window maxima of ``-log M_x / log x`` over ``prev scale < x <= scale``.

    Candidates: convergent denominators and their powers up to ``k``, plus
    every ``x <= dense_limit`` (kernel preselection, exact confirmation).
    The first window starts at ``x = 2``.
    """
    scales = _scales(scales)
    rep = ExponentReport("lambda", k, tolerance=LAMBDA_TOL)
    if z.is_rational:
        rep.flags.append("rational: lambda = 0 by convention")
        rep.extrapolated = 0.0
        return rep
    structured = _structured_candidates(z, k, scales[-1])
    prev = 1
    for X in scales:
        cands = [x for x in structured if prev < x <= X]
        if prev < dense_limit:
            cands += _dense_best(z, k, prev + 1, min(X, dense_limit), workers, backend)
        best = None
        for x in sorted(set(cands)):
            v, _ = _exact_slope(z, k, x)
            if best is None or v > best[0]:
                best = (v, x)
        if best is not None:
            rep.samples.append(Sample(X, best[0], best[1]))
        prev = X
    if rep.samples:
        rep.extrapolated = rep.samples[-1].value
    return rep


# ---------------------------------------------------------------------------
# uniform exponent


def _bounds_at(A, W, xs: np.ndarray):
    xs = xs.astype(np.uint64)
    lo = np.zeros(xs.shape, dtype=np.uint64)
    hi = np.zeros(xs.shape, dtype=np.uint64)
    with np.errstate(over="ignore"):
        for j in range(A.shape[0]):
            r = xs * A[j]
            d = np.minimum(r, -r)
            e = xs * W[j]
            np.maximum(lo, np.where(d > e, d - e, np.uint64(0)), out=lo)
            np.maximum(hi, d + e, out=hi)
    return lo, hi


def record_sequence(z: RealHandle, k: int, stop: int, workers: int = 1, backend=None,
                    cap: int = RECORD_CAP) -> list[tuple[int, object]]:
    """Every ``x < stop`` with ``M_x < M_v`` for all ``v < x``, with its certified ``M_x``.

    ``k = 1`` reads the records off the convergents; ``k >= 2`` scans every
    ``x`` with the fixed-point kernel and confirms the survivors exactly.
    """
    if k == 1:
        out = []
        for c in convergents(z, stop - 1):
            if out and c.q == out[-1][0]:
                continue
            out.append((c.q, scan_Mx(z, 1, c.q).Mx))
        return out
    if stop > cap:
        raise BoxTooLarge(f"exhaustive record scan up to {stop} exceeds the cap {cap}")
    A, W = _fixed_point_powers(z, k)
    cands = kernels.record_candidates(A, W, 1, stop, workers=workers, backend=backend)
    lo, hi = _bounds_at(A, W, cands)
    records = []
    best = None
    for x, l, h in zip(cands.tolist(), lo.tolist(), hi.tolist()):
        if best is not None:
            bx, bl, bh = best
            if l >= bh:
                continue
            if h >= bl and not _smaller(z, k, x, bx):
                continue
        best = (x, l, h)
        records.append(x)
    return [(x, scan_Mx(z, k, x).Mx) for x in records]


def _smaller(z, k, x, y, max_deepen: int = 24) -> bool:
    """Certified ``M_x < M_y``, both evaluated at a common truncation depth."""
    bits = _start_bits(k, max(x, y))
    for depth in depth_schedule(z, bits, max_deepen):
        try:
            a = _approximant_at(z, k, x, depth).Mx
            b = _approximant_at(z, k, y, depth).Mx
        except AmbiguousDistance:
            continue
        if a.hi < b.lo:
            return True
        if a.lo >= b.hi:
            return False
    raise PrecisionExhausted(f"precision exhausted: cannot order M_{x} and M_{y}")


def estimate_lambda_hat(z: RealHandle, k: int, scales, workers: int = 1, backend=None,
                        cap: int = RECORD_CAP) -> ExponentReport:
    """Uniform estimator at record boundaries ``X = r_next - 1``.

    ``U(X) = -log M_r / log X`` where ``r`` is the last record not exceeding
    ``X``. Each scale reports the smallest ``U`` over the boundaries in its
    window; ``extra["boundaries"]`` keeps every boundary sample.
    """
    scales = _scales(scales)
    rep = ExponentReport("lambda_hat", k, tolerance=LAMBDA_HAT_TOL)
    if z.is_rational:
        rep.flags.append("rational: lambda_hat = 0 by convention")
        rep.extrapolated = 0.0
        return rep
    recs = record_sequence(z, k, scales[-1] + 2, workers, backend, cap)
    boundary = []
    for (r, M), (nxt, _) in zip(recs, recs[1:]):
        X = nxt - 1
        if X >= 2:
            boundary.append((X, -log2_rat(M.mid) / log2_int(X), r))
    rep.extra["boundaries"] = boundary
    rep.extra["records"] = [r for r, _ in recs]
    prev = 1
    for X in scales:
        window = [b for b in boundary if prev < b[0] <= X]
        if window:
            b = min(window, key=lambda t: (t[1], t[0]))
            rep.samples.append(Sample(X, b[1], b[2]))
        prev = X
    if rep.samples:
        rep.extrapolated = rep.samples[-1].value
    return rep


# ---------------------------------------------------------------------------
# open inequality between lambda_n and lambda_m


@dataclass
class ConjectureEvidence:
    m: int
    n: int
    lambda_n: ExponentReport
    lambda_m: ExponentReport
    right_side: float | None
    holds: bool | None
    notes: list

    caveat: str = "evidence only"


def conjecture_evidence(z: RealHandle, m: int, n: int, scales, workers: int = 1, backend=None,
                        tolerance: float = LAMBDA_TOL) -> ConjectureEvidence:
    """Estimate ``lambda_n`` and ``lambda_m`` and test ``lambda_m >= (n lambda_n + n - m)/m`` on them."""
    if m < 1 or n < 1:
        raise InvalidSpec("m and n must be positive")
    notes = []
    if m < n:
        notes.append("m < n lies outside the open question; counterexamples exist for m = 1 whenever lambda_1 < 2")
    if (m, n) == (4, 3):
        notes.append("smallest non-trivial pair")
    if m == n:
        notes.append("identity: always holds")
    lam_n = estimate_lambda(z, n, scales, workers, backend)
    lam_m = lam_n if m == n else estimate_lambda(z, m, scales, workers, backend)
    if lam_n.extrapolated is None or lam_m.extrapolated is None:
        return ConjectureEvidence(m, n, lam_n, lam_m, None, None, notes + ["no samples"])
    rhs = float(conjecture_inequality(_as_fraction(lam_n.extrapolated), n, m))
    holds = lam_m.extrapolated >= rhs - tolerance
    return ConjectureEvidence(m, n, lam_n, lam_m, rhs, holds, notes)


def _as_fraction(v: float):
    return "inf" if math.isinf(v) else mpq(v)
