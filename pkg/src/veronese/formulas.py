"""Closed-form relations between the approximation exponents, evaluated in exact rationals.

Infinite exponents are carried as the marker ``INFINITY``; a value given as a
``(lo, hi)`` tuple is a proven bracket rather than an exact value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from gmpy2 import mpq

from .errors import InvalidSpec, NoApplicableResult
from .exactnum import as_rat, isqrt_enclosure
from .reports import INFINITY, FormulaResult, is_inf


def as_exponent(v):
    """Rational exponent or ``INFINITY``; accepts ``"inf"``, ``math.inf`` and anything ``as_rat`` takes."""
    if isinstance(v, str) and v.strip().lower() in ("inf", "infinity", "oo"):
        return INFINITY
    if isinstance(v, float) and math.isinf(v) and v > 0:
        return INFINITY
    if v == INFINITY:
        return INFINITY
    return as_rat(v)


def _k(k: int, least: int = 1) -> int:
    if int(k) != k or k < least:
        raise InvalidSpec(f"k must be an integer >= {least}")
    return int(k)


def _collapse(lo, hi):
    return lo if lo == hi else (lo, hi)


# ---------------------------------------------------------------------------
# asymptotic spectrum


def spectrum_formula(lambda1, k: int) -> FormulaResult:
    """``lambda_k = (lambda_1 - k + 1)/k``, valid exactly when the result exceeds 1."""
    k = _k(k)
    lam = as_exponent(lambda1)
    inputs = {"lambda1": lam, "k": k}
    name = "spectrum"
    cite = "lambda_k from lambda_1 when lambda_k > 1"
    if is_inf(lam):
        return FormulaResult(name, inputs, INFINITY, "Liouville case: every lambda_k is infinite", cite,
                             {"lambda_hat": {j: mpq(1, j) for j in range(1, k + 1)}})
    if lam < 1:
        raise InvalidSpec("lambda_1 of an irrational number is at least 1")
    val = (lam - k + 1) / k
    if val > 1:
        note = "in regime: equality holds and lambda_hat_j = 1/j for j <= k"
        extra = {"lambda_hat": {j: mpq(1, j) for j in range(1, k + 1)}}
    else:
        note = "out of regime: the identity requires the result to exceed 1, and it can fail otherwise"
        extra = {}
    return FormulaResult(name, inputs, val, note, cite, extra)


def ceil_half_plus(lam) -> int:
    """``ceil((lam + 1)/2)`` for a rational ``lam``."""
    t = (mpq(lam) + 1) / 2
    return int(-((-t.numerator) // t.denominator))


def bestens_bounds(lambda1, k: int | None = None) -> FormulaResult:
    """Index ``k0 = ceil((lambda_1+1)/2)``; exact ``lambda_k`` below it, a bracket from it on.

    Without ``k`` the value is ``k0`` and ``extra["exact"]`` lists the exact values for ``k < k0``.
    """
    lam = as_exponent(lambda1)
    cite = "lambda_k determined by lambda_1 below k0, bracketed from k0 on"
    if is_inf(lam):
        return FormulaResult("bestens", {"lambda1": lam, "k": k}, INFINITY,
                             "Liouville case: k0 is infinite and every lambda_k is infinite", cite, {"k0": INFINITY})
    if lam < 1:
        raise InvalidSpec("lambda_1 of an irrational number is at least 1")
    k0 = ceil_half_plus(lam)
    exact = {j: (lam - j + 1) / j for j in range(1, k0)}
    if k is None:
        return FormulaResult("bestens", {"lambda1": lam}, k0, f"k0 = {k0}", cite, {"k0": k0, "exact": exact})
    k = _k(k)
    inputs = {"lambda1": lam, "k": k}
    if k <= k0 - 1:
        return FormulaResult("bestens", inputs, exact[k], "exact: k <= k0 - 1", cite, {"k0": k0})
    lo = max((lam - k + 1) / k, mpq(1, k))
    val = _collapse(lo, mpq(1))
    note = "bracket: k >= k0" if isinstance(val, tuple) else "bracket endpoints coincide, value forced"
    return FormulaResult("bestens", inputs, val, note, cite, {"k0": k0, "bracket": (lo, mpq(1))})


def besten_transfer(lambda_n, n: int, m: int) -> FormulaResult:
    """``(n lambda_n + n - m)/m``: a lower bound for ``lambda_m`` when ``lambda_n > 1``, equality if also ``lambda_m > 1``."""
    n, m = _k(n), _k(m)
    if n > m:
        raise InvalidSpec("need n <= m")
    lam = as_exponent(lambda_n)
    inputs = {"lambda_n": lam, "n": n, "m": m}
    cite = "transfer from lambda_n to lambda_m"
    if is_inf(lam):
        return FormulaResult("besten", inputs, INFINITY, "Liouville case", cite)
    if n == m:
        return FormulaResult("besten", inputs, lam, "identity (n = m)", cite)
    val = (n * lam + n - m) / m
    if lam > 1 and val > 1:
        note = "equality: lambda_n > 1 and the transferred value exceeds 1"
    elif lam > 1:
        note = "lower bound only: lambda_m may be at most 1"
    else:
        note = "lower bound only, and unproven here: needs lambda_n > 1"
    return FormulaResult("besten", inputs, val, note, cite)


def holds_lower_bound(lambda_n, n: int, k: int) -> FormulaResult:
    """``lambda_{kn} >= (lambda_n - k + 1)/k``."""
    n, k = _k(n), _k(k)
    lam = as_exponent(lambda_n)
    inputs = {"lambda_n": lam, "n": n, "k": k}
    cite = "lower bound for lambda_{kn} from lambda_n"
    if is_inf(lam):
        return FormulaResult("holds", inputs, INFINITY, f"Liouville case: lambda_{k * n} is infinite", cite)
    val = (lam - k + 1) / k
    note = (f"lambda_{k * n} >= value" if lam > 1
            else "trivial: weaker than the Dirichlet bound lambda >= 1/(kn)")
    return FormulaResult("holds", inputs, val, note, cite)


# ---------------------------------------------------------------------------
# uniform exponents


def theo_bound(lambda1, k: int) -> FormulaResult:
    """``lambda_hat_k <= max(1/k, 1/lambda_1)``."""
    k = _k(k)
    lam = as_exponent(lambda1)
    inputs = {"lambda1": lam, "k": k}
    cite = "uniform exponent bounded through lambda_1"
    if is_inf(lam):
        return FormulaResult("theo", inputs, mpq(1, k), "Liouville case: lambda_hat_k = 1/k exactly", cite)
    if lam <= 0:
        raise InvalidSpec("lambda_1 must be positive")
    val = max(mpq(1, k), 1 / lam)
    if k >= 2 and val >= mpq(1, (k + 1) // 2):
        note = "vacuous against the bound 1/ceil(k/2)"
    else:
        note = "upper bound"
    return FormulaResult("theo", inputs, val, note, cite)


GOLDEN_BITS = 60


def golden_enclosure(bits: int = GOLDEN_BITS) -> tuple[mpq, mpq]:
    """Rational enclosure of ``(sqrt(5) - 1)/2`` of width ``2**-(bits+1)``."""
    s = isqrt_enclosure(5, bits)
    return (s.lo - 1) / 2, (s.hi - 1) / 2


def uniform_bounds(k: int) -> FormulaResult:
    """``lambda_hat_k <= 1/ceil(k/2)``; ``lambda_hat_1 = 1``; for ``k = 2`` also the golden-ratio bound."""
    k = _k(k)
    cite = "uniform exponent upper bound 1/ceil(k/2)"
    val = mpq(1, (k + 1) // 2)
    if k == 1:
        return FormulaResult("uniform", {"k": k}, val, "exact: lambda_hat_1 = 1 for irrational zeta",
                             "one-dimensional uniform exponent")
    extra = {}
    note = "upper bound"
    if k == 2:
        extra["golden"] = golden_enclosure()
        note = "upper bound; sharper optimal bound (sqrt(5)-1)/2 in extra['golden']"
    return FormulaResult("uniform", {"k": k}, val, note, cite, extra)


# ---------------------------------------------------------------------------
# Hausdorff dimension


REGIMES = ("auto", "jarnik", "large", "spectrum", "quadratic", "lower")


def hausdorff_dim(k: int, lam, regime: str = "auto") -> FormulaResult:
    """Dimension of ``{zeta : lambda_k(zeta) = lam}`` from the known closed forms.

    Regimes: ``jarnik`` (k = 1), ``large`` (k >= 2, lam >= k-1),
    ``spectrum`` (k >= 2, lam >= 1), ``quadratic`` (k = 2, 1/2 <= lam < 1),
    ``lower`` (the general lower bound ``2/(k(1+lam))``). ``auto`` picks the
    sharpest applicable one.
    """
    k = _k(k)
    lam = as_rat(lam)
    if regime not in REGIMES:
        raise InvalidSpec(f"unknown regime {regime!r}")
    if lam < mpq(1, k):
        raise InvalidSpec("lambda below 1/k is never attained")
    inputs = {"k": k, "lambda": lam, "regime": regime}
    dim = 2 / (k * (1 + lam))
    if regime == "auto":
        if k == 1:
            regime = "jarnik"
        elif lam >= k - 1 or lam > 1:
            regime = "large" if lam >= k - 1 else "spectrum"
        elif lam == 1:
            regime = "spectrum"
        elif k == 2:
            regime = "quadratic"
        else:
            raise NoApplicableResult(f"no dimension formula for k={k} >= 3 and 1/k <= lambda={lam} < 1")
    if regime == "jarnik":
        if k != 1 or lam < 1:
            raise InvalidSpec("jarnik regime needs k = 1 and lambda >= 1")
        return FormulaResult("hausdorff", inputs, 2 / (1 + lam), "exact: k = 1", "dimension 2/(1+lambda)")
    if regime == "large":
        if k < 2 or lam < k - 1:
            raise InvalidSpec("large regime needs k >= 2 and lambda >= k-1")
        return FormulaResult("hausdorff", inputs, dim, "exact: k >= 2, lambda >= k-1", "dimension 2/(k(1+lambda))")
    if regime == "spectrum":
        if k < 2 or lam < 1:
            raise InvalidSpec("spectrum regime needs k >= 2 and lambda >= 1")
        if lam > 1:
            return FormulaResult("hausdorff", inputs, dim, "exact: lambda > 1 via the lambda_1 identity",
                                 "dimension 2/(k(1+lambda))")
        return FormulaResult("hausdorff", inputs, (mpq(1, k), mpq(1)), "lambda = 1: dimension at least 1/k",
                             "dimension lower bound 1/k")
    if regime == "quadratic":
        if k != 2 or not mpq(1, 2) <= lam < 1:
            raise InvalidSpec("quadratic regime needs k = 2 and 1/2 <= lambda < 1")
        return FormulaResult("hausdorff", inputs, (2 - lam) / (1 + lam), "exact: k = 2, 1/2 <= lambda < 1",
                             "dimension (2-lambda)/(1+lambda)")
    if k < 2:
        raise InvalidSpec("lower regime needs k >= 2")
    return FormulaResult("hausdorff", inputs, (dim, mpq(1)), "lower bound for {lambda_k >= lambda}",
                         "dimension lower bound 2/(k(1+lambda))")


# ---------------------------------------------------------------------------
# transference


@dataclass(frozen=True)
class Check:
    name: str
    holds: bool
    lower: object = None
    upper: object = None
    tight_upper: bool = False


@dataclass(frozen=True)
class TransferenceVerdict:
    k: int
    uniform: bool
    checks: tuple[Check, ...]

    @property
    def holds(self) -> bool:
        return all(c.holds for c in self.checks)

    def check(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)


def transference_check(lam, w, k: int, uniform: bool = False) -> TransferenceVerdict:
    """Test a primal/dual pair against the transference inequalities.

    Asymptotic: ``w/((k-1)w+k) <= lam <= (w-k+1)/k`` and ``lam = 1/k iff w = k``.
    Uniform: ``(w-1)/((k-1)w) <= lam <= (w-k+1)/w``, the same equivalence, and
    ``w <= 2k-1``. ``lam`` may be None to test only the dual cap.
    """
    k = _k(k)
    w = as_rat(w)
    if w <= 0:
        raise InvalidSpec("w must be positive")
    checks = []
    if lam is not None:
        lam = as_rat(lam)
        if uniform:
            lower = (w - 1) / ((k - 1) * w) if k > 1 else None
            upper = (w - k + 1) / w
            name = "uniform-transference"
        else:
            lower = w / ((k - 1) * w + k)
            upper = (w - k + 1) / k
            name = "transference"
        ok = (lower is None or lower <= lam) and lam <= upper
        checks.append(Check(name, ok, lower, upper, lam == upper))
        checks.append(Check("dirichlet-equivalence", (lam == mpq(1, k)) == (w == k)))
    if uniform:
        checks.append(Check("dual-uniform-cap", w <= 2 * k - 1, None, mpq(2 * k - 1)))
    return TransferenceVerdict(k, uniform, tuple(checks))


def neuko_bound(w1, k: int) -> FormulaResult:
    """``w_hat_k`` from ``w_1``: exactly ``k`` when ``w_1 >= k``, else ``[k, min(w1/(w1-k+1), 2k-1)]``."""
    k = _k(k)
    w = as_exponent(w1)
    inputs = {"w1": w, "k": k}
    cite = "uniform dual exponent from w_1"
    if is_inf(w) or w >= k:
        return FormulaResult("neuko", inputs, mpq(k), "exact: w_1 >= k, and w_hat_j = j for j <= k", cite,
                             {"w_hat": {j: mpq(j) for j in range(1, k + 1)}})
    if w <= k - 1:
        raise InvalidSpec("needs w_1 > k - 1")
    hi = min(w / (w - k + 1), mpq(2 * k - 1))
    note = "bracket: k-1 < w_1 < k"
    if hi < 2 * k - 1:
        note += "; sharper than the cap 2k-1"
    return FormulaResult("neuko", inputs, _collapse(mpq(k), hi), note, cite)


def conjecture_inequality(lambda_n, n: int, m: int):
    """Right side ``(n lambda_n + n - m)/m`` of the open inequality for ``lambda_m``."""
    n, m = _k(n), _k(m)
    lam = as_exponent(lambda_n)
    if is_inf(lam):
        return INFINITY
    return (n * lam + n - m) / m
