"""Lacunary numbers with prescribed exponents, and base-b digit checks."""

from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from .errors import InvalidSpec
from .exactnum import (
    INF,
    DoublyExponential,
    Explicit,
    GeometricCeil,
    LacunarySpec,
    RealHandle,
    as_rat,
    format_rat,
)
from .formulas import as_exponent
from .reports import INFINITY, is_inf

CITED = "CITED"
DERIVED = "DERIVED"
TRIVIAL = "TRIVIAL"

CANTOR_DIGITS = frozenset({0, 2})


@dataclass(frozen=True)
class Prediction:
    """A proven statement about one exponent: exact value, ``INFINITY``, or ``(lo, hi)`` bracket."""

    kind: str
    k: int
    value: object
    citation: str
    provenance: str = CITED


@dataclass
class ConstructionCertificate:
    handle: RealHandle
    predicted: list[Prediction]
    membership: tuple[int, frozenset] | None = None
    conjectured: list[Prediction] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    k: int = 1

    def prediction(self, kind: str, k: int) -> Prediction:
        return next(p for p in self.predicted if p.kind == kind and p.k == k)


def _liouville_predictions(kmax: int) -> list[Prediction]:
    cite = "Liouville numbers: every lambda_k and w_k infinite, uniform exponents at the Dirichlet value"
    out = []
    for k in range(1, kmax + 1):
        out += [
            Prediction("lambda", k, INFINITY, cite),
            Prediction("lambda_hat", k, mpq(1, k), cite),
            Prediction("w", k, INFINITY, cite),
            Prediction("w_hat", k, mpq(k), cite),
        ]
    return out


def bugeaud_number(alpha, tau, kmax: int = 3) -> ConstructionCertificate:
    """``zeta = 2 sum 3**(-ceil(alpha (1+tau)**n))``: a Cantor-set number with ``lambda_1 = tau``.

    ``tau = inf`` switches to the exponents ``2**(2**n)``, giving a Liouville number.
    """
    alpha = as_rat(alpha)
    if alpha <= 0:
        raise InvalidSpec("alpha must be positive")
    tau = as_exponent(tau)
    cite = "ternary Cantor construction with lambda_1 = tau"
    if is_inf(tau):
        spec = LacunarySpec(3, 2, DoublyExponential(2, 2))
        preds = [Prediction("lambda", 1, INFINITY, cite)] + _liouville_predictions(kmax)[1:]
        notes = ["tau = inf realised by a doubly exponential exponent sequence"]
    else:
        if tau < 1:
            raise InvalidSpec("tau must be at least 1")
        spec = LacunarySpec(3, 2, GeometricCeil(alpha, 1 + tau))
        preds = [Prediction("lambda", 1, tau, cite)]
        notes = []
    return ConstructionCertificate(RealHandle.lacunary(spec), preds, (3, CANTOR_DIGITS), notes=notes)


def _ratio_of(rule) -> object:
    if isinstance(rule, DoublyExponential):
        return INF
    r = rule.limit_ratio
    if r is None:
        raise InvalidSpec("explicit exponent rule must declare its limit ratio")
    return r


def meinsatz_number(b: int, k: int, rho, rule=None, coeff: int = 1) -> ConstructionCertificate:
    """``zeta = coeff * sum b**(-a_n)`` with ``a_{n+1}/a_n -> k(rho+1)``.

    Proven: ``lambda_k = rho`` for ``rho >= 1``; ``max(1/k, rho) <= lambda_k <= 1``
    for ``rho < 1``; ``lambda_hat_k = 1/k`` once ``rho >= 1/k``. The default rule
    is ``a_n = ceil((k(rho+1))**n)``, or ``2**(2**n)`` for ``rho = inf``.
    """
    if int(k) != k or k < 2:
        raise InvalidSpec("k must be an integer >= 2")
    rho = as_exponent(rho)
    if not is_inf(rho) and rho <= 0:
        raise InvalidSpec("rho must be positive")
    target = INF if is_inf(rho) else k * (rho + 1)
    if rule is None:
        rule = DoublyExponential(2, 2) if is_inf(rho) else GeometricCeil(1, target)
    declared = _ratio_of(rule)
    if declared != target:
        raise InvalidSpec(f"exponent ratio {declared} does not match k(rho+1) = {target}")
    spec = LacunarySpec(b, coeff, rule)
    notes = []
    if isinstance(rule, Explicit):
        notes.append(f"limit ratio {format_rat(rule.ratio)} declared, not verifiable from finitely many terms")
    cite = "lacunary construction with exponent ratio k(rho+1)"
    prov = CITED
    if coeff != 1:
        is_cantor_case = b == 3 and coeff == 2 and isinstance(rule, (GeometricCeil, DoublyExponential))
        if not is_cantor_case:
            prov = DERIVED
            notes.append("coefficient != 1: values carried over since exponents are invariant under integer scaling")

    preds = []
    conj = []
    if is_inf(rho):
        preds.append(Prediction("lambda", k, INFINITY, cite, prov))
    elif rho >= 1:
        preds.append(Prediction("lambda", k, rho, cite, prov))
    else:
        lo = max(mpq(1, k), rho)
        preds.append(Prediction("lambda", k, (lo, mpq(1)), cite, prov))
        conj.append(Prediction("lambda", k, rho if rho >= mpq(1, k) else lo,
                               "open conjecture: lambda_k = max(rho, 1/k)", CITED))
    if is_inf(rho) or rho >= mpq(1, k):
        preds.append(Prediction("lambda_hat", k, mpq(1, k), cite, prov))
    lam1 = INFINITY if is_inf(rho) else target - 1
    preds.append(Prediction("lambda", 1, lam1, "lacunary slope: lambda_1 = ratio - 1", DERIVED))
    membership = (b, frozenset({0, coeff}))
    return ConstructionCertificate(RealHandle.lacunary(spec), preds, membership, conj, notes, int(k))


@dataclass(frozen=True)
class MembershipVerdict:
    member: bool
    depth: int
    first_bad: tuple[int, int] | None


def _lacunary_digits(spec: LacunarySpec, depth: int) -> dict[int, int]:
    out = {}
    n = 1
    while True:
        a = spec.term(n)
        if a > depth:
            return out
        out[a] = spec.coeff
        n += 1


def digit_membership(handle: RealHandle, base: int, allowed, depth: int) -> MembershipVerdict:
    """Whether the first ``depth`` base-``base`` digits after the point lie in ``allowed``.

    Rationals are expanded by long division (terminating expansions pad with 0).
    Lacunary numbers must share the base; their digits are ``coeff`` at the
    exponent positions and ``0`` elsewhere.
    """
    allowed = frozenset(int(d) for d in allowed)
    if base < 2 or depth < 0:
        raise InvalidSpec("need base >= 2 and depth >= 0")
    if handle.is_rational:
        r = handle.value
        if not 0 <= r < 1:
            raise InvalidSpec("digit membership is defined for numbers in [0, 1)")
        p, q = int(r.numerator), int(r.denominator)
        for pos in range(1, depth + 1):
            p *= base
            d, p = divmod(p, q)
            if d not in allowed:
                return MembershipVerdict(False, depth, (pos, d))
        return MembershipVerdict(True, depth, None)
    spec = handle.spec
    if spec.base != base:
        raise InvalidSpec(f"base mismatch: number is written in base {spec.base}, not {base}")
    nonzero = _lacunary_digits(spec, depth)
    if 0 not in allowed:
        first_zero = next((p for p in range(1, depth + 1) if p not in nonzero), None)
        if first_zero is not None:
            return MembershipVerdict(False, depth, (first_zero, 0))
    if spec.coeff not in allowed and nonzero:
        return MembershipVerdict(False, depth, (min(nonzero), spec.coeff))
    return MembershipVerdict(True, depth, None)
