from fractions import Fraction
from functools import lru_cache

import pytest
from gmpy2 import mpq

from oracles import Mx, Z4, dist, lacunary
from veronese.errors import InvalidSpec
from veronese.exactnum import DoublyExponential, GeometricCeil, LacunarySpec, RealHandle, as_rat
from veronese.simul import (
    C0,
    good_candidates,
    liouville_witness,
    scan_Mx,
    verify_lemma2,
    verify_lemma3,
)

Z_SPEC = LacunarySpec(2, 1, GeometricCeil(1, 4))
Z = RealHandle.lacunary(Z_SPEC)
CANTOR = RealHandle.lacunary(LacunarySpec(3, 2, GeometricCeil(1, 4)))
SQUARES = RealHandle.lacunary(LacunarySpec(2, 1, GeometricCeil(1, 2)))
LIOUVILLE = RealHandle.lacunary(LacunarySpec(2, 1, DoublyExponential()))
THIRD = RealHandle.rational("1/3")

# short oracle twins: the neglected tail is below 2**-200, far under any threshold at x <= 10**5
SHORT = {
    "Z": (Z, lacunary(2, 1, [4, 16, 64, 256])),
    "cantor": (CANTOR, lacunary(3, 2, [4, 16, 64, 256])),
    "squares": (SQUARES, lacunary(2, 1, [2**n for n in range(1, 10)])),
}
LIMIT = 10**5


@lru_cache(maxsize=None)
def _brute_M(name, k):
    ref = SHORT[name][1]
    powers = [ref**j for j in range(1, k + 1)]
    out = [None]
    for x in range(1, LIMIT + 1):
        out.append(max(dist(p * x) for p in powers))
    return out


def test_constant_examples():
    assert C0(2, RealHandle.rational("1/2")) == mpq(1, 6)
    assert C0(1, Z) == mpq(1, 2) and C0(1, CANTOR) == mpq(1, 2)
    assert C0(2, Z, "refined") == mpq(1, 2)
    # certified lower bound for the irrational case
    exact_bound = Fraction(1, 4) / (1 + Z4)
    assert as_rat(exact_bound) - mpq(1, 2**120) < C0(2, Z) <= as_rat(exact_bound)
    with pytest.raises(InvalidSpec):
        C0(0, Z)


def test_exact_hit_flagged():
    ap = scan_Mx(RealHandle.rational("1/2"), 2, 4)
    assert ap.exact_hit and ap.Mx.hi == 0 and ap.ys == (2, 1)


def test_known_distance_at_power_of_two():
    (err,) = scan_Mx(Z, 1, 2**16).errs
    assert mpq(1, 2**48) <= err.lo and err.hi <= mpq(1, 2**47)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_scan_encloses_oracle(k):
    for x in [1, 2, 3, 15, 16, 255, 256, 4097, 2**8 * 7, 65535, 65536, 3 * 2**16]:
        ap = scan_Mx(Z, k, x)
        assert ap.Mx.contains(as_rat(Mx(Z4, k, x)))
        assert ap.Mx.width * 8 < ap.Mx.lo or ap.Mx.width < mpq(1, 2**128)


@pytest.mark.parametrize("x", [1, 7, 16, 300, 4096, 65536, 99991])
def test_monotone_in_k(x):
    prev = None
    for k in range(1, 5):
        M = scan_Mx(Z, k, x).Mx
        if prev is not None:
            assert prev.lo <= M.hi
        assert Mx(Z4, k - 1, x) <= Mx(Z4, k, x) if k > 1 else True
        prev = M


@pytest.mark.parametrize("name,k", [("Z", 2), ("Z", 3), ("cantor", 2), ("squares", 2)])
def test_divisibility_exhaustive(name, k):
    z = SHORT[name][0]
    rep = verify_lemma2(z, k, LIMIT)
    assert rep.violations == []
    C = Fraction(int(rep.C.numerator), int(rep.C.denominator))
    M = _brute_M(name, k)
    expected = [x for x in range(1, LIMIT + 1) if 0 < M[x] and M[x] * x < C]
    assert [h.x for h in rep.hits] == expected
    for h in rep.hits:
        assert h.divides and h.convergents_ok and h.scaling_ok
        assert h.x % h.decomposition.x0**k == 0
    assert all(ok for _, _, ok in rep.scaling_checks)


def test_divisibility_workers_agree():
    a = verify_lemma2(Z, 2, 20000, workers=1)
    b = verify_lemma2(Z, 2, 20000, workers=3)
    assert [h.x for h in a.hits] == [h.x for h in b.hits] and a.violations == b.violations


def test_divisibility_rational_exact_hits():
    rep = verify_lemma2(THIRD, 2, 100)
    assert rep.hits == [] and rep.violations == []
    assert rep.exact_hits == list(range(9, 100, 9))
    assert rep.notes


def test_divisibility_needs_k_two():
    with pytest.raises(InvalidSpec):
        verify_lemma2(Z, 1, 100)


def test_scaling_identity_exact():
    base = 2**32
    for N in (1, 2, 3, 17, 255):
        assert Mx(Z4, 2, N * base) == N * Mx(Z4, 2, base)
        assert scan_Mx(Z, 2, N * base).Mx.contains(as_rat(N * Mx(Z4, 2, base)))


@pytest.mark.parametrize("T", [Fraction(5, 4), Fraction(3, 2), Fraction(2)])
@pytest.mark.parametrize("name,k", [("Z", 1), ("Z", 2), ("cantor", 2), ("squares", 2)])
def test_pruning_completeness(name, k, T):
    z = SHORT[name][0]
    M = _brute_M(name, k)
    p, d = T.numerator, T.denominator
    brute = {x for x in range(1, LIMIT + 1) if 0 < M[x] and M[x] ** d * x**p <= 1}
    cands = set(good_candidates(z, k, LIMIT, mpq(p, d)))
    assert brute <= cands


def test_good_candidates_structure():
    # lambda_2 = 1 for Z, so no convergent meets the quality bound for any T > 1
    assert [x for x in good_candidates(Z, 2, 2**35, mpq(3, 2)) if x > 1000] == []
    cands = good_candidates(LIOUVILLE, 2, 2**40, mpq(3, 2))
    big = [x for x in cands if x > 1000]
    assert big[0] == 2**32 and all(x % 2**32 == 0 for x in big)
    assert big == [N * 2**32 for N in range(1, len(big) + 1)]


def test_good_candidates_huge_T_only_qualifying():
    assert good_candidates(Z, 2, LIMIT, mpq(50)) == [1]


def test_good_candidates_rational_skips_exact_hits():
    cands = good_candidates(THIRD, 2, 1000, mpq(3, 2))
    assert all(x % 9 for x in cands)
    # the surviving x genuinely satisfy the inequality
    r = Fraction(1, 3)
    assert all(Mx(r, 2, x) ** 2 * x**3 <= 1 for x in cands)


def test_lacunary_multiples_examples():
    rep = verify_lemma3(Z_SPEC, 2, 2 * LIMIT, exponent=2)
    assert rep.violations == []
    by_x = {h[0]: h for h in rep.hits}
    assert by_x[2**16] == (2**16, 2**12 + 1, 2, 1)
    assert by_x[3 * 2**16][2:] == (2, 3)
    x = 3 * 2**16
    assert abs(Z4 * x - 3 * (2**12 + 1)) <= Fraction(1, x**2)


def test_lacunary_multiples_against_brute_force():
    ref = SHORT["Z"][1]
    rep = verify_lemma3(Z_SPEC, 2, LIMIT, exponent=2)
    found = {(h[0], h[1]) for h in rep.hits} | set(rep.small_x_exceptions)
    brute = {(x, round(ref * x)) for x in range(1, LIMIT + 1) if dist(ref * x) * x * x <= 1}
    assert found == brute


def test_liouville_examples():
    for k in (1, 2, 3):
        rep = liouville_witness(THIRD, k, 100)
        assert rep.witness is None
    rep = liouville_witness(SQUARES, 2, LIMIT)
    assert rep.witness is None and rep.exhaustive
    assert "not a proof" in rep.note


def test_liouville_doubly_exponential_k2():
    rep = liouville_witness(LIOUVILLE, 2, 2**40)
    assert rep.witness is not None
    assert Mx(lacunary(2, 1, [4, 16, 256, 65536]), 2, rep.witness) * rep.witness < Fraction(1, 6)
