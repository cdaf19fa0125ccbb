from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import lacunary, linear_form_min
from veronese.dual import box_size, estimate_w, scan_linear_form
from veronese.errors import BoxTooLarge, InvalidSpec
from veronese.exactnum import GeometricCeil, LacunarySpec, RealHandle, as_rat

Z = RealHandle.lacunary(LacunarySpec(2, 1, GeometricCeil(1, 4)))
Z_SHORT = lacunary(2, 1, [4, 16, 64, 256])
CANTOR = RealHandle.lacunary(LacunarySpec(3, 2, GeometricCeil(1, 4)))
CANTOR_SHORT = lacunary(3, 2, [4, 16, 64, 256])

GRID = [(1, 4), (1, 16), (1, 40), (2, 4), (2, 10), (2, 20), (2, 40), (3, 4), (3, 8), (3, 12)]


def _value_of(z: Fraction, coeffs) -> Fraction:
    return abs(sum(c * z**j for j, c in enumerate(coeffs)))


def test_rational_example():
    hit = scan_linear_form(RealHandle.rational("1/3"), 1, 3)
    assert hit.value.lo == hit.value.hi == mpq(1, 3)
    assert _value_of(Fraction(1, 3), hit.coeffs) == Fraction(1, 3)
    assert not hit.vanishing


def test_known_minimisers():
    h1 = scan_linear_form(Z, 1, 16)
    assert h1.coeffs in ((-1, 16), (1, -16))
    assert mpq(1, 2**12) < h1.value.lo and h1.value.hi < mpq(1, 2**12) + mpq(1, 2**40)
    h2 = scan_linear_form(Z, 2, 20)
    assert h2.coeffs in ((0, 1, -16), (0, -1, 16))
    assert h2.value.hi <= h1.value.hi


@pytest.mark.parametrize("k,X", [(1, 16), (1, 30), (2, 6), (2, 12), (3, 4)])
@pytest.mark.parametrize("which", ["Z", "cantor"])
def test_matches_brute_force(which, k, X):
    z, ref = (Z, Z_SHORT) if which == "Z" else (CANTOR, CANTOR_SHORT)
    hit = scan_linear_form(z, k, X)
    best = linear_form_min(ref, k, X)
    assert hit.value.contains(as_rat(best))
    assert _value_of(ref, hit.coeffs) == best
    assert hit.height == max(abs(c) for c in hit.coeffs) <= X


@settings(max_examples=40, deadline=None)
@given(st.fractions(min_value=-3, max_value=3, max_denominator=30), st.integers(1, 2), st.integers(1, 6))
def test_rational_against_brute_force(r, k, X):
    hit = scan_linear_form(RealHandle.rational(f"{r.numerator}/{r.denominator}"), k, X)
    best = linear_form_min(r, k, X)
    assert hit.value.lo == hit.value.hi == as_rat(best)


def test_monotone_in_k_and_height():
    hits = {(k, X): scan_linear_form(Z, k, X) for k, X in GRID}
    for (k, X), h in hits.items():
        if (k + 1, X) in hits:
            assert hits[(k + 1, X)].value.lo <= h.value.hi
        for (k2, X2), h2 in hits.items():
            if k2 == k and X2 > X:
                assert h2.value.lo <= h.value.hi


def test_workers_give_identical_hits():
    a = scan_linear_form(Z, 2, 60, workers=1)
    b = scan_linear_form(Z, 2, 60, workers=4)
    assert a == b


def test_box_guard():
    assert box_size(3, 1000) == 2001**3
    with pytest.raises(BoxTooLarge):
        scan_linear_form(Z, 3, 1000)
    with pytest.raises(BoxTooLarge):
        estimate_w(Z, 1, [10, 10**9])


def test_estimate_w_k1_approaches_three():
    rep = estimate_w(Z, 1, [2**4, 2**8, 2**12, 2**16])
    assert abs(rep.extrapolated - 3) <= rep.tolerance
    assert rep.extra["running_max"][-1] >= rep.samples[-1].value


def test_estimate_w_dirichlet_floor():
    rep = estimate_w(Z, 2, [4, 10, 25, 60, 120, 200])
    assert all(s.value >= 2 - 0.5 for s in rep.samples)


def test_estimate_w_rational_flagged():
    rep = estimate_w(RealHandle.rational("2/7"), 1, [4, 16])
    assert rep.flags and rep.extrapolated is None


def test_estimate_w_rejects_unsorted_heights():
    with pytest.raises(InvalidSpec):
        estimate_w(Z, 1, [16, 4])
