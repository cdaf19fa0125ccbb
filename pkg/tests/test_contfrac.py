from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (
    Z4,
    best_approximation_denominators,
    convergent_denominators,
    dist,
    independent_pair,
    lacunary,
)
from veronese.contfrac import (
    best_approximations,
    certified_distance,
    check_prop1,
    convergents,
    decompose,
    partial_quotients,
)
from veronese.errors import ExactHit, PreconditionViolated
from veronese.exactnum import GeometricCeil, LacunarySpec, RealHandle

Z = RealHandle.lacunary(LacunarySpec(2, 1, GeometricCeil(1, 4)))
CANTOR = RealHandle.lacunary(LacunarySpec(3, 2, GeometricCeil(1, 4)))
RATIO3 = RealHandle.lacunary(LacunarySpec(2, 1, GeometricCeil(1, 3)))

# oracle twins, truncated far below any compared distance
TWINS = {
    "Z": (Z, Z4),
    "cantor": (CANTOR, lacunary(3, 2, [4**n for n in range(1, 7)])),
    "ratio3": (RATIO3, lacunary(2, 1, [3**n for n in range(1, 9)])),
}


def test_rational_convergents():
    cs = convergents(RealHandle.rational("7/3"), 10)
    assert [(c.p, c.q) for c in cs] == [(2, 1), (7, 3)]
    assert all(c.certified for c in cs)


def test_canonical_last_quotient():
    assert partial_quotients(mpq(7, 3)) == [2, 3]
    assert partial_quotients(mpq(1, 2)) == [0, 2]


def test_known_convergent_denominators():
    qs = [c.q for c in convergents(Z, 2**16)]
    assert 16 in qs and 2**16 in qs
    c16 = next(c for c in convergents(Z, 16) if c.q == 16)
    assert c16.p == 1 and c16.certified


def test_best_approximation_examples():
    assert best_approximations(RealHandle.rational("2/5"), 5) == [1, 2, 5]
    assert 16 in best_approximations(Z, 20)
    for z in (Z, CANTOR, RATIO3):
        assert best_approximations(z, 1) == [1]


@pytest.mark.parametrize("name", sorted(TWINS))
def test_duality_against_brute_force(name):
    z, ref = TWINS[name]
    Q = 10**4
    brute = best_approximation_denominators(ref, Q)
    assert best_approximations(z, Q) == brute
    assert [c.q for c in convergents(z, Q)] == convergent_denominators(ref, Q)


@settings(max_examples=60, deadline=None)
@given(st.fractions(min_value=0, max_value=5, max_denominator=400), st.integers(1, 500))
def test_duality_for_rationals(r, Q):
    z = RealHandle.rational(f"{r.numerator}/{r.denominator}")
    brute = best_approximation_denominators(r, Q)
    assert best_approximations(z, Q) == brute
    assert [c.q for c in convergents(z, Q)] == convergent_denominators(r, Q)


def test_decompose_examples():
    d = decompose(Z, 2**16)
    assert (d.x0, d.y0, d.M0) == (2**16, 2**12 + 1, 1)
    d3 = decompose(Z, 3 * 2**16)
    assert (d3.x0, d3.y0, d3.M0) == (2**16, 2**12 + 1, 3)
    with pytest.raises(PreconditionViolated):
        decompose(Z, 5)


def test_decompose_exact_hit_on_rationals():
    with pytest.raises(ExactHit):
        decompose(RealHandle.rational("1/3"), 6)
    d = decompose(RealHandle.rational("1/7"), 1)
    assert d == (1, 0, 1)


@pytest.mark.parametrize("name", sorted(TWINS))
def test_decomposition_identity_exhaustive(name):
    z, ref = TWINS[name]
    best = None
    for x in range(1, 10**4 + 1):
        dx = dist(ref * x)
        best = dx if best is None else min(best, dx)
        if dx >= Fraction(1, 2 * x):
            continue
        d = decompose(z, x)
        # distance identity, exactly on the oracle twin
        assert dx == d.M0 * dist(ref * d.x0)
        assert dist(ref * d.x0) == best
        # and as certified enclosures
        whole = certified_distance(z, x).err
        part = certified_distance(z, d.x0).err.scale(d.M0)
        assert whole.lo <= part.hi and part.lo <= whole.hi


def test_independent_pair_examples():
    v = check_prop1(Z, 100)
    assert v.consistent and v.directions == [(16, 1)]
    assert check_prop1(RealHandle.rational("1/2"), 1).consistent


@pytest.mark.parametrize("Q", [10, 37, 256, 1000])
@pytest.mark.parametrize("name", sorted(TWINS))
def test_independent_pairs_match_oracle(name, Q):
    z, ref = TWINS[name]
    v = check_prop1(z, Q)
    assert v.consistent
    assert not independent_pair(ref, Q)
