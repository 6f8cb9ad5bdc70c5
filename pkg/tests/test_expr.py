import math

import pytest
from hypothesis import given, settings, strategies as st

from kkfilt.expr import (Card, Cyclic, InfProduct, InfSum, Iso, ParseError, Prufer,
                         as_fg, canonicalize, ext_from_fg, format_expr, hom_from_fg,
                         invariants, iso_check, parse_expr, quotient_by, torsion_subgroup_at)
from kkfilt.fg import FgGroup, ext_group, from_cyclic_orders, hom_group

P = parse_expr
C = FgGroup.cyclic


def canon(text):
    return str(canonicalize(P(text)))


def test_canonical_forms():
    assert canon("Sum(Z/2, Z/3)") == "Z/6"
    assert canon("Sum(Prufer(2), Z^0)") == "Prufer(2)"
    assert canonicalize(P("InfSum(2; 1)")) != canonicalize(InfProduct(Cyclic(2)))


def test_profiles():
    prod = invariants(P("InfProduct(Z/2)"))
    assert prod.cardinality == Card.CONTINUUM and prod.exponent == 2
    pr = invariants(Prufer(5))
    assert pr.divisible is True and pr.torsionfree is False
    s = invariants(P("InfSum(3; n)"))
    assert s.cardinality == Card.COUNTABLE and s.exponent == "infinite"
    assert s.reduced is True and s.sum_of_cyclics is True


def test_torsion_and_quotients():
    assert str(torsion_subgroup_at(P("InfSum(3; n)"), 9)) == "Sum(Z/3, InfSum(3; 2))"
    assert str(torsion_subgroup_at(Prufer(3), 3)) == "Z/3"
    assert str(torsion_subgroup_at(P("Z"), 5)) == "0"
    assert str(quotient_by(Prufer(2), 2)) == "0"
    assert str(quotient_by(P("InfSum(2; n)"), 8)) == "Sum(Z/2, Z/4, InfSum(2; 3))"
    assert str(quotient_by(P("Z/6"), 4)) == "Z/2"


def test_hom_ext_from_fg():
    assert str(hom_from_fg(C(4), P("InfSum(2; n)"))) == "Sum(Z/2, InfSum(2; 2))"
    assert str(hom_from_fg(FgGroup.free(1), Prufer(2))) == "Prufer(2)"
    assert str(hom_from_fg(C(2), Prufer(3))) == "0"
    assert str(ext_from_fg(C(4), P("InfSum(2; n)"))) == "Sum(Z/2, InfSum(2; 2))"
    assert str(ext_from_fg(FgGroup.free(2), P("Z/3"))) == "0"
    assert str(ext_from_fg(C(2), P("Z/2"))) == "Z/2"


def test_iso_check():
    assert iso_check(P("InfProduct(Z/2)"), P("InfSum(2; 1)")) == Iso.DISTINCT
    assert iso_check(P("Sum(Z/2, Z/3)"), P("Z/6")) == Iso.EQUAL
    assert iso_check(P("Padic(2; InfSum(2; n))"), P("Padic(2; InfSum(2; 2n))")) == Iso.UNDECIDED


def test_parse_errors():
    for bad in ("Z/", "Sum(Z", "InfSum(4; n)", "Prufer(x)", "Z/2 + Z/3"):
        with pytest.raises((ParseError, ValueError)):
            P(bad)


fg_terms = st.lists(st.sampled_from(["Z", "Z/2", "Z/3", "Z/4", "Z/6", "Z/9", "Z/8"]),
                    min_size=0, max_size=4)
inf_terms = st.lists(st.sampled_from(["Prufer(2)", "Prufer(3)", "InfSum(2; n)", "InfSum(3; 1)",
                                      "InfProduct(Z/2)", "Z[1/6]", "Padic(2; Z)",
                                      "Padic(3; InfSum(3; n))", "InfSum(2; 2n+1)"]),
                     min_size=0, max_size=3)


def _sum(terms):
    return P("Sum(" + ", ".join(terms) + ")") if terms else P("0")


@settings(max_examples=80, deadline=None)
@given(fg_terms, inf_terms)
def test_canonicalize_idempotent_and_roundtrip(fg, inf):
    e = canonicalize(_sum(fg + inf))
    assert canonicalize(e) == e
    assert canonicalize(P(format_expr(e))) == e


@settings(max_examples=80, deadline=None)
@given(fg_terms)
def test_fg_fragment_matches_fg_core(terms):
    g = as_fg(_sum(terms))
    orders = [0 if t == "Z" else int(t[2:]) for t in terms]
    torsion = from_cyclic_orders([o for o in orders if o])
    assert g.rank == orders.count(0) and g.torsion == torsion.torsion
    prof = invariants(_sum(terms))
    if g.rank == 0:
        assert prof.cardinality == math.prod(orders or [1])
        assert prof.exponent == math.lcm(1, *orders)
    for h in (C(4), C(6), FgGroup.free(1)):
        assert as_fg(hom_from_fg(h, _sum(terms))) == hom_group(h, g).group
        assert as_fg(ext_from_fg(h, _sum(terms))) == ext_group(h, g)


@settings(max_examples=60, deadline=None)
@given(inf_terms, inf_terms)
def test_profile_of_sum(a, b):
    pa, pb, ps = invariants(_sum(a)), invariants(_sum(b)), invariants(_sum(a + b))
    for flag in ("divisible", "torsionfree", "reduced"):
        x, y, z = getattr(pa, flag), getattr(pb, flag), getattr(ps, flag)
        if x is True and y is True:
            assert z is True
        if x is False or y is False:
            assert z is False
    if "infinite" in (pa.exponent, pb.exponent):
        assert ps.exponent == "infinite"
    if Card.CONTINUUM in (pa.cardinality, pb.cardinality):
        assert ps.cardinality == Card.CONTINUUM


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([2, 3]), st.integers(1, 4), st.integers(0, 3), st.integers(1, 3))
def test_infsum_torsion_quotient_coordinatewise(p, a, b, k):
    e = InfSum(p, a, b)
    d = p ** k
    t = torsion_subgroup_at(e, d)
    q = quotient_by(e, d)
    # both are sum over n of Z/p^min(an+b, k); bounded, so exponent is at most d
    for x in (t, q):
        prof = invariants(x)
        assert isinstance(prof.exponent, int) and d % prof.exponent == 0
    assert canonicalize(t) == canonicalize(q)
