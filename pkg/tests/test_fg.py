import pytest
from hypothesis import given, settings, strategies as st

from kkfilt.fg import (AmbientMismatch, ExplicitExtension, FgGroup, FgHom, NotExact, ShortExact,
                       Subgroup, ext_group, ext_induced_co, ext_induced_contra,
                       fg_from_presentation, finite_groups, from_cyclic_orders, hom_group,
                       hom_induced, purity_check, six_term_check, subgroup_equal,
                       subgroup_quotient)
from kkfilt.matrix import IntMatrix

Z = FgGroup.free(1)
C = FgGroup.cyclic


def hom(src, dst, rows):
    return FgHom(src, dst, IntMatrix.from_rows(rows, src.ngens))


def test_canonical_groups():
    assert from_cyclic_orders([2, 3]) == C(6)
    assert from_cyclic_orders([2, 4, 1]) == FgGroup(0, (2, 4))
    with pytest.raises(ValueError):
        FgGroup(0, (4, 2))


def test_presentations():
    assert fg_from_presentation(IntMatrix.from_rows([[2, 0], [0, 3]])) == C(6)
    assert fg_from_presentation(IntMatrix.zeros(0, 3)) == FgGroup.free(3)
    assert fg_from_presentation(IntMatrix.from_rows([[1]])).is_trivial


def test_hom_examples():
    assert hom_group(C(4), C(6)).group == C(2)
    assert hom_group(C(2), Z).group.is_trivial
    assert hom_group(FgGroup.free(2), C(3)).group == FgGroup(0, (3, 3))


def test_ext_examples():
    assert ext_group(C(2), Z) == C(2)
    assert ext_group(Z, C(5)).is_trivial
    assert ext_group(C(4), C(6)) == C(2)


def test_induced_maps():
    incl = hom(C(2), C(4), [[2]])
    f = ext_induced_contra(incl, C(4))
    assert f.source == C(4) and f.target == C(2) and f.is_surjective()
    ident = FgHom.identity(C(6))
    assert hom_induced(ident, C(4)).is_iso()
    assert ext_induced_contra(FgHom.zero(C(2), C(4)), C(4)).is_zero()
    assert ext_induced_co(C(2), hom(Z, Z, [[2]])).is_zero()
    assert ext_induced_co(C(2), FgHom.identity(Z)).is_iso()


def test_subgroups():
    two = hom(Z, Z, [[2]])
    assert subgroup_quotient(Z, two.image()) == C(2)
    k = hom(C(4), C(4), [[2]]).kernel()
    assert k.order() == 2 and k.elements() == {(0,), (2,)}
    assert subgroup_equal(two.image(), hom(Z, Z, [[-2]]).image())
    with pytest.raises(AmbientMismatch):
        two.image() <= Subgroup.whole(C(2))


def test_six_term():
    ses = ShortExact(hom(Z, Z, [[2]]), hom(Z, C(2), [[1]]))
    rep = six_term_check(ses, C(2))
    assert rep.exact and rep.maps["delta"].is_iso()
    split = ShortExact(hom(Z, FgGroup(1, (2,)), [[1], [0]]),
                       hom(FgGroup(1, (2,)), C(2), [[0, 1]]))
    assert six_term_check(split, C(3)).maps["delta"].is_zero()
    ses = ShortExact(hom(C(2), C(4), [[2]]), hom(C(4), C(2), [[1]]))
    rep = six_term_check(ses, C(2))
    assert rep.exact
    assert rep.groups["Hom(G,H)"].order == 2 and rep.groups["Ext(G,H)"].order == 2
    with pytest.raises(NotExact):
        six_term_check(ShortExact(hom(Z, Z, [[2]]), hom(Z, C(4), [[1]])), C(2))


def test_purity():
    e = ExplicitExtension.build(hom(Z, Z, [[2]]), hom(Z, C(2), [[1]]))
    per_n, pure = purity_check(e, 3)
    assert not pure and per_n[1] and not per_n[2]
    g = FgGroup(0, (2, 4))
    e = ExplicitExtension.build(hom(C(2), g, [[1], [0]]), hom(g, C(4), [[0, 1]]))
    assert purity_check(e, 8)[1]


def test_finite_groups_catalog():
    gs = finite_groups(32)
    assert len({g for g in gs}) == len(gs)
    assert sum(1 for g in gs if g.order == 32) == 7
    assert sum(1 for g in gs if g.order == 16) == 5


groups = st.sampled_from(finite_groups(24) + [Z, FgGroup(1, (2,)), FgGroup.free(2)])


@settings(max_examples=60, deadline=None)
@given(groups, groups)
def test_hom_ext_structural(g, h):
    hs = hom_group(g, h)
    for b in hs.basis:
        assert b.source == g and b.target == h
    # Hom and Ext of sums split
    e = ext_group(g, h)
    assert e.rank == 0
    if g.rank and not g.torsion:
        assert e.is_trivial
    if g.is_finite and h.is_finite:
        assert hs.group.order == e.order


@settings(max_examples=40, deadline=None)
@given(groups, st.integers(2, 6))
def test_restriction_functoriality(h, n):
    # Z/n -> Z/(2n) -> Z/(4n): restriction of a composite is the composite of restrictions
    f1 = hom(C(n), C(2 * n), [[2]])
    f2 = hom(C(2 * n), C(4 * n), [[2]])
    comp = f2.compose(f1)
    for induced in (hom_induced, ext_induced_contra):
        assert induced(comp, h) == induced(f1, h).compose(induced(f2, h))
