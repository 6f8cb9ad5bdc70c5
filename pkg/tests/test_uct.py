import pytest
from hypothesis import given, settings, strategies as st

from kkfilt.expr import Card, Iso, iso_check, parse_expr
from kkfilt.fg import FgGroup, finite_groups
from kkfilt.finite_model import FiniteModel, check_model, finite_model_check
from kkfilt.jobs import tokenize
from kkfilt.tower import DirectTower, Verdict
from kkfilt.uct import (MAPS, POSITIONS, KTheoryData, extension_profile, fine_structure,
                        jensen_obstruction, kk_filtration_diagram, kk_group, kl_group,
                        milnor_obstruction, stage_kk, topology_report)
from kkfilt.expr import invariants

WINDOW = 10


def data(text: str) -> KTheoryData:
    return KTheoryData.parse(dict(tok.split("=", 1) for tok, _ in tokenize(text)))


MIXED = data("K0A=Z/4 K1A=Z K0B=Z/6 K1B=Z")
JENSEN = data("K0A=elementary(2,1) K1A=0 K0B=Z/2 K1B=0")
NONSPLIT = data("K0A=prufer(2) K1A=0 K0B=0 K1B=InfSum(2; n)")
SAMPLES = [MIXED, JENSEN, NONSPLIT,
           data("K0A=free(2) K1A=0 K0B=Z K1B=0"),
           data("K0A=prufer(3) K1A=Z/3 K0B=Z/9 K1B=Z"),
           data("K0A=affine(2; n) K1A=Z K0B=Z/8 K1B=Sum(Z, Z/2)")]


def test_grading():
    assert KTheoryData.hom_pairs(0) == [(0, 0), (1, 1)]
    assert KTheoryData.ext_pairs(0) == [(0, 1), (1, 0)]
    assert KTheoryData.hom_pairs(1) == [(0, 1), (1, 0)]
    assert KTheoryData.ext_pairs(1) == [(0, 0), (1, 1)]


def test_stage_and_kk_examples():
    kk0, kk1 = kk_group(MIXED, 0, WINDOW), kk_group(MIXED, 1, WINDOW)
    assert str(kk0.hom.expr) == "Sum(Z, Z/2)" and str(kk0.ext.expr) == "Z/4"
    assert str(kk0.whole.expr) == "Sum(Z, Z/2, Z/4)"
    assert str(kk1.hom.expr) == "Z/6" and str(kk1.ext.expr) == "Z/2"
    assert stage_kk(MIXED, 3, 1).profile.cardinality == 12


def test_data_text_roundtrip():
    for d in SAMPLES:
        assert data(d.to_text()).to_text() == d.to_text()


small = st.sampled_from(finite_groups(12))


@settings(max_examples=40, deadline=None)
@given(small, small, small, small)
def test_cardinality_law_on_stable_finite_data(a0, a1, b0, b1):
    # |Hom(G, H)| = |Ext(G, H)| for finite groups, so both degrees have the same order
    d = KTheoryData((DirectTower.stable(a0), DirectTower.stable(a1)),
                    (parse_expr(str(b0)), parse_expr(str(b1))))
    kk = [kk_group(d, n, 4) for n in (0, 1)]
    assert kk[0].whole.profile.cardinality == kk[1].whole.profile.cardinality
    for v in kk:
        assert v.whole.profile.cardinality == \
            v.hom.profile.cardinality * v.ext.profile.cardinality
        assert v.hom.profile.cardinality == stage_kk(d, 1, v.degree).profile.cardinality // \
            v.ext.profile.cardinality


def test_extension_profile_exponent_is_not_lcm():
    z2 = invariants(parse_expr("Z/2"))
    assert extension_profile(z2, z2, split="Yes").exponent == 2
    assert extension_profile(z2, z2, split="No").exponent == "unknown"


@pytest.mark.parametrize("d", SAMPLES)
def test_fine_structure_hausdorff_and_kl(d):
    for n in (0, 1):
        fs = fine_structure(d, n, WINDOW)
        top = topology_report(d, n, WINDOW)
        assert top["hausdorff"] == {Verdict.ZERO: True, Verdict.NONZERO: False}.get(fs.verdict)
        assert all(z["consistent"] for z in top["zadic_checks"])
        kk, kl = kk_group(d, n, WINDOW).whole, kl_group(d, n, WINDOW)
        if fs.verdict == Verdict.ZERO:
            assert fs.value.is_zero
            if kk.is_plain and kl.is_plain:
                assert iso_check(kk.expr, kl.expr) != Iso.DISTINCT
        if fs.verdict == Verdict.NONZERO:
            assert not fs.value.is_zero


@pytest.mark.parametrize("d", SAMPLES)
def test_milnor_vanishing_implies_jensen_vanishing(d):
    for n in (0, 1):
        m, j = milnor_obstruction(d, n, WINDOW), jensen_obstruction(d, n, WINDOW)
        if m.verdict.startswith("Vanishes"):
            assert j.verdict.startswith("Vanishes")
        assert m.citation and j.citation


def test_nonsplit_values():
    kl = kl_group(NONSPLIT, 0, WINDOW)
    assert str(kl.expr) == "Padic(2; InfSum(2; n))"
    assert fine_structure(NONSPLIT, 0, WINDOW).verdict == Verdict.NONZERO
    assert topology_report(NONSPLIT, 0, WINDOW)["hausdorff"] is False
    jen = kk_group(JENSEN, 1, WINDOW).whole
    assert jen.profile.cardinality == Card.CONTINUUM


def test_diagram_nodes_once():
    for d in (MIXED, JENSEN, NONSPLIT):
        for n in (0, 1):
            rep = kk_filtration_diagram(d, n, WINDOW)
            assert tuple(sorted(rep.groups)) == tuple(sorted(POSITIONS))
            ends = [x for name in MAPS for x in MAPS[name][:2]]
            assert set(ends) == set(POSITIONS)
            assert set(rep.to_json()["groups"]) == set(POSITIONS)


def test_finite_model_diagram_verified():
    d = data("K0A=explicit(Z/2, Z/4; [[[2]]]) K1A=Z/2 K0B=Z/4 K1B=Z/2")
    assert d.finite_model
    for n in (0, 1):
        rep = kk_filtration_diagram(d, n, WINDOW)
        assert rep.finite_model["ok"]
        assert all(e["status"] == "Verified" for e in rep.exactness.values())
        assert not any(m["symbolic"] for m in rep.maps.values())
    with pytest.raises(ValueError):
        finite_model_check(JENSEN, 0)


class _BrokenGamma(FiniteModel):
    def build(self):
        m = super().build()
        hom = m["Hom"]
        m["gamma"] = lambda x: hom.zero()
        return m


class _BrokenRestriction(FiniteModel):
    def build(self):
        m = super().build()
        rho = m["rho"]
        m["rho"] = lambda x: tuple(0 for _ in rho(x))
        return m


def test_finite_model_negative_controls():
    kA = (DirectTower.explicit([FgGroup.cyclic(2), FgGroup.cyclic(4)],
                               [_inc(2, 4)]), DirectTower.stable(FgGroup.cyclic(2)))
    kB = (FgGroup.cyclic(4), FgGroup.cyclic(2))
    assert check_model(FiniteModel(kA, kB, 0))["ok"]
    bad = check_model(_BrokenGamma(kA, kB, 0))
    assert not bad["ok"] and not bad["checks"]["uct_row"] and bad["failures"]
    bad = check_model(_BrokenRestriction(kA, kB, 0))
    assert not bad["ok"] and not bad["checks"]["milnor_row"]


def _inc(a, b):
    from kkfilt.fg import FgHom
    from kkfilt.matrix import IntMatrix
    return FgHom(FgGroup.cyclic(a), FgGroup.cyclic(b), IntMatrix.from_rows([[b // a]]))
