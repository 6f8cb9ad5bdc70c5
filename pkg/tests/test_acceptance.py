"""Acceptance criteria 1-10.  Each test prints one PASS/FAIL line via conftest."""

import math
from itertools import product

import pytest

from kkfilt.catalog import RULE_SUITE, lookup, run_catalog
from kkfilt.expr import Card, Cyclic, InfProduct, as_fg, invariants, parse_expr
from kkfilt.jobs import tokenize
from kkfilt.fg import FgGroup, ext_group, finite_groups, hom_group
from kkfilt.finite_model import run_random
from kkfilt.tower import (Certificate, ProDescriptor, DirectTower, Verdict, apply_ext, ext_of_colimit,
                          jensen_kernel_profile, lim1, parse_tower, pext, replay,
                          zadic_closure_check)
from kkfilt.uct import (KTheoryData, fine_structure, jensen_obstruction, kk_group, kl_group,
                        lim1_gamma_check, milnor_obstruction, stage_kk)

MAX_ORDER = 36
WINDOW = 12
GROUPS = finite_groups(MAX_ORDER)


# --------------------------------------------------------------------------
# independent oracles on plain coordinate tuples


def _elements(g: FgGroup):
    return list(product(*(range(d) for d in g.torsion)))


def _mul(g: FgGroup, n: int, x):
    return tuple((n * a) % d for a, d in zip(x, g.torsion))


def _killed(g: FgGroup, n: int, xs):
    zero = (0,) * len(g.torsion)
    return [x for x in xs if _mul(g, n, x) == zero]


def hom_oracle_counts(g: FgGroup, h: FgGroup) -> dict[int, int]:
    """#{phi : n phi = 0} for n | |H|, by enumerating generator assignments.

    A homomorphism sends the generator of order d to some x with d x = 0;
    each generator is enumerated over all of H.
    """
    hs = _elements(h)
    allowed = [_killed(h, d, hs) for d in g.torsion]
    counts = {}
    for n in range(1, h.order + 1):
        if h.order % n == 0:
            counts[n] = math.prod(len(_killed(h, n, a)) for a in allowed)
    return counts


def ext_oracle_count(a: int, h: FgGroup) -> int:
    """Classes of extensions of Z/a by H, enumerated as cocycles modulo coboundaries.

    An extension is fixed by the element e = a t of H, t a lift of the
    generator; changing the lift changes e by a multiple of a.
    """
    hs = _elements(h)
    coboundaries = {_mul(h, a, x) for x in hs}
    seen, classes = set(), 0
    for e in hs:
        if e in seen:
            continue
        classes += 1
        seen.update(tuple((u + v) % d for u, v, d in zip(e, b, h.torsion))
                     for b in coboundaries)
    return classes


def group_counts(g: FgGroup, bound: int) -> dict[int, int]:
    return {n: math.prod(math.gcd(n, d) for d in g.torsion)
            for n in range(1, bound + 1) if bound % n == 0}


# --------------------------------------------------------------------------


def test_criterion_01_hom_ext_oracles():
    bad = []
    for g in GROUPS:
        for h in GROUPS:
            hom = hom_group(g, h).group
            if not hom.is_finite or group_counts(hom, h.order) != hom_oracle_counts(g, h):
                bad.append(("hom", g, h, hom))
    for h in GROUPS:
        for a in range(1, MAX_ORDER // h.order + 1):
            e = ext_group(FgGroup.cyclic(a), h)
            if e.order != ext_oracle_count(a, h):
                bad.append(("ext", a, h, e))
    assert not bad, bad[:5]


def test_criterion_02_hom_ext_same_order():
    bad = [(g, h) for g in GROUPS for h in GROUPS
           if hom_group(g, h).group.order != ext_group(g, h).order]
    assert not bad, bad[:5]


def test_criterion_03_jensen_example():
    t, h = DirectTower.elementary(2, 1), parse_expr("Z")
    ext = ext_of_colimit(t.colimit(), h)
    prof = invariants(ext)
    assert ext == InfProduct(Cyclic(2))
    assert prof.cardinality == Card.CONTINUUM and prof.exponent == 2
    pr = pext(t, h, WINDOW)
    assert pr.verdict == Verdict.ZERO
    z = zadic_closure_check(ext, pr.verdict)
    assert z.trivial and z.consistent and isinstance(prof.exponent, int)   # Z-adic discrete
    jp = jensen_kernel_profile(t, h, WINDOW, pr)
    assert jp["discrete"] is False
    for n in range(1, WINDOW + 1):
        stage = jp["stages"][n - 1]
        assert stage["kernel"] == f"prod_(k>{n}) Z/2" and stage["trivial"] is False
    assert run_catalog("remark24")["ok"]


def test_criterion_04_realized_jensen_example():
    data = KTheoryData((DirectTower.elementary(2, 1), DirectTower.stable(FgGroup.cyclic(1))),
                       (parse_expr("Z/2"), parse_expr("0")))
    kk1 = kk_group(data, 1, WINDOW)
    assert str(kk1.whole.expr) == "InfProduct(Z/2)" and str(kk1.ext.expr) == "InfProduct(Z/2)"
    assert kk1.hom.is_zero
    assert kk1.whole.profile.cardinality == Card.CONTINUUM
    fs = fine_structure(data, 1, WINDOW)
    assert fs.verdict == Verdict.ZERO and fs.value.is_zero
    # grading: Ext(K_0(A), K_0(B)) sits in degree 1, stage by stage as well
    for i in range(1, 5):
        prof = stage_kk(data, i, 1).profile
        assert prof.cardinality == 2 ** i and prof.exponent == 2
    assert kk_group(data, 0, WINDOW).ext.is_zero
    assert run_catalog("remark46")["ok"]


@pytest.mark.parametrize("p", [2, 3])
def test_criterion_05_nonsplit_example(p):
    data = KTheoryData((DirectTower.prufer(p), DirectTower.stable(FgGroup.cyclic(1))),
                       (parse_expr("0"), parse_expr(f"InfSum({p}; n)")))
    for n in (0, 1):
        assert kk_group(data, n, WINDOW).hom.is_zero
    pr = pext(data.kA[0], data.kB[1], WINDOW)
    assert pr.verdict == Verdict.NONZERO
    assert pr.certificate.decided_by() == ["SelfSimilarStrictDescent"]
    assert pr.certificate.window == WINDOW and replay(pr.certificate)
    assert str(kl_group(data, 0, WINDOW).expr) == f"Padic({p}; InfSum({p}; n))"
    m, j = milnor_obstruction(data, 0, WINDOW), jensen_obstruction(data, 0, WINDOW)
    assert m.verdict == j.verdict == "NonzeroPaperBacked"
    assert m.citation and j.citation and j.metadata["order"] == "infinite"


def test_criterion_06_rule_suite():
    assert len(RULE_SUITE) >= 12
    kinds = set()
    for tower, target, want in RULE_SUITE:
        t, h = parse_tower(tower), parse_expr(target)
        pr = pext(t, h, WINDOW)
        assert pr.rule.verdict.value == want, (tower, target)
        if want == "Zero":
            assert pr.verdict == Verdict.ZERO
            assert pr.window_verdict != Verdict.NONZERO
        else:
            assert pr.divisible is True
        g_prof, h_prof = invariants(t.colimit()), invariants(h)
        kinds.add("soc" if g_prof.sum_of_cyclics else "ac" if h_prof.algebraically_compact
                  else "tf")
        if g_prof.divisible is False and t.iso_from:
            kinds.add("fg")
    assert {"soc", "ac", "tf", "fg"} <= kinds
    assert run_catalog("thm52-suite")["ok"]


CATALOG_TOWERS = ["stable(Z/6)", "stable(Z^2)", "stable(Sum(Z, Z/4))", "prufer(2)",
                  "prufer(3)", "elementary(2,1)", "elementary(3,2)", "affine(2; n)",
                  "affine(3; 2n+1)", "free(2)", "free(6)", "explicit(Z/2, Z/4; [[[2]]])"]
FG_TARGETS = ["Z", "Z/2", "Z/9", "Z/6", "Sum(Z, Z/4)"]

CATALOG_DATA = [
    "K0A=elementary(2,1) K1A=0 K0B=Z K1B=0",
    "K0A=elementary(2,1) K1A=0 K0B=Z/2 K1B=0",
    "K0A=prufer(2) K1A=0 K0B=0 K1B=InfSum(2; n)",
    "K0A=prufer(3) K1A=0 K0B=0 K1B=InfSum(3; n)",
    "K0A=free(2) K1A=0 K0B=Z K1B=0",
    "K0A=Z/4 K1A=0 K0B=Z/4 K1B=0",
    "K0A=affine(2; n) K1A=Z K0B=Z/8 K1B=Sum(Z, Z/2)",
    "K0A=prufer(2) K1A=elementary(3,1) K0B=Prufer(2) K1B=Z",
]


def _data(text: str) -> KTheoryData:
    return KTheoryData.parse(dict(tok.split("=", 1) for tok, _ in tokenize(text)))


def test_criterion_07_roos_and_lim1_gamma():
    for tower in CATALOG_TOWERS:
        t = parse_tower(tower)
        for target in FG_TARGETS:
            h = as_fg(parse_expr(target))
            et = apply_ext(t, h).exact_tower()
            for i in range(1, WINDOW + 1):
                assert et.map(i).is_surjective(), (tower, target, i)
            res = lim1(apply_ext(t, h), WINDOW)
            assert res.verdict == Verdict.ZERO, (tower, target)
            assert replay(res.certificate)
    for text in CATALOG_DATA:
        rep = lim1_gamma_check(_data(text), WINDOW)
        assert rep["agree"], text
    d53 = lim1_gamma_check(_data(CATALOG_DATA[2]), WINDOW)["degrees"]["1"]
    assert d53["kk_lim1"] == d53["hom_lim1"] == "NonzeroCertified"


def test_criterion_08_finite_models():
    r = run_random(100, seed=0)
    assert r["instances"] == 100 and r["passed"] == 100, r["failures"]
    assert r["pullback_pairs"] > 0
    assert run_catalog("finite-models")["ok"]


def test_criterion_09_zadic_identity():
    instances = [(tw, tg) for tw, tg, _ in RULE_SUITE]
    instances += [(tw, tg) for tw in CATALOG_TOWERS for tg in FG_TARGETS]
    instances += [("elementary(2,1)", "Z"), ("prufer(2)", "InfSum(2; n)")]
    checked = 0
    for tower, target in instances:
        t, h = parse_tower(tower), parse_expr(target)
        ext = ext_of_colimit(t.colimit(), h)
        if ext is None or isinstance(ext, ProDescriptor):
            continue
        pr = pext(t, h, WINDOW)
        if pr.verdict == Verdict.INCONCLUSIVE:
            continue
        rep = zadic_closure_check(ext, pr.verdict)
        assert rep.consistent, (tower, target)
        checked += 1
    assert checked >= 40


def _certificates(obj):
    if isinstance(obj, dict):
        if "kind" in obj and "window" in obj and "verdict" in obj:
            yield obj
            return
        for v in obj.values():
            yield from _certificates(v)
    elif isinstance(obj, list):
        for v in obj:
            yield from _certificates(v)


def test_criterion_10_replay_and_window(catalog_reports):
    replayed = 0
    for name, runs in catalog_reports.items():
        for case, report in runs:
            for cj in _certificates(report):
                if cj["verdict"] in ("Zero", "NonzeroCertified"):
                    assert replay(Certificate.from_json(cj)), (case.job, cj["kind"])
                    replayed += 1
    assert replayed > 50
    pairs = [(tw, tg) for tw, tg, _ in RULE_SUITE]
    pairs += [(tw, tg) for tw in CATALOG_TOWERS for tg in FG_TARGETS[:3]]
    pairs += [("prufer(2)", "InfSum(2; n)"), ("prufer(3)", "InfSum(3; n)")]
    for tower, target in pairs:
        t, h = parse_tower(tower), parse_expr(target)
        a, b = pext(t, h, 12), pext(t, h, 20)
        if a.verdict != Verdict.INCONCLUSIVE:
            assert a.verdict == b.verdict, (tower, target)
