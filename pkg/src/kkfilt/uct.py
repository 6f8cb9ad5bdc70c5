"""Graded K-theory data, the split UCT and the KK-filtration diagram.

Input is a pair of direct towers for ``K_0(A), K_1(A)`` and a pair of group
expressions for ``K_0(B), K_1(B)``.  Degrees follow

    KK_n = sum_j Hom(K_j(A), K_(j+n)(B))  +  sum_j Ext(K_j(A), K_(j+n+1)(B))

with indices mod 2, so ``Ext(K_0(A), K_0(B))`` sits in degree 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .expr import (ZERO, Card, DirectSum, GroupExpr, InfSum, InvariantProfile, INFINITE,
                   _all3, as_fg, canonicalize, ext_from_fg, hom_from_fg, invariants,
                   parse_expr)
from .fg import FgGroup
from .tower import (DEFAULT_WINDOW, DirectTower, InvariantViolation, LimResult, NotTruncatable,
                    ParseError, PextResult, ProDescriptor, RuleVerdict, Verdict,
                    apply_ext, apply_hom, ext_of_colimit, jensen_kernel_profile, lim_group,
                    parse_tower, pext, sum_lim1, zadic_closure_check)

CITE_VANISHING = "pext-vanishing: sum of cyclics source or algebraically compact target"
CITE_DIVISIBLE = "pext-divisible: torsionfree source or target"
CITE_NONSPLIT = "nonsplit example: Prufer(p) source against the sum of Z/p^n"
CITE_INFINITE_ORDER = "nonsplit example footnote: j has infinite order"
CITE_ROOS = "Roos: lim^1 of the Ext tower vanishes"
CITE_UCT = "UCT: 0 -> Ext -> KK -> Hom -> 0, split unnaturally"
CITE_MILNOR = "Milnor sequence of the KK-filtration"
CITE_JENSEN = "Jensen: Pext = lim^1 Hom and 0 -> Pext -> Ext -> lim Ext -> 0"


# --------------------------------------------------------------------------
# data


@dataclass(frozen=True)
class KTheoryData:
    kA: tuple[DirectTower, DirectTower]
    kB: tuple[GroupExpr, GroupExpr]

    def __post_init__(self):
        object.__setattr__(self, "kB", tuple(canonicalize(e) for e in self.kB))

    @staticmethod
    def hom_pairs(n: int) -> list[tuple[int, int]]:
        return [(j, (j + n) % 2) for j in (0, 1)]

    @staticmethod
    def ext_pairs(n: int) -> list[tuple[int, int]]:
        return [(j, (j + n + 1) % 2) for j in (0, 1)]

    def to_text(self) -> str:
        return " ".join([f"K0A={_tower_text(self.kA[0])}", f"K1A={_tower_text(self.kA[1])}",
                         f"K0B={self.kB[0]}", f"K1B={self.kB[1]}"])

    @classmethod
    def parse(cls, fields: dict[str, str]) -> "KTheoryData":
        missing = {"K0A", "K1A", "K0B", "K1B"} - set(fields)
        if missing:
            raise ParseError(f"missing K-theory fields {sorted(missing)}", " ".join(fields), 0)
        return cls((parse_k_tower(fields["K0A"]), parse_k_tower(fields["K1A"])),
                   (parse_expr(fields["K0B"]), parse_expr(fields["K1B"])))

    @property
    def finite_model(self) -> bool:
        """Stable towers of finite stages and finite K_*(B)."""
        for t in self.kA:
            if t.iso_from is None or t.torsion_primes() is None:
                return False
        return all(as_fg(e) is not None and as_fg(e).is_finite for e in self.kB)


def _tower_text(t: DirectTower) -> str:
    if t.kind == "stable":
        return str(t.params[0])
    return t.to_text()


def parse_k_tower(text: str) -> DirectTower:
    """A catalog tower, or a finitely generated group meaning the stable tower."""
    text = text.strip()
    try:
        return parse_tower(text)
    except ParseError:
        g = as_fg(parse_expr(text))
        if g is None:
            raise ParseError("K_*(A) entries must be towers or finitely generated groups",
                             text, 0) from None
        return DirectTower.stable(g)


# --------------------------------------------------------------------------
# values and profiles

UNKNOWN_PROFILE = InvariantProfile(Card.UNKNOWN, "unknown", None, None, None, None, None)


def _card_combine(cards, product: bool = True):
    if all(isinstance(c, int) for c in cards):
        return math.prod(cards)
    if Card.CONTINUUM in cards:
        return Card.CONTINUUM
    if Card.UNKNOWN in cards:
        return Card.UNKNOWN
    return Card.COUNTABLE


def sum_profile(profiles: list[InvariantProfile]) -> InvariantProfile:
    if not profiles:
        return invariants(ZERO)
    exps = [p.exponent for p in profiles]
    if INFINITE in exps:
        exponent = INFINITE
    elif "unknown" in exps:
        exponent = "unknown"
    else:
        exponent = math.lcm(1, *exps)
    return InvariantProfile(
        _card_combine([p.cardinality for p in profiles]), exponent,
        _all3(p.divisible for p in profiles), _all3(p.torsionfree for p in profiles),
        _all3(p.reduced for p in profiles), _all3(p.sum_of_cyclics for p in profiles),
        _all3(p.algebraically_compact for p in profiles))


def extension_profile(sub: InvariantProfile, quot: InvariantProfile,
                      split: str) -> InvariantProfile:
    """What the sub and quotient of ``0 -> S -> E -> Q -> 0`` force on E."""
    if split == "Yes" or quot.is_trivial:
        return sum_profile([sub, quot])
    if sub.is_trivial:
        return quot
    card = _card_combine([sub.cardinality, quot.cardinality])
    if INFINITE in (sub.exponent, quot.exponent):
        exponent: int | str = INFINITE
    else:
        # bounded by the product, but not determined by the two exponents
        exponent = "unknown"

    def both(a, b, fail_if):
        if a is True and b is True:
            return True
        return False if fail_if is False else None

    return InvariantProfile(
        card, exponent,
        both(sub.divisible, quot.divisible, quot.divisible),
        both(sub.torsionfree, quot.torsionfree, sub.torsionfree),
        both(sub.reduced, quot.reduced, sub.reduced),
        None, None)


@dataclass(frozen=True, eq=False)
class ExtensionDescriptor:
    sub: "GroupValue"
    quotient: "GroupValue"
    split: str                 # "Yes", "No" or "Unknown"
    citation: str = ""

    def __str__(self) -> str:
        return f"Extension({self.sub.expr} -> ? -> {self.quotient.expr})"

    def to_json(self) -> dict:
        out = {"sub": self.sub.to_json(), "quotient": self.quotient.to_json(),
               "split": self.split}
        if self.citation:
            out["citation"] = self.citation
        return out


@dataclass(frozen=True, eq=False)
class SplitSum:
    """A direct sum some of whose terms are not plain expressions."""
    terms: tuple

    def __str__(self) -> str:
        return "Sum(" + ", ".join(str(v.expr) for _, v in self.terms) + ")"


@dataclass(frozen=True, eq=False)
class GroupValue:
    expr: object
    profile: InvariantProfile
    certificates: tuple = ()
    label: str = ""
    notes: tuple = ()

    @classmethod
    def of(cls, e, label: str = "", certificates=(), notes=()) -> "GroupValue":
        if isinstance(e, GroupExpr):
            e = canonicalize(e)
            return cls(e, invariants(e), tuple(certificates), label, tuple(notes))
        return cls(e, UNKNOWN_PROFILE, tuple(certificates), label, tuple(notes))

    @property
    def is_plain(self) -> bool:
        return isinstance(self.expr, GroupExpr)

    @property
    def is_zero(self) -> bool:
        return self.is_plain and self.profile.is_trivial

    def to_json(self) -> dict:
        out = {"value": str(self.expr), "profile": self.profile.to_json()}
        if self.label:
            out["label"] = self.label
        if isinstance(self.expr, ExtensionDescriptor):
            out["extension"] = self.expr.to_json()
        elif isinstance(self.expr, SplitSum):
            out["summands"] = [{"label": lab, **v.to_json()} for lab, v in self.expr.terms]
        elif isinstance(self.expr, ProDescriptor):
            out["opaque"] = True
        if self.certificates:
            out["certificates"] = [c.to_json() for c in self.certificates]
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def sum_value(terms: list[tuple[str, GroupValue]], label: str = "") -> GroupValue:
    terms = [(lab, v) for lab, v in terms if not v.is_zero]
    if all(v.is_plain for _, v in terms):
        return GroupValue.of(DirectSum(tuple(v.expr for _, v in terms)), label)
    if len(terms) == 1:
        v = terms[0][1]
        return GroupValue(v.expr, v.profile, v.certificates, label or v.label, v.notes)
    return GroupValue(SplitSum(tuple(terms)), sum_profile([v.profile for _, v in terms]),
                      label=label)


# --------------------------------------------------------------------------
# the UCT pieces


def _hom_label(j: int, k: int) -> str:
    return f"Hom(K{j}(A), K{k}(B))"


def _ext_label(j: int, k: int) -> str:
    return f"Ext(K{j}(A), K{k}(B))"


def stage_kk(data: KTheoryData, i: int, n: int) -> GroupValue:
    """KK_n(A_i, B) from the split UCT at the finitely generated stage i."""
    terms = []
    for j, k in data.hom_pairs(n):
        terms.append((_hom_label(j, k), GroupValue.of(hom_from_fg(data.kA[j].stage(i),
                                                                  data.kB[k]))))
    for j, k in data.ext_pairs(n):
        terms.append((_ext_label(j, k), GroupValue.of(ext_from_fg(data.kA[j].stage(i),
                                                                  data.kB[k]))))
    return sum_value(terms, f"KK_{n}(A_{i}, B)")


def is_nonsplit_pattern(t: DirectTower, h: GroupExpr) -> bool:
    """Prufer(p) against the sum of Z/p^n, up to the canonical form."""
    return t.kind == "prufer" and canonicalize(h) == canonicalize(InfSum(t.params[0], 1, 0))


@dataclass(frozen=True, eq=False)
class ExtPiece:
    pair: tuple[int, int]
    pext: PextResult
    lim: LimResult
    value: GroupValue


def _pext_value(r: PextResult, label: str) -> GroupValue:
    if r.verdict == Verdict.ZERO:
        return GroupValue.of(ZERO, label, (r.certificate,))
    desc = ProDescriptor(f"Pext nonzero ({label})" if r.verdict == Verdict.NONZERO
                         else f"Pext undetermined ({label})")
    prof = UNKNOWN_PROFILE
    if r.rule.verdict == RuleVerdict.DIVISIBLE:
        prof = InvariantProfile(Card.UNKNOWN, "unknown", True, None, False, None, None)
    return GroupValue(desc, prof, (r.certificate,), label)


def ext_piece(data: KTheoryData, j: int, k: int, window: int = DEFAULT_WINDOW,
              truncation: int | None = None) -> ExtPiece:
    t, h = data.kA[j], data.kB[k]
    label = _ext_label(j, k)
    pr = pext(t, h, window, truncation)
    lim = lim_group(apply_ext(t, h), window)
    quot = GroupValue.of(lim.value, f"lim Ext(K{j}(A_i), K{k}(B))")
    sub = _pext_value(pr, f"Pext(K{j}(A), K{k}(B))")
    if pr.verdict == Verdict.ZERO:
        value = GroupValue(quot.expr, quot.profile, (pr.certificate,), label,
                           ("Pext = 0, so Ext maps isomorphically onto lim Ext",))
    else:
        nonsplit = is_nonsplit_pattern(t, h) and pr.verdict == Verdict.NONZERO
        split = "No" if nonsplit else "Unknown"
        desc = ExtensionDescriptor(sub, quot, split, CITE_NONSPLIT if nonsplit else "")
        value = GroupValue(desc, extension_profile(sub.profile, quot.profile, split),
                           (pr.certificate,), label)
    return ExtPiece((j, k), pr, lim, value)


def hom_piece(data: KTheoryData, j: int, k: int, window: int = DEFAULT_WINDOW) -> GroupValue:
    lim = lim_group(apply_hom(data.kA[j], data.kB[k]), window)
    notes = (f"lim of the Hom tower ({lim.rule})",)
    return GroupValue.of(lim.value, _hom_label(j, k), notes=notes)


@dataclass(frozen=True, eq=False)
class KKValue:
    degree: int
    whole: GroupValue
    hom: GroupValue
    ext: GroupValue
    hom_parts: tuple
    ext_parts: tuple

    def to_json(self) -> dict:
        return {"degree": self.degree, "KK": self.whole.to_json(), "Hom": self.hom.to_json(),
                "Ext": self.ext.to_json(), "citation": CITE_UCT,
                "countable": self.whole.profile.is_countable}


def kk_group(data: KTheoryData, n: int, window: int = DEFAULT_WINDOW,
             truncation: int | None = None) -> KKValue:
    hom_parts = [(_hom_label(j, k), hom_piece(data, j, k, window))
                 for j, k in data.hom_pairs(n)]
    ext_parts = [(_ext_label(j, k), ext_piece(data, j, k, window, truncation).value)
                 for j, k in data.ext_pairs(n)]
    hom = sum_value(hom_parts, f"Hom_{n}")
    ext = sum_value(ext_parts, f"Ext_{n + 1}")
    whole = sum_value(hom_parts + ext_parts, f"KK_{n}(A, B)")
    return KKValue(n, whole, hom, ext, tuple(hom_parts), tuple(ext_parts))


@dataclass(frozen=True, eq=False)
class FineStructure:
    degree: int
    verdict: Verdict
    value: GroupValue
    pieces: tuple

    def to_json(self) -> dict:
        return {"degree": self.degree, "verdict": self.verdict.value,
                "closure_of_zero": self.value.to_json(),
                "pieces": [{"pair": list(pair), **r.to_json()} for pair, r in self.pieces]}


def fine_structure(data: KTheoryData, n: int, window: int = DEFAULT_WINDOW,
                   truncation: int | None = None) -> FineStructure:
    """Z_n(A, B): the closure of zero, i.e. the Pext summands of KK_n."""
    from .tower import combine_verdicts
    pieces, values = [], []
    for j, k in data.ext_pairs(n):
        r = pext(data.kA[j], data.kB[k], window, truncation)
        pieces.append(((j, k), r))
        values.append((f"Pext(K{j}(A), K{k}(B))", _pext_value(r, f"Pext(K{j}(A), K{k}(B))")))
    verdict = combine_verdicts([r.verdict for _, r in pieces])
    return FineStructure(n, verdict, sum_value(values, f"Z_{n}(A, B)"), tuple(pieces))


def kl_group(data: KTheoryData, n: int, window: int = DEFAULT_WINDOW) -> GroupValue:
    """KL_n = lim KK_n(A_i, B), the Hausdorff quotient KK_n / Z_n."""
    terms = [(_hom_label(j, k), hom_piece(data, j, k, window)) for j, k in data.hom_pairs(n)]
    for j, k in data.ext_pairs(n):
        lim = lim_group(apply_ext(data.kA[j], data.kB[k]), window)
        terms.append((f"lim Ext(K{j}(A_i), K{k}(B))", GroupValue.of(lim.value)))
    v = sum_value(terms, f"KL_{n}(A, B)")
    return GroupValue(v.expr, v.profile, v.certificates, v.label,
                      ("lim of the stage KK tower; the maximal Hausdorff quotient KK/Z",))


def _kk_towers(data: KTheoryData, n: int, hom_only: bool = False):
    named = [(_hom_label(j, k), apply_hom(data.kA[j], data.kB[k])) for j, k in data.hom_pairs(n)]
    if not hom_only:
        named += [(_ext_label(j, k), apply_ext(data.kA[j], data.kB[k]))
                  for j, k in data.ext_pairs(n)]
    return named


def _roos_check(t: DirectTower, h: GroupExpr, window: int, truncation: int | None) -> dict:
    """Stagewise surjectivity of the Ext restriction maps."""
    ft = apply_ext(t, h)
    try:
        tower = ft.truncation(truncation or window + 4)
    except NotTruncatable:
        return {"checked": False, "reason": "no finitely generated model of the target",
                "surjective": None}
    ok = all(tower.map(i).is_surjective() for i in range(1, window + 1))
    if not ok:
        raise InvariantViolation(f"Ext restriction tower for {t} and {h} is not surjective")
    return {"checked": True, "exact": tower.exact, "stages": window, "surjective": True}


def lim1_gamma_check(data: KTheoryData, window: int = DEFAULT_WINDOW,
                     truncation: int | None = None) -> dict:
    """lim^1 of the stage-KK tower against lim^1 of the Hom tower, per degree."""
    out = {"citation": CITE_ROOS, "degrees": {}}
    agree = True
    for n in (0, 1):
        roos = {_ext_label(j, k): _roos_check(data.kA[j], data.kB[k], window, truncation)
                for j, k in data.ext_pairs(n)}
        kk = sum_lim1(_kk_towers(data, n), window, truncation)
        hom = sum_lim1(_kk_towers(data, n, hom_only=True), window, truncation)
        same = kk.verdict == hom.verdict
        agree &= same
        out["degrees"][str(n)] = {"roos": roos, "kk_lim1": kk.verdict.value,
                                  "hom_lim1": hom.verdict.value, "agree": same,
                                  "kk_certificate": kk.certificate.to_json()}
    out["agree"] = agree
    return out


# --------------------------------------------------------------------------
# obstructions


@dataclass(frozen=True)
class ObstructionReport:
    name: str
    degree: int
    verdict: str               # "Vanishes", "NonzeroPaperBacked" or "Unknown"
    reason: str
    citation: str = ""
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"obstruction": self.name, "degree": self.degree, "verdict": self.verdict,
               "reason": self.reason}
        if self.citation:
            out["citation"] = self.citation
        if self.metadata:
            out["metadata"] = self.metadata
        return out


def _obstruction(data: KTheoryData, n: int, name: str, window: int,
                 truncation: int | None) -> ObstructionReport:
    pieces = [((j, k), pext(data.kA[j], data.kB[k], window, truncation))
              for j, k in data.ext_pairs(n)]
    if all(r.verdict == Verdict.ZERO for _, r in pieces):
        cites = sorted({r.rule.reason for _, r in pieces
                        if r.rule.verdict == RuleVerdict.ZERO})
        return ObstructionReport(name, n, "Vanishes", "Pext vanishes, so the sequence splits",
                                 CITE_VANISHING if cites else "")
    if all(r.verdict == Verdict.ZERO or r.rule.verdict != RuleVerdict.NONE for _, r in pieces):
        return ObstructionReport(name, n, "Vanishes", "Pext is divisible", CITE_DIVISIBLE)
    for (j, k), r in pieces:
        if is_nonsplit_pattern(data.kA[j], data.kB[k]) and r.verdict == Verdict.NONZERO:
            meta = {"pair": [j, k]}
            if name == "j":
                meta["order"] = "infinite"
                meta["order_source"] = CITE_INFINITE_ORDER
            return ObstructionReport(name, n, "NonzeroPaperBacked",
                                     "the sequence does not split", CITE_NONSPLIT, meta)
    return ObstructionReport(name, n, "Unknown", "no rule or known pattern applies")


def milnor_obstruction(data: KTheoryData, n: int, window: int = DEFAULT_WINDOW,
                       truncation: int | None = None) -> ObstructionReport:
    """m(A, B): the class of the Milnor sequence in degree n."""
    return _obstruction(data, n, "m", window, truncation)


def jensen_obstruction(data: KTheoryData, n: int, window: int = DEFAULT_WINDOW,
                       truncation: int | None = None) -> ObstructionReport:
    """j(A, B), the image of m(A, B) under lim delta_i."""
    j = _obstruction(data, n, "j", window, truncation)
    m = _obstruction(data, n, "m", window, truncation)
    if m.verdict == "Vanishes" and j.verdict != "Vanishes":
        raise InvariantViolation(f"degree {n}: m vanishes but j is {j.verdict}")
    return j


# --------------------------------------------------------------------------
# topology


def topology_report(data: KTheoryData, n: int, window: int = DEFAULT_WINDOW,
                    truncation: int | None = None) -> dict:
    fs = fine_structure(data, n, window, truncation)
    hausdorff = {Verdict.ZERO: True, Verdict.NONZERO: False}.get(fs.verdict)
    ext = kk_group(data, n, window, truncation).ext
    exp = ext.profile.exponent
    zadic = True if isinstance(exp, int) else (False if exp == INFINITE else None)
    jensen, zchecks = [], []
    for (j, k), r in fs.pieces:
        t, h = data.kA[j], data.kB[k]
        prof = jensen_kernel_profile(t, h, window, r)
        jensen.append({"pair": [j, k], **prof})
        value = ext_of_colimit(t.colimit(), h)
        if isinstance(value, GroupExpr):
            zchecks.append({"pair": [j, k], **zadic_closure_check(value, r.verdict).to_json()})
    flags = [p["discrete"] for p in jensen]
    jdisc = True if all(f is True for f in flags) else (
        False if any(f is False for f in flags) else None)
    return {
        "degree": n,
        "hausdorff": hausdorff,
        "zadic_discrete_ext": zadic,
        "jensen_discrete": jdisc,
        "jensen_kernels": jensen,
        "zadic_checks": zchecks,
        "kl_is_hausdorff_quotient": True,
        "notes": ["the Z-adic, Jensen and injective-resolution topologies share the "
                  "closure of zero, which is Pext",
                  "on KK the Milnor, Jensen, injective and relative topologies agree"],
    }


# --------------------------------------------------------------------------
# the diagram


POSITIONS = ("lim1_KK", "KK", "lim_KK", "lim_Ext", "Ext", "Hom")

MAPS = {
    "sigma": ("lim1_KK", "KK", "Milnor inclusion"),
    "rho": ("KK", "lim_KK", "restriction to the stages"),
    "delta": ("Ext", "KK", "UCT inclusion"),
    "gamma": ("KK", "Hom", "UCT projection"),
    "psi": ("lim1_KK", "Ext", "identification of lim^1 with Pext"),
    "phi": ("Ext", "lim_Ext", "restriction of extensions to the stages"),
    "lim_delta": ("lim_Ext", "lim_KK", "limit of the stage UCT inclusions"),
    "gamma_tilde": ("lim_KK", "Hom", "limit of the stage UCT projections"),
}

EXACTNESS = {
    "milnor_row": (("lim1_KK", "KK", "lim_KK"), CITE_MILNOR),
    "uct_row": (("Ext", "KK", "Hom"), CITE_UCT),
    "left_column": (("lim1_KK", "Ext", "lim_Ext"), CITE_JENSEN),
    "right_column": (("lim_Ext", "lim_KK", "Hom"), CITE_ROOS),
}


@dataclass(frozen=True, eq=False)
class DiagramReport:
    degree: int
    groups: dict
    maps: dict
    exactness: dict
    obstructions: dict
    topology: dict
    finite_model: dict | None = None

    def to_json(self) -> dict:
        out = {"degree": self.degree,
               "groups": {k: v.to_json() for k, v in self.groups.items()},
               "maps": self.maps, "exactness": self.exactness,
               "obstructions": {k: v.to_json() for k, v in self.obstructions.items()},
               "topology": self.topology}
        if self.finite_model is not None:
            out["finite_model"] = self.finite_model
        return out


def kk_filtration_diagram(data: KTheoryData, n: int, window: int = DEFAULT_WINDOW,
                          truncation: int | None = None) -> DiagramReport:
    kk = kk_group(data, n, window, truncation)
    fs = fine_structure(data, n, window, truncation)
    lim_ext = sum_value([(f"lim Ext(K{j}(A_i), K{k}(B))",
                          GroupValue.of(lim_group(apply_ext(data.kA[j], data.kB[k]),
                                                  window).value))
                         for j, k in data.ext_pairs(n)], "lim Ext")
    # the Milnor lim^1 term comes from the Hom part of the next degree's tower
    lim1 = sum_lim1(_kk_towers(data, n + 1), window, truncation)
    if lim1.verdict == Verdict.ZERO:
        lim1_value = GroupValue.of(ZERO, "lim^1 KK", (lim1.certificate,))
    else:
        lim1_value = GroupValue(fs.value.expr, fs.value.profile, (lim1.certificate,),
                                "lim^1 KK", ("isomorphic to Pext via psi",))
    if (lim1.verdict == Verdict.ZERO) != (fs.verdict == Verdict.ZERO) and \
            Verdict.INCONCLUSIVE not in (lim1.verdict, fs.verdict):
        raise InvariantViolation(f"degree {n}: lim^1 KK is {lim1.verdict.value} "
                                 f"but Pext is {fs.verdict.value}")
    groups = {"lim1_KK": lim1_value, "KK": kk.whole, "lim_KK": kl_group(data, n, window),
              "lim_Ext": lim_ext, "Ext": kk.ext, "Hom": kk.hom}
    maps = {name: {"from": a, "to": b, "description": d, "symbolic": True}
            for name, (a, b, d) in MAPS.items()}
    fm = None
    if data.finite_model:
        from .finite_model import finite_model_check
        fm = finite_model_check(data, n)
        if not fm["ok"]:
            raise InvariantViolation(f"finite model check failed: {fm['failures'][:1]}")
        for name in maps:
            maps[name]["symbolic"] = False
    exactness = {}
    for name, (nodes, cite) in EXACTNESS.items():
        if fm is not None:
            status = "Verified"
        elif any(isinstance(groups[x].expr, ProDescriptor) and
                 not groups[x].label.startswith("lim^1") for x in nodes):
            status = "Unchecked"
        else:
            status = "RuleDerived"
        exactness[name] = {"nodes": list(nodes), "status": status, "citation": cite}
    if groups["Hom"].is_zero:
        exactness["milnor_row"]["note"] = exactness["left_column"]["note"] = \
            "Hom vanishes, so the Milnor row and the Jensen column are the same sequence"
    obstructions = {"m": milnor_obstruction(data, n, window, truncation),
                    "j": jensen_obstruction(data, n, window, truncation)}
    return DiagramReport(n, groups, maps, exactness, obstructions,
                         topology_report(data, n, window, truncation), fm)
