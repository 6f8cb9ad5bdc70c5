"""Towers of abelian groups: catalog, image chains, Mittag-Leffler analysis.

A :class:`DirectTower` is an increasing sequence ``G_1 -> G_2 -> ...`` of
finitely generated groups with injective maps.  Applying ``Hom(-, H)`` or
``Ext(-, H)`` gives an inverse tower; when H is finitely generated it is an
:class:`FgTower` and every stage is computed exactly.  For infinite H the
tower splits into components along the atoms of H, each handled exactly,
on a finite truncation, or by a structural rule.

Claims about lim^1 always come with a :class:`Certificate` that can be
re-checked from its stored evidence by :func:`replay`.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Sequence

from .expr import (ZERO, Cyclic, DirectSum, Free, GroupExpr, InfProduct, InfSum, Padic,
                   Prufer, ZLocal, ParseError, _radical, as_fg, canonicalize, decompose,
                   fg_expr, format_rule, invariants, normalize_parts, parse_expr, parse_rule)
from .fg import (FgGroup, FgHom, Subgroup, ext_group, ext_induced_co, ext_induced_contra,
                 factorize, from_cyclic_orders, hom_group, hom_induced, hom_induced_co)
from .matrix import IntMatrix

DEFAULT_WINDOW = 12
TRUNCATION_MARGIN = 4


class InvariantViolation(RuntimeError):
    """Two independent computations disagree; this is always a bug."""


# --------------------------------------------------------------------------
# direct towers


@dataclass(frozen=True)
class DirectTower:
    """A catalog tower ``G_1 -> G_2 -> ...`` with injective structure maps.

    kinds and params:
      stable      (G,)              G_i = G, identity maps
      prufer      (p,)              Z/p^i, 1 -> p
      elementary  (p, k)            (Z/p^k)^i, x -> (x, 0)
      affine      (p, a, b)         sum over n <= i of Z/p^(a n + b), inclusions
      free        (m,)              Z, multiplication by m
      explicit    (stages, maps)    finitely many stages, then constant
    """
    kind: str
    params: tuple

    def __post_init__(self):
        k, ps = self.kind, self.params
        if k == "stable":
            if not isinstance(ps[0], FgGroup):
                raise ValueError("stable tower needs an FgGroup")
        elif k in ("prufer", "elementary", "affine"):
            if len(factorize(ps[0])) != 1 or list(factorize(ps[0]).values()) != [1]:
                raise ValueError(f"{ps[0]} is not a prime")
            if k == "elementary" and ps[1] < 1:
                raise ValueError("elementary tower needs k >= 1")
            if k == "affine":
                InfSum(ps[0], ps[1], ps[2])
        elif k == "free":
            if ps[0] < 1:
                raise ValueError("free tower needs a positive multiplier")
        elif k == "explicit":
            stages, maps = ps
            if not stages or len(maps) != len(stages) - 1:
                raise ValueError("explicit tower needs n stages and n-1 maps")
            for i, f in enumerate(maps):
                if f.source != stages[i] or f.target != stages[i + 1]:
                    raise ValueError(f"map {i + 1} does not connect consecutive stages")
                if not f.is_injective():
                    raise ValueError(f"map {i + 1} is not injective")
        else:
            raise ValueError(f"unknown tower kind {k!r}")

    # catalog constructors
    @classmethod
    def stable(cls, g: FgGroup) -> "DirectTower":
        return cls("stable", (g,))

    @classmethod
    def prufer(cls, p: int) -> "DirectTower":
        return cls("prufer", (p,))

    @classmethod
    def elementary(cls, p: int, k: int = 1) -> "DirectTower":
        return cls("elementary", (p, k))

    @classmethod
    def affine(cls, p: int, a: int, b: int) -> "DirectTower":
        return cls("affine", (p, a, b))

    @classmethod
    def free(cls, m: int) -> "DirectTower":
        return cls("free", (m,))

    @classmethod
    def explicit(cls, stages: Sequence[FgGroup], maps: Sequence[FgHom]) -> "DirectTower":
        return cls("explicit", (tuple(stages), tuple(maps)))

    # increments of split towers: G_n = G_(n-1) + Z/d_n
    def increment(self, n: int) -> int:
        if self.kind == "elementary":
            return self.params[0] ** self.params[1]
        if self.kind == "affine":
            p, a, b = self.params
            return p ** (a * n + b)
        raise ValueError(f"{self.kind} tower has no cyclic increments")

    def stage(self, i: int) -> FgGroup:
        if i < 1:
            raise ValueError("stages are indexed from 1")
        k, ps = self.kind, self.params
        if k == "stable":
            return ps[0]
        if k == "prufer":
            return FgGroup.cyclic(ps[0] ** i)
        if k in ("elementary", "affine"):
            return FgGroup(0, tuple(self.increment(n) for n in range(1, i + 1)))
        if k == "free":
            return FgGroup.free(1)
        stages = ps[0]
        return stages[min(i, len(stages)) - 1]

    def map(self, i: int) -> FgHom:
        """The structure map ``G_i -> G_(i+1)``."""
        k, ps = self.kind, self.params
        src, dst = self.stage(i), self.stage(i + 1)
        if k == "stable":
            return FgHom.identity(src)
        if k == "prufer":
            return FgHom(src, dst, IntMatrix.from_rows([[ps[0]]]))
        if k in ("elementary", "affine"):
            cols = [[int(r == c) for r in range(i + 1)] for c in range(i)]
            return FgHom.from_columns(src, dst, cols)
        if k == "free":
            return FgHom(src, dst, IntMatrix.from_rows([[ps[0]]]))
        stages, maps = ps
        return maps[i - 1] if i < len(stages) else FgHom.identity(src)

    def composite(self, i: int, j: int) -> FgHom:
        """``G_i -> G_j`` for ``i <= j``."""
        f = FgHom.identity(self.stage(i))
        for t in range(i, j):
            f = self.map(t).compose(f)
        return f

    @property
    def split(self) -> bool:
        """Every structure map is the inclusion of a direct summand."""
        return self.kind in ("stable", "elementary", "affine") or \
            (self.kind == "free" and self.params[0] == 1)

    @property
    def iso_from(self) -> int | None:
        if self.kind == "stable" or (self.kind == "free" and self.params[0] == 1):
            return 1
        if self.kind == "explicit":
            return len(self.params[0])
        return None

    @property
    def constant(self) -> bool:
        return self.kind in ("stable", "free")

    def torsion_primes(self) -> frozenset[int] | None:
        """Primes dividing the stage orders when all stages are finite."""
        k, ps = self.kind, self.params
        if k in ("prufer", "elementary", "affine"):
            return frozenset([ps[0]])
        if k == "free":
            return None
        stages = [ps[0]] if k == "stable" else list(ps[0])
        if not all(g.is_finite for g in stages):
            return None
        return frozenset(p for g in stages for p in g.primary_parts())

    def colimit(self) -> GroupExpr:
        k, ps = self.kind, self.params
        if k == "stable":
            return fg_expr(ps[0])
        if k == "prufer":
            return Prufer(ps[0])
        if k == "elementary":
            return InfSum(ps[0], 0, ps[1])
        if k == "affine":
            return canonicalize(InfSum(*ps))
        if k == "free":
            return Free(1) if ps[0] == 1 else ZLocal(_radical(ps[0]))
        return fg_expr(ps[0][-1])

    def to_text(self) -> str:
        k, ps = self.kind, self.params
        if k == "stable":
            return f"stable({ps[0]})"
        if k == "prufer":
            return f"prufer({ps[0]})"
        if k == "elementary":
            return f"elementary({ps[0]},{ps[1]})"
        if k == "affine":
            return f"affine({ps[0]}; {format_rule(ps[1], ps[2])})"
        if k == "free":
            return f"free({ps[0]})"
        stages, maps = ps
        mats = json.dumps([f.matrix.to_lists() for f in maps], separators=(",", ":"))
        return f"explicit({', '.join(str(g) for g in stages)}; {mats})"

    def __str__(self) -> str:
        return self.to_text()


def _split_top(text: str, sep: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [s.strip() for s in out]


def _fg_of(text: str) -> FgGroup:
    g = as_fg(parse_expr(text))
    if g is None:
        raise ParseError("expected a finitely generated group", text, 0)
    return g


_TOWER_RE = re.compile(r"^\s*([a-z]+)\s*\((.*)\)\s*$", re.S)


def _int_arg(s: str, name: str, text: str) -> int:
    s = s.strip()
    if "=" in s:
        key, s = (x.strip() for x in s.split("=", 1))
        if key != name:
            raise ParseError(f"expected parameter {name!r}, got {key!r}", text, 0)
    try:
        return int(s)
    except ValueError:
        raise ParseError(f"expected an integer for {name}", text, text.find(s)) from None


def parse_tower(text: str) -> DirectTower:
    """Parse a catalog tower such as ``prufer(2)`` or ``affine(2; n+1)``."""
    m = _TOWER_RE.match(text)
    if not m:
        raise ParseError("expected kind(args)", text, 0)
    kind, body = m.group(1), m.group(2)
    try:
        if kind == "stable":
            return DirectTower.stable(_fg_of(body))
        if kind == "prufer":
            return DirectTower.prufer(_int_arg(body, "p", text))
        if kind == "free":
            return DirectTower.free(_int_arg(body, "m", text))
        if kind == "elementary":
            args = _split_top(body, ",")
            k = _int_arg(args[1], "k", text) if len(args) > 1 else 1
            return DirectTower.elementary(_int_arg(args[0], "p", text), k)
        if kind == "affine":
            args = _split_top(body, ";")
            if len(args) != 2:
                raise ParseError("affine tower needs 'p; rule'", text, 0)
            a, b = parse_rule(args[1])
            return DirectTower.affine(_int_arg(args[0], "p", text), a, b)
        if kind == "explicit":
            args = _split_top(body, ";")
            if body.lstrip().startswith("["):
                # bracketed form: explicit([G1, G2], [[matrix]])
                args = _split_top(body, ",")
                args = [args[0].strip()[1:-1], ",".join(args[1:])]
            stages = [_fg_of(s) for s in _split_top(args[0], ",")]
            mats = json.loads(args[1]) if len(args) > 1 else []
            maps = [FgHom(stages[i], stages[i + 1], IntMatrix.from_rows(mt, stages[i].ngens))
                    for i, mt in enumerate(mats)]
            return DirectTower.explicit(stages, maps)
    except ParseError:
        raise
    except (ValueError, IndexError, json.JSONDecodeError) as exc:
        raise ParseError(str(exc), text, 0) from None
    raise ParseError(f"unknown tower kind {kind!r}", text, 0)


def colimit_group(t: DirectTower) -> GroupExpr:
    return t.colimit()


# --------------------------------------------------------------------------
# inverse towers of finitely generated groups


class FgTower:
    """Inverse tower ``H_1 <- H_2 <- ...``; ``map(i)`` is ``H_(i+1) -> H_i``.

    The flags record what is known about the whole tower from how it was
    built, not from the finitely many stages that get computed:

    exact          stages are the true groups, not truncations of them
    finite_stages  every stage is finite
    surjective     reason every map is onto, or None
    iso_from       index from which every map is an isomorphism, or None
    zero_tower     reason every stage is 0, or None
    shifts(i)      candidate tower endomorphisms at stage i as (name, FgHom)
    """

    def __init__(self, stage_fn: Callable[[int], FgGroup], map_fn: Callable[[int], FgHom],
                 label: str, *, exact: bool = True, finite_stages: bool = False,
                 surjective: str | None = None, iso_from: int | None = None,
                 zero_tower: str | None = None,
                 shifts: Callable[[int], list[tuple[str, FgHom]]] | None = None):
        self._stage_fn, self._map_fn = stage_fn, map_fn
        self.label = label
        self.exact = exact
        self.finite_stages = finite_stages
        self.surjective = surjective
        self.iso_from = iso_from
        self.zero_tower = zero_tower
        self._shifts = shifts
        self._stages: dict[int, FgGroup] = {}
        self._maps: dict[int, FgHom] = {}
        self._comp: dict[tuple[int, int], FgHom] = {}

    def stage(self, i: int) -> FgGroup:
        if i not in self._stages:
            self._stages[i] = self._stage_fn(i)
        return self._stages[i]

    def map(self, i: int) -> FgHom:
        if i not in self._maps:
            f = self._map_fn(i)
            if f.source != self.stage(i + 1) or f.target != self.stage(i):
                raise InvariantViolation(f"{self.label}: map {i} has the wrong shape")
            self._maps[i] = f
        return self._maps[i]

    def composite(self, i: int, j: int) -> FgHom:
        """``H_(i+j) -> H_i``."""
        key = (i, j)
        if key not in self._comp:
            self._comp[key] = FgHom.identity(self.stage(i)) if j == 0 else \
                self.composite(i, j - 1).compose(self.map(i + j - 1))
        return self._comp[key]

    def image_chain(self, i: int, window: int) -> list[Subgroup]:
        """``C_j = im(H_(i+j) -> H_i)`` for ``j = 0..window``."""
        return [self.composite(i, j).image() for j in range(window + 1)]

    def shifts(self, i: int) -> list[tuple[str, FgHom]]:
        return self._shifts(i) if self._shifts else []

    @classmethod
    def constant(cls, group: FgGroup, endo: FgHom, label: str = "constant") -> "FgTower":
        """Every stage ``group``, every map ``endo``; one map decides everything."""
        if endo.source != group or endo.target != group:
            raise ValueError("endo must be an endomorphism of group")
        return cls(lambda i: group, lambda i: endo, label, exact=True,
                   finite_stages=group.is_finite,
                   surjective="constant-surjective" if endo.is_surjective() else None,
                   iso_from=1 if endo.is_iso() else None,
                   zero_tower="constant-zero" if group.is_trivial else None,
                   shifts=lambda i: [("structure-map", endo)])

    @classmethod
    def explicit(cls, stages: Sequence[FgGroup], maps: Sequence[FgHom],
                 label: str = "explicit") -> "FgTower":
        """Finitely many stages, then constant with identity maps."""
        stages, maps = list(stages), list(maps)
        if len(maps) != len(stages) - 1:
            raise ValueError("need one map between each pair of consecutive stages")
        n = len(stages)
        return cls(lambda i: stages[min(i, n) - 1],
                   lambda i: maps[i - 1] if i < n else FgHom.identity(stages[-1]),
                   label, exact=True, finite_stages=all(g.is_finite for g in stages),
                   iso_from=n)


# --------------------------------------------------------------------------
# certificates


class Verdict(str, Enum):
    ZERO = "Zero"
    NONZERO = "NonzeroCertified"
    INCONCLUSIVE = "Inconclusive"


class CertKind(str, Enum):
    ML_STABILIZED = "MLStabilized"
    SELF_SIMILAR = "SelfSimilarStrictDescent"
    INCONCLUSIVE = "InconclusiveWindow"
    RULE = "RuleDerived"
    COMPOSITE = "Composite"


def combine_verdicts(vs: Sequence[Verdict]) -> Verdict:
    """lim^1 of a finite direct sum: nonzero if a summand is, zero if all are."""
    if any(v == Verdict.NONZERO for v in vs):
        return Verdict.NONZERO
    if all(v == Verdict.ZERO for v in vs):
        return Verdict.ZERO
    return Verdict.INCONCLUSIVE


@dataclass(frozen=True, eq=False)
class Certificate:
    kind: CertKind
    window: int
    reason: str = ""
    stage: int | None = None
    evidence: dict = field(default_factory=dict)
    parts: tuple = ()          # ((label, Certificate), ...) for composites

    @property
    def verdict(self) -> Verdict:
        if self.kind in (CertKind.ML_STABILIZED, CertKind.RULE):
            return Verdict.ZERO
        if self.kind == CertKind.SELF_SIMILAR:
            return Verdict.NONZERO
        if self.kind == CertKind.COMPOSITE:
            return combine_verdicts([c.verdict for _, c in self.parts])
        return Verdict.INCONCLUSIVE

    def decided_by(self) -> list[str]:
        """Kinds of the leaf certificates that fix the verdict."""
        if self.kind != CertKind.COMPOSITE:
            return [self.kind.value]
        v = self.verdict
        kinds = set()
        for _, c in self.parts:
            if v == Verdict.ZERO or c.verdict == v:
                kinds.update(c.decided_by())
        return sorted(kinds)

    def to_json(self) -> dict:
        out = {"kind": self.kind.value, "verdict": self.verdict.value, "window": self.window,
               "decided_by": self.decided_by()}
        if self.reason:
            out["reason"] = self.reason
        if self.stage is not None:
            out["stage"] = self.stage
        if self.evidence:
            out["evidence"] = self.evidence
        if self.parts:
            out["parts"] = [{"label": lab, "certificate": c.to_json()} for lab, c in self.parts]
        return out

    @classmethod
    def from_json(cls, d: dict) -> "Certificate":
        return cls(CertKind(d["kind"]), d["window"], d.get("reason", ""), d.get("stage"),
                   d.get("evidence", {}),
                   tuple((p["label"], cls.from_json(p["certificate"])) for p in d.get("parts", ())))


def _gj(g: FgGroup) -> dict:
    return {"rank": g.rank, "torsion": list(g.torsion)}


def _g_of(d: dict) -> FgGroup:
    return FgGroup(d["rank"], tuple(d["torsion"]))


def _hj(f: FgHom) -> dict:
    return {"source": _gj(f.source), "target": _gj(f.target), "matrix": f.matrix.to_lists()}


def _h_of(d: dict) -> FgHom:
    s, t = _g_of(d["source"]), _g_of(d["target"])
    return FgHom(s, t, IntMatrix.from_rows(d["matrix"], s.ngens) if t.ngens else
                 IntMatrix.zeros(0, s.ngens))


def _chain_json(chain: list[Subgroup]) -> list[list[list[int]]]:
    return [[list(v) for v in c.gens] for c in chain]


def _stable_from(chain: list[Subgroup]) -> int | None:
    """Least j with ``C_j == C_(j+1) == ... == C_last`` when the chain settles early."""
    j = len(chain) - 1
    while j > 0 and chain[j - 1] == chain[j]:
        j -= 1
    return j if j < len(chain) - 1 else None


# --------------------------------------------------------------------------
# Mittag-Leffler analysis of an FgTower

EXAMINED_STAGES = (1, 2)


def _check_maps(t: FgTower, lo: int, hi: int, pred: str) -> list[dict] | None:
    maps = []
    for i in range(lo, hi + 1):
        f = t.map(i)
        ok = f.is_surjective() if pred == "surjective" else f.is_iso()
        if not ok:
            return None
        maps.append(_hj(f))
    return maps


def _descent(t: FgTower, window: int) -> Certificate | None:
    """Look for a shift u with u(C_j) in C_(j+s) pushing a witness strictly down."""
    for i in EXAMINED_STAGES:
        chain = t.image_chain(i, window)
        j0 = next((j for j in range(window) if not chain[j + 1] == chain[j]), None)
        if j0 is None:
            continue
        cands = [w for w in chain[j0].gens if w not in chain[j0 + 1]]
        for name, u in t.shifts(i):
            for s in (1, 2, 3):
                if not all(all(u(v) in chain[j + s] for v in chain[j].gens)
                           for j in range(window + 1 - s)):
                    continue
                for w in cands:
                    steps, x, m = [], tuple(w), 0
                    while j0 + m * s + 1 <= window:
                        j = j0 + m * s
                        if x not in chain[j] or x in chain[j + 1]:
                            break
                        steps.append(list(x))
                        x, m = u(x), m + 1
                    else:
                        if len(steps) >= 2:
                            return Certificate(
                                CertKind.SELF_SIMILAR, window, f"shift {name}", i,
                                {"group": _gj(t.stage(i)), "chain": _chain_json(chain),
                                 "shift": u.matrix.to_lists(), "step": s, "j0": j0,
                                 "witnesses": steps, "truncated": not t.exact})
    return None


def ml_status(t: FgTower, window: int = DEFAULT_WINDOW) -> Certificate:
    """Certify lim^1 = 0 (ML), lim^1 != 0 (strict descent) or report the window."""
    if window < 1:
        raise ValueError("window must be positive")
    top = max(EXAMINED_STAGES) + window
    if t.zero_tower:
        groups = [t.stage(i) for i in range(1, top + 1)]
        if not all(g.is_trivial for g in groups):
            raise InvariantViolation(f"{t.label}: claimed zero tower has a nonzero stage")
        return Certificate(CertKind.ML_STABILIZED, window, "zero-tower",
                           evidence={"claim": t.zero_tower, "groups": [_gj(g) for g in groups]})
    if t.surjective:
        maps = _check_maps(t, 1, top, "surjective")
        if maps is None:
            raise InvariantViolation(f"{t.label}: claimed surjective tower has a non-onto map")
        return Certificate(CertKind.ML_STABILIZED, window, "surjective",
                           evidence={"claim": t.surjective, "maps": maps})
    if t.iso_from is not None:
        maps = _check_maps(t, t.iso_from, t.iso_from + window, "iso")
        if maps is None:
            raise InvariantViolation(f"{t.label}: claimed isomorphic tail has a non-iso map")
        return Certificate(CertKind.ML_STABILIZED, window, "iso-tail",
                           evidence={"from": t.iso_from, "maps": maps})
    if t.exact and t.finite_stages:
        stages = []
        for i in EXAMINED_STAGES:
            chain = t.image_chain(i, window)
            if not t.stage(i).is_finite:
                raise InvariantViolation(f"{t.label}: claimed finite stage {i} is infinite")
            stages.append({"stage": i, "group": _gj(t.stage(i)), "chain": _chain_json(chain),
                           "stable_from": _stable_from(chain)})
        return Certificate(CertKind.ML_STABILIZED, window, "finite-stages",
                           evidence={"stages": stages})
    cert = _descent(t, window)
    if cert is not None:
        return cert
    orders = {}
    for i in EXAMINED_STAGES:
        orders[str(i)] = [c.order() for c in t.image_chain(i, window)]
    return Certificate(CertKind.INCONCLUSIVE, window,
                       "no stabilization rule and no self-similar descent in the window",
                       evidence={"chain_orders": orders, "truncated": not t.exact})


# --------------------------------------------------------------------------
# structural rules and certificate replay


def _rule(name: str, window: int, **facts) -> Certificate:
    return Certificate(CertKind.RULE, window, name, evidence={"facts": facts})


def _primes(n: int) -> set[int]:
    return set(factorize(n)) if n > 1 else set()


_RULES: dict[str, Callable[[dict], bool]] = {
    "divisible-target": lambda f: f["functor"] == "hom" and f["target_divisible"] is True,
    "ext-into-divisible": lambda f: f["functor"] == "ext" and f["target_divisible"] is True,
    "ext-right-exact": lambda f: f["functor"] == "ext",
    "torsion-into-torsionfree": lambda f: (f["functor"] == "hom" and f["source_torsion"] is True
                                           and f["target_torsionfree"] is True),
    "coprime-torsion": lambda f: (f["functor"] == "hom" and f["source_primes"] is not None
                                  and not set(f["source_primes"]) & set(f["target_primes"])),
    "split-tower": lambda f: f["functor"] == "hom" and parse_tower(f["tower"]).split,
    "iso-tail": lambda f: parse_tower(f["tower"]).iso_from is not None,
    "localization-iso": lambda f: _primes(f["k"]) <= _primes(f["m"]),
    "pext-rules": lambda f: pext_rules(_profile_of(f["source"]),
                                       _profile_of(f["target"])).verdict == RuleVerdict.ZERO,
}


def _replay_ml(c: Certificate) -> bool:
    ev = c.evidence
    if c.reason == "zero-tower":
        return all(_g_of(g).is_trivial for g in ev["groups"])
    if c.reason in ("surjective", "iso-tail"):
        maps = [_h_of(m) for m in ev["maps"]]
        # map(i): H_(i+1) -> H_i, so consecutive maps share H_(i+1)
        if any(a.source != b.target for a, b in zip(maps, maps[1:])):
            return False
        pred = (lambda f: f.is_surjective()) if c.reason == "surjective" else \
            (lambda f: f.is_iso())
        return bool(maps) and all(pred(f) for f in maps)
    if c.reason == "finite-stages":
        for st in ev["stages"]:
            g = _g_of(st["group"])
            if not g.is_finite:
                return False
            chain = [Subgroup.of(g, gens) for gens in st["chain"]]
            if any(not b <= a for a, b in zip(chain, chain[1:])):
                return False
            if st["stable_from"] is not None and \
                    not all(x == chain[-1] for x in chain[st["stable_from"]:]):
                return False
        return True
    return False


def _replay_descent(c: Certificate) -> bool:
    ev = c.evidence
    if ev.get("symbolic") == "localization":
        q, k, m = ev["q"], ev["k"], ev["m"]
        return _primes(q) == {q} and k % q == 0 and m % q != 0
    g = _g_of(ev["group"])
    chain = [Subgroup.of(g, gens) for gens in ev["chain"]]
    if any(not b <= a for a, b in zip(chain, chain[1:])):
        return False
    u = FgHom(g, g, IntMatrix.from_rows(ev["shift"], g.ngens))
    s, j0, ws = ev["step"], ev["j0"], ev["witnesses"]
    if len(ws) < 2:
        return False
    for j in range(len(chain) - s):
        if not all(u(v) in chain[j + s] for v in chain[j].gens):
            return False
    x = g.reduce(ws[0])
    for m, w in enumerate(ws):
        j = j0 + m * s
        if tuple(g.reduce(w)) != tuple(x) or x not in chain[j] or x in chain[j + 1]:
            return False
        x = u(x)
    return True


def replay(cert: Certificate) -> bool:
    """Re-check a certificate using only its stored evidence."""
    try:
        if cert.kind == CertKind.ML_STABILIZED:
            return _replay_ml(cert)
        if cert.kind == CertKind.SELF_SIMILAR:
            return _replay_descent(cert)
        if cert.kind == CertKind.RULE:
            return bool(_RULES[cert.reason](cert.evidence["facts"]))
        if cert.kind == CertKind.COMPOSITE:
            return all(replay(c) for _, c in cert.parts)
        return True
    except (KeyError, ValueError, TypeError, IndexError, ParseError):
        return False


# --------------------------------------------------------------------------
# Hom and Ext applied to a direct tower


class NotTruncatable(ValueError):
    """The target has atoms without a finitely generated summand model."""


def _affine_block(p: int, a: int, b: int, length: int) -> tuple[FgGroup, FgHom]:
    """First ``length`` summands of ``InfSum(p; a n + b)`` and the shift on them."""
    x = FgGroup(0, tuple(p ** (a * n + b) for n in range(1, length + 1)))
    cols = [[p ** a if r == c + 1 else 0 for r in range(length)] for c in range(length)]
    return x, FgHom.from_columns(x, x, cols)


def _exact_tower(t: DirectTower, functor: str, x: FgGroup, label: str, *,
                 exact: bool = True, shift: FgHom | None = None,
                 iso_from: int | None = None) -> FgTower:
    if functor == "hom":
        stage = lambda i: hom_group(t.stage(i), x).group
        mapf = lambda i: hom_induced(t.map(i), x)
        co = hom_induced_co
    else:
        stage = lambda i: ext_group(t.stage(i), x)
        mapf = lambda i: ext_induced_contra(t.map(i), x)
        co = ext_induced_co

    def shifts(i: int) -> list[tuple[str, FgHom]]:
        out = [("target-shift", co(t.stage(i), shift))] if shift is not None else []
        if t.constant:
            out.append(("structure-map", mapf(i)))
        return out

    tp = t.torsion_primes()
    zero = None
    if functor == "hom" and tp is not None and not tp & set(x.primary_parts()):
        zero = "coprime-torsion"
    surj = "ext-right-exact" if functor == "ext" else ("split-tower" if t.split else None)
    finite = functor == "ext" or x.is_finite or tp is not None
    return FgTower(stage, mapf, label, exact=exact, finite_stages=finite, surjective=surj,
                   iso_from=iso_from if iso_from is not None else t.iso_from,
                   zero_tower=zero, shifts=shifts)


@dataclass(frozen=True, eq=False)
class FunctorTower:
    """``Hom(G_i, H)`` or ``Ext(G_i, H)`` for a catalog tower G and any H."""
    functor: str
    source: DirectTower
    target: GroupExpr

    def __post_init__(self):
        if self.functor not in ("hom", "ext"):
            raise ValueError("functor must be 'hom' or 'ext'")
        object.__setattr__(self, "target", canonicalize(self.target))

    @property
    def label(self) -> str:
        name = "Hom" if self.functor == "hom" else "Ext"
        return f"{name}({self.source}, {self.target})"

    def stage(self, i: int) -> GroupExpr:
        from .expr import ext_from_fg, hom_from_fg
        f = hom_from_fg if self.functor == "hom" else ext_from_fg
        return f(self.source.stage(i), self.target)

    def exact_tower(self) -> FgTower | None:
        x = as_fg(self.target)
        return None if x is None else _exact_tower(self.source, self.functor, x, self.label)

    def truncation(self, length: int) -> FgTower:
        """The tower on a finitely generated summand of the target.

        Countable sums and products of ``Z/p^k`` keep ``length`` copies and
        each unbounded sum keeps its first ``length`` summands.
        """
        parts = normalize_parts(decompose(self.target))
        if parts.prufer or parts.local or parts.padic:
            raise NotTruncatable(f"{self.target} has no finitely generated summand model")
        orders = [0] * parts.rank
        orders += [p ** k for (p, k), c in parts.finite.items() for _ in range(c)]
        for p, k in sorted(parts.aleph | parts.cont):
            orders += [p ** k] * length
        for p, a, b in parts.affine:
            orders += [p ** (a * n + b) for n in range(1, length + 1)]
        x = from_cyclic_orders(orders)
        exact = not (parts.aleph or parts.cont or parts.affine)
        return _exact_tower(self.source, self.functor, x, f"{self.label} truncated at {length}",
                            exact=exact)

    def image_chain(self, i: int, window: int, truncation: int | None = None) -> list[Subgroup]:
        length = truncation or window + TRUNCATION_MARGIN
        return self.truncation(length).image_chain(i, window)

    def components(self, window: int, length: int) -> list[tuple[str, object]]:
        """Summand towers: FgTower, ("copies", FgTower) or a rule Certificate."""
        t, fn = self.source, self.functor
        parts = normalize_parts(decompose(self.target))
        tp = t.torsion_primes()
        desc = t.to_text()
        out: list[tuple[str, object]] = []
        orders = [0] * parts.rank + [p ** k for (p, k), c in parts.finite.items()
                                     for _ in range(c)]
        if orders:
            x = from_cyclic_orders(orders)
            if not x.is_trivial:
                out.append((str(x), _exact_tower(t, fn, x, f"{self.label} on {x}")))
        for (p, k), how in sorted([(pk, "countable") for pk in parts.aleph] +
                                  [(pk, "continuum") for pk in parts.cont]):
            x = FgGroup.cyclic(p ** k)
            out.append((f"{how} copies of Z/{p ** k}",
                        ("copies", _exact_tower(t, fn, x, f"{self.label} on {x}"))))
        for p, a, b in parts.affine:
            x, sigma = _affine_block(p, a, b, length)
            iso = 1 if (t.kind == "free" and t.params[0] % p) else None
            out.append((f"InfSum({p}; {format_rule(a, b)}) truncated at {length}",
                        _exact_tower(t, fn, x, f"{self.label} on {x}", exact=False,
                                     shift=sigma, iso_from=iso)))
        for p in sorted(parts.prufer):
            name = "divisible-target" if fn == "hom" else "ext-into-divisible"
            out.append((f"Prufer({p})", _rule(name, window, functor=fn,
                                              target=str(Prufer(p)), target_divisible=True)))
        for m in parts.local:
            out.append((str(ZLocal(m)), self._local_component(m, window, tp, desc)))
        for p, inner in parts.padic:
            atom = Padic(p, inner)
            if fn == "ext":
                c = _rule("ext-right-exact", window, functor=fn)
            elif tp is not None and p not in tp:
                c = _rule("coprime-torsion", window, functor=fn, source_primes=sorted(tp),
                          target_primes=[p])
            elif tp is not None and invariants(atom).torsionfree:
                c = _rule("torsion-into-torsionfree", window, functor=fn, source_torsion=True,
                          target_torsionfree=True)
            elif t.split:
                c = _rule("split-tower", window, functor=fn, tower=desc)
            elif t.iso_from is not None:
                c = _rule("iso-tail", window, functor=fn, tower=desc)
            else:
                c = Certificate(CertKind.INCONCLUSIVE, window,
                                "no finitely generated model for a completed target")
            out.append((str(atom), c))
        return out

    def _local_component(self, m: int, window: int, tp, desc: str) -> Certificate:
        t, fn = self.source, self.functor
        if fn == "ext":
            return _rule("ext-right-exact", window, functor=fn)
        if tp is not None:
            return _rule("torsion-into-torsionfree", window, functor=fn, source_torsion=True,
                         target_torsionfree=True)
        if t.split:
            return _rule("split-tower", window, functor=fn, tower=desc)
        if t.iso_from is not None:
            return _rule("iso-tail", window, functor=fn, tower=desc)
        if t.kind == "free":
            k = t.params[0]
            if _primes(k) <= _primes(m):
                return _rule("localization-iso", window, k=k, m=m)
            # Z[1/m] <-k- Z[1/m]: images k^j Z[1/m] descend strictly forever
            q = min(_primes(k) - _primes(m))
            return Certificate(CertKind.SELF_SIMILAR, window, "multiplication by a non-unit",
                               1, {"symbolic": "localization", "q": q, "k": k, "m": m})
        return Certificate(CertKind.INCONCLUSIVE, window, "no model for a localized target")


def _as_expr(h) -> GroupExpr:
    if isinstance(h, str):
        return parse_expr(h)
    if isinstance(h, FgGroup):
        return fg_expr(h)
    return h


def apply_hom(t: DirectTower, h) -> FunctorTower:
    return FunctorTower("hom", t, _as_expr(h))


def apply_ext(t: DirectTower, h) -> FunctorTower:
    return FunctorTower("ext", t, _as_expr(h))


def image_chain(tower, i: int, window: int = DEFAULT_WINDOW,
                truncation: int | None = None) -> list[Subgroup]:
    if isinstance(tower, FgTower):
        return tower.image_chain(i, window)
    return tower.image_chain(i, window, truncation)


# --------------------------------------------------------------------------
# lim^1


@dataclass(frozen=True, eq=False)
class Lim1Result:
    verdict: Verdict
    value_hint: GroupExpr | None
    certificate: Certificate

    def to_json(self) -> dict:
        return {"verdict": self.verdict.value,
                "value_hint": None if self.value_hint is None else str(self.value_hint),
                "certificate": self.certificate.to_json()}


def tower_certificate(tower, window: int = DEFAULT_WINDOW,
                      truncation: int | None = None) -> Certificate:
    if isinstance(tower, FgTower):
        return ml_status(tower, window)
    length = truncation or window + TRUNCATION_MARGIN
    parts = []
    for label, comp in tower.components(window, length):
        if isinstance(comp, Certificate):
            cert = comp
        elif isinstance(comp, tuple):
            base = ml_status(comp[1], window)
            cert = Certificate(CertKind.COMPOSITE, window, "copies of one finite-target tower",
                               parts=(("base", base),))
        else:
            cert = ml_status(comp, window)
        parts.append((label, cert))
    return Certificate(CertKind.COMPOSITE, window, tower.label, parts=tuple(parts))


def lim1(tower, window: int = DEFAULT_WINDOW, truncation: int | None = None) -> Lim1Result:
    cert = tower_certificate(tower, window, truncation)
    v = cert.verdict
    return Lim1Result(v, ZERO if v == Verdict.ZERO else None, cert)


def sum_lim1(named: Sequence[tuple[str, object]], window: int = DEFAULT_WINDOW,
             truncation: int | None = None) -> Lim1Result:
    """lim^1 of a finite direct sum of towers."""
    parts = tuple((lab, tower_certificate(t, window, truncation)) for lab, t in named)
    cert = Certificate(CertKind.COMPOSITE, window, "direct sum", parts=parts)
    v = cert.verdict
    return Lim1Result(v, ZERO if v == Verdict.ZERO else None, cert)


# --------------------------------------------------------------------------
# lim


@dataclass(frozen=True)
class ProDescriptor:
    """An inverse limit that is not written in the expression grammar."""
    text: str

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True, eq=False)
class LimResult:
    value: GroupExpr | ProDescriptor
    rule: str
    evidence: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"value": str(self.value), "rule": self.rule,
               "closed_form": not isinstance(self.value, ProDescriptor)}
        if self.evidence:
            out["evidence"] = self.evidence
        return out


def _y(functor: str, d: int, h: GroupExpr) -> GroupExpr:
    from .expr import quotient_by, torsion_subgroup_at
    return torsion_subgroup_at(h, d) if functor == "hom" else quotient_by(h, d)


def _p_bound(functor: str, p: int, h: GroupExpr) -> int | None:
    """Largest k with ``Z/p^k`` in ``h[p^e]`` (or ``h/p^e h``) for all e, or None."""
    parts = normalize_parts(decompose(h))
    if any(q == p for q, _, _ in parts.affine):
        return None
    if functor == "hom":
        if parts.prufer.get(p) or any(q == p and decompose(i).affine for q, i in parts.padic):
            return None
    elif parts.rank or any(m % p for m in parts.local) or any(q == p for q, _ in parts.padic):
        return None
    ks = [k for q, k in list(parts.finite) + list(parts.aleph) + list(parts.cont) if q == p]
    return max(ks, default=0)


def split_product(functor: str, t: DirectTower, h: GroupExpr,
                  start: int = 1) -> GroupExpr | ProDescriptor:
    """Product over n >= start of ``F(Z/d_n, h)`` for the increments ``d_n`` of t."""
    p = t.params[0]
    if t.kind == "elementary":
        y = _y(functor, t.increment(1), h)
        return ZERO if invariants(y).is_trivial else canonicalize(InfProduct(y))
    a, b = t.params[1], t.params[2]
    bound = _p_bound(functor, p, h)
    if bound is None:
        name = "Hom" if functor == "hom" else "Ext"
        return ProDescriptor(f"prod_(n>={start}) {name}(Z/{p}^({format_rule(a, b)}), {h})")
    n0 = start
    while a * n0 + b < bound:
        n0 += 1
    terms = [_y(functor, p ** (a * n + b), h) for n in range(start, n0)]
    tail = _y(functor, p ** (a * n0 + b), h)
    if not invariants(tail).is_trivial:
        terms.append(InfProduct(tail))
    return canonicalize(DirectSum(tuple(terms)))


def _hom_from_local(m: int, h: GroupExpr) -> GroupExpr | ProDescriptor:
    """``Hom(Z[1/m], h)``."""
    from .expr import Parts, _assemble
    r = _primes(m)
    parts = normalize_parts(decompose(h))
    if any(p in r for p in parts.prufer):
        return ProDescriptor(f"Hom(Z[1/{m}], {h})")
    out = Parts()
    for (p, k), c in parts.finite.items():
        if p not in r:
            out.finite[(p, k)] += c
    out.aleph = {pk for pk in parts.aleph if pk[0] not in r}
    out.cont = {pk for pk in parts.cont if pk[0] not in r}
    out.affine = [x for x in parts.affine if x[0] not in r]
    out.prufer.update({p: c for p, c in parts.prufer.items() if p not in r})
    out.local = [m2 for m2 in parts.local if r <= _primes(m2)]
    out.padic = [x for x in parts.padic if x[0] not in r]
    return _assemble(normalize_parts(out))


def lim_group(tower, window: int = DEFAULT_WINDOW) -> LimResult:
    """Closed form of the inverse limit when one is recognized."""
    if isinstance(tower, FgTower):
        if tower.zero_tower:
            return LimResult(ZERO, "zero-tower")
        if tower.iso_from is not None:
            return LimResult(fg_expr(tower.stage(tower.iso_from)), "iso-tail")
        return LimResult(ProDescriptor(f"lim {tower.label}"), "unrecognized")
    t, h, fn = tower.source, tower.target, tower.functor
    if t.iso_from is not None:
        return LimResult(tower.stage(t.iso_from), "iso-tail", {"from": t.iso_from})
    if t.kind in ("elementary", "affine"):
        return LimResult(split_product(fn, t, h), "split-product")
    if t.kind == "prufer":
        q = t.params[0]
        if fn == "ext":
            return LimResult(canonicalize(Padic(q, h)), "completion")
        c = normalize_parts(decompose(h)).prufer.get(q, 0)
        value = canonicalize(Padic(q, Free(c))) if c else ZERO
        return LimResult(value, "divisible-source", _zero_intersection(tower, window))
    m = t.params[0]
    if fn == "ext":
        return LimResult(ZERO, "free-source")
    return LimResult(_hom_from_local(m, h), "localization")


def _zero_intersection(tower: FunctorTower, window: int) -> dict:
    """Evidence that every fixed stage dies in the truncated image chains."""
    try:
        out = {}
        for length in (window, window + 2):
            chain = tower.truncation(length).image_chain(1, length + 1)
            out[str(length)] = next((j for j, c in enumerate(chain) if c.is_trivial()), None)
        return {"first_trivial_image_at_stage_1": out}
    except NotTruncatable:
        return {}


# --------------------------------------------------------------------------
# Pext rules and Pext


class RuleVerdict(str, Enum):
    ZERO = "Zero"
    DIVISIBLE = "Divisible"
    NONE = "NoVerdict"


@dataclass(frozen=True)
class RuleOutcome:
    verdict: RuleVerdict
    reason: str

    def to_json(self) -> dict:
        return {"verdict": self.verdict.value, "reason": self.reason}


def pext_rules(g, h) -> RuleOutcome:
    """Vanishing and divisibility of Pext(G, H) from invariant profiles alone."""
    if g.sum_of_cyclics is True:
        return RuleOutcome(RuleVerdict.ZERO, "source is a direct sum of cyclic groups")
    if h.algebraically_compact is True:
        return RuleOutcome(RuleVerdict.ZERO, "target is algebraically compact")
    if g.torsionfree is True or h.torsionfree is True:
        return RuleOutcome(RuleVerdict.DIVISIBLE, "source or target is torsionfree")
    return RuleOutcome(RuleVerdict.NONE, "no rule applies")


def _profile_of(d: dict):
    from .expr import InvariantProfile, Card
    c = d["cardinality"]
    return InvariantProfile(c if isinstance(c, int) else Card(c), d["exponent"], d["divisible"],
                            d["torsionfree"], d["reduced"], d["sum_of_cyclics"],
                            d["algebraically_compact"])


@dataclass(frozen=True, eq=False)
class PextResult:
    verdict: Verdict
    value_hint: GroupExpr | None
    certificate: Certificate
    rule: RuleOutcome
    window_verdict: Verdict

    @property
    def divisible(self) -> bool | None:
        if self.verdict == Verdict.ZERO or self.rule.verdict == RuleVerdict.DIVISIBLE:
            return True
        return None

    def to_json(self) -> dict:
        return {"verdict": self.verdict.value, "window_verdict": self.window_verdict.value,
                "value_hint": None if self.value_hint is None else str(self.value_hint),
                "divisible": self.divisible, "rule": self.rule.to_json(),
                "certificate": self.certificate.to_json()}


def pext(t: DirectTower, h, window: int = DEFAULT_WINDOW,
         truncation: int | None = None) -> PextResult:
    """Pext(colim G_i, H), computed as lim^1 of the Hom tower."""
    return _pext(t, canonicalize(_as_expr(h)), window, truncation)


@lru_cache(maxsize=1024)
def _pext(t: DirectTower, h: GroupExpr, window: int, truncation: int | None) -> PextResult:
    res = lim1(apply_hom(t, h), window, truncation)
    gp, hp = invariants(t.colimit()), invariants(h)
    rule = pext_rules(gp, hp)
    if rule.verdict == RuleVerdict.ZERO and res.verdict == Verdict.NONZERO:
        raise InvariantViolation(
            f"Pext({t.colimit()}, {h}): window certifies nonzero but {rule.reason}")
    verdict, cert = res.verdict, res.certificate
    if verdict == Verdict.INCONCLUSIVE and rule.verdict == RuleVerdict.ZERO:
        verdict = Verdict.ZERO
        # the window part stays as evidence only, so the composite verdict is Zero
        cert = Certificate(CertKind.COMPOSITE, window, "rule decides a window-inconclusive case",
                           evidence={"window_certificate": res.certificate.to_json()},
                           parts=(("rule", _rule("pext-rules", window, source=gp.to_json(),
                                                 target=hp.to_json())),))
    return PextResult(verdict, ZERO if verdict == Verdict.ZERO else None, cert, rule,
                      res.verdict)


# --------------------------------------------------------------------------
# independent routes and topology


def ext_of_colimit(g: GroupExpr, h: GroupExpr) -> GroupExpr | ProDescriptor | None:
    """``Ext(G, H)`` for G a direct sum of cyclic groups: the product of ``H/dH``.

    Uses only the summands of G, never a tower.  Returns None outside that
    class of G.
    """
    from .expr import quotient_by
    h = canonicalize(h)
    parts = normalize_parts(decompose(g))
    if parts.prufer or parts.local or parts.padic or parts.cont:
        return None
    terms: list[GroupExpr] = []
    for (p, k), c in parts.finite.items():
        terms += [quotient_by(h, p ** k)] * c
    for p, k in sorted(parts.aleph):
        y = quotient_by(h, p ** k)
        if not invariants(y).is_trivial:
            terms.append(InfProduct(y))
    for p, a, b in parts.affine:
        v = split_product("ext", DirectTower.affine(p, a, b), h)
        if isinstance(v, ProDescriptor):
            return v
        terms.append(v)
    return canonicalize(DirectSum(tuple(terms)))


@dataclass(frozen=True)
class ZadicReport:
    closure: GroupExpr
    trivial: bool
    pext_verdict: Verdict
    consistent: bool

    def to_json(self) -> dict:
        return {"closure_of_zero": str(self.closure), "trivial": self.trivial,
                "pext_verdict": self.pext_verdict.value, "consistent": self.consistent}


def zadic_closure_check(ext_value: GroupExpr, pext_verdict: Verdict) -> ZadicReport:
    """Compare the Z-adic closure of 0 in Ext with an independent Pext verdict.

    The closure is the intersection of the subgroups nE, which for the
    expression grammar is the divisible (Prufer) part.
    """
    parts = normalize_parts(decompose(ext_value))
    closure = canonicalize(DirectSum(tuple(Prufer(p) for p, c in sorted(parts.prufer.items())
                                           for _ in range(c))))
    trivial = not parts.prufer
    consistent = not ((trivial and pext_verdict == Verdict.NONZERO) or
                      (not trivial and pext_verdict == Verdict.ZERO))
    if not consistent:
        raise InvariantViolation(
            f"closure of 0 in {ext_value} is {closure} but Pext is {pext_verdict.value}")
    return ZadicReport(closure, trivial, pext_verdict, consistent)


@dataclass(frozen=True)
class KernelStage:
    stage: int
    kernel: str
    trivial: bool | None

    def to_json(self) -> dict:
        return {"stage": self.stage, "kernel": self.kernel, "trivial": self.trivial}


def _lim_kernel(t: DirectTower, h: GroupExpr, i: int) -> tuple[str, bool | None]:
    """Kernel of ``lim Ext(G_j, H) -> Ext(G_i, H)``."""
    if t.iso_from is not None:
        if i >= t.iso_from:
            return "0", True
        x = as_fg(h)
        if x is None:
            return f"ker(lim -> stage {i})", None
        f = ext_induced_contra(t.composite(i, t.iso_from), x)
        k = f.kernel()
        return str(k.as_group()), k.is_trivial()
    if t.kind in ("elementary", "affine"):
        v = split_product("ext", t, h, start=i + 1)
        if isinstance(v, ProDescriptor):
            return v.text, None
        if t.kind == "elementary":
            y = _y("ext", t.increment(1), h)
            return f"prod_(k>{i}) {y}", invariants(v).is_trivial
        return str(v), invariants(v).is_trivial
    if t.kind == "prufer":
        q = t.params[0]
        bound = _p_bound("ext", q, h)
        trivial = bound is not None and i >= bound
        return ("0" if trivial else f"{q}^{i} Padic({q}; {h})"), trivial
    return "0", True


def jensen_kernel_profile(t: DirectTower, h, window: int = DEFAULT_WINDOW,
                          pext_result: PextResult | None = None) -> dict:
    """Kernels of ``Ext(colim G_i, H) -> Ext(G_i, H)`` for i = 1..window.

    Each kernel is an extension of the stage kernel of ``lim Ext`` by Pext,
    so it is trivial exactly when both are.
    """
    h = canonicalize(_as_expr(h))
    pr = pext_result or pext(t, h, window)
    stages = []
    for i in range(1, window + 1):
        text, triv = _lim_kernel(t, h, i)
        if pr.verdict == Verdict.NONZERO:
            triv = False
            text = f"extension of {text} by Pext"
        elif pr.verdict == Verdict.INCONCLUSIVE and triv:
            triv = None
        stages.append(KernelStage(i, text, triv))
    if any(s.trivial for s in stages):
        discrete: bool | None = True
    elif all(s.trivial is False for s in stages) and _kernels_never_vanish(t, h, pr):
        discrete = False
    else:
        discrete = None
    return {"discrete": discrete, "stages": [s.to_json() for s in stages]}


def _kernels_never_vanish(t: DirectTower, h: GroupExpr, pr: PextResult) -> bool:
    if pr.verdict == Verdict.NONZERO:
        return True
    if t.kind == "elementary":
        return not invariants(_y("ext", t.increment(1), h)).is_trivial
    if t.kind == "affine":
        # h / p^k h is nonzero for some k >= 1 iff it is for k = 1
        p, a, b = t.params
        return _p_bound("ext", p, h) is None or \
            (a + b > 0 and not invariants(_y("ext", p, h)).is_trivial)
    if t.kind == "prufer":
        return _p_bound("ext", t.params[0], h) is None
    return False
