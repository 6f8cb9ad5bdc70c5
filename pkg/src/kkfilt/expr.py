"""Expressions for countable (and a few continuum-size) abelian groups.

Atoms: ``Free(r)``, ``Cyclic(d)``, ``Prufer(p)``, ``InfSum(p, a, b)`` (the sum
over n >= 1 of ``Z/p^(a*n+b)``), ``InfProduct(base)`` for a bounded base,
``Padic(p, of)`` and ``ZLocal(m)`` (the ring Z[1/m] as a group), combined
with ``DirectSum``.

Every expression decomposes into a :class:`Parts` record.  For the
sum-of-cyclics p-torsion the record keeps the multiplicity of each
``Z/p^k`` as a finite count, countably many, or continuum many, which is a
complete invariant; that is what makes :func:`canonicalize` a normal form.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

from .fg import FgGroup, factorize, from_cyclic_orders


class GroupExpr:
    """Base class of the expression tree."""

    def __str__(self) -> str:
        return format_expr(self)


@dataclass(frozen=True, eq=True)
class Free(GroupExpr):
    rank: int = 1


@dataclass(frozen=True)
class Cyclic(GroupExpr):
    order: int


@dataclass(frozen=True)
class Prufer(GroupExpr):
    p: int


@dataclass(frozen=True)
class InfSum(GroupExpr):
    """Sum over n >= 1 of Z/p^(a*n + b); a = 0 gives countably many Z/p^b."""
    p: int
    a: int
    b: int

    def __post_init__(self):
        if self.a < 0:
            raise ValueError("exponent slope must be nonnegative")
        if self.a + self.b < 1:
            raise ValueError(f"exponent rule {self.a}*n+{self.b} is not positive at n = 1")

    def exponent(self, n: int) -> int:
        return self.a * n + self.b


@dataclass(frozen=True)
class InfProduct(GroupExpr):
    base: GroupExpr


@dataclass(frozen=True)
class Padic(GroupExpr):
    p: int
    of: GroupExpr


@dataclass(frozen=True)
class ZLocal(GroupExpr):
    m: int


@dataclass(frozen=True)
class DirectSum(GroupExpr):
    terms: tuple[GroupExpr, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))


ZERO = DirectSum(())


def Sum(*terms: GroupExpr) -> DirectSum:
    return DirectSum(tuple(terms))


def fg_expr(g: FgGroup) -> GroupExpr:
    terms = ([Free(g.rank)] if g.rank else []) + [Cyclic(d) for d in g.torsion]
    return terms[0] if len(terms) == 1 else DirectSum(tuple(terms))


# --------------------------------------------------------------------------
# decomposition


def _radical(m: int) -> int:
    return math.prod(factorize(m)) if m > 1 else 1


def _vp(n: int, p: int) -> int:
    k = 0
    while n and n % p == 0:
        n //= p
        k += 1
    return k


@dataclass
class Parts:
    rank: int = 0
    local: list[int] = field(default_factory=list)             # radicals m >= 2
    finite: Counter = field(default_factory=Counter)           # (p, k) -> count
    aleph: set = field(default_factory=set)                    # (p, k)
    cont: set = field(default_factory=set)                     # (p, k)
    affine: list = field(default_factory=list)                 # (p, a, b), a > 0
    prufer: Counter = field(default_factory=Counter)           # p -> count
    padic: list = field(default_factory=list)                  # (p, inner GroupExpr)

    def add(self, other: "Parts"):
        self.rank += other.rank
        self.local += other.local
        self.finite.update(other.finite)
        self.aleph |= other.aleph
        self.cont |= other.cont
        self.affine += other.affine
        self.prufer.update(other.prufer)
        self.padic += other.padic

    def add_cyclic(self, d: int):
        if d == 0:
            self.rank += 1
            return
        for p, k in factorize(d).items():
            self.finite[(p, k)] += 1

    @property
    def bounded(self) -> bool:
        return not (self.rank or self.local or self.affine or self.prufer or self.padic)

    def primes(self) -> set[int]:
        ps = {p for p, _ in self.finite} | {p for p, _ in self.aleph} | {p for p, _ in self.cont}
        ps |= {t[0] for t in self.affine} | set(self.prufer) | {p for p, _ in self.padic}
        return ps


def decompose(e: GroupExpr) -> Parts:
    out = Parts()
    if isinstance(e, DirectSum):
        for t in e.terms:
            out.add(decompose(t))
    elif isinstance(e, Free):
        if e.rank < 0:
            raise ValueError("negative rank")
        out.rank = e.rank
    elif isinstance(e, Cyclic):
        if e.order < 1:
            raise ValueError("Cyclic order must be >= 1 (use Free for Z)")
        out.add_cyclic(e.order)
    elif isinstance(e, Prufer):
        _check_prime(e.p)
        out.prufer[e.p] += 1
    elif isinstance(e, InfSum):
        _check_prime(e.p)
        if e.a == 0:
            out.aleph.add((e.p, e.b))
        else:
            out.affine.append((e.p, e.a, e.b))
    elif isinstance(e, ZLocal):
        if e.m < 1:
            raise ValueError("Z[1/m] needs m >= 1")
        r = _radical(e.m)
        if r == 1:
            out.rank += 1
        else:
            out.local.append(r)
    elif isinstance(e, InfProduct):
        base = decompose(e.base)
        if not base.bounded:
            raise ValueError(f"InfProduct base must be bounded, got {format_expr(e.base)}")
        out.cont |= set(base.finite) | base.aleph | base.cont
    elif isinstance(e, Padic):
        _check_prime(e.p)
        out.add(_padic_parts(e.p, decompose(e.of)))
    else:
        raise TypeError(f"not a group expression: {e!r}")
    return out


def _check_prime(p: int):
    if p < 2 or any(p % q == 0 for q in range(2, math.isqrt(p) + 1)):
        raise ValueError(f"{p} is not a prime")


def _padic_parts(p: int, inner: Parts) -> Parts:
    """p-adic completion: bounded p-parts pass through, other primes and
    p-divisible pieces vanish, free and unbounded pieces stay inside."""
    out = Parts()
    keep = Parts()
    keep.rank = inner.rank + sum(1 for m in inner.local if m % p)
    out.finite = Counter({k: v for k, v in inner.finite.items() if k[0] == p})
    out.aleph = {k for k in inner.aleph if k[0] == p}
    out.cont = {k for k in inner.cont if k[0] == p}
    keep.affine = [t for t in inner.affine if t[0] == p]
    for q, sub in inner.padic:
        if q == p:
            sub_parts = decompose(sub)
            keep.rank += sub_parts.rank
            keep.affine += sub_parts.affine
    if keep.affine:
        # the completion of an unbounded sum is only known up to its finite
        # summands, which live outside
        body = canonicalize(_assemble(keep))
        bp = decompose(body)
        out.finite.update(bp.finite)
        out.aleph |= bp.aleph
        bp.finite, bp.aleph = Counter(), set()
        out.padic.append((p, _assemble(bp)))
    elif keep.rank:
        out.padic.append((p, Free(keep.rank)))
    return out


# --------------------------------------------------------------------------
# normal form


def _prime_normal(p, finite: Counter, aleph: set, cont: set, affine: list):
    """Normal form of the sum-of-cyclics p-part.

    Returns (finite counts below the periodic tail, aleph set, cont set,
    list of InfSum triples).
    """
    cont_k = {k for q, k in cont if q == p}
    aleph_k = {k for q, k in aleph if q == p} - cont_k
    fin = {k: c for (q, k), c in finite.items() if q == p and c}
    aff = [(a, b) for q, a, b in affine if q == p]
    period = 1
    for a, _ in aff:
        period = math.lcm(period, a)
    special = cont_k | aleph_k
    kmax = max([*special, *fin, *(a + b for a, b in aff), 0]) + period

    def mult(k):
        return fin.get(k, 0) + sum(1 for a, b in aff if k >= a + b and (k - b) % a == 0)

    tail = [mult(kmax + ((r - kmax) % period)) for r in range(period)]
    lp = next(d for d in range(1, period + 1)
              if period % d == 0 and all(tail[i] == tail[i % d] for i in range(period)))
    tail = tail[:lp]
    k0 = kmax + 1
    while k0 > 1:
        j = k0 - 1
        if j in special or mult(j) == tail[j % lp]:
            k0 -= 1
        else:
            break
    finite_out = Counter({(p, k): mult(k) for k in range(1, k0) if k not in special and mult(k)})
    sums = []
    for r in range(lp):
        if tail[r]:
            k = k0 + ((r - k0) % lp)
            sums += [(p, lp, k - lp)] * tail[r]
    return finite_out, {(p, k) for k in aleph_k}, {(p, k) for k in cont_k}, sums


def normalize_parts(parts: Parts) -> Parts:
    out = Parts(rank=parts.rank, local=sorted(parts.local),
                prufer=Counter({p: c for p, c in parts.prufer.items() if c}))
    primes = ({p for p, _ in parts.finite} | {p for p, _ in parts.aleph}
              | {p for p, _ in parts.cont} | {t[0] for t in parts.affine})
    for p in sorted(primes):
        f, a, c, s = _prime_normal(p, parts.finite, parts.aleph, parts.cont, parts.affine)
        out.finite.update(f)
        out.aleph |= a
        out.cont |= c
        out.affine += s
    out.affine.sort()
    out.padic = sorted(((p, canonicalize(inner)) for p, inner in parts.padic),
                       key=lambda t: (t[0], format_expr(t[1])))
    return out


def _assemble(parts: Parts) -> GroupExpr:
    terms: list[GroupExpr] = []
    if parts.rank:
        terms.append(Free(parts.rank))
    orders = [p ** k for (p, k), c in sorted(parts.finite.items()) for _ in range(c)]
    terms += [Cyclic(d) for d in from_cyclic_orders(orders).torsion]
    terms += [ZLocal(m) for m in sorted(parts.local)]
    terms += [Prufer(p) for p in sorted(parts.prufer.elements())]
    terms += [InfSum(p, 0, k) for p, k in sorted(parts.aleph)]
    terms += [InfSum(p, a, b) for p, a, b in sorted(parts.affine)]
    if parts.cont:
        base = from_cyclic_orders([p ** k for p, k in sorted(parts.cont)])
        terms.append(InfProduct(fg_expr(base)))
    terms += [Padic(p, inner) for p, inner in parts.padic]
    if len(terms) == 1:
        return terms[0]
    return DirectSum(tuple(terms))


def canonicalize(e: GroupExpr) -> GroupExpr:
    """Normal form; isomorphic expressions without Padic atoms map to equal forms."""
    return _assemble(normalize_parts(decompose(e)))


# --------------------------------------------------------------------------
# invariant profiles


class Card(str, Enum):
    COUNTABLE = "countably-infinite"
    CONTINUUM = "continuum"
    UNKNOWN = "unknown"


INFINITE = "infinite"


@dataclass(frozen=True)
class InvariantProfile:
    cardinality: int | Card          # an int means finite of that order
    exponent: int | str              # int, "infinite" or "unknown"
    divisible: bool | None
    torsionfree: bool | None
    reduced: bool | None
    sum_of_cyclics: bool | None
    algebraically_compact: bool | None

    @property
    def is_finite(self) -> bool:
        return isinstance(self.cardinality, int)

    @property
    def is_countable(self) -> bool | None:
        if self.cardinality == Card.UNKNOWN:
            return None
        return self.cardinality != Card.CONTINUUM

    @property
    def is_trivial(self) -> bool:
        return self.cardinality == 1

    def to_json(self) -> dict:
        c = self.cardinality
        return {
            "cardinality": c if isinstance(c, int) else c.value,
            "exponent": self.exponent,
            "divisible": self.divisible,
            "torsionfree": self.torsionfree,
            "reduced": self.reduced,
            "sum_of_cyclics": self.sum_of_cyclics,
            "algebraically_compact": self.algebraically_compact,
        }


def _all3(flags: Iterable[bool | None]) -> bool | None:
    flags = list(flags)
    if any(f is False for f in flags):
        return False
    if all(f is True for f in flags):
        return True
    return None


def _padic_has_torsion(inner: GroupExpr) -> bool:
    return bool(decompose(inner).affine)


def invariants(e: GroupExpr) -> InvariantProfile:
    parts = normalize_parts(decompose(e))
    unbounded = bool(parts.rank or parts.local or parts.prufer or parts.affine or parts.padic)
    if parts.cont or parts.padic:
        card: int | Card = Card.CONTINUUM
    elif unbounded or parts.aleph:
        card = Card.COUNTABLE
    else:
        card = math.prod(p ** (k * c) for (p, k), c in parts.finite.items())
    if unbounded:
        exponent: int | str = INFINITE
    else:
        exponent = math.lcm(1, *(p ** k for p, k in
                                 list(parts.finite) + list(parts.aleph) + list(parts.cont)))
    torsion_pieces = bool(parts.finite or parts.aleph or parts.cont or parts.affine
                          or parts.prufer or any(_padic_has_torsion(i) for _, i in parts.padic))
    nondivisible = bool(parts.rank or parts.local or parts.finite or parts.aleph or parts.cont
                        or parts.affine or parts.padic)
    # summand-wise flags: a summand failing the property makes the sum fail
    soc_flags: list[bool | None] = []
    ac_flags: list[bool | None] = []
    if parts.rank:
        soc_flags.append(True)
        ac_flags.append(False)
    if parts.finite or parts.aleph or parts.cont:
        soc_flags.append(True)
        ac_flags.append(True)
    if parts.affine:
        soc_flags.append(True)
        ac_flags.append(False)
    if parts.local:
        soc_flags.append(False)
        ac_flags.append(False)
    if parts.prufer:
        soc_flags.append(False)
        ac_flags.append(True)
    if parts.padic:
        # complete and Hausdorff in the Z-adic topology, and unbounded
        soc_flags.append(False)
        ac_flags.append(True)
    return InvariantProfile(
        cardinality=card,
        exponent=exponent,
        divisible=not nondivisible,
        torsionfree=not torsion_pieces,
        reduced=not parts.prufer,
        sum_of_cyclics=_all3(soc_flags),
        algebraically_compact=_all3(ac_flags),
    )


# --------------------------------------------------------------------------
# torsion subgroups, quotients, Hom/Ext from f.g. sources


def _cut(parts: Parts, d: int, torsion: bool) -> Parts:
    """``e[d]`` when ``torsion`` is set, otherwise ``e / d e``."""
    out = Parts()
    dp = factorize(d)
    for (p, k), c in parts.finite.items():
        v = min(k, dp.get(p, 0))
        if v:
            out.finite[(p, v)] += c
    for p, k in parts.aleph:
        v = min(k, dp.get(p, 0))
        if v:
            out.aleph.add((p, v))
    for p, k in parts.cont:
        v = min(k, dp.get(p, 0))
        if v:
            out.cont.add((p, v))
    for p, a, b in parts.affine:
        v = dp.get(p, 0)
        if v:
            n = 1
            while a * n + b < v:
                out.finite[(p, a * n + b)] += 1
                n += 1
            out.aleph.add((p, v))
    if torsion:
        for p, c in parts.prufer.items():
            if dp.get(p, 0):
                out.finite[(p, dp[p])] += c
    else:
        if parts.rank:
            for _ in range(parts.rank):
                out.add_cyclic(d)
        for m in parts.local:
            out.add_cyclic(math.prod(p ** k for p, k in dp.items() if m % p))
    for p, inner in parts.padic:
        v = dp.get(p, 0)
        if not v:
            continue
        ip = decompose(inner)
        sub = _cut(ip, p ** v, torsion)
        if torsion:
            # the completion's p^v-torsion is a product, not a sum
            sub.cont |= sub.aleph
            sub.aleph = set()
        out.add(sub)
    return out


def torsion_subgroup_at(e: GroupExpr, d: int) -> GroupExpr:
    """``e[d] = {x : d x = 0}``."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return _assemble(normalize_parts(_cut(normalize_parts(decompose(e)), d, True)))


def quotient_by(e: GroupExpr, n: int) -> GroupExpr:
    """``e / n e``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _assemble(normalize_parts(_cut(normalize_parts(decompose(e)), n, False)))


def hom_from_fg(g: FgGroup, h: GroupExpr) -> GroupExpr:
    terms = [h] * g.rank + [torsion_subgroup_at(h, d) for d in g.torsion]
    return canonicalize(DirectSum(tuple(terms)))


def ext_from_fg(g: FgGroup, h: GroupExpr) -> GroupExpr:
    return canonicalize(DirectSum(tuple(quotient_by(h, d) for d in g.torsion)))


def as_fg(e: GroupExpr) -> FgGroup | None:
    """The FgGroup when ``e`` is finitely generated, else None."""
    parts = normalize_parts(decompose(e))
    if parts.local or parts.aleph or parts.cont or parts.affine or parts.prufer or parts.padic:
        return None
    orders = [0] * parts.rank + [p ** k for (p, k), c in parts.finite.items() for _ in range(c)]
    return from_cyclic_orders(orders)


def is_fg(e: GroupExpr) -> bool:
    return as_fg(e) is not None


class Iso(str, Enum):
    EQUAL = "Equal"
    DISTINCT = "Distinct"
    UNDECIDED = "Undecided"


def iso_check(a: GroupExpr, b: GroupExpr) -> Iso:
    ca, cb = canonicalize(a), canonicalize(b)
    if ca == cb:
        return Iso.EQUAL
    pa, pb = normalize_parts(decompose(ca)), normalize_parts(decompose(cb))
    if not pa.padic and not pb.padic:
        return Iso.DISTINCT
    fa, fb = invariants(ca).to_json(), invariants(cb).to_json()
    for key in fa:
        if fa[key] is not None and fb[key] is not None and fa[key] != fb[key] \
                and "unknown" not in (fa[key], fb[key]):
            return Iso.DISTINCT
    return Iso.UNDECIDED


# --------------------------------------------------------------------------
# text grammar


def format_rule(a: int, b: int) -> str:
    if a == 0:
        return str(b)
    head = "n" if a == 1 else f"{a}*n"
    if b > 0:
        return f"{head}+{b}"
    if b < 0:
        return f"{head}-{-b}"
    return head


def format_expr(e: GroupExpr) -> str:
    if isinstance(e, DirectSum):
        if not e.terms:
            return "0"
        return "Sum(" + ", ".join(format_expr(t) for t in e.terms) + ")"
    if isinstance(e, Free):
        return "0" if e.rank == 0 else ("Z" if e.rank == 1 else f"Z^{e.rank}")
    if isinstance(e, Cyclic):
        return "0" if e.order == 1 else f"Z/{e.order}"
    if isinstance(e, Prufer):
        return f"Prufer({e.p})"
    if isinstance(e, InfSum):
        return f"InfSum({e.p}; {format_rule(e.a, e.b)})"
    if isinstance(e, InfProduct):
        return f"InfProduct({format_expr(e.base)})"
    if isinstance(e, Padic):
        return f"Padic({e.p}; {format_expr(e.of)})"
    if isinstance(e, ZLocal):
        return f"Z[1/{e.m}]"
    raise TypeError(f"not a group expression: {e!r}")


class ParseError(ValueError):
    def __init__(self, msg: str, text: str, pos: int):
        super().__init__(f"{msg} at column {pos + 1}: {text!r}")
        self.msg = msg
        self.column = pos + 1
        self.text = text


_RULE = re.compile(r"^\s*(?:(-?\d+)\s*\*?\s*)?n\s*(?:([+-])\s*(\d+))?\s*$")


def parse_rule(text: str) -> tuple[int, int]:
    t = text.strip()
    if re.fullmatch(r"-?\d+", t):
        return 0, int(t)
    m = _RULE.match(t)
    if not m:
        raise ValueError(f"bad exponent rule {text!r}; expected a*n+b")
    a = int(m.group(1)) if m.group(1) else 1
    b = int(m.group(3)) if m.group(3) else 0
    if m.group(2) == "-":
        b = -b
    return a, b


class _Parser:
    def __init__(self, text: str):
        self.text, self.pos = text, 0

    def error(self, msg):
        raise ParseError(msg, self.text, self.pos)

    def ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, s):
        self.ws()
        return self.text.startswith(s, self.pos)

    def eat(self, s):
        if not self.peek(s):
            self.error(f"expected {s!r}")
        self.pos += len(s)

    def int_(self):
        self.ws()
        m = re.compile(r"\d+").match(self.text, self.pos)
        if not m:
            self.error("expected an integer")
        self.pos = m.end()
        return int(m.group())

    def until(self, closer=")"):
        self.ws()
        depth, start = 0, self.pos
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch in "([":
                depth += 1
            elif ch in ")]":
                if depth == 0:
                    break
                depth -= 1
            self.pos += 1
        return self.text[start:self.pos]

    def expr(self) -> GroupExpr:
        self.ws()
        for name in ("Prufer", "Sum", "InfSum", "InfProduct", "Padic"):
            if re.compile(name + r"\s*\(").match(self.text, self.pos):
                self.pos += len(name)
                self.eat("(")
                return getattr(self, "_" + name.lower())()
        if self.peek("0"):
            self.pos += 1
            return ZERO
        if self.peek("Z"):
            self.pos += 1
            if self.peek("[1/"):
                self.eat("[1/")
                m = self.int_()
                self.eat("]")
                return ZLocal(m)
            if self.peek("^"):
                self.eat("^")
                return Free(self.int_())
            if self.peek("/"):
                self.eat("/")
                return Cyclic(self.int_())
            return Free(1)
        self.error("expected a group expression")

    def _prufer(self):
        if self.peek("p"):
            self.eat("p")
            self.eat("=")
        p = self.int_()
        self.eat(")")
        return Prufer(p)

    def _sum(self):
        terms = []
        if not self.peek(")"):
            terms.append(self.expr())
            while self.peek(","):
                self.eat(",")
                terms.append(self.expr())
        self.eat(")")
        return DirectSum(tuple(terms))

    def _infsum(self):
        p = self.int_()
        self.eat(";")
        start = self.pos
        rule = self.until()
        self.eat(")")
        try:
            a, b = parse_rule(rule)
            return InfSum(p, a, b)
        except ValueError as exc:
            raise ParseError(str(exc), self.text, start) from None

    def _infproduct(self):
        e = self.expr()
        self.eat(")")
        return InfProduct(e)

    def _padic(self):
        p = self.int_()
        self.eat(";")
        e = self.expr()
        self.eat(")")
        return Padic(p, e)


def parse_expr(text: str) -> GroupExpr:
    ps = _Parser(text)
    e = ps.expr()
    ps.ws()
    if ps.pos != len(text):
        ps.error("trailing input")
    try:
        decompose(e)
    except ValueError as exc:
        raise ParseError(str(exc), text, 0) from None
    return e
