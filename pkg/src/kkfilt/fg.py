"""Finitely generated abelian groups, homomorphisms, subgroups, Hom and Ext.

Elements of an :class:`FgGroup` are coordinate vectors with the free
coordinates first and then one coordinate per invariant factor, in
increasing order.  A homomorphism ``f: G -> H`` is an integer matrix with
``H.ngens`` rows whose column ``c`` is the image of the ``c``-th generator
of ``G``.

Ext is computed from the resolution ``0 -> Z^k -> Z^(r+k) -> G -> 0`` where
the ``j``-th basis vector of ``Z^k`` goes to ``d_j`` times the ``j``-th
torsion generator.  An extension class is then a *cocycle*: a ``k``-tuple of
elements of ``H`` (the values on the relations), taken modulo restrictions
of maps ``Z^(r+k) -> H``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache, reduce
from typing import Iterator, Sequence

from .matrix import (IntMatrix, diagonal, hstack, identity, kernel_basis, matvec,
                     snf_lists, solve)


class AmbientMismatch(ValueError):
    """Two subgroups (or a subgroup and an element) live in different groups."""


class NotExact(ValueError):
    def __init__(self, node: str, detail: str = ""):
        super().__init__(f"sequence not exact at {node}" + (f": {detail}" if detail else ""))
        self.node = node


# --------------------------------------------------------------------------
# coordinate spaces and presentations


def _relation_columns(moduli: Sequence[int]) -> list[list[int]]:
    n = len(moduli)
    cols = []
    for i, d in enumerate(moduli):
        if d:
            c = [0] * n
            c[i] = d
            cols.append(c)
    return cols


def _reduce(vec: Sequence[int], moduli: Sequence[int]) -> tuple[int, ...]:
    return tuple(x % d if d else x for x, d in zip(vec, moduli))


@dataclass
class Presentation:
    """``Z^n / span(cols)`` brought to canonical form.

    ``to_can`` (c x n) sends a vector of ``Z^n`` to canonical coordinates,
    ``from_can`` (n x c) sends canonical generators back to representatives.
    """
    n: int
    group: "FgGroup"
    to_can: list[list[int]]
    from_can: list[list[int]]

    def canon(self, v: Sequence[int]) -> tuple[int, ...]:
        return self.group.reduce(matvec(self.to_can, v))

    def lift(self, c: Sequence[int]) -> list[int]:
        return matvec(self.from_can, c)


def present(n: int, cols: Sequence[Sequence[int]]) -> Presentation:
    m = len(cols)
    a = [[c[i] for c in cols] for i in range(n)]
    st = snf_lists(a, n, m)
    diag = diagonal(st.S) if n and m else []
    r = sum(1 for d in diag if d)
    free = list(range(r, n))
    tors = [i for i in range(r) if diag[i] > 1]
    order = free + tors
    group = FgGroup(len(free), tuple(diag[i] for i in tors))
    to_can = [st.U[i][:] for i in order]
    from_can = [[st.Ui[row][i] for i in order] for row in range(n)]
    return Presentation(n, group, to_can, from_can)


# --------------------------------------------------------------------------
# groups


@dataclass(frozen=True, order=True)
class FgGroup:
    rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if self.rank < 0:
            raise ValueError("rank must be nonnegative")
        for d in self.torsion:
            if d < 2:
                raise ValueError(f"invariant factors must be >= 2, got {d}")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"invariant factors {self.torsion} do not form a divisibility chain")

    @classmethod
    def cyclic(cls, d: int) -> "FgGroup":
        if d == 0:
            return cls(1)
        return from_cyclic_orders([d])

    @classmethod
    def free(cls, r: int) -> "FgGroup":
        return cls(r)

    @property
    def moduli(self) -> tuple[int, ...]:
        return (0,) * self.rank + self.torsion

    @property
    def ngens(self) -> int:
        return self.rank + len(self.torsion)

    @property
    def is_finite(self) -> bool:
        return self.rank == 0

    @property
    def is_trivial(self) -> bool:
        return self.ngens == 0

    @property
    def order(self) -> int | None:
        return math.prod(self.torsion) if self.rank == 0 else None

    @property
    def exponent(self) -> int | None:
        """Least n with nG = 0 (None when there is a free part)."""
        if self.rank:
            return None
        return self.torsion[-1] if self.torsion else 1

    def reduce(self, v: Sequence[int]) -> tuple[int, ...]:
        if len(v) != self.ngens:
            raise ValueError(f"element of length {len(v)} in a group with {self.ngens} generators")
        return _reduce(v, self.moduli)

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.ngens

    def elements(self) -> Iterator[tuple[int, ...]]:
        if self.rank:
            raise ValueError("cannot enumerate an infinite group")
        return itertools.product(*(range(d) for d in self.torsion))

    def element_order(self, v: Sequence[int]) -> int:
        if self.rank and any(v[:self.rank]):
            return 0
        return reduce(math.lcm, (d // math.gcd(d, x) for x, d in zip(v[self.rank:], self.torsion)), 1)

    def direct_sum(self, other: "FgGroup") -> "FgGroup":
        return from_cyclic_orders([0] * (self.rank + other.rank) + list(self.torsion + other.torsion))

    def primary_parts(self) -> dict[int, list[int]]:
        """Prime -> sorted list of prime-power orders (elementary divisors)."""
        out: dict[int, list[int]] = {}
        for d in self.torsion:
            for p, k in factorize(d).items():
                out.setdefault(p, []).append(p ** k)
        return {p: sorted(v) for p, v in sorted(out.items())}

    def __str__(self) -> str:
        parts = []
        if self.rank:
            parts.append("Z" if self.rank == 1 else f"Z^{self.rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        if not parts:
            return "0"
        return parts[0] if len(parts) == 1 else "Sum(" + ", ".join(parts) + ")"


def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    n = abs(n)
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def from_cyclic_orders(orders: Sequence[int]) -> FgGroup:
    """Canonical group of ``sum Z/d`` (``d = 0`` meaning Z, ``d = 1`` trivial)."""
    rank = sum(1 for d in orders if d == 0)
    by_prime: dict[int, list[int]] = {}
    for d in orders:
        if d > 1:
            for p, k in factorize(d).items():
                by_prime.setdefault(p, []).append(p ** k)
    length = max((len(v) for v in by_prime.values()), default=0)
    inv = [1] * length
    for v in by_prime.values():
        v.sort(reverse=True)
        for i, q in enumerate(v):
            inv[length - 1 - i] *= q
    return FgGroup(rank, tuple(inv))


def fg_from_presentation(relations: IntMatrix) -> FgGroup:
    """Cokernel of the relation matrix; each row is one relation among the
    ``relations.cols`` generators."""
    return present(relations.cols, [list(r) for r in relations.to_lists()]).group


def presentation_of(g: FgGroup, extra: Sequence[Sequence[int]] = ()) -> Presentation:
    """``g / span(extra)`` in canonical form, coordinates relative to ``g``."""
    return present(g.ngens, _relation_columns(g.moduli) + [list(c) for c in extra])


# --------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True)
class FgHom:
    source: FgGroup
    target: FgGroup
    matrix: IntMatrix

    def __post_init__(self):
        m = self.matrix
        if (m.rows, m.cols) != (self.target.ngens, self.source.ngens):
            raise ValueError(f"matrix shape {m.rows}x{m.cols} does not fit "
                             f"{self.source} -> {self.target}")
        reduced = [self.target.reduce(c) for c in m.columns()]
        object.__setattr__(self, "matrix", IntMatrix.from_columns(reduced, m.rows))
        for j, d in enumerate(self.source.torsion):
            c = reduced[self.source.rank + j]
            if any(self.target.reduce([d * x for x in c])):
                raise ValueError(f"generator of order {d} sent to {c}, which is not killed by {d}")

    @classmethod
    def from_columns(cls, source: FgGroup, target: FgGroup, columns) -> "FgHom":
        return cls(source, target, IntMatrix.from_columns([list(c) for c in columns], target.ngens))

    @classmethod
    def identity(cls, g: FgGroup) -> "FgHom":
        return cls(g, g, IntMatrix.identity(g.ngens))

    @classmethod
    def zero(cls, source: FgGroup, target: FgGroup) -> "FgHom":
        return cls(source, target, IntMatrix.zeros(target.ngens, source.ngens))

    @classmethod
    def scalar(cls, g: FgGroup, n: int) -> "FgHom":
        return cls(g, g, IntMatrix(g.ngens, g.ngens,
                                   tuple(n * int(i == j) for i in range(g.ngens)
                                         for j in range(g.ngens))))

    def __call__(self, v: Sequence[int]) -> tuple[int, ...]:
        return self.target.reduce(self.matrix.apply(v))

    def compose(self, inner: "FgHom") -> "FgHom":
        """``self`` after ``inner``."""
        if inner.target != self.source:
            raise ValueError("composition of non-composable homomorphisms")
        return FgHom(inner.source, self.target, self.matrix @ inner.matrix)

    __matmul__ = compose

    def __add__(self, other: "FgHom") -> "FgHom":
        return FgHom(self.source, self.target,
                     IntMatrix(self.matrix.rows, self.matrix.cols,
                               tuple(a + b for a, b in zip(self.matrix.entries, other.matrix.entries))))

    def is_zero(self) -> bool:
        return self.matrix.is_zero()

    def image(self) -> "Subgroup":
        return image_subgroup(self)

    def kernel(self) -> "Subgroup":
        return kernel_subgroup(self)

    def is_injective(self) -> bool:
        return self.kernel().is_trivial()

    def is_surjective(self) -> bool:
        return self.image() == Subgroup.whole(self.target)

    def is_iso(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def preimage(self, y: Sequence[int]) -> tuple[int, ...] | None:
        """Some x with f(x) = y, or None."""
        a = hstack(self.matrix.to_lists(), _cols_to_rows(_relation_columns(self.target.moduli),
                                                         self.target.ngens),
                   rows=self.target.ngens)
        x = solve(a, self.target.ngens, len(a[0]) if a else 0, list(y))
        if x is None:
            return None
        return self.source.reduce(x[:self.source.ngens])


def _cols_to_rows(cols: Sequence[Sequence[int]], n: int) -> list[list[int]]:
    return [[c[i] for c in cols] for i in range(n)]


# --------------------------------------------------------------------------
# subgroups


@dataclass(frozen=True, eq=False)
class Subgroup:
    ambient: FgGroup
    generators: IntMatrix  # columns are elements of ambient

    def __post_init__(self):
        if self.generators.rows != self.ambient.ngens:
            raise ValueError("generator length does not match ambient group")

    @classmethod
    def of(cls, ambient: FgGroup, gens: Sequence[Sequence[int]]) -> "Subgroup":
        gens = [ambient.reduce(g) for g in gens]
        return cls(ambient, IntMatrix.from_columns(gens, ambient.ngens))

    @classmethod
    def whole(cls, g: FgGroup) -> "Subgroup":
        return cls(g, IntMatrix.identity(g.ngens))

    @classmethod
    def trivial(cls, g: FgGroup) -> "Subgroup":
        return cls(g, IntMatrix.zeros(g.ngens, 0))

    @property
    def gens(self) -> list[tuple[int, ...]]:
        return self.generators.columns()

    @cached_property
    def _span(self):
        n = self.ambient.ngens
        cols = self.gens + [tuple(c) for c in _relation_columns(self.ambient.moduli)]
        a = _cols_to_rows(cols, n)
        return a, len(cols), (snf_lists(a, n, len(cols)) if n else None)

    def __contains__(self, x: Sequence[int]) -> bool:
        if len(x) != self.ambient.ngens:
            raise AmbientMismatch("element does not belong to the ambient group")
        if not self.ambient.ngens:
            return True
        a, m, st = self._span
        return solve(a, self.ambient.ngens, m, list(x), _cache=st) is not None

    def _check(self, other: "Subgroup"):
        if self.ambient != other.ambient:
            raise AmbientMismatch(f"subgroups of {self.ambient} and {other.ambient}")

    def __le__(self, other: "Subgroup") -> bool:
        self._check(other)
        return all(g in other for g in self.gens)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subgroup):
            return NotImplemented
        return self <= other and other <= self

    def __lt__(self, other: "Subgroup") -> bool:
        return self <= other and not other <= self

    __hash__ = None

    @cached_property
    def presentation(self) -> Presentation:
        """The subgroup as an abstract group: ``Z^m / {y : gens*y = 0}``."""
        m = self.generators.cols
        n = self.ambient.ngens
        rel = _relation_columns(self.ambient.moduli)
        a = hstack(self.generators.to_lists(), _cols_to_rows(rel, n), rows=n) if n else []
        if n:
            ker = kernel_basis(a, n, m + len(rel))
            rels = [k[:m] for k in ker]
        else:
            rels = [[int(i == j) for i in range(m)] for j in range(m)]
        return present(m, rels)

    def as_group(self) -> FgGroup:
        return self.presentation.group

    def inclusion(self) -> FgHom:
        """The canonical group of this subgroup, mapped into the ambient group."""
        pres = self.presentation
        cols = [matvec(self.generators.to_lists(), [r[j] for r in pres.from_can])
                for j in range(pres.group.ngens)]
        return FgHom.from_columns(pres.group, self.ambient, cols)

    def coords(self, x: Sequence[int]) -> tuple[int, ...]:
        """Canonical coordinates of an element lying in this subgroup."""
        n = self.ambient.ngens
        a, m, st = self._span
        y = solve(a, n, m, list(x), _cache=st) if n else []
        if y is None:
            raise ValueError(f"{tuple(x)} is not in the subgroup")
        return self.presentation.canon(y[:self.generators.cols])

    def order(self) -> int | None:
        return self.as_group().order

    def is_trivial(self) -> bool:
        return all(not any(self.ambient.reduce(g)) for g in self.gens)

    def intersect(self, other: "Subgroup") -> "Subgroup":
        self._check(other)
        n = self.ambient.ngens
        if not n:
            return self
        ka, kb = self.generators.cols, other.generators.cols
        rel = _relation_columns(self.ambient.moduli)
        neg_b = [[-x for x in r] for r in other.generators.to_lists()]
        a = hstack(self.generators.to_lists(), neg_b, _cols_to_rows(rel, n), rows=n)
        ker = kernel_basis(a, n, ka + kb + len(rel))
        gl = self.generators.to_lists()
        return Subgroup.of(self.ambient, [matvec(gl, k[:ka]) for k in ker])

    def __add__(self, other: "Subgroup") -> "Subgroup":
        self._check(other)
        return Subgroup.of(self.ambient, self.gens + other.gens)

    def scaled(self, n: int) -> "Subgroup":
        return Subgroup.of(self.ambient, [[n * x for x in g] for g in self.gens])

    def elements(self) -> set[tuple[int, ...]]:
        return {x for x in self.ambient.elements() if x in self}


def image_subgroup(f: FgHom) -> Subgroup:
    return Subgroup(f.target, f.matrix)


def kernel_subgroup(f: FgHom) -> Subgroup:
    n_s, n_t = f.source.ngens, f.target.ngens
    if n_t == 0:
        return Subgroup.whole(f.source)
    rel = _relation_columns(f.target.moduli)
    a = hstack(f.matrix.to_lists(), _cols_to_rows(rel, n_t), rows=n_t)
    ker = kernel_basis(a, n_t, n_s + len(rel))
    return Subgroup.of(f.source, [k[:n_s] for k in ker])


def subgroup_equal(a: Subgroup, b: Subgroup) -> bool:
    return a == b


def subgroup_quotient(ambient: FgGroup, sub: Subgroup) -> FgGroup:
    if sub.ambient != ambient:
        raise AmbientMismatch(f"subgroup of {sub.ambient} is not a subgroup of {ambient}")
    return presentation_of(ambient, sub.gens).group


def quotient_map(ambient: FgGroup, sub: Subgroup) -> FgHom:
    if sub.ambient != ambient:
        raise AmbientMismatch(f"subgroup of {sub.ambient} is not a subgroup of {ambient}")
    pres = presentation_of(ambient, sub.gens)
    return FgHom(ambient, pres.group, IntMatrix.from_rows(pres.to_can, ambient.ngens))


# --------------------------------------------------------------------------
# Hom and Ext


def _power(g: FgGroup, k: int) -> tuple[int, ...]:
    return g.moduli * k


@dataclass(frozen=True)
class HomSpace:
    """Hom(source, target) realized inside ``target^(source.ngens)``."""
    source: FgGroup
    target: FgGroup
    group: FgGroup
    basis: tuple[FgHom, ...]
    _ambient: Subgroup = field(repr=False)

    def __iter__(self):
        yield self.group
        yield list(self.basis)

    def coords(self, f: FgHom) -> tuple[int, ...]:
        flat = [x for c in f.matrix.columns() for x in c]
        return self._ambient.coords(flat)

    def hom(self, c: Sequence[int]) -> FgHom:
        out = FgHom.zero(self.source, self.target)
        for k, b in zip(c, self.basis):
            out = out + FgHom(b.source, b.target,
                              IntMatrix(b.matrix.rows, b.matrix.cols,
                                        tuple(k * x for x in b.matrix.entries)))
        return out


def _ambient_group(moduli: Sequence[int]) -> FgGroup:
    """A stand-in FgGroup whose coordinates carry arbitrary moduli.

    Coordinate spaces like ``H^n`` are not in canonical form, so they are
    modeled by a private subclass that skips the divisibility check.
    """
    return _Coords(tuple(moduli))


class _Coords(FgGroup):
    def __init__(self, moduli):
        object.__setattr__(self, "rank", 0)
        object.__setattr__(self, "torsion", ())
        object.__setattr__(self, "_moduli", tuple(moduli))

    @property
    def moduli(self):
        return self._moduli

    @property
    def ngens(self):
        return len(self._moduli)

    def __eq__(self, other):
        return isinstance(other, _Coords) and self._moduli == other._moduli

    def __hash__(self):
        return hash(("coords", self._moduli))

    def __repr__(self):
        return f"_Coords{self._moduli}"

    @property
    def order(self):
        return None if 0 in self._moduli else math.prod(self._moduli)

    def elements(self):
        if 0 in self._moduli:
            raise ValueError("cannot enumerate an infinite group")
        return itertools.product(*(range(d) for d in self._moduli))


@lru_cache(maxsize=4096)
def hom_group(g: FgGroup, h: FgGroup) -> HomSpace:
    """Hom(g, h) in canonical form with explicit generating homomorphisms."""
    n_h, n_g = h.ngens, g.ngens
    amb = _ambient_group(_power(h, n_g))
    # constraint: d * (image of the torsion generator of order d) = 0
    rows = []
    tgt = []
    for j, d in enumerate(g.torsion):
        c = g.rank + j
        for t in range(n_h):
            r = [0] * (n_h * n_g)
            r[c * n_h + t] = d
            rows.append(r)
        tgt += list(h.moduli)
    if rows:
        constraint = FgHom(amb, _ambient_group(tgt), IntMatrix.from_rows(rows, n_h * n_g))
        sub = kernel_subgroup(constraint)
    else:
        sub = Subgroup.whole(amb)
    incl = sub.inclusion()
    basis = []
    for col in incl.matrix.columns():
        cols = [col[c * n_h:(c + 1) * n_h] for c in range(n_g)]
        basis.append(FgHom.from_columns(g, h, cols))
    return HomSpace(g, h, sub.as_group(), tuple(basis), sub)


@dataclass(frozen=True)
class ExtSpace:
    """Ext(source, target) as cocycles ``(h_1..h_k)`` modulo coboundaries."""
    source: FgGroup
    target: FgGroup
    group: FgGroup
    pres: Presentation = field(repr=False)

    def coords(self, cocycle: Sequence[Sequence[int]]) -> tuple[int, ...]:
        flat = [x for c in cocycle for x in c]
        return self.pres.canon(flat)

    def cocycle(self, c: Sequence[int]) -> list[tuple[int, ...]]:
        flat = self.pres.lift(c)
        n_h = self.target.ngens
        return [self.target.reduce(flat[j * n_h:(j + 1) * n_h])
                for j in range(len(self.source.torsion))]


@lru_cache(maxsize=4096)
def ext_space(g: FgGroup, h: FgGroup) -> ExtSpace:
    k, n_h = len(g.torsion), h.ngens
    moduli = _power(h, k)
    extra = []
    for j, d in enumerate(g.torsion):
        for t in range(n_h):
            c = [0] * (k * n_h)
            c[j * n_h + t] = d
            extra.append(c)
    pres = present(k * n_h, _relation_columns(moduli) + extra)
    return ExtSpace(g, h, pres.group, pres)


def ext_group(g: FgGroup, h: FgGroup) -> FgGroup:
    """Ext^1_Z(g, h); equals the sum of ``h / d h`` over invariant factors d of g."""
    return ext_space(g, h).group


@lru_cache(maxsize=8192)
def hom_induced(f: FgHom, h: FgGroup) -> FgHom:
    """Restriction ``Hom(g, h) -> Hom(g', h)`` along ``f: g' -> g``."""
    src, dst = hom_group(f.target, h), hom_group(f.source, h)
    cols = [dst.coords(phi.compose(f)) for phi in src.basis]
    return FgHom.from_columns(src.group, dst.group, cols)


def hom_induced_co(g: FgGroup, r: FgHom) -> FgHom:
    """``Hom(g, h) -> Hom(g, h')`` along ``r: h -> h'``."""
    src, dst = hom_group(g, r.source), hom_group(g, r.target)
    cols = [dst.coords(r.compose(phi)) for phi in src.basis]
    return FgHom.from_columns(src.group, dst.group, cols)


def _lift_relations(f: FgHom) -> list[list[int]]:
    """Chain map on the relation modules lifting ``f: g' -> g``.

    Entry ``[t][j]`` is the coefficient of relation ``t`` of g in the image
    of relation ``j`` of g'.
    """
    g2, g = f.source, f.target
    F = f.matrix
    out = [[0] * len(g2.torsion) for _ in g.torsion]
    for j, d2 in enumerate(g2.torsion):
        col = g2.rank + j
        for i in range(g.rank):
            if F[i, col]:
                raise ValueError("torsion generator mapped to a free coordinate")
        for t, d in enumerate(g.torsion):
            v = d2 * F[g.rank + t, col]
            if v % d:
                raise ValueError("map is not well defined on torsion")
            out[t][j] = v // d
    return out


@lru_cache(maxsize=8192)
def ext_induced_contra(f: FgHom, h: FgGroup) -> FgHom:
    """Restriction ``Ext(g, h) -> Ext(g', h)`` along ``f: g' -> g``."""
    src, dst = ext_space(f.target, h), ext_space(f.source, h)
    lift = _lift_relations(f)
    cols = []
    for e in range(src.group.ngens):
        unit = [int(i == e) for i in range(src.group.ngens)]
        coc = src.cocycle(unit)
        new = []
        for j in range(len(f.source.torsion)):
            v = [0] * h.ngens
            for t, c_t in enumerate(coc):
                q = lift[t][j]
                if q:
                    v = [a + q * b for a, b in zip(v, c_t)]
            new.append(v)
        cols.append(dst.coords(new))
    return FgHom.from_columns(src.group, dst.group, cols)


def ext_induced_co(g: FgGroup, r: FgHom) -> FgHom:
    """``Ext(g, h) -> Ext(g, h')`` along ``r: h -> h'``."""
    src, dst = ext_space(g, r.source), ext_space(g, r.target)
    cols = []
    for e in range(src.group.ngens):
        coc = src.cocycle([int(i == e) for i in range(src.group.ngens)])
        cols.append(dst.coords([r(c) for c in coc]))
    return FgHom.from_columns(src.group, dst.group, cols)


# --------------------------------------------------------------------------
# direct sums of groups with explicit coordinates


def direct_sum_coords(groups: Sequence[FgGroup]) -> FgGroup:
    """Non-canonical direct sum whose coordinates are the concatenation."""
    return _ambient_group([m for g in groups for m in g.moduli])


def canonical_form(g: FgGroup) -> tuple[FgGroup, FgHom, FgHom]:
    """For a coordinate space ``g``: canonical group C with isos g -> C -> g."""
    pres = presentation_of(g)
    to_c = FgHom(g, pres.group, IntMatrix.from_rows(pres.to_can, g.ngens)) if g.ngens else \
        FgHom.zero(g, pres.group)
    from_c = FgHom(pres.group, g, IntMatrix.from_rows(pres.from_can, pres.group.ngens)) \
        if g.ngens else FgHom.zero(pres.group, g)
    return pres.group, to_c, from_c


# --------------------------------------------------------------------------
# six-term sequence and purity


@dataclass(frozen=True)
class ShortExact:
    inclusion: FgHom   # H' -> H
    projection: FgHom  # H -> H''

    def verify(self):
        i, p = self.inclusion, self.projection
        if i.target != p.source:
            raise NotExact("H", "maps are not composable")
        if not i.is_injective():
            raise NotExact("H'", "inclusion is not injective")
        if not i.image() == p.kernel():
            raise NotExact("H", "image of inclusion differs from kernel of projection")
        if not p.is_surjective():
            raise NotExact("H''", "projection is not surjective")


def connecting_map(ses: ShortExact, g: FgGroup) -> FgHom:
    """The boundary ``Hom(g, H'') -> Ext(g, H')``."""
    i, p = ses.inclusion, ses.projection
    hom2 = hom_group(g, p.target)
    ext1 = ext_space(g, i.source)
    cols = []
    for phi in hom2.basis:
        lifts = []
        for c in range(g.ngens):
            x = p.preimage(phi.matrix.col(c))
            assert x is not None
            lifts.append(x)
        cocycle = []
        for j, d in enumerate(g.torsion):
            v = [d * x for x in lifts[g.rank + j]]
            y = i.preimage(v)
            assert y is not None, "relation image outside kernel of projection"
            cocycle.append(y)
        cols.append(ext1.coords(cocycle))
    return FgHom.from_columns(hom2.group, ext1.group, cols)


@dataclass
class SixTermReport:
    groups: dict[str, FgGroup]
    maps: dict[str, FgHom]
    exact_at: dict[str, bool]

    @property
    def exact(self) -> bool:
        return all(self.exact_at.values())


def _exact_at(f: FgHom, g: FgHom) -> bool:
    return f.image() == g.kernel()


def six_term_check(ses: ShortExact, g: FgGroup) -> SixTermReport:
    """Build the Hom-Ext six-term sequence for ``ses`` and check exactness."""
    ses.verify()
    i, p = ses.inclusion, ses.projection
    maps = {
        "i_hom": hom_induced_co(g, i),
        "p_hom": hom_induced_co(g, p),
        "delta": connecting_map(ses, g),
        "i_ext": ext_induced_co(g, i),
        "p_ext": ext_induced_co(g, p),
    }
    groups = {
        "Hom(G,H')": maps["i_hom"].source, "Hom(G,H)": maps["p_hom"].source,
        "Hom(G,H'')": maps["delta"].source, "Ext(G,H')": maps["i_ext"].source,
        "Ext(G,H)": maps["p_ext"].source, "Ext(G,H'')": maps["p_ext"].target,
    }
    exact = {
        "Hom(G,H')": maps["i_hom"].is_injective(),
        "Hom(G,H)": _exact_at(maps["i_hom"], maps["p_hom"]),
        "Hom(G,H'')": _exact_at(maps["p_hom"], maps["delta"]),
        "Ext(G,H')": _exact_at(maps["delta"], maps["i_ext"]),
        "Ext(G,H)": _exact_at(maps["i_ext"], maps["p_ext"]),
        "Ext(G,H'')": maps["p_ext"].is_surjective(),
    }
    return SixTermReport(groups, maps, exact)


@dataclass(frozen=True)
class ExplicitExtension:
    sub: FgGroup
    total: FgGroup
    quotient: FgGroup
    inclusion: FgHom
    projection: FgHom

    def __post_init__(self):
        if self.inclusion.source != self.sub or self.inclusion.target != self.total:
            raise ValueError("inclusion does not map sub -> total")
        if self.projection.source != self.total or self.projection.target != self.quotient:
            raise ValueError("projection does not map total -> quotient")
        ShortExact(self.inclusion, self.projection).verify()

    @classmethod
    def build(cls, inclusion: FgHom, projection: FgHom) -> "ExplicitExtension":
        return cls(inclusion.source, inclusion.target, projection.target, inclusion, projection)


def purity_check(e: ExplicitExtension, n_max: int) -> tuple[dict[int, bool], bool]:
    """For each n <= n_max decide whether ``H & nE == nH`` inside E."""
    h_sub = e.inclusion.image()
    whole = Subgroup.whole(e.total)
    per_n = {}
    for n in range(1, n_max + 1):
        per_n[n] = h_sub.intersect(whole.scaled(n)) == h_sub.scaled(n)
    return per_n, all(per_n.values())


# --------------------------------------------------------------------------
# enumeration of small groups


def _partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


def finite_groups(max_order: int) -> list[FgGroup]:
    """Every finite abelian group of order at most ``max_order``, up to iso."""
    out = []
    for n in range(1, max_order + 1):
        choices = [[[p ** k for k in part] for part in _partitions(e)]
                   for p, e in factorize(n).items()]
        for combo in itertools.product(*choices):
            out.append(from_cyclic_orders([q for part in combo for q in part]))
    return out
