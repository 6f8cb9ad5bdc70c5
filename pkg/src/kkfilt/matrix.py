"""Exact integer matrices and the Smith normal form.

Everything here works on Python ints, so entries never overflow.  The
public type is :class:`IntMatrix`; the algorithms use plain lists of lists
internally and wrap the result.
"""

from __future__ import annotations

import json
from operator import mul
from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries, got {len(self.entries)}")

    @classmethod
    def from_rows(cls, data: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        data = [list(r) for r in data]
        if cols is None:
            if not data:
                raise ValueError("cannot infer column count of an empty matrix")
            cols = len(data[0])
        for r in data:
            if len(r) != cols:
                raise ValueError("ragged matrix")
        return cls(len(data), cols, tuple(int(x) for r in data for x in r))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "IntMatrix":
        return cls.from_rows([[c[i] for c in columns] for i in range(rows)], len(columns))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i * self.cols + j]

    def to_lists(self) -> list[list[int]]:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def columns(self) -> list[tuple[int, ...]]:
        return [self.col(j) for j in range(self.cols)]

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows,
                         tuple(self[i, j] for j in range(self.cols) for i in range(self.rows)))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        return IntMatrix(self.rows, other.cols,
                         tuple(x for r in matmul(self.to_lists(), other.to_lists(), other.cols)
                               for x in r))

    def apply(self, v: Sequence[int]) -> list[int]:
        return matvec(self.to_lists(), v)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def det(self) -> int:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        return bareiss_det(self.to_lists())

    def to_json(self) -> str:
        return json.dumps(self.to_lists())

    @classmethod
    def from_json(cls, text: str, cols: int | None = None) -> "IntMatrix":
        return cls.from_rows(json.loads(text), cols)

    def __str__(self) -> str:
        return json.dumps(self.to_lists())


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: list[list[int]], b: list[list[int]], bcols: int) -> list[list[int]]:
    bt = [[row[j] for row in b] for j in range(bcols)]
    return [[sum(map(mul, r, c)) for c in bt] for r in a]


def matvec(a: list[list[int]], v: Sequence[int]) -> list[int]:
    return [sum(map(mul, r, v)) for r in a]


def hstack(*blocks: list[list[int]], rows: int) -> list[list[int]]:
    return [[x for b in blocks for x in b[i]] for i in range(rows)]


def bareiss_det(m: list[list[int]]) -> int:
    """Fraction-free determinant; independent of the SNF code path."""
    n = len(m)
    if n == 0:
        return 1
    a = [r[:] for r in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


class _SNF:
    """Working state: tracks U, U^-1, V, V^-1 with U*A*V = S."""

    def __init__(self, a: list[list[int]], nrows: int, ncols: int):
        self.n, self.m = nrows, ncols
        self.S = [r[:] for r in a]
        self.U, self.Ui = identity(nrows), identity(nrows)
        self.V, self.Vi = identity(ncols), identity(ncols)

    # row i <- row i + q * row t
    def add_row(self, i, t, q):
        if not q:
            return
        S, U, Ui = self.S, self.U, self.Ui
        S[i] = [x + q * y for x, y in zip(S[i], S[t])]
        U[i] = [x + q * y for x, y in zip(U[i], U[t])]
        for r in Ui:
            r[t] -= q * r[i]

    def swap_rows(self, i, t):
        if i == t:
            return
        for M in (self.S, self.U):
            M[i], M[t] = M[t], M[i]
        for r in self.Ui:
            r[i], r[t] = r[t], r[i]

    def negate_row(self, t):
        self.S[t] = [-x for x in self.S[t]]
        self.U[t] = [-x for x in self.U[t]]
        for r in self.Ui:
            r[t] = -r[t]

    # col j <- col j + q * col t
    def add_col(self, j, t, q):
        if not q:
            return
        for r in self.S:
            r[j] += q * r[t]
        for r in self.V:
            r[j] += q * r[t]
        Vi = self.Vi
        Vi[t] = [x - q * y for x, y in zip(Vi[t], Vi[j])]

    def swap_cols(self, j, t):
        if j == t:
            return
        for M in (self.S, self.V):
            for r in M:
                r[j], r[t] = r[t], r[j]
        self.Vi[j], self.Vi[t] = self.Vi[t], self.Vi[j]

    def run(self):
        S, n, m = self.S, self.n, self.m
        for t in range(min(n, m)):
            pivot = _smallest(S, range(t, n), range(t, m))
            if pivot is None:
                break
            self.swap_rows(t, pivot[0])
            self.swap_cols(t, pivot[1])
            while True:
                for i in range(t + 1, n):
                    self.add_row(i, t, -(S[i][t] // S[t][t]))
                for j in range(t + 1, m):
                    self.add_col(j, t, -(S[t][j] // S[t][t]))
                cross = [(i, t) for i in range(t + 1, n) if S[i][t]] + \
                        [(t, j) for j in range(t + 1, m) if S[t][j]]
                if cross:
                    i, j = min(cross, key=lambda ij: (abs(S[ij[0]][ij[1]]), ij))
                    self.swap_rows(t, i)
                    self.swap_cols(t, j)
                    continue
                d = S[t][t]
                bad = next(((i, j) for i in range(t + 1, n) for j in range(t + 1, m)
                            if S[i][j] % d), None)
                if bad is None:
                    break
                self.add_row(t, bad[0], 1)
            if S[t][t] < 0:
                self.negate_row(t)
        return self


def _smallest(S, rows, cols):
    best = None
    for i in rows:
        r = S[i]
        for j in cols:
            v = r[j]
            if v and (best is None or abs(v) < best[0]):
                best = (abs(v), i, j)
    return None if best is None else best[1:]


def snf_lists(a: list[list[int]], nrows: int, ncols: int) -> _SNF:
    return _SNF(a, nrows, ncols).run()


def smith_normal_form(m: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(S, U, V)`` with ``U @ m @ V == S``.

    ``S`` is diagonal with nonnegative entries ``d_1 | d_2 | ...``; ``U`` and
    ``V`` are unimodular.  Pivots are the smallest nonzero entry in absolute
    value, ties broken by row-major position, so transforms are reproducible.
    """
    st = snf_lists(m.to_lists(), m.rows, m.cols)
    return (IntMatrix.from_rows(st.S, m.cols), IntMatrix.from_rows(st.U, m.rows),
            IntMatrix.from_rows(st.V, m.cols))


def diagonal(s: list[list[int]]) -> list[int]:
    return [s[i][i] for i in range(min(len(s), len(s[0]) if s else 0))]


def kernel_basis(a: list[list[int]], nrows: int, ncols: int) -> list[list[int]]:
    """Z-basis of {x : a x = 0}, as a list of vectors."""
    st = snf_lists(a, nrows, ncols)
    r = sum(1 for d in diagonal(st.S) if d)
    return [[st.V[i][j] for i in range(ncols)] for j in range(r, ncols)]


def solve(a: list[list[int]], nrows: int, ncols: int, b: Sequence[int],
          _cache: _SNF | None = None) -> list[int] | None:
    """An integer solution of ``a x = b`` or None."""
    st = _cache or snf_lists(a, nrows, ncols)
    y = matvec(st.U, b)
    z = [0] * ncols
    for i, yi in enumerate(y):
        d = st.S[i][i] if i < ncols else 0
        if d == 0:
            if yi:
                return None
        else:
            if yi % d:
                return None
            z[i] = yi // d
    return matvec(st.V, z)


def flatten(rows: Iterable[Iterable[int]]) -> list[int]:
    return [x for r in rows for x in r]
