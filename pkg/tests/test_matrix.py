from hypothesis import given, settings, strategies as st

from kkfilt.matrix import IntMatrix, bareiss_det, kernel_basis, matvec, smith_normal_form, solve


def _diag(s: IntMatrix) -> list[int]:
    return [s[i, i] for i in range(min(s.rows, s.cols))]


def _is_diagonal(s: IntMatrix) -> bool:
    return all(s[i, j] == 0 for i in range(s.rows) for j in range(s.cols) if i != j)


def test_snf_two_by_two():
    m = IntMatrix.from_rows([[2, 0], [0, 3]])
    s, u, v = smith_normal_form(m)
    assert u @ m @ v == s
    assert _diag(s) == [1, 6]
    assert abs(bareiss_det(m.to_lists())) == 6


def test_snf_zero_and_diagonal():
    z = IntMatrix.zeros(2, 3)
    s, u, v = smith_normal_form(z)
    assert s == z and u == IntMatrix.identity(2) and v == IntMatrix.identity(3)
    s, _, _ = smith_normal_form(IntMatrix.from_rows([[4]]))
    assert s == IntMatrix.from_rows([[4]])


matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(
        lambda c: st.lists(st.lists(st.integers(-9, 9), min_size=c, max_size=c),
                           min_size=r, max_size=r)))


@settings(max_examples=80, deadline=None)
@given(matrices)
def test_snf_properties(rows):
    m = IntMatrix.from_rows(rows)
    s, u, v = smith_normal_form(m)
    assert u @ m @ v == s
    assert _is_diagonal(s)
    d = _diag(s)
    assert all(x >= 0 for x in d)
    assert all(b % a == 0 if a else b == 0 for a, b in zip(d, d[1:]))
    assert abs(u.det()) == 1 and abs(v.det()) == 1
    if m.rows == m.cols:
        prod = 1
        for x in d:
            prod *= x
        assert abs(bareiss_det(rows)) == prod


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_kernel_and_solve(rows):
    n, c = len(rows), len(rows[0])
    for k in kernel_basis(rows, n, c):
        assert matvec(rows, k) == [0] * n
    x = [1] * c
    b = matvec(rows, x)
    y = solve(rows, n, c, b)
    assert y is not None and matvec(rows, y) == b
