import random

import pytest

from khoco.linalg import (
    AbelianGroup,
    CompositionNotZero,
    DenominatorNotContained,
    IntMatrix,
    LaurentPoly,
    Subquotient,
    cokernel,
    homology_at,
    intersect_column_spans,
    kernel_basis,
    smith_normal_form,
    solve_linear,
    subquotient_group,
)


def det(m: IntMatrix) -> int:
    """Fraction-free determinant, for checking unimodularity of U, V."""
    a = [row[:] for row in m.to_rows()]
    n = m.rows
    assert n == m.cols
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def snf_checked(m: IntMatrix):
    s, u, v = smith_normal_form(m)
    assert u * m * v == s
    assert abs(det(u)) == 1
    assert abs(det(v)) == 1
    diag = [s[i, i] for i in range(min(m.rows, m.cols))]
    for i in range(len(diag)):
        assert diag[i] >= 0
        if i + 1 < len(diag) and diag[i + 1]:
            assert diag[i] != 0 and diag[i + 1] % diag[i] == 0
    off = {k: val for k, val in s.entries.items() if k[0] != k[1]}
    assert not off
    return s, u, v


class TestSmithNormalForm:
    def test_identity(self):
        m = IntMatrix.identity(2)
        s, u, v = snf_checked(m)
        assert s == IntMatrix.identity(2)
        assert u == IntMatrix.identity(2)
        assert v == IntMatrix.identity(2)

    def test_antidiagonal(self):
        m = IntMatrix.from_rows([[0, 2], [2, 0]])
        s, _, _ = snf_checked(m)
        assert [s[0, 0], s[1, 1]] == [2, 2]

    def test_2468(self):
        m = IntMatrix.from_rows([[2, 4], [6, 8]])
        s, _, _ = snf_checked(m)
        assert [s[0, 0], s[1, 1]] == [2, 4]
        assert s[0, 0] * s[1, 1] == abs(det(m)) == 8

    def test_zero_and_rectangular(self):
        snf_checked(IntMatrix.zero(3, 2))
        snf_checked(IntMatrix.from_rows([[6, 10, 15]]))

    def test_randomized(self):
        rng = random.Random(7)
        for _ in range(60):
            n = rng.randint(1, 6)
            m = rng.randint(1, 6)
            mat = IntMatrix(
                n, m,
                {(i, j): rng.randint(-9, 9) for i in range(n) for j in range(m)},
            )
            snf_checked(mat)


class TestHomologyAt:
    def test_zero_differentials(self):
        d_in = IntMatrix.zero(2, 0)
        d_out = IntMatrix.zero(0, 2)
        assert homology_at(d_in, d_out) == AbelianGroup(2)

    def test_z2(self):
        d_in = IntMatrix.from_rows([[2]])
        d_out = IntMatrix.zero(0, 1)
        assert homology_at(d_in, d_out) == AbelianGroup(0, (2,))

    def test_u_map_at_00(self):
        # U = 2X - h on basis {1, X} at (h, t) = (0, 0): matrix [[0,0],[2,0]]
        u = IntMatrix.from_rows([[0, 0], [2, 0]])
        ker_part = homology_at(IntMatrix.zero(2, 0), u)
        assert ker_part == AbelianGroup(1)
        coker_part = homology_at(u, IntMatrix.zero(0, 2))
        assert coker_part == AbelianGroup(1, (2,))

    def test_composition_not_zero(self):
        d_in = IntMatrix.from_rows([[1], [0]])
        d_out = IntMatrix.from_rows([[1, 0]])
        with pytest.raises(CompositionNotZero):
            homology_at(d_in, d_out)

    def test_rank_count(self):
        # rank(ker) - rank(im) = free rank
        rng = random.Random(3)
        for _ in range(25):
            n1, n2 = rng.randint(1, 4), rng.randint(1, 4)
            d_out = IntMatrix(
                n2, n1, {(i, j): rng.randint(-2, 2) for i in range(n2) for j in range(n1)}
            )
            ker = kernel_basis(d_out)
            g = homology_at(IntMatrix.zero(n1, 0), d_out)
            assert g == AbelianGroup(ker.cols)


class TestSubquotient:
    def test_full_over_zero(self):
        sq = Subquotient(2, IntMatrix.identity(2), IntMatrix.zero(2, 0))
        g, _ = subquotient_group(sq)
        assert g == AbelianGroup(2)

    def test_mod_two(self):
        sq = Subquotient(2, IntMatrix.identity(2), IntMatrix.from_rows([[2], [0]]))
        g, coords = subquotient_group(sq)
        assert g == AbelianGroup(1, (2,))
        # (1, 0) should be 2-torsion in the quotient
        v = IntMatrix.column([1, 0])
        c = coords.project(v)
        doubled = coords.project(IntMatrix.column([2, 0]))
        assert doubled == coords.zero()
        assert c != coords.zero()

    def test_2z_over_6z(self):
        sq = Subquotient(1, IntMatrix.from_rows([[2]]), IntMatrix.from_rows([[6]]))
        g, _ = subquotient_group(sq)
        assert g == AbelianGroup(0, (3,))

    def test_not_contained(self):
        sq = Subquotient(1, IntMatrix.from_rows([[2]]), IntMatrix.from_rows([[3]]))
        with pytest.raises(DenominatorNotContained):
            subquotient_group(sq)

    def test_agrees_with_homology_at(self):
        # numerator = kernel, denominator = image
        d_out = IntMatrix.from_rows([[1, 1, 0]])
        d_in = IntMatrix.from_rows([[2], [-2], [0]])
        ker = kernel_basis(d_out)
        sq = Subquotient(3, ker, d_in)
        g, _ = subquotient_group(sq)
        assert g == homology_at(d_in, d_out)

    def test_project_lift_roundtrip(self):
        rng = random.Random(11)
        sq = Subquotient(
            3,
            IntMatrix.from_rows([[2, 0], [0, 3], [0, 0]]),
            IntMatrix.from_rows([[4], [3], [0]]),
        )
        g, coords = subquotient_group(sq)
        for _ in range(20):
            c = rng.choice([0, 1]), rng.randint(-5, 5)
            lifted = coords.lift(
                [rng.randint(-3, 3) for _ in range(len(coords.free_idx) + len(coords.tor_idx))]
            )
            back = coords.project(lifted)
            again = coords.project(coords.lift(back))
            assert back == again


class TestSolveLinear:
    def test_identity(self):
        b = IntMatrix.column([3, -1])
        x = solve_linear(IntMatrix.identity(2), b)
        assert x == b

    def test_parity_obstruction(self):
        assert solve_linear(IntMatrix.from_rows([[2]]), IntMatrix.column([3])) is None

    def test_underdetermined(self):
        a = IntMatrix.from_rows([[1, 2], [0, 0]])
        b = IntMatrix.column([5, 0])
        x = solve_linear(a, b)
        assert x is not None
        assert a * x == b

    def test_certificate_randomized(self):
        rng = random.Random(23)
        for _ in range(40):
            n, m = rng.randint(1, 4), rng.randint(1, 4)
            a = IntMatrix(
                n, m, {(i, j): rng.randint(-4, 4) for i in range(n) for j in range(m)}
            )
            x0 = IntMatrix.column([rng.randint(-3, 3) for _ in range(m)])
            b = a * x0
            x = solve_linear(a, b)
            assert x is not None and a * x == b


class TestIntersection:
    def test_simple(self):
        a = IntMatrix.from_rows([[2], [0]])
        b = IntMatrix.from_rows([[3], [0]])
        both = intersect_column_spans(a, b)
        # 2Z & 3Z = 6Z inside the first coordinate
        assert both.cols == 1
        assert abs(both[0, 0]) == 6 and both[1, 0] == 0

    def test_contains_common_vectors(self):
        rng = random.Random(5)
        for _ in range(20):
            a = IntMatrix(3, 2, {(i, j): rng.randint(-3, 3) for i in range(3) for j in range(2)})
            b = IntMatrix(3, 2, {(i, j): rng.randint(-3, 3) for i in range(3) for j in range(2)})
            w = intersect_column_spans(a, b)
            for j in range(w.cols):
                col = w.submatrix([0, 1, 2], [j])
                assert solve_linear(a, col) is not None
                assert solve_linear(b, col) is not None


class TestAbelianGroup:
    def test_canonical_chain(self):
        g = AbelianGroup(1, (4, 6))
        assert g.torsion == (2, 12)

    def test_cokernel(self):
        assert cokernel(IntMatrix.from_rows([[2, 0], [0, 3]])) == AbelianGroup(0, (6,))

    def test_str(self):
        assert str(AbelianGroup(2, (2,))) == "Z^2 + Z/2"
        assert str(AbelianGroup(0)) == "0"


class TestLaurent:
    def test_arith(self):
        t = LaurentPoly.T()
        tinv = LaurentPoly.T(-1)
        u = t * t - tinv * tinv
        assert u == LaurentPoly({2: 1, -2: -1})
        assert (u * u) == LaurentPoly({4: 1, 0: -2, -4: 1})
        assert u - u == LaurentPoly.zero()

    def test_units(self):
        assert LaurentPoly.T(5, -1).is_unit()
        assert not LaurentPoly({2: 1, -2: -1}).is_unit()
        assert not LaurentPoly(2).is_unit()

    def test_evaluate(self):
        u = LaurentPoly({2: 1, -2: -1})
        assert u.evaluate(1) == 0
        p = LaurentPoly({3: 2, 0: 1})
        assert p.evaluate(-1) == -1
