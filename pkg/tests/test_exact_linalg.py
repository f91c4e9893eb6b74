import itertools
import random

import pytest

from sepk.exact_linalg import (
    AbelianGroupInvariants,
    IntMatrix,
    cokernel_invariants,
    det_bareiss,
    hnf_column_basis,
    in_lattice_span,
    is_unimodular,
    kernel_basis,
    matrix_rank,
    smith_diagonal,
    smith_normal_form,
)


def mat(rows):
    r = len(rows)
    c = len(rows[0]) if rows else 0
    return IntMatrix.from_rows(range(r), range(c), rows)


def test_snf_unimodular_2x2():
    # det = 1, so the form is the identity
    u, d, v = smith_normal_form(mat([[1, 1], [-3, -2]]))
    assert d.to_lists() == [[1, 0], [0, 1]]
    assert u.mul(mat([[1, 1], [-3, -2]])).mul(v).to_lists() == d.to_lists()


def test_snf_rank_one():
    u, d, v = smith_normal_form(mat([[1, 1], [-3, -3]]))
    assert d.to_lists() == [[1, 0], [0, 0]]


def test_snf_zero_matrix():
    m = mat([[0, 0], [0, 0]])
    u, d, v = smith_normal_form(m)
    assert d.to_lists() == [[0, 0], [0, 0]]
    assert u.to_lists() == [[1, 0], [0, 1]]
    assert v.to_lists() == [[1, 0], [0, 1]]


def test_snf_properties_random():
    rng = random.Random(42)
    for _ in range(60):
        r = rng.randint(1, 6)
        c = rng.randint(1, 6)
        m = mat([[rng.randint(-9, 9) for _ in range(c)] for _ in range(r)])
        u, d, v = smith_normal_form(m)
        assert u.mul(m).mul(v).to_lists() == d.to_lists()
        assert abs(det_bareiss(u)) == 1
        assert abs(det_bareiss(v)) == 1
        diag = d.diagonal()
        assert all(x >= 0 for x in diag)
        for i, j in itertools.product(range(r), range(c)):
            if i != j:
                assert d.data[i][j] == 0
        nonzero = [x for x in diag if x]
        for a, b in zip(nonzero, nonzero[1:]):
            assert b % a == 0


def test_cokernel_examples():
    assert cokernel_invariants(mat([[1, 1], [-3, -2]])) == AbelianGroupInvariants(0)
    assert cokernel_invariants(mat([[1, 1], [-3, -3]])) == AbelianGroupInvariants(1)
    assert cokernel_invariants(mat([[2]])) == AbelianGroupInvariants(0, (2,))


def test_cokernel_str():
    assert str(AbelianGroupInvariants(0)) == "0"
    assert str(AbelianGroupInvariants(1)) == "Z"
    assert str(AbelianGroupInvariants(2, (2, 6))) == "Z^2 ⊕ Z/2 ⊕ Z/6"


def test_invariants_reject_bad_chain():
    with pytest.raises(ValueError):
        AbelianGroupInvariants(0, (1,))
    with pytest.raises(ValueError):
        AbelianGroupInvariants(0, (4, 6))


def test_cokernel_invariance_under_unimodular_moves():
    rng = random.Random(7)
    for _ in range(25):
        r = rng.randint(2, 5)
        c = rng.randint(2, 5)
        rows = [[rng.randint(-4, 4) for _ in range(c)] for _ in range(r)]
        base = cokernel_invariants(mat(rows))
        # row and column permutations
        pr = list(range(r))
        pc = list(range(c))
        rng.shuffle(pr)
        rng.shuffle(pc)
        shuffled = [[rows[i][j] for j in pc] for i in pr]
        assert cokernel_invariants(mat(shuffled)) == base
        # a few elementary row/column operations
        moved = [row[:] for row in rows]
        for _ in range(5):
            t = rng.randint(-2, 2)
            if rng.random() < 0.5:
                i1, i2 = rng.sample(range(r), 2)
                moved[i1] = [a + t * b for a, b in zip(moved[i1], moved[i2])]
            else:
                j1, j2 = rng.sample(range(c), 2)
                for row in moved:
                    row[j1] += t * row[j2]
        assert cokernel_invariants(mat(moved)) == base


def test_kernel_examples():
    # two equal columns: canonical kernel vector has a positive leading entry
    assert kernel_basis(mat([[1, 1], [-3, -3]])) == [(1, -1)]
    assert kernel_basis(mat([[1, 1], [-3, -2]])) == []
    assert kernel_basis(mat([[1, 0], [0, 1]])) == []


def test_kernel_annihilates_and_is_independent():
    rng = random.Random(11)
    for _ in range(40):
        r = rng.randint(1, 5)
        c = rng.randint(1, 6)
        m = mat([[rng.randint(-3, 3) for _ in range(c)] for _ in range(r)])
        basis = kernel_basis(m)
        assert len(basis) == c - matrix_rank(m)
        for vec in basis:
            assert all(
                sum(m.data[i][j] * vec[j] for j in range(c)) == 0 for i in range(r)
            )
        if basis:
            stacked = IntMatrix.from_rows(range(c), range(len(basis)), list(zip(*basis)))
            diag = smith_diagonal(stacked)
            assert all(d == 1 for d in diag)


def test_kernel_brute_force_oracle_small():
    rng = random.Random(13)
    for _ in range(30):
        r = rng.randint(1, 3)
        c = rng.randint(1, 3)
        m = mat([[rng.randint(-3, 3) for _ in range(c)] for _ in range(r)])
        basis = kernel_basis(m)
        for vec in itertools.product(range(-3, 4), repeat=c):
            if all(sum(m.data[i][j] * vec[j] for j in range(c)) == 0 for i in range(r)):
                assert in_lattice_span(basis, vec)


def test_hnf_canonical_form():
    basis = hnf_column_basis([[2, 4, 0], [3, 6, 1]], 3)
    # pivots strictly increase and are positive
    pivots = [next(i for i, x in enumerate(v) if x) for v in basis]
    assert pivots == sorted(pivots) and len(set(pivots)) == len(pivots)
    for v, p in zip(basis, pivots):
        assert v[p] > 0
    # the span is unchanged
    for original in ([2, 4, 0], [3, 6, 1]):
        assert in_lattice_span(basis, original)


def test_hnf_drops_dependencies():
    # dependent and zero vectors collapse to a basis of the span
    assert hnf_column_basis([[1, 0], [2, 0], [3, 0]], 2) == [(1, 0)]
    assert hnf_column_basis([[1, 2], [1, 2], [0, 0]], 2) == [(1, 2)]


def test_in_lattice_span_edges():
    assert in_lattice_span([], [0, 0])
    assert not in_lattice_span([], [1, 0])
    assert in_lattice_span([[2, 0]], [4, 0])
    assert not in_lattice_span([[2, 0]], [3, 0])


def test_det_and_unimodularity():
    assert det_bareiss(mat([[1, 1], [-3, -2]])) == 1
    assert det_bareiss(mat([[2, 0], [0, 3]])) == 6
    assert is_unimodular(mat([[1, 5], [0, -1]]))
    assert not is_unimodular(mat([[2, 0], [0, 1]]))


def test_big_integer_entries_survive():
    n = 10**40
    m = mat([[n, 1], [1, n]])
    u, d, v = smith_normal_form(m)
    assert u.mul(m).mul(v).to_lists() == d.to_lists()
    assert d.data[0][0] == 1
    assert d.data[1][1] == n * n - 1
