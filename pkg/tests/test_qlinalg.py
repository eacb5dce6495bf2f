import itertools
import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from hodgejoin.qlinalg import (
    Filtration,
    Matrix,
    NilpotentOp,
    NotNilpotentError,
    NotQuasiUnipotentError,
    Q,
    Subspace,
    block_diag,
    charpoly,
    charpoly_hessenberg,
    check_monodromy_filtration,
    companion,
    convolve_filtrations,
    cyclotomic,
    cyclotomic_factorization,
    jordan_partition,
    kron,
    nilpotent_exp,
    nilpotent_log,
    power_sums,
    preimage,
    qstr,
    rank_sequence,
    semisimple_unipotent_parts,
    shift_block,
    solve,
    subspace_contains,
    subspace_intersect,
    subspace_sum,
    weight_filtration_of_N,
)

from helpers import random_nilpotent, random_quasi_unipotent


def to_sympy(m: Matrix) -> sympy.Matrix:
    return sympy.Matrix([[sympy.Rational(int(x.numerator), int(x.denominator)) for x in r] for r in m.to_lists()])


small_ints = st.integers(min_value=-3, max_value=3)


def matrices(max_rows=5, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(small_ints, min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


# -- scalars and matrices -----------------------------------------------------

def test_rational_coercion():
    assert Q("3/6") == Q(1) / 2
    assert Q(Fraction(-4, 6)) == Q(-2) / 3
    assert qstr(Q("-4/2")) == "-2"
    assert qstr(Q(" -1/2")) == "-1/2"
    with pytest.raises(TypeError):
        Q(0.5)
    with pytest.raises(ValueError):
        Q("1/0")


def test_matrix_arithmetic():
    a = Matrix.from_rows([[1, 2], [3, 4]])
    b = Matrix.from_rows([[0, 1], [1, 0]])
    assert (a @ b).to_lists() == [[2, 1], [4, 3]]
    assert (a @ a.inverse()).is_identity()
    assert (a ** -1) == a.inverse()
    assert (a ** 3) == a @ a @ a
    assert kron(Matrix.identity(2), b).to_lists()[2] == [0, 0, 0, 1]
    assert a.T.to_lists() == [[1, 3], [2, 4]]
    with pytest.raises(ZeroDivisionError):
        Matrix.from_rows([[1, 2], [2, 4]]).inverse()


@given(matrices())
@settings(max_examples=60, deadline=None)
def test_rank_matches_sympy(rows):
    m = Matrix.from_rows(rows)
    assert m.rank() == to_sympy(m).rank()
    rank, ker, img = solve(m)
    assert rank + ker.dim == m.cols
    assert img.dim == rank
    for v in ker.sparse_basis():
        assert not m.apply(v)


# -- solve ---------------------------------------------------------------------

def test_solve_identity_and_zero():
    rank, ker, _ = solve(Matrix.identity(3))
    assert (rank, ker.dim) == (3, 0)
    rank, ker, _ = solve(Matrix.zeros(2))
    assert (rank, ker.dim) == (0, 2)


def test_solve_rank_one():
    m = Matrix.from_rows([[1, 2], [2, 4]])
    rank, ker, img = solve(m)
    assert rank == 1
    assert ker == Subspace.span(2, [[2, -1]])
    # brute force: every 2x2 minor vanishes, some entry does not
    rows = m.to_lists()
    assert rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0] == 0
    assert img == Subspace.span(2, [[1, 2]])


# -- subspaces -------------------------------------------------------------------

def test_subspace_examples():
    e1, e2 = Subspace.span(2, [[1, 0]]), Subspace.span(2, [[0, 1]])
    assert subspace_intersect(e1, e1) == e1
    assert subspace_sum(e1, e2) == Subspace.full(2)
    assert subspace_intersect(Subspace.span(2, [[1, 1]]), e1).dim == 0
    assert subspace_contains(Subspace.full(2), e1)
    assert not subspace_contains(e1, e2)
    with pytest.raises(ValueError):
        subspace_sum(e1, Subspace.full(3))


def test_subspace_equality_is_representation_independent():
    a = Subspace.span(3, [[1, 1, 0], [0, 1, 1]])
    b = Subspace.span(3, [[1, 2, 1], [2, 1, -1]])
    assert a == b
    assert hash(a) == hash(b)


vectors = st.lists(st.lists(small_ints, min_size=5, max_size=5), min_size=0, max_size=4)


@given(vectors, vectors)
@settings(max_examples=120, deadline=None)
def test_dimension_law(va, vb):
    a, b = Subspace.span(5, va), Subspace.span(5, vb)
    s, i = a + b, a & b
    assert a.dim + b.dim == s.dim + i.dim
    assert a <= s and b <= s and i <= a and i <= b
    assert (a & s) == a and (a + i) == a


@given(vectors, vectors)
@settings(max_examples=60, deadline=None)
def test_intersection_matches_sympy(va, vb):
    a, b = Subspace.span(5, va), Subspace.span(5, vb)
    # independent route: kernel of [A^T | -B^T]
    if not a.dim or not b.dim:
        assert (a & b).dim == 0
        return
    A = to_sympy(a.basis_matrix()).T
    B = to_sympy(b.basis_matrix()).T
    ns = A.row_join(-B).nullspace()
    vecs = [list(A * v[: a.dim, :]) for v in ns]
    expected = Subspace.span(5, [[Q(f"{x.p}/{x.q}") for x in vec] for vec in vecs])
    assert (a & b) == expected


def test_preimage():
    n = shift_block(3)
    target = Subspace.span(3, [[0, 0, 1]])
    assert preimage(n, target) == Subspace.span(3, [[0, 1, 0], [0, 0, 1]])


def test_filtration_labels_and_steps_agree():
    basis = Matrix.from_rows([[1, 1, 0], [0, 1, 0], [0, 1, 1]])
    f = Filtration.from_labels(3, [2, 0, 1], basis)
    g = Filtration(3, f.steps)
    assert f == g
    assert g.graded_dims() == {0: 1, 1: 1, 2: 1}
    assert g.labels and g.basis is not None
    assert Filtration(3, g.steps) == f


def test_filtration_violations():
    bad = Filtration(2, {0: Subspace.span(2, [[1, 0]]), 1: Subspace.span(2, [[0, 1]]), 2: Subspace.full(2)})
    assert len(bad.violations()) == 1
    assert "increasing" in bad.violations()[0]
    short = Filtration(2, {0: Subspace.span(2, [[1, 0]])})
    assert "exhaustive" in short.violations()[0]


def test_convolution_matches_labels():
    f1 = Filtration.from_labels(2, [0, 1])
    f2 = Filtration.from_labels(3, [0, 0, 2])
    conv = convolve_filtrations(f1, f2, shift=1)
    labels = [x + y + 1 for x in (0, 1) for y in (0, 0, 2)]
    assert conv == Filtration.from_labels(6, labels)


# -- nilpotent operators -----------------------------------------------------------

def test_jordan_partition_examples():
    assert jordan_partition(Matrix.zeros(3)) == (1, 1, 1)
    assert jordan_partition(shift_block(4)) == (4,)
    n = block_diag(shift_block(2), shift_block(3))
    assert rank_sequence(n)[:3] == [5, 3, 1]
    assert sorted(jordan_partition(n)) == [2, 3]


def test_non_nilpotent_rejected():
    with pytest.raises(NotNilpotentError):
        NilpotentOp(Matrix.identity(2))
    with pytest.raises(NotNilpotentError):
        jordan_partition(Matrix.from_rows([[0, 1], [1, 0]]))


def test_weight_filtration_examples():
    assert weight_filtration_of_N(Matrix.zeros(3), 5).graded_dims() == {5: 3}
    for k in range(0, 5):
        w = weight_filtration_of_N(shift_block(k + 1), 0)
        assert w.graded_dims() == {i: 1 for i in range(-k, k + 1, 2)}
    w = weight_filtration_of_N(block_diag(shift_block(2), shift_block(1)), 0)
    assert w.graded_dims() == {-1: 1, 0: 1, 1: 1}


def test_monodromy_check_rejects_wrong_filtration():
    n = shift_block(3)
    wrong = Filtration.from_labels(3, [0, 1, 2])
    assert check_monodromy_filtration(wrong, n, 0)


@pytest.mark.parametrize("seed", range(40))
def test_weight_filtration_random(seed):
    rng = random.Random(seed)
    dim = rng.randint(1, 10)
    n = random_nilpotent(rng, dim)
    c = rng.randint(-3, 3)
    w = weight_filtration_of_N(n, c)
    assert not w.violations()
    assert check_monodromy_filtration(w, n, c) == []


@pytest.mark.parametrize("seed", range(40))
def test_conjugate_partition_identity(seed):
    rng = random.Random(1000 + seed)
    n = random_nilpotent(rng, rng.randint(1, 10))
    parts = jordan_partition(n)
    ranks = [(n ** j).rank() for j in range(0, max(parts) + 2)]
    for j in range(1, len(ranks)):
        assert sum(1 for b in parts if b >= j) == ranks[j - 1] - ranks[j]


# -- polynomials and the Jordan decomposition ----------------------------------------

def test_cyclotomic_polynomials():
    x = sympy.Symbol("x")
    for m in range(1, 31):
        expected = sympy.Poly(sympy.cyclotomic_poly(m, x), x).all_coeffs()[::-1]
        assert [int(c) for c in cyclotomic(m)] == [int(c) for c in expected]


def test_cyclotomic_factorization():
    assert cyclotomic_factorization(charpoly(companion([1, 1, 1]))) == {3: 1}
    assert cyclotomic_factorization([Q(1), Q(2), Q(1)]) == {2: 2}
    with pytest.raises(NotQuasiUnipotentError):
        cyclotomic_factorization([Q(-2), Q(1)])
    with pytest.raises(NotQuasiUnipotentError):
        cyclotomic_factorization([Q(1), Q(-3), Q(1)])


@given(matrices(6, 6).filter(lambda r: len(r) == len(r[0])))
@settings(max_examples=40, deadline=None)
def test_charpoly_two_routes(rows):
    m = Matrix.from_rows(rows)
    assert charpoly(m) == charpoly_hessenberg(m)
    x = sympy.Symbol("x")
    coeffs = to_sympy(m).charpoly(x).all_coeffs()[::-1]
    assert charpoly(m) == [Q(f"{c.p}/{c.q}") for c in coeffs]


def test_power_sums():
    # roots of x^2 + x + 1 are the primitive cube roots of unity
    assert power_sums([1, 1, 1], 4) == [2, -1, -1, 2]
    assert power_sums([-1, 1], 3) == [1, 1, 1]


def test_jordan_decomposition_examples():
    d = Matrix.diagonal([2, 3, 3])
    ts, tu = semisimple_unipotent_parts(d)
    assert ts == d and tu.is_identity()
    j = Matrix.identity(2) + shift_block(2)
    ts, tu = semisimple_unipotent_parts(j)
    assert ts.is_identity() and tu == j
    c = companion([1, 2, 1])
    ts, tu = semisimple_unipotent_parts(c)
    assert ts == -Matrix.identity(2)
    assert ts @ tu == c
    NilpotentOp(tu - Matrix.identity(2))
    with pytest.raises(ZeroDivisionError):
        semisimple_unipotent_parts(Matrix.zeros(2))


@pytest.mark.parametrize("seed", range(200))
def test_jordan_decomposition_random(seed):
    rng = random.Random(seed)
    t, _ = random_quasi_unipotent(rng, 8)
    ts, tu = semisimple_unipotent_parts(t)
    assert ts @ tu == t
    assert tu @ ts == t
    NilpotentOp(tu - Matrix.identity(t.rows))
    # semisimple: the squarefree part of the characteristic polynomial kills t_s
    from hodgejoin.qlinalg.poly import peval_matrix, squarefree_part

    assert peval_matrix(squarefree_part(charpoly(t)), ts).is_zero()


def test_log_exp_inverse():
    n = block_diag(shift_block(3), shift_block(2))
    assert nilpotent_log(nilpotent_exp(n)) == n
    with pytest.raises(NotNilpotentError):
        nilpotent_log(Matrix.identity(2) * 2)


def test_tensor_of_rref_subspaces():
    a = Subspace.span(2, [[1, 2]])
    b = Subspace.span(3, [[0, 1, 1], [1, 0, 0]])
    t = a.tensor(b)
    expected = Subspace.span(6, [list(itertools.chain.from_iterable([[x * y for y in v] for x in (1, 2)])) for v in ([0, 1, 1], [1, 0, 0])])
    assert t == expected
