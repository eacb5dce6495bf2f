import itertools
import math
import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hodgejoin.mhsm import (
    ElementaryBlock as E,
    InvalidMHSMError,
    MHSM,
    Part,
    from_blocks,
    iso_invariants,
    spectral_pairs,
    validate,
)
from hodgejoin.monrep import clebsch_gordan
from hodgejoin.qlinalg import (
    Filtration,
    Matrix,
    Q,
    Subspace,
    check_monodromy_filtration,
    jordan_partition,
    weight_filtration_of_N,
)
from hodgejoin.tsjoin import (
    ShiftCase,
    beta_twist_operator,
    beta_value,
    beta_value_quadrature,
    classify_case,
    graded_direct_image_model,
    twisted_join,
)

from helpers import random_blocks

UNIT = from_blocks([E(0, 0, 0, 1)])
X2 = from_blocks([E("-1/2", 0, 0, 1)])
Y3 = from_blocks([E("-1/3", 0, 0, 1), E("-2/3", 0, 0, 1)])
GRID = ("-1/6", "-1/3", "-1/2", "-2/3", "-5/6", "0")


# -- case split ----------------------------------------------------------------------

def test_classify_case_examples():
    assert classify_case(0, "-1/2") == ShiftCase(0, 0)
    assert classify_case("-1/2", "-1/2") == ShiftCase(1, 2)
    assert classify_case("-1/2", "-1/3") == ShiftCase(0, 1)
    assert classify_case("-2/3", "-1/2") == ShiftCase(1, 1)
    assert classify_case(0, 0) == ShiftCase(0, 0)


def test_classify_case_is_exact():
    # 1/3 + 2/3 = 1 exactly; a floating point sum would not be
    c = classify_case(Q(-1) / 3, Q(-2) / 3)
    assert c == ShiftCase(1, 2)
    assert isinstance(c.f_shift, int) and isinstance(c.w_shift, int)
    with pytest.raises(TypeError):
        classify_case(-0.5, -0.5)


# -- the join ------------------------------------------------------------------------

def test_join_examples():
    rng = random.Random(0)
    m = from_blocks(random_blocks(rng, 5))
    assert iso_invariants(twisted_join(m, UNIT)) == iso_invariants(m)
    assert iso_invariants(twisted_join(UNIT, m)) == iso_invariants(m)
    j = twisted_join(X2, X2)
    assert j.alphas == (Q(0),)
    assert spectral_pairs(j).to_rows() == [["1", 2, 1]]
    assert spectral_pairs(twisted_join(X2, Y3)).to_rows() == [["5/6", 1, 1], ["7/6", 1, 1]]


def test_join_rejects_invalid_input():
    bad = MHSM({Q(0): Part(1, Filtration(1, {0: Subspace.zero(1)}), Filtration.trivial(1), Matrix.zeros(1))})
    with pytest.raises(InvalidMHSMError):
        twisted_join(bad, UNIT)
    with pytest.raises(ValueError):
        twisted_join(UNIT, UNIT, method="other")


blocks_st = st.integers(0, 10**6).map(lambda s: random_blocks(random.Random(s), random.Random(s).randint(1, 4), 3))


@given(blocks_st, blocks_st)
@settings(max_examples=40, deadline=None)
def test_split_and_literal_routes_agree(b1, b2):
    m1, m2 = from_blocks(b1), from_blocks(b2)
    split = twisted_join(m1, m2)
    literal = twisted_join(m1, m2, method="literal")
    assert split == literal
    assert validate(split) == [] and validate(literal) == []


@given(blocks_st, blocks_st)
@settings(max_examples=40, deadline=None)
def test_join_properties(b1, b2):
    m1, m2 = from_blocks(b1), from_blocks(b2)
    j = twisted_join(m1, m2)
    assert j.dim == m1.dim * m2.dim
    assert validate(j) == []
    # commutativity up to isomorphism
    assert iso_invariants(j) == iso_invariants(twisted_join(m2, m1))
    # Jordan type of the output N is Clebsch-Gordan of the inputs, exponent by exponent
    expected: dict = {}
    for x in b1:
        for y in b2:
            a = x.alpha + y.alpha
            a = a + 1 if a <= -1 else a
            expected.setdefault(a, Counter())
            for s in clebsch_gordan(x.k, y.k):
                expected[a][s] += x.mult * y.mult
    for a, part in j.parts:
        got = Counter((1,) * part.dim if part.N.is_zero() else jordan_partition(part.N))
        assert got == expected[a]


small_blocks_st = st.integers(0, 10**6).map(lambda s: random_blocks(random.Random(s), random.Random(s).randint(1, 2), 2))


@given(small_blocks_st, small_blocks_st, small_blocks_st)
@settings(max_examples=15, deadline=None)
def test_join_associative(b1, b2, b3):
    m1, m2, m3 = from_blocks(b1), from_blocks(b2), from_blocks(b3)
    left = twisted_join(twisted_join(m1, m2), m3)
    right = twisted_join(m1, twisted_join(m2, m3))
    assert iso_invariants(left) == iso_invariants(right)


def one_variable(a: int):
    return from_blocks([E(-Q(k) / a, 0, 0, 1) for k in range(1, a)])


@pytest.mark.parametrize("a,b", list(itertools.combinations_with_replacement(range(2, 7), 2)))
def test_spectral_additivity_one_variable(a, b):
    j = twisted_join(one_variable(a), one_variable(b))
    s1 = spectral_pairs(one_variable(a)).spectrum()
    s2 = spectral_pairs(one_variable(b)).spectrum()
    expected = Counter()
    for x, cx in s1.items():
        for y, cy in s2.items():
            expected[x + y] += cx * cy
    assert spectral_pairs(j).spectrum() == expected


@pytest.mark.parametrize("k1,k2", [(k1, k2) for k1 in range(1, 4) for k2 in range(1, 4)])
@pytest.mark.parametrize("a1,a2", [("0", "-1/2"), ("-1/2", "-1/2"), ("-1/2", "-1/3"), ("-2/3", "-1/2")])
def test_weight_is_monodromy_filtration(k1, k2, a1, a2):
    b1, b2 = E(a1, 0, 1, k1), E(a2, 1, 0, k2)
    j = twisted_join(from_blocks([b1]), from_blocks([b2]))
    (a, part), = j.parts
    center = (b1.w + b1.k - 1) + (b2.w + b2.k - 1) + classify_case(a1, a2).w_shift
    assert part.W == weight_filtration_of_N(part.N, center)
    assert check_monodromy_filtration(part.W, part.N, center) == []


# -- beta function ------------------------------------------------------------------------

def test_beta_value_examples():
    assert beta_value(0, 0) == pytest.approx(1.0, rel=1e-14)
    assert beta_value("-1/2", "-1/2") == pytest.approx(math.pi, rel=1e-14)
    # golden value frozen from the quadrature oracle: int_0^1 x^{-1/2} log x dx = -4
    assert beta_value("-1/2", 0, 1, 0) == pytest.approx(-4.0, rel=1e-12)
    assert beta_value_quadrature("-1/2", 0, 1, 0) == pytest.approx(-4.0, rel=1e-12)


def test_beta_symmetry():
    for a, b in itertools.product(GRID, GRID):
        for i, j in itertools.product(range(3), range(3)):
            assert beta_value(a, b, i, j) == pytest.approx(beta_value(b, a, j, i), rel=1e-12)


def test_beta_domain():
    with pytest.raises(ValueError):
        beta_value(-1, 0)
    with pytest.raises(ValueError):
        beta_value(0, 0, -1, 0)


@pytest.mark.parametrize("a,b", [("-1/2", "-1/3"), ("0", "-5/6"), ("-1/6", "-5/6"), ("-2/3", "-2/3")])
def test_beta_matches_quadrature(a, b):
    for i, j in itertools.product(range(5), range(5)):
        q = beta_value_quadrature(a, b, i, j)
        assert abs(beta_value(a, b, i, j) - q) <= 1e-9 * abs(q)


def test_twist_examples():
    t = beta_twist_operator(0, 0, 1, 1)
    assert t.block.shape == (1, 1) and t.block[0, 0] == pytest.approx(1.0)
    t = beta_twist_operator("-1/2", "-1/2", 1, 1)
    assert t.block[0, 0] == pytest.approx(math.pi)
    t = beta_twist_operator("-1/2", "-1/3", 2, 1)
    a, b = -0.5, -1 / 3
    B = beta_value("-1/2", "-1/3")
    B10 = beta_value("-1/2", "-1/3", 1, 0)
    assert np.allclose(np.diag(t.block), (a + b + 1) * B)
    assert t.block[0, 1] == 0
    # (a+b+1-N)(B - B10 N) restricted to the 2x1 block: off-diagonal -(a+b+1) B10 - B
    assert t.block[1, 0] == pytest.approx(-(a + b + 1) * B10 - B)


def test_twist_determinant_closed_form():
    for a, b in itertools.product(GRID, GRID):
        for n1, n2 in itertools.product(range(1, 4), range(1, 4)):
            t = beta_twist_operator(a, b, n1, n2)
            s = float(Q(a) + Q(b))
            lead = beta_value(a, b) * (s + 1 if s > -1 else 1)
            assert abs(t.det) == pytest.approx(abs(lead) ** (n1 * n2), rel=1e-9)
            assert t.commutator_norm() < 1e-10


# -- graded direct image model ---------------------------------------------------------------

def test_graded_model_examples():
    g = graded_direct_image_model(UNIT, UNIT, 3)
    assert g.interior and all(g.dims[d] == 1 for d in g.interior)
    assert g.matches
    g = graded_direct_image_model(X2, X2, 4)
    assert g.matches
    assert [g.dims[d] for d in g.interior] == [1] * len(g.interior)
    with pytest.raises(ValueError):
        graded_direct_image_model(UNIT, UNIT, 1)


@pytest.mark.parametrize("seed", range(10))
def test_graded_model_counts_by_exponent_class(seed):
    rng = random.Random(seed)
    m1 = from_blocks(random_blocks(rng, 2, 2))
    m2 = from_blocks(random_blocks(rng, 2, 2))
    g = graded_direct_image_model(m1, m2, 4)
    assert g.matches and g.interior
    # each interior degree sees every part pair whose exponents sum into its class
    for d in g.interior:
        expected = sum(
            p1.dim * p2.dim for a1, p1 in m1.parts for a2, p2 in m2.parts if (a1 + a2 - d).denominator == 1
        )
        assert g.dims[d] == expected
