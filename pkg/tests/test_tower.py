import random

import pytest
from hypothesis import given, strategies as st

from graphfield.algebra import rat
from graphfield.curves import eval_p, eval_q
from graphfield.errors import DivisionByZero, VertexOutOfRange
from graphfield.graphs import GraphOracle
from graphfield.tower import (
    BOTTOM, Tower, level_column, column_level, level_of, pair_index, pair_of_index,
)

from conftest import P3, generators, random_element


@pytest.fixture(scope="module")
def T():
    return Tower(P3)


def test_pair_index_is_lexicographic():
    assert [pair_of_index(k) for k in range(1, 7)] == [(1, 0), (2, 0), (2, 1), (3, 0), (3, 1), (3, 2)]
    assert pair_index(0, 1) == pair_index(1, 0) == 1


@given(st.integers(1, 5000))
def test_pair_index_roundtrip(k):
    assert pair_index(*pair_of_index(k)) == k


def test_columns_of_levels():
    assert level_column((0, 0)) == 2 and level_column((0, 3)) == 8
    assert level_column((1, 1)) == 1 and level_column((1, 4)) == 7
    assert level_column(None) == 0
    for col in range(12):
        assert level_column(column_level(col)) == col


def test_pair_parameters_follow_edges(T):
    u0, u1, u2 = (T.u(i) for i in range(3))
    assert T.t_param(1, 0) == u1 * u0       # edge
    assert T.t_param(2, 0) == u2 + u0       # non-edge
    assert T.t_param(2, 1) == u2 * u1


def test_defining_relations_hold_exactly(T):
    for i in range(3):
        assert eval_p(T.u_raw(i), T.v_raw(i), T) == 0
    for i in range(3):
        for j in range(i):
            assert eval_q(T.t_raw(i, j), T.x_raw(i, j), T.y_raw(i, j), T) == 0


def test_canonical_forms_are_unique(T):
    u0, v0, x = T.u(0), T.v(0), T.x(1, 0)
    a = (u0 + v0) * (u0 - v0)
    assert a == u0 * u0 - v0 * v0
    assert (a + x) - x == a
    assert (x - x).raw == 0
    assert level_of((x - x + u0).raw) == BOTTOM


def test_levels_collapse_to_support(T):
    a = T.u(1) * T.v(0)
    assert a.level == (0, 1)
    b = (T.y(2, 1) + a) - T.y(2, 1)
    assert b.level == (0, 1) and b == a


def test_division_by_zero(T):
    with pytest.raises(DivisionByZero):
        T.inv(T.sub(T.u_raw(0), T.u_raw(0)))


def test_vertex_range(T):
    with pytest.raises(VertexOutOfRange):
        T.u_raw(3)
    with pytest.raises(VertexOutOfRange):
        T.x_raw(3, 0)


def test_axioms_on_random_elements(T):
    rng = random.Random(7)
    gens = generators(T, 2, [(1, 0)])
    for _ in range(8):
        a, b, c = (random_element(T, rng, gens) for _ in range(3))
        assert T.mul(T.mul(a, b), c) == T.mul(a, T.mul(b, c))
        assert T.mul(a, T.add(b, c)) == T.add(T.mul(a, b), T.mul(a, c))
        assert T.add(a, b) == T.add(b, a)
        if not T.is_zero(a):
            assert T.mul(a, T.inv(a)) == T.one


def test_inverse_of_algebraic_generator(T):
    v = T.v(0)
    w = v.inv()
    assert v * w == 1
    # from p/10 = 0: v (v^3 + 8u v^2 / 5 + 8/5) = (4 - u^4) / 10
    u = T.u(0)
    assert w == v * (v * v + rat(8, 5) * u * v) * 10 / (4 - u**4) + rat(16) / (4 - u**4)


def test_edge_and_non_edge_towers_differ():
    te, tn = Tower(GraphOracle.finite(2, [(1, 0)])), Tower(GraphOracle.finite(2))
    ye, yn = te.y(1, 0), tn.y(1, 0)
    assert (ye ** 4).raw != (yn ** 4).raw


def test_gcd_splits_off_factors_over_the_base():
    from graphfield.algebra import poly_divmod, poly_gcd_euclid, poly_mul

    T = Tower(P3)
    u, v = T.u_raw(0), T.v_raw(0)
    base = (T.inv(u), rat(1))                                 # t + 1/u0
    rational = (rat(-4), rat(0), rat(1))                      # t^2 - 4
    other = (T.add(u, v), rat(1))                             # t + u0 + v0
    A = poly_mul(T, poly_mul(T, base, rational), (v, T.mul(u, v), rat(3)))
    B = poly_mul(T, poly_mul(T, base, other), (rat(2), v))
    C = poly_mul(T, poly_mul(T, rational, other), (T.mul(v, v), rat(1)))
    for a, b in ((A, B), (A, C), (B, C), (poly_mul(T, A, B), poly_mul(T, B, C))):
        g = T.poly_gcd(a, b)
        assert g == poly_gcd_euclid(T, a, b)
        assert not poly_divmod(T, a, g)[1] and not poly_divmod(T, b, g)[1]
