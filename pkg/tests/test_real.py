import random
import re

import flint
import mpmath
import pytest

from graphfield.algebra import rat
from graphfield.errors import AssertT20
from graphfield.expr import eval_expr, parse_expr
from graphfield.graphs import GraphOracle
from graphfield.real import (
    EQUAL, GREATER, LESS, DyadicInterval, RealCtx, compare, e_value, embed_pair, embed_u, embed_v,
)
from graphfield.tower import Tower, pair_index

from conftest import P3, generators, random_element

mpmath.mp.dps = 60


def mp_e(n):
    return mpmath.exp(mpmath.root(2, n))


def mp_least_root(coeffs):
    """Least real root of sum coeffs[k] y^k by mpmath's polynomial solver."""
    roots = mpmath.polyroots(list(reversed(coeffs)), maxsteps=200, extraprec=200)
    real = [r.real for r in roots if abs(mpmath.im(r)) < mpmath.mpf(10) ** -40]
    return min(real)


def mp_u(i):
    return 10 * mp_e(2 * i + 4)


def mp_v(i):
    u = mp_u(i)
    return mp_least_root([u**4 - 4, 16, 0, 16 * u, 10])


def mp_pair(G, i, j):
    k = pair_index(i, j)
    t = mp_u(i) * mp_u(j) if G.is_edge(i, j) else mp_u(i) + mp_u(j)
    x = mp_e(2 * k + 3) / 2
    y = mp_least_root([(1 + t) * (x**4 + 1), t, 0, t * x, 1])
    return t, x, y


def contains(iv, value):
    lo = mpmath.mpf(int(iv.lo.p)) / int(iv.lo.q)
    hi = mpmath.mpf(int(iv.hi.p)) / int(iv.hi.q)
    return lo <= value <= hi


@pytest.fixture(scope="module")
def ctx():
    return RealCtx(Tower(P3))


def test_e_value_encloses_the_exponential():
    iv = e_value(2)
    assert contains(iv, mp_e(2))
    assert abs(mpmath.mpf(int(iv.mid.p)) / int(iv.mid.q) - mpmath.mpf("4.1132503788")) < 1e-10


def test_e_value_width_and_nesting():
    coarse, fine = e_value(2, 32), e_value(2, 64)
    assert fine.width <= rat(1, 2**64) and coarse.width <= rat(1, 2**32)
    assert coarse.contains(fine)
    assert e_value(2, 41).width * 2 == e_value(2, 40).width
    for p in (8, 16, 33, 64, 130):
        assert e_value(5, p).contains(e_value(5, p + 1))


def test_vertex_values():
    for i in range(4):
        assert contains(embed_u(i), mp_u(i))
        assert contains(embed_v(i), mp_v(i))
    assert embed_u(0).lo > embed_u(1).hi


def test_vertex_root_is_bracketed(monkeypatch):
    monkeypatch.setattr(flint.ctx, "prec", 256)
    for i in range(3):
        u, v = embed_u(i, 240).ball(), embed_v(i, 100)
        p = lambda y: u**4 + 16 * u * y**3 + 10 * y**4 + 16 * y - 4
        lo, hi = p(DyadicInterval.point(v.lo).ball()), p(DyadicInterval.point(v.hi).ball())
        assert (lo > 0 and hi < 0) or (lo < 0 and hi > 0)


def test_pair_values(ctx):
    for i in range(3):
        for j in range(i):
            t, x, y = mp_pair(P3, i, j)
            tv = ctx.t_value(i, j)
            assert contains(tv, t) and tv.lo >= 20
            ex, ey = embed_pair(pair_index(i, j), tv)
            assert contains(ex, x) and contains(ey, y)
            cx, cy = ctx.pair_point(pair_index(i, j))
            assert contains(cx, x) and contains(cy, y)


def test_pair_x_values_lie_in_one_two():
    for k in range(1, 6):
        x = embed_pair(k, DyadicInterval.point(20))[0]
        assert 1 <= x.lo and x.hi <= 2


def test_pair_curve_sign_bracket():
    x = embed_pair(1, DyadicInterval.point(20))[0].ball()
    q = lambda y: x**4 + y**4 + 1 + 20 * (x**4 + x * y**3 + y + 1)
    assert q(-3) < 0 < q(0)


def test_parameter_below_twenty_is_refused():
    with pytest.raises(AssertT20):
        embed_pair(1, DyadicInterval(rat(19), rat(21), 64))


def test_eval_of_rationals_and_zero(ctx):
    assert ctx.eval_elem(rat(3, 2)) == DyadicInterval.point(rat(3, 2))
    T = ctx.tower
    assert ctx.eval_elem(T.u(0) - T.u(0)) == DyadicInterval.point(0)
    third = ctx.eval_elem(rat(1, 3))
    assert third.contains(DyadicInterval.point(third.mid)) and third.width > 0


def test_eval_of_products_is_contained(ctx):
    T = ctx.tower
    prod = ctx.eval_elem(T.u(0) * T.u(1))
    u0, u1 = ctx.eval_elem(T.u(0)).ball(), ctx.eval_elem(T.u(1)).ball()
    assert DyadicInterval.from_ball(u0 * u1, 64).contains(prod) or prod.overlaps(
        DyadicInterval.from_ball(u0 * u1, 64))
    assert contains(prod, mp_u(0) * mp_u(1))


@pytest.mark.parametrize("text", [
    "(u0 + v0 * x1_0) / (y1_0 - u1)",
    "v1^3 - 2/7 * x2_1 * y2_0",
    "1 / (v0 - v1) + y2_1^2",
])
def test_eval_matches_independent_evaluation(ctx, text):
    T = ctx.tower
    a = eval_expr(parse_expr(text), T)
    env = {f"u{i}": mp_u(i) for i in range(3)}
    env.update({f"v{i}": mp_v(i) for i in range(3)})
    for i in range(3):
        for j in range(i):
            _, x, y = mp_pair(P3, i, j)
            env[f"x{i}_{j}"], env[f"y{i}_{j}"] = x, y
    exact = re.sub(r"(?<![\w])(\d+)", r"mpf(\1)", text.replace("^", "**"))
    value = eval(exact.replace("**mpf(", "**int("), {"__builtins__": {}, "mpf": mpmath.mpf, "int": int}, env)
    assert contains(ctx.eval_elem(a, 128), value)


def test_compare_examples(ctx):
    T = ctx.tower
    u0, u1 = T.u(0), T.u(1)
    assert compare(u0, u0, ctx)[0] == EQUAL
    assert compare(u0, u1, ctx)[0] == GREATER
    assert compare(u0 * u1, u0 + u1, ctx)[0] == GREATER
    assert compare(T.v(0), 0, ctx)[0] == LESS


def _elements(ctx, seed, count):
    T = ctx.tower
    rng = random.Random(seed)
    gens = generators(T, 3, [(1, 0), (2, 1)])
    return [random_element(T, rng, gens, terms=2, quotient=rng.random() < 0.3) for _ in range(count)]


def test_trichotomy_and_antisymmetry(ctx):
    els = _elements(ctx, 1, 40)
    for a, b in zip(els, els[1:]):
        ab, ba = compare(a, b, ctx)[0], compare(b, a, ctx)[0]
        assert {ab, ba} == {LESS, GREATER} or (ab == ba == EQUAL and a == b)


def test_order_is_compatible_with_the_field(ctx):
    T = ctx.tower
    els = _elements(ctx, 2, 36)
    for a, b, c in zip(els[0::3], els[1::3], els[2::3]):
        if compare(a, b, ctx)[0] == LESS:
            assert compare(T.add(a, c), T.add(b, c), ctx)[0] == LESS
        if compare(a, 0, ctx)[0] == GREATER and compare(b, 0, ctx)[0] == GREATER:
            assert compare(T.mul(a, b), 0, ctx)[0] == GREATER
