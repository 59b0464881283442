from fractions import Fraction
from itertools import product

from graphfield.algebra import rat
from graphfield.curves import (
    eval_p, eval_q, expand_min_poly, min_poly_X, min_poly_Y, reduction_mod8_matches,
    verify_mod8, verify_real_point_facts,
)


def brute_p(u, v):
    return u**4 + 16 * u * v**3 + 10 * v**4 + 16 * v - 4


def brute_q(t, x, y):
    return x**4 + y**4 + 1 + t * (x**4 + x * y**3 + y + 1)


def test_no_points_mod_8():
    assert verify_mod8() == 0
    # independent count over primitive triples of the full homogenized quartic
    sols = [(u, v, w) for u, v, w in product(range(8), repeat=3)
            if (u % 2 or v % 2 or w % 2)
            and (u**4 + 16 * u * v**3 + 10 * v**4 + 16 * v * w**3 - 4 * w**4) % 8 == 0]
    assert sols == []
    assert reduction_mod8_matches()


def test_pair_curve_value_at_witness():
    assert eval_q(20, 1, -3) == -477 == brute_q(20, 1, -3)


def test_pair_curve_minimum_on_grid_is_one():
    grid = [Fraction(k, 2) for k in range(-6, 7)]
    assert min(brute_q(0, x, y) for x in grid for y in grid) == 1
    assert min(eval_q(0, rat(x), rat(y)) for x in grid for y in grid) == 1


def test_eval_matches_brute_force():
    for u, v in product([Fraction(-3, 2), 0, 1, Fraction(5, 3)], repeat=2):
        assert eval_p(rat(u), rat(v)) == rat(brute_p(u, v))
        for t in (0, -1, 20, Fraction(7, 2)):
            assert eval_q(rat(t), rat(u), rat(v)) == rat(brute_q(t, u, v))


def test_collected_quartics():
    for u, v in product([Fraction(-2), Fraction(1, 3), Fraction(4)], repeat=2):
        assert expand_min_poly(min_poly_X(), rat(u), rat(v)) == rat(brute_p(u, v) / 10)
        for t in (0, -1, 20):
            got = expand_min_poly(min_poly_Y(rat(t)), rat(u), rat(v))
            assert got == rat(brute_q(t, u, v))


def test_real_point_report_all_pass():
    report = verify_real_point_facts()
    assert len(report) >= 7
    assert all(entry["status"] == "pass" for entry in report), report
