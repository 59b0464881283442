"""Rational functions over QQ backed by flint, for the lowest tower level.

The values are ``RatFn(num, den)`` pairs of ``fmpq_poly`` with ``den`` monic
and ``gcd(num, den) = 1``; zero is ``0/1``.  Same invariants as the generic
tuple-based ``RatFn`` in ``algebra``, only faster.
"""

from flint import fmpq, fmpq_poly

from .algebra import RatFn
from .errors import DivisorZero

QP_ZERO = fmpq_poly([])
QP_ONE = fmpq_poly([1])
QF_ZERO = RatFn(QP_ZERO, QP_ONE)
QF_ONE = RatFn(QP_ONE, QP_ONE)
QF_T = RatFn(fmpq_poly([0, 1]), QP_ONE)


def qpoly(coeffs):
    return fmpq_poly(list(coeffs))


def qcoeffs(p):
    """Coefficient tuple (low degree first, trimmed) of an ``fmpq_poly``."""
    return tuple(p.coeffs())


def lead(p):
    return p[p.degree()]


def qf_make(num, den):
    if not den:
        raise DivisorZero("rational function with zero denominator")
    if not num:
        return QF_ZERO
    if den.degree() > 0:
        g = num.gcd(den)
        if g.degree() > 0:
            num = num // g
            den = den // g
    c = lead(den)
    if c != 1:
        num = num / c
        den = den / c
    return RatFn(num, den)


def qf_from_parts(num, den):
    return qf_make(qpoly(num), qpoly(den))


def qf_const(c):
    return RatFn(fmpq_poly([c]), QP_ONE) if c else QF_ZERO


def qf_add(f, g):
    if not f.num:
        return g
    if not g.num:
        return f
    if f.den == g.den:
        num = f.num + g.num
        if f.den.degree() == 0:
            return RatFn(num, QP_ONE) if num else QF_ZERO
        return qf_make(num, f.den)
    return qf_make(f.num * g.den + g.num * f.den, f.den * g.den)


def qf_neg(f):
    return RatFn(-f.num, f.den)


def qf_sub(f, g):
    return qf_add(f, qf_neg(g))


def qf_mul(f, g):
    if not f.num or not g.num:
        return QF_ZERO
    a, b, c, d = f.num, g.den, g.num, f.den
    if b.degree() > 0:
        h = a.gcd(b)
        if h.degree() > 0:
            a, b = a // h, b // h
    if d.degree() > 0:
        h = c.gcd(d)
        if h.degree() > 0:
            c, d = c // h, d // h
    return RatFn(a * c, b * d)


def qf_inv(f):
    if not f.num:
        raise DivisorZero("inverse of zero rational function")
    c = lead(f.num)
    return RatFn(f.den / c, f.num / c)


def qf_scale(f, s):
    if not s or not f.num:
        return QF_ZERO
    return RatFn(f.num * s, f.den)


def qf_add_scalar(f, s):
    num = f.num + f.den * s
    return RatFn(num, f.den) if num else QF_ZERO


def qf_is_const(f):
    return f.num.degree() <= 0 and f.den.degree() == 0


def qf_const_value(f):
    return f.num[0] if f.num else fmpq(0)
