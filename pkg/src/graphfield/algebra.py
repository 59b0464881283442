"""Exact arithmetic: rationals, dense univariate polynomials, rational functions.

Polynomials are tuples of coefficients ``(a_0, a_1, ..., a_n)`` with a nonzero
last entry; ``()`` is the zero polynomial.  Every function takes a field
handle ``F`` first, which supplies ``zero``, ``one``, ``add``, ``sub``,
``mul``, ``neg``, ``inv`` and ``is_zero`` for the coefficients.  ``QQ`` is the
rational field; tower fields implement the same handle.

A rational function is a ``RatFn(num, den)`` pair of polynomials in canonical
form: ``den`` monic and ``gcd(num, den) = 1``, with zero stored as ``0/1``.
"""

from fractions import Fraction
from typing import NamedTuple

from flint import fmpq

from .errors import DivisorZero

Rat = fmpq


def rat(num, den=1):
    """Build a canonical rational; ``rat("3/2")``, ``rat(3, 2)`` and ``rat(Fraction(3, 2))`` all work."""
    if den == 0:
        raise DivisorZero(f"{num}/0")
    if type(num) is fmpq and den == 1:
        return num
    if isinstance(num, str):
        num = Fraction(num)
    if not isinstance(num, int):
        num, d = int(num.numerator), int(num.denominator)
        den = d * int(den)
    return fmpq(num, den) if den != 1 else fmpq(num)


class RationalField:
    """Field handle for ``Rat`` coefficients."""

    zero = fmpq(0)
    one = fmpq(1)

    @staticmethod
    def const(q):
        return rat(q)

    @staticmethod
    def add(a, b):
        return a + b

    @staticmethod
    def sub(a, b):
        return a - b

    @staticmethod
    def mul(a, b):
        return a * b

    @staticmethod
    def neg(a):
        return -a

    @staticmethod
    def inv(a):
        if not a:
            raise DivisorZero("inverse of 0")
        return 1 / a

    @staticmethod
    def is_zero(a):
        return not a

    def __repr__(self):
        return "QQ"


QQ = RationalField()


def poly_trim(coeffs, F=QQ):
    coeffs = list(coeffs)
    while coeffs and F.is_zero(coeffs[-1]):
        coeffs.pop()
    return tuple(coeffs)


def poly_deg(a):
    """Degree, with -1 for the zero polynomial."""
    return len(a) - 1


def poly_const(F, c):
    return () if F.is_zero(c) else (c,)


def poly_add(F, a, b):
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return a
    out = [F.add(x, y) for x, y in zip(a, b)]
    out.extend(a[len(b):])
    if len(a) == len(b):
        while out and F.is_zero(out[-1]):
            out.pop()
    return tuple(out)


def poly_neg(F, a):
    return tuple(F.neg(x) for x in a)


def poly_sub(F, a, b):
    return poly_add(F, a, poly_neg(F, b))


def poly_scale(F, a, c):
    if F.is_zero(c) or not a:
        return ()
    return tuple(F.mul(x, c) for x in a)


def poly_shift(a, k):
    """Multiply by t^k."""
    if not a:
        return a
    return (QQ.zero,) * k + a if k else a


def poly_mul(F, a, b):
    if not a or not b:
        return ()
    if len(a) == 1:
        return poly_scale(F, b, a[0])
    if len(b) == 1:
        return poly_scale(F, a, b[0])
    out = [None] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if F.is_zero(x):
            continue
        for j, y in enumerate(b):
            if F.is_zero(y):
                continue
            p = F.mul(x, y)
            k = i + j
            out[k] = p if out[k] is None else F.add(out[k], p)
    out = [F.zero if x is None else x for x in out]
    while out and F.is_zero(out[-1]):
        out.pop()
    return tuple(out)


def poly_arith(F, a, b, op):
    """``op`` is one of ``"add"``, ``"sub"``, ``"mul"``."""
    if op == "add":
        return poly_add(F, a, b)
    if op == "sub":
        return poly_sub(F, a, b)
    if op == "mul":
        return poly_mul(F, a, b)
    raise ValueError(f"unknown polynomial operation {op!r}")


def poly_divmod(F, a, b):
    """Return ``(q, r)`` with ``a = q*b + r`` and ``deg r < deg b``."""
    if not b:
        raise DivisorZero("polynomial division by zero")
    db = len(b) - 1
    if len(a) - 1 < db:
        return (), a
    lead = b[-1]
    lead_inv = None if lead == F.one else F.inv(lead)
    rem = list(a)
    quot = [F.zero] * (len(a) - db)
    for k in range(len(a) - 1 - db, -1, -1):
        c = rem[k + db]
        if F.is_zero(c):
            continue
        if lead_inv is not None:
            c = F.mul(c, lead_inv)
        quot[k] = c
        for i in range(db):
            if not F.is_zero(b[i]):
                rem[k + i] = F.sub(rem[k + i], F.mul(c, b[i]))
        rem[k + db] = F.zero
    rem = rem[:db]
    while rem and F.is_zero(rem[-1]):
        rem.pop()
    while quot and F.is_zero(quot[-1]):
        quot.pop()
    return tuple(quot), tuple(rem)


def poly_monic(F, a):
    if not a or a[-1] == F.one:
        return a
    inv = F.inv(a[-1])
    return tuple(F.mul(x, inv) for x in a[:-1]) + (F.one,)


def poly_gcd(F, a, b):
    """Monic gcd; ``gcd(0, 0) = 0``.  Field handles may supply a faster ``poly_gcd``."""
    fast = getattr(F, "poly_gcd", None)
    if fast is not None:
        return fast(a, b)
    return poly_gcd_euclid(F, a, b)


def poly_gcd_euclid(F, a, b):
    # monic remainders keep coefficient growth down over function fields
    a, b = poly_monic(F, a), poly_monic(F, b)
    while b:
        a, b = b, poly_monic(F, poly_divmod(F, a, b)[1])
    return a


def poly_ext_gcd(F, a, b):
    """Return ``(g, s, t)`` with ``g`` monic and ``s*a + t*b = g``."""
    if not a and not b:
        raise DivisorZero("gcd of two zero polynomials")
    r0, r1 = a, b
    s0, s1 = (F.one,), ()
    t0, t1 = (), (F.one,)
    while r1:
        q, r = poly_divmod(F, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, poly_sub(F, s0, poly_mul(F, q, s1))
        t0, t1 = t1, poly_sub(F, t0, poly_mul(F, q, t1))
    lead = F.inv(r0[-1])
    return (poly_scale(F, r0, lead), poly_scale(F, s0, lead), poly_scale(F, t0, lead))


def poly_eval(F, a, x):
    acc = F.zero
    for c in reversed(a):
        acc = F.add(F.mul(acc, x), c)
    return acc


def poly_is_const(a):
    return len(a) <= 1


class RatFn(NamedTuple):
    num: tuple
    den: tuple


def _coprime(F, a, b):
    """Cheap certificate from the field handle, if it offers one; ``False`` means unknown."""
    test = getattr(F, "coprime", None)
    return test is not None and test(a, b)


def ratfn_make(F, num, den):
    """Canonicalize ``num/den``: monic denominator, coprime parts."""
    if not den:
        raise DivisorZero("rational function with zero denominator")
    if not num:
        return RatFn((), (F.one,))
    if len(den) > 1 and not _coprime(F, num, den):
        g = poly_gcd(F, num, den)
        if len(g) > 1:
            num = poly_divmod(F, num, g)[0]
            den = poly_divmod(F, den, g)[0]
    lead = den[-1]
    if lead != F.one:
        inv = F.inv(lead)
        num = poly_scale(F, num, inv)
        den = poly_scale(F, den, inv)
    return RatFn(num, den)


def _normalize(F, num, den):
    """Make ``den`` monic, for parts already known to be coprime."""
    if not num:
        return RatFn((), (F.one,))
    lead = den[-1]
    if lead != F.one:
        inv = F.inv(lead)
        num, den = poly_scale(F, num, inv), poly_scale(F, den, inv)
    return RatFn(num, den)


def ratfn_const(F, c):
    return RatFn(poly_const(F, c), (F.one,))


def ratfn_is_zero(f):
    return not f.num


def ratfn_is_const(f):
    return len(f.num) <= 1 and len(f.den) == 1


def ratfn_add(F, f, g):
    if not f.num:
        return g
    if not g.num:
        return f
    if len(f.den) == 1 and len(g.den) == 1:
        return RatFn(poly_add(F, f.num, g.num), f.den)
    if f.den == g.den:
        return ratfn_make(F, poly_add(F, f.num, g.num), f.den)
    b, d = f.den, g.den
    if len(b) == 1 or len(d) == 1 or _coprime(F, b, d):
        # gcd(a d + c b, b d) = 1 automatically
        num = poly_add(F, poly_mul(F, f.num, d), poly_mul(F, g.num, b))
        return _normalize(F, num, poly_mul(F, b, d))
    h = poly_gcd(F, b, d)
    if len(h) == 1:
        num = poly_add(F, poly_mul(F, f.num, d), poly_mul(F, g.num, b))
        return _normalize(F, num, poly_mul(F, b, d))
    b1, d1 = poly_divmod(F, b, h)[0], poly_divmod(F, d, h)[0]
    num = poly_add(F, poly_mul(F, f.num, d1), poly_mul(F, g.num, b1))
    if not num:
        return RatFn((), (F.one,))
    if not _coprime(F, num, h):
        k = poly_gcd(F, num, h)
        if len(k) > 1:
            num = poly_divmod(F, num, k)[0]
            h = poly_divmod(F, h, k)[0]
    return _normalize(F, num, poly_mul(F, poly_mul(F, b1, d1), h))


def ratfn_neg(F, f):
    return RatFn(poly_neg(F, f.num), f.den)


def ratfn_sub(F, f, g):
    return ratfn_add(F, f, ratfn_neg(F, g))


def ratfn_mul(F, f, g):
    if not f.num or not g.num:
        return RatFn((), (F.one,))
    if len(f.den) == 1 and len(g.den) == 1:
        return RatFn(poly_mul(F, f.num, g.num), f.den)
    a, b = f.num, g.den
    c, d = g.num, f.den
    if len(b) > 1 and not _coprime(F, a, b):
        h = poly_gcd(F, a, b)
        if len(h) > 1:
            a, b = poly_divmod(F, a, h)[0], poly_divmod(F, b, h)[0]
    if len(d) > 1 and not _coprime(F, c, d):
        h = poly_gcd(F, c, d)
        if len(h) > 1:
            c, d = poly_divmod(F, c, h)[0], poly_divmod(F, d, h)[0]
    num = poly_mul(F, a, c)
    den = poly_mul(F, b, d)
    lead = den[-1]
    if lead != F.one:
        inv = F.inv(lead)
        num, den = poly_scale(F, num, inv), poly_scale(F, den, inv)
    return RatFn(num, den)


def ratfn_scale(F, f, c):
    """Multiply by a constant of the coefficient field."""
    if F.is_zero(c) or not f.num:
        return RatFn((), (F.one,))
    return RatFn(poly_scale(F, f.num, c), f.den)


def ratfn_inv(F, f):
    if not f.num:
        raise DivisorZero("inverse of zero rational function")
    num, den = f.den, f.num
    lead = den[-1]
    if lead != F.one:
        inv = F.inv(lead)
        num, den = poly_scale(F, num, inv), poly_scale(F, den, inv)
    return RatFn(num, den)


def ratfn_div(F, f, g):
    return ratfn_mul(F, f, ratfn_inv(F, g))


class RatFnField:
    """Field handle for ``k(t)`` over a coefficient field handle ``k``."""

    def __init__(self, base):
        self.base = base
        self.zero = RatFn((), (base.one,))
        self.one = RatFn((base.one,), (base.one,))

    def add(self, f, g):
        return ratfn_add(self.base, f, g)

    def sub(self, f, g):
        return ratfn_sub(self.base, f, g)

    def mul(self, f, g):
        return ratfn_mul(self.base, f, g)

    def neg(self, f):
        return ratfn_neg(self.base, f)

    def inv(self, f):
        return ratfn_inv(self.base, f)

    @staticmethod
    def is_zero(f):
        return not f.num


def rational_cf(x):
    """Continued fraction of a positive rational, last term >= 2 unless alone."""
    n, d = int(x.p), int(x.q)
    terms = []
    while d:
        a, r = divmod(n, d)
        terms.append(a)
        n, d = d, r
    return terms


def rational_from_cf(terms):
    p_prev, p = 1, terms[0]
    q_prev, q = 0, 1
    for a in terms[1:]:
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    return fmpq(p, q)


__all__ = [
    "QQ", "Rat", "RatFn", "RatFnField", "RationalField", "poly_add", "poly_arith", "poly_const",
    "poly_deg", "poly_divmod", "poly_eval", "poly_ext_gcd", "poly_gcd", "poly_gcd_euclid",
    "poly_is_const", "poly_monic", "poly_mul", "poly_neg", "poly_scale", "poly_shift",
    "poly_sub", "poly_trim", "rat", "rational_cf", "rational_from_cf", "ratfn_add",
    "ratfn_const", "ratfn_div", "ratfn_inv", "ratfn_is_const", "ratfn_is_zero",
    "ratfn_make", "ratfn_mul", "ratfn_neg", "ratfn_scale", "ratfn_sub",
]
