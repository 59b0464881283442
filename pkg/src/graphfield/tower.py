"""The field built from a graph: a tower of curve function fields over QQ.

Vertex ``i`` adjoins the function field of X with generators ``u_i``
(transcendental) and ``v_i`` (a root of ``p(u_i, v) = 0``).  The ``k``-th
vertex pair ``(i, j)``, ``i > j``, in lexicographic order adjoins the function
field of ``Y_t`` with generators ``x_k``, ``y_k``, where ``t = u_i u_j`` for an
edge and ``t = u_i + u_j`` for a non-edge.

Levels are totally ordered ``X_0 < X_1 < ... < Z_1 < Z_2 < ...`` and keyed by
``(0, i)`` and ``(1, k)``.  A raw element is either a ``Rat`` or an ``Ext``
whose ``level`` is the highest level it depends on and whose ``coeffs`` are
the four coefficients of ``1, g, g^2, g^3`` (``g`` the level's algebraic
generator), each a canonical ``RatFn`` in the level's transcendental over the
compositum of all lower levels.  Intermediate levels an element does not use
are skipped, and elements that do not depend on their top level collapse, so
equal elements have identical raw values.

The lowest level ``X_0`` has coefficients over QQ and stores them as flint
``fmpq_poly`` pairs (see ``qfunc``); every other level stores tuples of
lower-level elements.  Gcds over the higher base fields dominate the cost of
canonical forms, so before running Euclid the tower tries to certify the gcd
degree by mapping both polynomials into ``F_P[t]`` through a ring
homomorphism that sends every generator to an ``F_P``-point of its curve
(``Specialization``).
"""

import random
import threading
from functools import lru_cache
from math import isqrt
from typing import NamedTuple

import flint
from flint import fmpq, fmpq_poly

from .algebra import (
    Rat, RatFn, poly_add, poly_divmod, poly_gcd, poly_gcd_euclid, poly_monic, poly_mul,
    poly_neg, poly_scale, poly_sub, rat, ratfn_add, ratfn_inv, ratfn_make, ratfn_mul,
    ratfn_neg, ratfn_sub,
)
from .curves import min_poly_X
from .errors import DivisionByZero, InternalReducibility, VertexOutOfRange
from .qfunc import (
    QF_ONE, QF_T, QF_ZERO, QP_ONE, QP_ZERO, qcoeffs, qf_add, qf_add_scalar, qf_const_value, qf_from_parts,
    qf_inv, qf_is_const, qf_make, qf_mul, qf_neg, qf_scale, qpoly,
)

ZERO = fmpq(0)
ONE = fmpq(1)
PRIME = (1 << 61) - 1
BOTTOM = (0, 0)
INVERSE_CACHE = 4096


def _qkey(parts):
    # fmpq.__hash__ goes through fractions.Fraction; hash the integer pair instead
    return tuple((z.p, z.q) if type(z) is fmpq else z for z in parts)


class Ext:
    """Element whose top level is ``level``; immutable, with cached hash and image."""

    __slots__ = ("level", "coeffs", "_hash", "_phi")

    def __init__(self, level, coeffs):
        self.level = level
        self.coeffs = coeffs
        self._hash = None
        self._phi = None

    def __hash__(self):
        if self._hash is None:
            if self.level == BOTTOM:
                key = tuple((_qkey(c.num.coeffs()), _qkey(c.den.coeffs())) for c in self.coeffs)
            else:
                key = tuple((_qkey(c.num), _qkey(c.den)) for c in self.coeffs)
            self._hash = hash((self.level, key))
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not Ext:
            return False
        if self._hash is not None and other._hash is not None and self._hash != other._hash:
            return False
        return self.level == other.level and self.coeffs == other.coeffs

    def __ne__(self, other):
        return not self.__eq__(other)

    def __repr__(self):
        return f"Ext({self.level!r}, {format_elem(self)!r})"


def pair_index(i, j):
    """Lexicographic position (from 1) of the pair ``{i, j}``."""
    if i == j:
        raise ValueError("a vertex pair needs two distinct vertices")
    i, j = max(i, j), min(i, j)
    return i * (i - 1) // 2 + j + 1


def pair_of_index(k):
    if k < 1:
        raise ValueError("pair indices start at 1")
    i = (1 + isqrt(8 * (k - 1) + 1)) // 2
    while i * (i - 1) // 2 > k - 1:
        i -= 1
    while (i + 1) * i // 2 <= k - 1:
        i += 1
    return i, k - 1 - i * (i - 1) // 2


def level_column(level):
    if level is None:
        return 0
    kind, idx = level
    return 2 * idx + 2 if kind == 0 else 2 * idx - 1


def column_level(col):
    """Inverse of ``level_column``; ``None`` for the rational column."""
    if col == 0:
        return None
    if col % 2 == 0:
        return (0, col // 2 - 1)
    return (1, (col + 1) // 2)


def level_of(a):
    return a.level if type(a) is Ext else None


def level_symbols(level):
    if level[0] == 0:
        return f"u{level[1]}", f"v{level[1]}"
    i, j = pair_of_index(level[1])
    return f"x{i}_{j}", f"y{i}_{j}"


class LevelInfo(NamedTuple):
    level: tuple
    pair: tuple | None
    edge: bool | None
    t: object
    minpoly: tuple  # coefficients m_0..m_3 of the monic quartic, as RatFns in the transcendental


RF_ZERO = RatFn((), (ONE,))
RF_ONE = RatFn((ONE,), (ONE,))
RF_T = RatFn((ZERO, ONE), (ONE,))


def coeff_zero(level):
    return QF_ZERO if level == BOTTOM else RF_ZERO


def coeff_parts(level, c):
    """``(num, den)`` coefficient tuples of a level coefficient, whatever its storage."""
    if level == BOTTOM:
        return qcoeffs(c.num), qcoeffs(c.den)
    return c.num, c.den


class Specialization:
    """Ring homomorphism from the tower's polynomial ring to ``F_P``.

    Each ``u_i`` goes to a pseudo-random residue for which ``p(u_i, v)`` has
    a root mod ``P``, and ``v_i`` to the least such root; likewise for
    ``(x_k, y_k)`` on ``Y_t`` with ``t`` specialized first.  Elements whose
    denominators vanish at the point map to ``None``.
    """

    def __init__(self, tower, seed=0):
        self.tower = tower
        self.seed = seed
        self._points = {}
        self._lock = threading.Lock()

    def point(self, level):
        got = self._points.get(level)
        if got is not None:
            return got
        rng = random.Random(f"{self.seed}:{level}")
        if level[0] == 0:
            while True:
                u = rng.randrange(1, PRIME)
                f = flint.nmod_poly([(u**4 - 4) % PRIME, 16, 0, 16 * u % PRIME, 10], PRIME)
                roots = f.roots()
                if roots:
                    got = (u, min(int(r) for r, _ in roots))
                    break
        else:
            t = self.value(self.tower.info(level).t)
            while True:
                x = rng.randrange(1, PRIME)
                s = (1 + t) * (x**4 + 1) % PRIME
                f = flint.nmod_poly([s, t, 0, t * x % PRIME, 1], PRIME)
                roots = f.roots()
                if roots:
                    got = (x, min(int(r) for r, _ in roots))
                    break
        with self._lock:
            return self._points.setdefault(level, got)

    def value(self, a):
        if type(a) is not Ext:
            d = int(a.q) % PRIME
            if not d:
                return None
            return int(a.p) * pow(d, -1, PRIME) % PRIME
        if a._phi is not None:
            return None if a._phi < 0 else a._phi
        t, g = self.point(a.level)
        total = 0
        gpow = 1
        res = -1
        at = self._qpoly_at if a.level == BOTTOM else self._poly_at
        for c in a.coeffs:
            if c.num:
                n = at(c.num, t)
                d = at(c.den, t)
                if n is None or not d:
                    break
                total = (total + n * pow(d, -1, PRIME) * gpow) % PRIME
            gpow = gpow * g % PRIME
        else:
            res = total
        a._phi = res
        return None if res < 0 else res

    @staticmethod
    def _qpoly_at(p, t):
        d = int(p.denom()) % PRIME
        if not d:
            return None
        num = flint.nmod_poly([int(c) % PRIME for c in p.numer().coeffs()], PRIME)
        return int(num(t)) * pow(d, -1, PRIME) % PRIME

    def _poly_at(self, coeffs, t):
        acc = 0
        for c in reversed(coeffs):
            v = self.value(c)
            if v is None:
                return None
            acc = (acc * t + v) % PRIME
        return acc

    def image(self, coeffs):
        out = []
        for c in coeffs:
            v = self.value(c)
            if v is None:
                return None
            out.append(v)
        return flint.nmod_poly(out, PRIME)

    def gcd_degree(self, a, b):
        """Degree of the gcd of the images, when both leading terms survive.

        The image of ``gcd(a, b)`` divides the gcd of the images, so this is
        an upper bound that is exact with high probability; a value of 0
        certifies coprimality, anything else is confirmed by exact division.
        """
        fa = self.image(a)
        if fa is None:
            return None
        fb = self.image(b)
        if fb is None:
            return None
        if fa.degree() < len(a) - 1 and fb.degree() < len(b) - 1:
            return None
        return fa.gcd(fb).degree()


def _all_rational(a):
    for c in a:
        if type(c) is Ext:
            return False
    return True


def _qq_gcd(a, b):
    return qcoeffs(qpoly(a).gcd(qpoly(b)))


def _over_bottom(a):
    for c in a:
        if type(c) is Ext and c.level != BOTTOM:
            return False
    return True


_BIVARIATE = flint.fmpq_mpoly_ctx.get(("t", "s"), "lex")


def _coordinates(a):
    """Term dicts ``{(i, m): q}`` of the four bivariate parts of ``a``, one per power of ``v_0``."""
    den = QP_ONE
    for c in a:
        if type(c) is Ext:
            for part in c.coeffs:
                if part.den.degree() > 0:
                    den = den * (part.den // den.gcd(part.den))
    terms = [{} for _ in range(4)]
    for i, c in enumerate(a):
        if type(c) is Ext:
            parts = [(k, part.num * (den // part.den)) for k, part in enumerate(c.coeffs) if part.num]
        else:
            parts = [(0, den * c)] if c else []
        for k, poly in parts:
            for m, q in enumerate(poly.coeffs()):
                if q:
                    terms[k][(i, m)] = q
    return terms


def _base_part(*polys):
    """Largest monic common factor of ``polys`` with coefficients in ``QQ(u_0)``, if of degree > 0.

    The polynomials have coefficients in the bottom level.  Writing each
    coefficient on the basis ``1, v_0, v_0^2, v_0^3`` splits a polynomial into
    four over ``QQ(u_0)``; a polynomial over ``QQ(u_0)`` divides it exactly
    when it divides all four.  After clearing a common denominator these are
    bivariate polynomials over QQ in ``t`` and ``s = u_0``, and flint takes
    their gcd.
    """
    terms = []
    for a in polys:
        terms += _coordinates(a)
    g = None
    for t in terms:
        if t:
            f = _BIVARIATE.from_dict(t)
            g = f if g is None else g.gcd(f)
            if g.degrees()[0] == 0:
                return None
    rows = {}
    for (i, m), q in g.to_dict().items():
        rows.setdefault(i, {})[m] = q
    top = max(rows)
    coeffs = [fmpq_poly([rows[i].get(m, 0) for m in range(max(rows[i]) + 1)]) if i in rows
              else QP_ZERO for i in range(top + 1)]
    lead_poly = coeffs[-1]
    out = []
    for poly in coeffs[:-1]:
        f = qf_make(poly, lead_poly)
        out.append(Tower._collapse(BOTTOM, (f, QF_ZERO, QF_ZERO, QF_ZERO)))
    return tuple(out) + (ONE,)


class Tower:
    """Field handle for the tower over a ``GraphOracle``.

    Arithmetic methods take and return raw elements; ``elem`` wraps a raw
    element into a ``TowerElem`` with operator syntax.  Levels are
    materialized on first use under a lock, so infinite graphs work lazily.
    """

    zero = ZERO
    one = ONE

    def __init__(self, graph):
        self.graph = graph
        self._levels = {}
        self._lock = threading.Lock()
        self.specialization = Specialization(self)
        self._support = lru_cache(maxsize=1 << 16)(self._support_uncached)
        self._inverses = {}
        self._gcds = {}

    # level bookkeeping

    @property
    def n(self):
        return self.graph.n

    def check_level(self, level):
        kind, idx = level
        if kind == 0:
            self.graph.check_vertex(idx)
        else:
            i, _ = pair_of_index(idx)
            if self.graph.n is not None and i >= self.graph.n:
                raise VertexOutOfRange(f"pair {idx} needs vertex {i}, graph has {self.graph.n}")

    def info(self, level):
        got = self._levels.get(level)
        if got is not None:
            return got
        self.check_level(level)
        kind, idx = level
        if kind == 0:
            polys = min_poly_X()[:4]
            if level == BOTTOM:
                mp = tuple(qf_from_parts(c, (ONE,)) for c in polys)
            else:
                mp = tuple(RatFn(c, (ONE,)) if c else RF_ZERO for c in polys)
            built = LevelInfo(level, None, None, None, mp)
        else:
            i, j = pair_of_index(idx)
            edge = self.graph.is_edge(i, j)
            ui, uj = self.u_raw(i), self.u_raw(j)
            t = self.mul(ui, uj) if edge else self.add(ui, uj)
            s = self.add(ONE, t)
            mp = (RatFn((s, ZERO, ZERO, ZERO, s), (ONE,)), RatFn((t,), (ONE,)),
                  RF_ZERO, RatFn((ZERO, t), (ONE,)))
            built = LevelInfo(level, (i, j), edge, t, mp)
        with self._lock:
            return self._levels.setdefault(level, built)

    # generators

    def level_gens_raw(self, level):
        """``(transcendental, algebraic)`` generators of a level."""
        self.check_level(level)
        if level == BOTTOM:
            return (Ext(level, (QF_T, QF_ZERO, QF_ZERO, QF_ZERO)),
                    Ext(level, (QF_ZERO, QF_ONE, QF_ZERO, QF_ZERO)))
        return (Ext(level, (RF_T, RF_ZERO, RF_ZERO, RF_ZERO)),
                Ext(level, (RF_ZERO, RF_ONE, RF_ZERO, RF_ZERO)))

    def u_raw(self, i):
        return self.level_gens_raw((0, i))[0]

    def v_raw(self, i):
        return self.level_gens_raw((0, i))[1]

    def x_raw(self, i, j):
        return self.level_gens_raw((1, pair_index(i, j)))[0]

    def y_raw(self, i, j):
        return self.level_gens_raw((1, pair_index(i, j)))[1]

    def t_raw(self, i, j):
        return self.info((1, pair_index(i, j))).t

    def gen(self, which, *idx):
        """``which`` is one of ``"u"``, ``"v"``, ``"x"``, ``"y"``."""
        maker = {"u": self.u_raw, "v": self.v_raw, "x": self.x_raw, "y": self.y_raw}[which]
        return TowerElem(self, maker(*idx))

    def u(self, i):
        return TowerElem(self, self.u_raw(i))

    def v(self, i):
        return TowerElem(self, self.v_raw(i))

    def x(self, i, j):
        return TowerElem(self, self.x_raw(i, j))

    def y(self, i, j):
        return TowerElem(self, self.y_raw(i, j))

    def t_param(self, i, j):
        return TowerElem(self, self.t_raw(i, j))

    def elem(self, raw):
        if isinstance(raw, TowerElem):
            return raw
        if not isinstance(raw, (Rat, Ext)):
            raw = rat(raw)
        return TowerElem(self, raw)

    # building from coefficient data

    def make_coeff(self, level, num, den):
        """Canonical level coefficient from ``num``/``den`` tuples of lower elements."""
        if level == BOTTOM:
            return qf_from_parts(num, den)
        return ratfn_make(self, tuple(num), tuple(den))

    def make(self, level, coeffs):
        """Raw element ``sum c_k g^k`` from canonical coefficients, collapsed."""
        return self._collapse(level, tuple(coeffs))

    # field handle

    @staticmethod
    def const(q):
        return rat(q)

    @staticmethod
    def is_zero(a):
        return type(a) is not Ext and not a

    @staticmethod
    def eq(a, b):
        return a == b

    def coprime(self, a, b):
        if _all_rational(a) and _all_rational(b):
            return len(_qq_gcd(a, b)) == 1
        return self.specialization.gcd_degree(a, b) == 0

    def poly_gcd(self, a, b):
        """Monic gcd over this field, using the specialization as a guide."""
        if _all_rational(a) and _all_rational(b):
            return _qq_gcd(a, b)
        if a and b:
            d = self.specialization.gcd_degree(a, b)
            if d == 0:
                return (ONE,)
            if d is not None:
                for x, y in ((a, b), (b, a)):
                    if len(y) - 1 == d and not poly_divmod(self, x, y)[1]:
                        return poly_monic(self, y)
            if d is not None and _over_bottom(a) and _over_bottom(b):
                g = _base_part(a, b)
                if g is not None:
                    # a common factor over QQ(u_0): split it off before running Euclid
                    if len(g) - 1 == d:
                        return g
                    rest = self.poly_gcd(poly_divmod(self, a, g)[0], poly_divmod(self, b, g)[0])
                    return poly_mul(self, g, rest)
        key = (a, b)
        got = self._gcds.get(key)
        if got is None:
            got = poly_gcd_euclid(self, a, b)
            if len(self._gcds) >= INVERSE_CACHE:
                self._gcds.clear()
            self._gcds[key] = got
        return got

    def neg(self, a):
        if type(a) is not Ext:
            return -a
        if a.level == BOTTOM:
            return Ext(a.level, tuple(qf_neg(c) if c.num else c for c in a.coeffs))
        return Ext(a.level, tuple(ratfn_neg(self, c) if c.num else c for c in a.coeffs))

    def add(self, a, b):
        ta, tb = type(a) is Ext, type(b) is Ext
        if not ta and not tb:
            return a + b
        if not tb:
            return self._add_scalar(a, b) if b else a
        if not ta:
            return self._add_scalar(b, a) if a else b
        if a.level > b.level:
            return self._add_scalar(a, b)
        if b.level > a.level:
            return self._add_scalar(b, a)
        if a.level == BOTTOM:
            coeffs = tuple(qf_add(x, y) for x, y in zip(a.coeffs, b.coeffs))
        else:
            coeffs = tuple(ratfn_add(self, x, y) for x, y in zip(a.coeffs, b.coeffs))
        return self._collapse(a.level, coeffs)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        ta, tb = type(a) is Ext, type(b) is Ext
        if not ta and not tb:
            return a * b
        if not tb:
            return self._scale(a, b)
        if not ta:
            return self._scale(b, a)
        if a.level > b.level:
            return self._scale(a, b)
        if b.level > a.level:
            return self._scale(b, a)
        if a.level == BOTTOM:
            return self._mul_bottom(a.coeffs, b.coeffs)
        return self._mul_same(a.level, a.coeffs, b.coeffs)

    def inv(self, a):
        if type(a) is not Ext:
            if not a:
                raise DivisionByZero("inverse of 0")
            return 1 / a
        coeffs = a.coeffs
        if not coeffs[1].num and not coeffs[2].num and not coeffs[3].num:
            c0 = qf_inv(coeffs[0]) if a.level == BOTTOM else ratfn_inv(self, coeffs[0])
            return Ext(a.level, (c0,) + coeffs[1:])
        got = self._inverses.get(a)
        if got is not None:
            return got
        if a.level == BOTTOM:
            got = self._inv_bottom(coeffs)
        else:
            got = self._inv_same(a.level, coeffs)
        if len(self._inverses) >= INVERSE_CACHE:
            self._inverses.clear()
        self._inverses[a] = got
        return got

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def power(self, a, e):
        if e < 0:
            return self.power(self.inv(a), -e)
        out = ONE
        base = a
        while e:
            if e & 1:
                out = self.mul(out, base)
            e >>= 1
            if e:
                base = self.mul(base, base)
        return out

    def _add_scalar(self, a, s):
        c0 = a.coeffs[0]
        if a.level == BOTTOM:
            return Ext(a.level, (qf_add_scalar(c0, s),) + a.coeffs[1:])
        num = poly_add(self, c0.num, poly_scale(self, c0.den, s))
        return Ext(a.level, (RatFn(num, c0.den) if num else RF_ZERO,) + a.coeffs[1:])

    def _scale(self, a, s):
        if type(s) is not Ext:
            if not s:
                return ZERO
            if s == 1:
                return a
        if a.level == BOTTOM:
            return Ext(a.level, tuple(qf_scale(c, s) for c in a.coeffs))
        return Ext(a.level, tuple(RatFn(poly_scale(self, c.num, s), c.den) if c.num else c
                                  for c in a.coeffs))

    @staticmethod
    def _collapse(level, coeffs):
        c0, c1, c2, c3 = coeffs
        if c1.num or c2.num or c3.num:
            return Ext(level, coeffs)
        if level == BOTTOM:
            return qf_const_value(c0) if qf_is_const(c0) else Ext(level, coeffs)
        if len(c0.num) <= 1 and len(c0.den) == 1:
            return c0.num[0] if c0.num else ZERO
        return Ext(level, coeffs)

    def _mul_bottom(self, A, B):
        prod = [None] * 7
        for i, x in enumerate(A):
            if not x.num:
                continue
            for j, y in enumerate(B):
                if not y.num:
                    continue
                p = qf_mul(x, y)
                k = i + j
                prod[k] = p if prod[k] is None else qf_add(prod[k], p)
        mp = self.info(BOTTOM).minpoly
        for d in (6, 5, 4):
            c = prod[d]
            if c is None or not c.num:
                continue
            for i, m in enumerate(mp):
                if m.num:
                    k = d - 4 + i
                    term = qf_neg(qf_mul(c, m))
                    prod[k] = term if prod[k] is None else qf_add(prod[k], term)
        return self._collapse(BOTTOM, tuple(QF_ZERO if c is None else c for c in prod[:4]))

    def _mul_same(self, level, A, B):
        prod = [None] * 7
        for i, x in enumerate(A):
            if not x.num:
                continue
            for j, y in enumerate(B):
                if not y.num:
                    continue
                p = ratfn_mul(self, x, y)
                k = i + j
                prod[k] = p if prod[k] is None else ratfn_add(self, prod[k], p)
        if prod[4] is not None or prod[5] is not None or prod[6] is not None:
            mp = self.info(level).minpoly
            for d in (6, 5, 4):
                c = prod[d]
                if c is None or not c.num:
                    continue
                for i, m in enumerate(mp):
                    if not m.num:
                        continue
                    k = d - 4 + i
                    term = ratfn_mul(self, c, m)
                    prod[k] = ratfn_neg(self, term) if prod[k] is None else ratfn_sub(self, prod[k], term)
        coeffs = tuple(RF_ZERO if c is None else c for c in prod[:4])
        return self._collapse(level, coeffs)

    # inversion: clear denominators, then solve M b = e_0 with the adjugate of
    # the multiplication matrix M of the element on the basis 1, g, g^2, g^3

    def _inv_bottom(self, coeffs):
        den = QP_ONE
        for c in coeffs:
            if c.den.degree() > 0:
                den = den * (c.den // den.gcd(c.den))
        col = [c.num * (den // c.den) for c in coeffs]
        mp = [m.num for m in self.info(BOTTOM).minpoly]
        cols = [col]
        for _ in range(3):
            prev = cols[-1]
            top = prev[3]
            nxt = [fmpq_poly([]), prev[0], prev[1], prev[2]]
            if top:
                nxt = [nxt[k] - top * mp[k] for k in range(4)]
            cols.append(nxt)
        rows = [[cols[j][i] for j in range(4)] for i in range(4)]
        cof = []
        for k in range(4):
            m = [[r[j] for j in range(4) if j != k] for r in rows[1:]]
            minor = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                     - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                     + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
            cof.append(minor if k % 2 == 0 else -minor)
        det = sum((rows[0][k] * cof[k] for k in range(4)), fmpq_poly([]))
        if not det:
            raise InternalReducibility("minimal polynomial of the bottom level is reducible")
        return self._collapse(BOTTOM, tuple(qf_make(den * c, det) for c in cof))

    def _inv_same(self, level, coeffs):
        den = (ONE,)
        for c in coeffs:
            if len(c.den) > 1 and c.den != den:
                if len(den) == 1 or self.coprime(den, c.den):
                    den = poly_mul(self, den, c.den)
                else:
                    den = poly_mul(self, den, poly_divmod(self, c.den, poly_gcd(self, den, c.den))[0])
        cols = [[poly_mul(self, c.num, poly_divmod(self, den, c.den)[0]) if c.num else ()
                 for c in coeffs]]
        mp = [m.num for m in self.info(level).minpoly]
        for _ in range(3):
            prev = cols[-1]
            top = prev[3]
            nxt = [(), prev[0], prev[1], prev[2]]
            if top:
                for k in range(4):
                    if mp[k]:
                        nxt[k] = poly_sub(self, nxt[k], poly_mul(self, top, mp[k]))
            cols.append(nxt)
        rows = [[cols[j][i] for j in range(4)] for i in range(4)]
        cof = []
        for k in range(4):
            minor = _det3(self, [[r[j] for j in range(4) if j != k] for r in rows[1:]])
            cof.append(minor if k % 2 == 0 else poly_neg(self, minor))
        det = ()
        for k in range(4):
            if rows[0][k] and cof[k]:
                det = poly_add(self, det, poly_mul(self, rows[0][k], cof[k]))
        if not det:
            raise InternalReducibility(f"minimal polynomial of level {level} is reducible")
        return self._collapse(level, self._reduce_over(den, cof, det))

    def _reduce_over(self, den, cof, det):
        """Canonical ``den * c / det`` for each cofactor ``c``.

        Common factors of the cofactors and ``det`` usually come from repeated
        factors of the element's norm and are shared by all of them, so one
        gcd against the smallest cofactor is computed and divided out of the
        others where it divides, before canonicalizing each quotient.
        """
        nums = [poly_mul(self, den, c) if c else () for c in cof]
        live = sorted((k for k in range(4) if nums[k]), key=lambda k: len(nums[k]))
        shared = None
        for k in live:
            if not self.coprime(nums[k], det):
                shared = self.poly_gcd(nums[k], det)
                break
        out = [RF_ZERO] * 4
        reduced_det = None
        for k in live:
            num, d = nums[k], det
            if shared is not None and len(shared) > 1:
                q, r = poly_divmod(self, num, shared)
                if not r:
                    if reduced_det is None:
                        reduced_det = poly_divmod(self, det, shared)[0]
                    num, d = q, reduced_det
            out[k] = ratfn_make(self, num, d)
        return tuple(out)

    # support and columns

    def _support_uncached(self, a):
        """Largest X index and Z index referenced, ``-1`` / ``0`` if none."""
        if type(a) is not Ext:
            return -1, 0
        kind, idx = a.level
        xmax, zmax = (idx, 0) if kind == 0 else (pair_of_index(idx)[0], idx)
        if a.level == BOTTOM:
            return xmax, zmax
        for c in a.coeffs:
            for part in (c.num, c.den):
                for e in part:
                    if type(e) is Ext:
                        sx, sz = self._support(e)
                        if sx > xmax:
                            xmax = sx
                        if sz > zmax:
                            zmax = sz
        return xmax, zmax

    def support_of(self, a):
        """``(m, s, column)``: vertex count, pair count and column of a raw element."""
        xmax, s = self._support(a)
        return xmax + 1, s, level_column(level_of(a))

    def column_realized(self, col):
        if col < 0:
            return False
        if col == 0:
            return True
        n = self.graph.n
        if n is None:
            return True
        if col % 2 == 0:
            return col // 2 - 1 < n
        return (col + 1) // 2 <= n * (n - 1) // 2

    def column_count(self):
        """Number of realized columns, ``None`` in infinite mode."""
        n = self.graph.n
        return None if n is None else 1 + n + n * (n - 1) // 2

    def realized_columns(self):
        n = self.graph.n
        if n is None:
            raise ValueError("an infinite tower has infinitely many columns")
        top = max(2 * n, n * (n - 1) - 1)
        return [c for c in range(top + 1) if self.column_realized(c)]


def _det3(F, m):
    total = ()
    for k, sign in ((0, 1), (1, -1), (2, 1)):
        a = m[0][k]
        if not a:
            continue
        j1, j2 = [j for j in range(3) if j != k]
        minor = poly_sub(F, poly_mul(F, m[1][j1], m[2][j2]), poly_mul(F, m[1][j2], m[2][j1]))
        if minor:
            term = poly_mul(F, a, minor)
            total = poly_add(F, total, term) if sign > 0 else poly_sub(F, total, term)
    return total


class TowerElem:
    """Immutable element of a ``Tower`` with arithmetic operators."""

    __slots__ = ("tower", "raw")

    def __init__(self, tower, raw):
        self.tower = tower
        self.raw = raw

    def _lift(self, other):
        if isinstance(other, TowerElem):
            return other.raw
        if isinstance(other, (int, Rat)):
            return rat(other)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else TowerElem(self.tower, self.tower.add(self.raw, o))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else TowerElem(self.tower, self.tower.sub(self.raw, o))

    def __rsub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else TowerElem(self.tower, self.tower.sub(o, self.raw))

    def __mul__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else TowerElem(self.tower, self.tower.mul(self.raw, o))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else TowerElem(self.tower, self.tower.div(self.raw, o))

    def __rtruediv__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else TowerElem(self.tower, self.tower.div(o, self.raw))

    def __neg__(self):
        return TowerElem(self.tower, self.tower.neg(self.raw))

    def __pow__(self, e):
        return TowerElem(self.tower, self.tower.power(self.raw, e))

    def inv(self):
        return TowerElem(self.tower, self.tower.inv(self.raw))

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self.raw == o

    def __hash__(self):
        return hash(self.raw)

    def is_zero(self):
        return self.tower.is_zero(self.raw)

    @property
    def support(self):
        return self.tower.support_of(self.raw)

    @property
    def column(self):
        return level_column(level_of(self.raw))

    @property
    def level(self):
        return level_of(self.raw)

    def __repr__(self):
        return format_elem(self.raw)


def _fmt_scalar(c):
    if type(c) is Ext:
        return f"({format_elem(c)})"
    return f"({c})" if c < 0 or c.q != 1 else str(c)


def _fmt_poly(poly, var):
    terms = []
    for k, c in enumerate(poly):
        if type(c) is not Ext and not c:
            continue
        if k == 0:
            terms.append(_fmt_scalar(c))
        else:
            mono = var if k == 1 else f"{var}^{k}"
            terms.append(mono if (type(c) is not Ext and c == 1) else f"{_fmt_scalar(c)}*{mono}")
    return " + ".join(terms) if terms else "0"


def format_elem(a):
    """Render a raw element in the expression syntax accepted by ``expr.parse_expr``."""
    if type(a) is not Ext:
        return _fmt_scalar(a) if a.q != 1 else str(a)
    tsym, gsym = level_symbols(a.level)
    parts = []
    for k, c in enumerate(a.coeffs):
        if not c.num:
            continue
        num, den = coeff_parts(a.level, c)
        body = f"({_fmt_poly(num, tsym)})"
        if len(den) > 1:
            body += f"/({_fmt_poly(den, tsym)})"
        if k:
            body += f"*{gsym}" if k == 1 else f"*{gsym}^{k}"
        parts.append(body)
    return " + ".join(parts)
