"""A real embedding of the tower and the ordering it induces.

Generators go to explicit transcendental reals: ``u_i`` to ``10 e_{2i+4}``
and ``x_k`` to ``e_{2k+3} / 2`` where ``e_n = exp(2^{1/n})``, and each
algebraic generator to the least real root of its quartic over the values
already chosen.  Values are carried as interval enclosures with dyadic
endpoints, computed with arb ball arithmetic.

Generator values are irrational, so each one is reported as the dyadic cell
``[m / 2^prec, (m + 1) / 2^prec]`` containing it; cells at a higher precision
sit inside cells at a lower one, which makes refinement nested by
construction.
"""

import threading

import flint
from flint import arb, fmpq

from .errors import AssertT20, PrecisionCapExceeded
from .tower import Ext, TowerElem, coeff_parts, pair_index, pair_of_index

DEFAULT_PREC = 64
DEFAULT_CAP = 1 << 16
GUARD = 16
T_MIN = 20


class DyadicInterval:
    """Closed interval ``[lo, hi]`` with dyadic rational endpoints."""

    __slots__ = ("lo", "hi", "prec")

    def __init__(self, lo, hi, prec):
        lo, hi = fmpq(lo), fmpq(hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        self.lo = lo
        self.hi = hi
        self.prec = prec

    @classmethod
    def from_ball(cls, ball, prec):
        if not ball.is_finite():
            raise PrecisionCapExceeded("non-finite enclosure")
        return cls(_exact(ball.lower()), _exact(ball.upper()), prec)

    @classmethod
    def point(cls, q, prec=DEFAULT_PREC):
        return cls(q, q, prec)

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def mid(self):
        return (self.lo + self.hi) / 2

    def ball(self):
        # enough bits to hold dyadic endpoints exactly
        bits = max(int(q.p).bit_length() for q in (self.lo, self.hi)) + 8
        with _working(max(self.prec + GUARD, bits)):
            if self.lo == self.hi:
                out = arb(self.lo)
            else:
                out = arb(self.lo).union(arb(self.hi))
        return out

    def contains(self, x):
        if isinstance(x, DyadicInterval):
            return self.lo <= x.lo and x.hi <= self.hi
        return self.lo <= fmpq(x) <= self.hi

    __contains__ = contains

    def overlaps(self, other):
        return not (self.hi < other.lo or other.hi < self.lo)

    def intersect(self, other):
        lo, hi = max(self.lo, other.lo), min(self.hi, other.hi)
        if lo > hi:
            raise ValueError("disjoint enclosures of one quantity")
        return DyadicInterval(lo, hi, max(self.prec, other.prec))

    def decimal(self, digits=20):
        def show(q):
            return arb(q).str(digits, radius=False)
        with _working(4 * digits + 16):
            return f"[{show(self.lo)}, {show(self.hi)}]"

    def to_json(self):
        return {"lo": str(self.lo), "hi": str(self.hi), "prec": self.prec, "decimal": self.decimal()}

    def __eq__(self, other):
        return isinstance(other, DyadicInterval) and self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((str(self.lo), str(self.hi)))

    def __repr__(self):
        return f"DyadicInterval({self.decimal()}, prec={self.prec})"


class _working:
    """Temporarily set the flint working precision (bits)."""

    _lock = threading.RLock()

    def __init__(self, bits):
        self.bits = bits

    def __enter__(self):
        self._lock.acquire()
        self.saved = flint.ctx.prec
        flint.ctx.prec = self.bits

    def __exit__(self, *exc):
        flint.ctx.prec = self.saved
        self._lock.release()


def _exact(b):
    """The exact dyadic value of an arb ball with zero radius."""
    man, exp = b.mid().man_exp()
    man, exp = int(man), int(exp)
    return fmpq(man << exp) if exp >= 0 else fmpq(man, 1 << -exp)


def _cell(enclose, prec, cap=DEFAULT_CAP):
    """Dyadic cell of level ``prec`` around the irrational number ``enclose`` converges to.

    ``enclose(wp)`` returns an arb ball at working precision ``wp``.
    """
    wp = prec + GUARD
    while wp <= cap + GUARD:
        with _working(wp):
            ball = enclose(wp)
            if ball.is_finite():
                scale = arb(2) ** prec
                lo, hi = (ball * scale).lower(), (ball * scale).upper()
                m = lo.floor().unique_fmpz()
                if m is not None and m == hi.floor().unique_fmpz() and not (ball * scale).contains_integer():
                    m = int(m)
                    return DyadicInterval(fmpq(m, 1 << prec), fmpq(m + 1, 1 << prec), prec)
        wp *= 2
    raise PrecisionCapExceeded(f"could not separate a value to {prec} bits below the {cap}-bit cap")


# the numbers e_n

def e_ball(n, wp):
    if n < 2:
        raise ValueError("e_n is defined for n >= 2")
    with _working(wp):
        return arb(2).root(n).exp()


def e_value(n, prec=DEFAULT_PREC, cap=DEFAULT_CAP):
    """Enclosure of ``exp(2^{1/n})`` of width ``2^-prec``."""
    return _cell(lambda wp: e_ball(n, wp), prec, cap)


# least real roots

def _horner(coeffs, x):
    acc = arb(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _derivative(coeffs):
    return [k * c for k, c in enumerate(coeffs)][1:]


def _hull(a, b):
    return arb(a).union(arb(b))


def _strict_sign(b):
    if b > 0:
        return 1
    if b < 0:
        return -1
    return 0


def least_root(coeffs, wp, max_steps=None):
    """Ball around the least real root of ``sum coeffs[k] y^k``.

    The coefficients are arb balls with a leading coefficient away from 0.
    Starting at minus the Cauchy bound, segments whose image excludes 0 are
    skipped and segments that cannot be decided are halved; a segment where
    the derivative keeps one sign and the endpoint signs differ holds the
    least root, which bisection then narrows to about ``2^-wp`` relative.
    Returns ``None`` when the working precision is too low to decide.
    """
    lead = coeffs[-1]
    if lead.contains(0):
        return None
    bound = arb(1)
    for c in coeffs[:-1]:
        bound = bound.max(1 + abs(c / lead).upper())
    bound = bound.upper().ceil()
    deriv = _derivative(coeffs)
    a = -bound
    fa = _strict_sign(_horner(coeffs, a))
    if fa == 0:
        return None
    step = bound / 4
    tiny = arb(2) ** (-wp // 2)
    max_steps = max_steps if max_steps is not None else 64 * wp
    bracket = None
    for _ in range(max_steps):
        if step < tiny:
            return None
        b = a + step
        if b > bound:
            return None
        seg = _hull(a, b)
        if not _horner(coeffs, seg).contains(0):
            a = b
            step *= 2
            continue
        if _horner(deriv, seg).contains(0):
            step /= 2
            continue
        fb = _strict_sign(_horner(coeffs, b))
        if fb == 0:
            step /= 2
            continue
        if fb != fa:
            bracket = (a, b)
            break
        a = b
    if bracket is None:
        return None
    a, b = bracket
    for _ in range(4 * wp):
        m = (a + b) / 2
        m = m.mid()
        fm = _strict_sign(_horner(coeffs, m))
        if fm == 0:
            break
        if fm == fa:
            a = m
        else:
            b = m
        if (b - a).upper() < abs(a).upper() * (arb(2) ** -wp) + arb(2) ** -wp:
            break
    return _hull(a, b)


def p_coeffs_v(u):
    """``p(u, v)`` as a polynomial in ``v``."""
    return [u ** 4 - 4, arb(16), arb(0), 16 * u, arb(10)]


def q_coeffs_y(t, x):
    """``q(t, x, y)`` as a polynomial in ``y``."""
    s = 1 + t
    return [s * (x ** 4 + 1), t, arb(0), t * x, arb(1)]


def u_ball(i, wp):
    return 10 * e_ball(2 * i + 4, wp)


def v_ball(i, wp):
    with _working(wp):
        return least_root(p_coeffs_v(u_ball(i, wp)), wp) or arb("nan")


def x_ball(k, wp):
    with _working(wp):
        return e_ball(2 * k + 3, wp) / 2


def embed_u(i, prec=DEFAULT_PREC, cap=DEFAULT_CAP):
    """Enclosure of the image of ``u_i``: ``10 exp(2^{1/(2i+4)})``."""
    return _cell(lambda wp: u_ball(i, wp), prec, cap)


def embed_v(i, prec=DEFAULT_PREC, cap=DEFAULT_CAP):
    """Enclosure of the least real ``v`` with ``p(u_i, v) = 0``."""
    return _cell(lambda wp: v_ball(i, wp), prec, cap)


def embed_pair(k, t, prec=DEFAULT_PREC, cap=DEFAULT_CAP):
    """``(x, y)`` enclosures for the ``k``-th pair given an enclosure of its parameter ``t``.

    ``x`` is the cell of ``e_{2k+3} / 2`` and ``y`` encloses the least real
    root of ``q(t, x, .)`` for every ``t`` in the given interval.
    """
    if t.lo < T_MIN:
        raise AssertT20(f"parameter enclosure {t.decimal()} of pair {k} admits values below {T_MIN}")
    x = _cell(lambda wp: x_ball(k, wp), prec, cap)
    wp = prec + GUARD
    while wp <= cap + GUARD:
        with _working(wp):
            y = least_root(q_coeffs_y(t.ball(), x.ball()), wp)
            if y is not None:
                return x, DyadicInterval.from_ball(y, prec)
        wp *= 2
    raise PrecisionCapExceeded(f"least root for pair {k} not isolated below the {cap}-bit cap")


class RealCtx:
    """Generator enclosures for one tower, evaluated lazily and cached per precision."""

    def __init__(self, tower, cap=DEFAULT_CAP):
        self.tower = tower
        self.cap = cap
        self._cells = {}
        self._lock = threading.RLock()

    # generator values

    def _t_ball(self, k, wp):
        i, j = pair_of_index(k)
        ui, uj = u_ball(i, wp), u_ball(j, wp)
        return ui * uj if self.tower.graph.is_edge(i, j) else ui + uj

    def _y_ball(self, k, wp):
        with _working(wp):
            t = self._t_ball(k, wp)
            if not t > T_MIN:
                raise AssertT20(f"parameter of pair {k} not certified >= {T_MIN}")
            return least_root(q_coeffs_y(t, x_ball(k, wp)), wp) or arb("nan")

    def _enclose(self, level, which):
        kind, idx = level
        if kind == 0:
            return (lambda wp: u_ball(idx, wp)) if which == 0 else (lambda wp: v_ball(idx, wp))
        return (lambda wp: x_ball(idx, wp)) if which == 0 else (lambda wp: self._y_ball(idx, wp))

    def generator(self, level, which, prec):
        """Cell of the transcendental (``which = 0``) or algebraic (``1``) generator of a level."""
        key = (level, which, prec)
        with self._lock:
            got = self._cells.get(key)
            if got is None:
                self.tower.check_level(level)
                got = _cell(self._enclose(level, which), prec, self.cap)
                self._cells[key] = got
            return got

    def t_value(self, i, j, prec=DEFAULT_PREC):
        """Enclosure of the pair parameter ``u_i u_j`` (edge) or ``u_i + u_j`` (non-edge)."""
        k = pair_index(i, j)
        return _cell(lambda wp: self._t_ball(k, wp), prec, self.cap)

    def pair_point(self, k, prec=DEFAULT_PREC):
        return self.generator((1, k), 0, prec), self.generator((1, k), 1, prec)

    # elements

    def _gen_balls(self, level, prec):
        return (self.generator(level, 0, prec).ball(), self.generator(level, 1, prec).ball())

    def _ball(self, a, prec, memo):
        if type(a) is not Ext:
            return arb(a)
        got = memo.get(a)
        if got is not None:
            return got
        tr, al = self._gen_balls(a.level, prec)
        total = arb(0)
        alpow = arb(1)
        for k, c in enumerate(a.coeffs):
            num, den = coeff_parts(a.level, c)
            if num:
                n = _horner([self._ball(e, prec, memo) for e in num], tr)
                d = _horner([self._ball(e, prec, memo) for e in den], tr)
                if d.contains(0):
                    raise _NeedPrecision()
                total += n / d * alpow
            alpow *= al
        memo[a] = total
        return total

    def eval_elem(self, a, prec=DEFAULT_PREC):
        """Enclosure of the image of an element; raises precision while a denominator straddles 0."""
        raw = a.raw if isinstance(a, TowerElem) else a
        if type(raw) is not Ext:
            q = fmpq(raw)
            if q.q & (q.q - 1) == 0:
                return DyadicInterval.point(q, prec)
            with _working(prec + GUARD):
                return DyadicInterval.from_ball(arb(q), prec)
        p = prec
        while p <= self.cap:
            try:
                with _working(p + GUARD):
                    return DyadicInterval.from_ball(self._ball(raw, p, {}), p)
            except _NeedPrecision:
                p *= 2
        raise PrecisionCapExceeded(f"a denominator still straddles 0 at the {self.cap}-bit cap")

    def compare(self, a, b, prec=DEFAULT_PREC):
        return compare(a, b, self, prec)[0]


class _NeedPrecision(Exception):
    pass


LESS, EQUAL, GREATER = "Less", "Equal", "Greater"


def compare(a, b, ctx, prec=DEFAULT_PREC):
    """Order of ``a`` and ``b`` under the embedding.

    Returns ``(answer, enclosure_a, enclosure_b)``.  Equality is decided on
    normal forms; distinct elements are refined from ``prec`` bits, doubling,
    until their enclosures separate.
    """
    ra = a.raw if isinstance(a, TowerElem) else a
    rb = b.raw if isinstance(b, TowerElem) else b
    if ra == rb:
        return EQUAL, None, None
    p = prec
    while p <= ctx.cap:
        ia, ib = ctx.eval_elem(ra, p), ctx.eval_elem(rb, p)
        if ia.hi < ib.lo:
            return LESS, ia, ib
        if ib.hi < ia.lo:
            return GREATER, ia, ib
        p *= 2
    raise PrecisionCapExceeded(f"enclosures still overlap at the {ctx.cap}-bit cap")
