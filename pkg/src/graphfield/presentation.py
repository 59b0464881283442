"""Natural-number codes for tower elements and the field operations on codes.

A code is ``pi(column, rank)`` (Cantor pairing) in the column-faithful mode:
column 0 holds QQ, column ``2i + 2`` the elements whose top level is X_i and
column ``2k - 1`` those whose top level is Z_k.  The rank inside a column is
a structural bijection built from three pieces:

* ``sigma``, a pairing whose bit size is additive in its arguments (nested
  Cantor pairing would square code sizes at every layer);
* list codes, ``[] -> 0`` and ``[x, *rest] -> 1 + sigma(x, code(rest))``;
* a Schroeder-Bernstein bijection between reduced fractions in ``B(T)`` and
  arbitrary (numerator, monic denominator) pairs.

Column 0 is ordered 0, 1, -1, 1/2, -1/2, 2, -2, 2/3, ... by the Stern-Brocot
paths of the positive rationals.  An element of a level with base field ``B``
has coefficients ``c0..c3`` in ``B(T)``; the coefficients of those rational
functions are coded by their index in ``B``, which interleaves the ranks of
the columns that make up ``B``.  Everything is a fixed function of the graph,
independent of query order.

The oracle surface that decoders are allowed to see is ``zero``, ``one``,
``add``, ``sub``, ``mul`` and ``in_domain``; ``ScrambledPresentation`` and
``DumpPresentation`` expose exactly that surface.
"""

import json
import re
import threading
from math import isqrt

from flint import fmpq, fmpq_poly

from .algebra import RatFn, rational_cf, rational_from_cf
from .errors import (
    BudgetExceeded, CodeOutOfDomain, ColumnNotRealized, InputError, VertexOutOfRange, ZeroInverse,
)
from .tower import (
    BOTTOM, ONE, ZERO, Ext, Tower, TowerElem, coeff_parts, coeff_zero, column_level, level_column,
    level_of,
)

SERIALIZATION_VERSION = "graphfield-coding/1"
COLUMN = "column-faithful"
SEQUENTIAL = "sequential"


# pairings and list codes

def pi(a, b):
    s = a + b
    return s * (s + 1) // 2 + b


def pi_inv(n):
    w = (isqrt(8 * n + 1) - 1) // 2
    b = n - w * (w + 1) // 2
    return w - b, b


def _offset(L):
    return (L - 1 << L) + 1


def sigma(a, b):
    """Length-graded pairing on bijective binary strings."""
    la = (a + 1).bit_length() - 1
    lb = (b + 1).bit_length() - 1
    L = la + lb
    return _offset(L) + (la << L) + ((a + 1 - (1 << la)) << lb) + (b + 1 - (1 << lb))


def sigma_inv(n):
    bits = n.bit_length()
    L = max(0, bits - bits.bit_length())
    while L and _offset(L) > n:
        L -= 1
    while _offset(L + 1) <= n:
        L += 1
    r = n - _offset(L)
    la = r >> L
    lb = L - la
    rest = r & ((1 << L) - 1)
    return (1 << la) - 1 + (rest >> lb), (1 << lb) - 1 + (rest & ((1 << lb) - 1))


def list_code(xs):
    code = 0
    for x in reversed(xs):
        code = 1 + sigma(x, code)
    return code


def list_decode(n):
    out = []
    while n:
        x, n = sigma_inv(n - 1)
        out.append(x)
    return out


def rational_rank(q):
    """Position of a rational in 0, 1, -1, 1/2, -1/2, 2, -2, 2/3, ..."""
    if not q:
        return 0
    cf = rational_cf(abs(q))
    runs = [cf[0] - 1] if len(cf) == 1 else cf[:-1] + [cf[-1] - 1]
    prank = pi(list_code([e - 1 for e in runs[1:]]), runs[0])
    return 2 * prank + (2 if q < 0 else 1)


def rational_unrank(r):
    if r == 0:
        return ZERO
    prank, negative = divmod(r - 1, 2)
    rest, e0 = pi_inv(prank)
    tail = [e + 1 for e in list_decode(rest)]
    cf = [e0 + 1] if not tail else [e0] + tail[:-1] + [tail[-1] + 1]
    q = rational_from_cf(cf)
    return -q if negative else q


def _trim(p):
    p = list(p)
    while p and type(p[-1]) is not Ext and not p[-1]:
        p.pop()
    return tuple(p)


class Presentation:
    """Coded copy of the tower of a graph, in column-faithful or sequential mode.

    Caches map raw elements to ranks and codes to raw elements; all entries
    are values of fixed functions, so concurrent callers that race on a
    missing entry compute the same value and the dictionaries stay
    consistent under the interpreter lock.
    """

    def __init__(self, graph, mode=COLUMN, tower=None):
        if mode not in (COLUMN, SEQUENTIAL):
            raise InputError(f"unknown presentation mode {mode!r}")
        self.graph = graph
        self.mode = mode
        self.tower = tower if tower is not None else Tower(graph)
        self._rank = {}
        self._unrank = {}
        self._decoded = {}
        self._ops = {}
        self._bases = {}
        self._lock = threading.Lock()
        if graph.is_finite:
            cols = self.tower.realized_columns()
            self._global = (len(cols), cols, {c: p for p, c in enumerate(cols)})
        else:
            self._global = None
        self.zero = self.encode_raw(ZERO)
        self.one = self.encode_raw(ONE)

    def describe(self):
        return self.graph.describe()

    # base fields of levels

    def _base(self, level):
        """``(N, columns, positions)`` of the base field of ``level``; ``N`` is None if infinite."""
        got = self._bases.get(level)
        if got is not None:
            return got
        kind, idx = level
        if kind == 0:
            cols = [0] + [2 * i + 2 for i in range(idx)]
        elif self.graph.is_finite:
            n = self.graph.n
            cols = sorted([0] + [2 * i + 2 for i in range(n)] + list(range(1, 2 * idx - 2, 2)))
        else:
            cols = None
        got = (None, None, None) if cols is None else (len(cols), cols, {c: p for p, c in enumerate(cols)})
        with self._lock:
            return self._bases.setdefault(level, got)

    @staticmethod
    def _interleave(N, p, r):
        i = r * N + p
        if N > 1 and i in (1, N):
            i = N + 1 - i
        return i

    @staticmethod
    def _deinterleave(N, i):
        if N > 1 and i in (1, N):
            i = N + 1 - i
        r, p = divmod(i, N)
        return p, r

    def _idx(self, level, b):
        """Index of a base-field element of ``level``."""
        col = level_column(level_of(b))
        r = self.rank(b)
        N, _, pos = self._base(level)
        if N is not None:
            return self._interleave(N, pos[col], r)
        edge = 2 * level[1] - 2
        p = col if col <= edge else edge + (col - edge) // 2
        return sigma(p, r)

    def _unidx(self, level, i):
        N, cols, _ = self._base(level)
        if N is not None:
            p, r = self._deinterleave(N, i)
            col = cols[p]
        else:
            p, r = sigma_inv(i)
            edge = 2 * level[1] - 2
            col = p if p <= edge else edge + 2 * (p - edge)
        return self.unrank(col, r)

    # polynomial and rational-function codes over a base

    def _polycode(self, level, a):
        if not a:
            return 0
        return 1 + sigma(self._idx(level, a[-1]) - 1, list_code([self._idx(level, c) for c in a[:-1]]))

    def _unpolycode(self, level, n):
        if n == 0:
            return ()
        lc, rest = sigma_inv(n - 1)
        return tuple(self._unidx(level, i) for i in list_decode(rest)) + (self._unidx(level, lc + 1),)

    def _ncp(self, level, a):
        return sigma(self._idx(level, a[-1]) - 1, list_code([self._idx(level, c) for c in a[:-1]]) - 1)

    def _unncp(self, level, n):
        lc, rest = sigma_inv(n)
        return tuple(self._unidx(level, i) for i in list_decode(rest + 1)) + (self._unidx(level, lc + 1),)

    def _monic_code(self, level, d):
        return list_code([self._idx(level, c) for c in d[:-1]])

    def _unmonic_code(self, level, n):
        return tuple(self._unidx(level, i) for i in list_decode(n)) + (ONE,)

    # Reduced fractions S and all pairs A = {(P, D): D monic} are put in
    # bijection by Schroeder-Bernstein on the inclusion S -> A and the
    # injection g(P, D) = P(T^2) + T D(T^2) from A onto the polynomials whose
    # odd part is monic.  Chains halve the degree at each step and only need
    # coprimality tests, so codes stay linear in the size of the fraction
    # (a continued-fraction code has coefficient swell over QQ and compounds
    # it at every level).  h maps each constant c to (c, 1).

    def _coprime(self, a, b):
        if len(b) == 1 or self.tower.coprime(a, b):
            return True
        return len(self.tower.poly_gcd(a, b)) == 1

    @staticmethod
    def _in_image(w):
        odd = w[1::2]
        while odd and type(odd[-1]) is not Ext and not odd[-1]:
            odd = odd[:-1]
        return bool(odd) and type(odd[-1]) is not Ext and odd[-1] == 1

    @staticmethod
    def _split(w):
        return _trim(w[0::2]), _trim(w[1::2])

    @staticmethod
    def _merge(p, d):
        out = [ZERO] * max(2 * len(p) - 1, 2 * len(d))
        out[0:2 * len(p):2] = p
        out[1:2 * len(d):2] = d
        return _trim(tuple(out))

    def _stops_in_pairs(self, level, w):
        """Whether the ancestor chain of the polynomial ``w`` (as a fraction) ends in A."""
        while self._in_image(w):
            p, d = self._split(w)
            if len(d) > 1:
                return not self._coprime(p, d)
            w = p
        return False

    def _to_pair(self, level, num, den):
        if len(den) == 1 and self._stops_in_pairs(level, num):
            return self._split(num)
        return num, den

    def _from_pair(self, level, p, d):
        if len(d) > 1:
            return (p, d) if self._coprime(p, d) else (self._merge(p, d), (ONE,))
        if self._stops_in_pairs(level, p):
            return self._merge(p, d), (ONE,)
        return p, d

    def _fraction(self, level, num, den):
        if level == BOTTOM:
            return RatFn(fmpq_poly(list(num)), fmpq_poly(list(den)))
        return RatFn(num, den)

    def _rf(self, level, c):
        """Rank of any coefficient (an element of ``B(T)``)."""
        num, den = self._to_pair(level, *coeff_parts(level, c))
        return sigma(self._monic_code(level, den), self._polycode(level, num))

    def _unrf(self, level, n):
        dcode, pcode = sigma_inv(n)
        p = self._unpolycode(level, pcode)
        d = self._unmonic_code(level, dcode)
        return self._fraction(level, *self._from_pair(level, p, d))

    def _nonconst_rf(self, level, c):
        """Rank of a coefficient outside ``B``; the pairs ``(c, 1)`` are skipped."""
        num, den = self._to_pair(level, *coeff_parts(level, c))
        if len(den) == 1:
            return 2 * self._ncp(level, num)
        return 2 * sigma(self._polycode(level, num), self._monic_code(level, den) - 1) + 1

    def _un_nonconst_rf(self, level, n):
        half, odd = divmod(n, 2)
        if odd:
            pcode, dcode = sigma_inv(half)
            p, d = self._unpolycode(level, pcode), self._unmonic_code(level, dcode + 1)
        else:
            p, d = self._unncp(level, half), (ONE,)
        return self._fraction(level, *self._from_pair(level, p, d))

    # ranks within columns

    def rank(self, a):
        """Position of a raw element in the enumeration of its column."""
        if type(a) is not Ext:
            return rational_rank(a)
        got = self._rank.get(a)
        if got is None:
            got = self._rank_ext(a)
            self._rank[a] = got
        return got

    def _rank_ext(self, a):
        level = a.level
        c0, c1, c2, c3 = a.coeffs
        if c1.num or c2.num or c3.num:
            tri = sigma(sigma(self._rf(level, c3), self._rf(level, c2)), self._rf(level, c1))
            return 2 * sigma(tri - 1, self._rf(level, c0))
        return 2 * self._nonconst_rf(level, c0) + 1

    def unrank(self, col, r):
        """Raw element of rank ``r`` in column ``col``."""
        if col == 0:
            return rational_unrank(r)
        key = (col, r)
        got = self._unrank.get(key)
        if got is not None:
            return got
        if not self.tower.column_realized(col):
            raise ColumnNotRealized(f"column {col} is not realized by {self.graph.describe()}")
        level = column_level(col)
        try:
            self.tower.check_level(level)
        except VertexOutOfRange as exc:
            raise ColumnNotRealized(str(exc)) from None
        half, odd = divmod(r, 2)
        zero = coeff_zero(level)
        if odd:
            coeffs = (self._un_nonconst_rf(level, half), zero, zero, zero)
        else:
            x, rf0 = sigma_inv(half)
            s, rf1 = sigma_inv(x + 1)
            rf3, rf2 = sigma_inv(s)
            coeffs = tuple(self._unrf(level, k) for k in (rf0, rf1, rf2, rf3))
        got = self.tower.make(level, coeffs)
        self._unrank[key] = got
        self._rank.setdefault(got, r)
        return got

    def enumerate_column(self, col, rank):
        return TowerElem(self.tower, self.unrank(col, rank))

    # codes

    def in_domain(self, c):
        if c < 0:
            return False
        if self.mode == SEQUENTIAL or not self.graph.is_finite:
            return True
        return self.tower.column_realized(pi_inv(c)[0])

    def encode_raw(self, a):
        col = level_column(level_of(a))
        r = self.rank(a)
        if self.mode == COLUMN:
            c = pi(col, r)
        elif self._global is None:
            c = sigma(col, r)
        else:
            N, _, pos = self._global
            c = self._interleave(N, pos[col], r)
        self._decoded.setdefault(c, a)
        return c

    def decode_raw(self, c):
        got = self._decoded.get(c)
        if got is not None:
            return got
        if not self.in_domain(c):
            raise CodeOutOfDomain(f"code {c} is outside the domain of {self.graph.describe()}")
        if self.mode == COLUMN:
            col, r = pi_inv(c)
        elif self._global is None:
            col, r = sigma_inv(c)
        else:
            N, cols, _ = self._global
            p, r = self._deinterleave(N, c)
            col = cols[p]
        try:
            got = self.unrank(col, r)
        except ColumnNotRealized as exc:
            raise CodeOutOfDomain(str(exc)) from None
        self._decoded[c] = got
        return got

    def encode(self, a):
        raw = a.raw if isinstance(a, TowerElem) else a
        return self.encode_raw(raw)

    def decode(self, c):
        return TowerElem(self.tower, self.decode_raw(c))

    # the oracle surface

    def consts(self):
        return self.zero, self.one

    def _op(self, name, c1, c2):
        key = (name, c1, c2)
        got = self._ops.get(key)
        if got is None:
            a, b = self.decode_raw(c1), self.decode_raw(c2)
            got = self.encode_raw(getattr(self.tower, name)(a, b))
            self._ops[key] = got
        return got

    def add(self, c1, c2):
        return self._op("add", c1, c2)

    def sub(self, c1, c2):
        return self._op("sub", c1, c2)

    def mul(self, c1, c2):
        return self._op("mul", c1, c2)

    def oracle_op(self, c1, c2, op):
        if op not in ("add", "sub", "mul"):
            raise InputError(f"unknown operation {op!r}")
        return self._op(op, c1, c2)

    # vertex codes

    def mu(self, i):
        """Code of ``u_i``; depends only on ``i``, the mode and the vertex count."""
        return self.encode_raw(self.tower.u_raw(i))

    def mu_inv(self, c):
        if not self.in_domain(c):
            return None
        if self.mode == COLUMN:
            col, _ = pi_inv(c)
        else:
            level = level_of(self.decode_raw(c))
            col = level_column(level)
        if col < 2 or col % 2:
            return None
        i = col // 2 - 1
        try:
            return i if self.mu(i) == c else None
        except VertexOutOfRange:
            return None


def domain_codes(F, start=0):
    """Domain codes of an oracle presentation in increasing order."""
    c = start
    while True:
        if F.in_domain(c):
            yield c
        c += 1


def inv_by_search(F, c, budget=10**6):
    """Least domain code ``b`` with ``mul(c, b) = one``, using only the oracle surface."""
    if c == F.zero:
        raise ZeroInverse("the zero code has no inverse")
    steps = 0
    for b in domain_codes(F):
        if steps >= budget:
            raise BudgetExceeded(f"no inverse of code {c} among the first {budget} codes", steps)
        steps += 1
        if F.mul(c, b) == F.one:
            return b


# scrambled copies

class Permutation:
    """Bijection of the code domain: a finite swap list or a named rule.

    Rules: ``identity``, and ``blockrev<k>``, which reverses every block
    ``[k m, k m + k)``; the latter only applies when the domain is all of
    the naturals.
    """

    def __init__(self, swaps=(), rule=None):
        self.rule = rule
        self.swaps = [tuple(int(x) for x in s) for s in swaps]
        self._map = {}
        for a, b in self.swaps:
            if a in self._map or b in self._map or a == b:
                raise InputError(f"swap ({a}, {b}) is not disjoint from the others")
            self._map[a] = b
            self._map[b] = a
        self._block = None
        if rule is not None:
            if self.swaps:
                raise InputError("a permutation is either a swap list or a rule")
            m = re.fullmatch(r"blockrev(\d+)", rule)
            if m:
                self._block = int(m.group(1))
                if self._block < 1:
                    raise InputError("block length must be positive")
            elif rule != "identity":
                raise InputError(f"unknown permutation rule {rule!r}")

    def __call__(self, c):
        if self._block is not None:
            k = self._block
            base = c - c % k
            return base + k - 1 - c % k
        return self._map.get(c, c)

    inverse = __call__  # swaps and block reversals are involutions

    def check(self, F):
        if self._block is not None and not all(F.in_domain(c) for c in range(64)):
            raise InputError("block reversal needs a presentation whose domain is all codes")
        for a, b in self.swaps:
            if not (F.in_domain(a) and F.in_domain(b)):
                raise InputError(f"swap ({a}, {b}) leaves the domain")

    def to_json(self):
        return {"rule": self.rule} if self.rule is not None else {"swaps": [list(s) for s in self.swaps]}


def parse_permutation(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"permutation is not JSON: {exc}") from None
    if isinstance(data, list):
        return Permutation(swaps=data)
    if isinstance(data, dict) and "swaps" in data:
        return Permutation(swaps=data["swaps"])
    if isinstance(data, dict) and "rule" in data:
        return Permutation(rule=str(data["rule"]))
    raise InputError("permutation JSON must be a swap list, {'swaps': [...]} or {'rule': name}")


def random_swaps(F, count, bound, rng):
    """``count`` disjoint swaps among the domain codes below ``bound``."""
    pool = [c for c in range(bound) if F.in_domain(c)]
    if 2 * count > len(pool):
        raise InputError(f"only {len(pool)} domain codes below {bound}")
    picked = rng.sample(pool, 2 * count)
    return Permutation(swaps=[(picked[2 * i], picked[2 * i + 1]) for i in range(count)])


class ScrambledPresentation:
    """Oracle copy of ``F`` with every code relabelled by ``perm``."""

    def __init__(self, F, perm):
        perm.check(F)
        self._F = F
        self._perm = perm
        self.mode = getattr(F, "mode", None)
        self.zero = perm(F.zero)
        self.one = perm(F.one)

    def describe(self):
        return f"scrambled {self._F.describe()} by {json.dumps(self._perm.to_json())}"

    def consts(self):
        return self.zero, self.one

    def in_domain(self, c):
        return c >= 0 and self._F.in_domain(self._perm.inverse(c))

    def _op(self, name, c1, c2):
        back = self._perm.inverse
        return self._perm(getattr(self._F, name)(back(c1), back(c2)))

    def add(self, c1, c2):
        return self._op("add", c1, c2)

    def sub(self, c1, c2):
        return self._op("sub", c1, c2)

    def mul(self, c1, c2):
        return self._op("mul", c1, c2)


def scramble(F, perm):
    return ScrambledPresentation(F, perm)


# line-oriented dumps

def dump_lines(F, bound, mode=None):
    """Header lines, then ``code op code = code`` for all domain pairs below ``bound``."""
    header = {
        "mode": mode or getattr(F, "mode", COLUMN),
        "graph": F.describe(),
        "serialization": SERIALIZATION_VERSION,
        "bound": bound,
        "zero": F.zero,
        "one": F.one,
    }
    yield "# " + json.dumps(header, sort_keys=True)
    codes = [c for c in range(bound) if F.in_domain(c)]
    yield "domain " + " ".join(map(str, codes))
    for a in codes:
        for b in codes:
            for name, sym in (("add", "+"), ("sub", "-"), ("mul", "*")):
                yield f"{a} {sym} {b} = {getattr(F, name)(a, b)}"


class DumpPresentation:
    """Oracle presentation replayed from a dump; queries outside the table fail."""

    SYMBOLS = {"+": "add", "-": "sub", "*": "mul"}

    def __init__(self, text):
        lines = text.splitlines()
        if not lines or not lines[0].startswith("# "):
            raise InputError("dump must start with a '# {json header}' line")
        try:
            self.header = json.loads(lines[0][2:])
        except json.JSONDecodeError as exc:
            raise InputError(f"bad dump header: {exc}") from None
        if self.header.get("serialization") != SERIALIZATION_VERSION:
            raise InputError(f"unsupported serialization {self.header.get('serialization')!r}")
        self.mode = self.header.get("mode")
        self.zero = int(self.header["zero"])
        self.one = int(self.header["one"])
        self.bound = int(self.header["bound"])
        self._domain = set()
        self._table = {}
        for lineno, line in enumerate(lines[1:], 2):
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "domain":
                self._domain.update(int(x) for x in parts[1:])
                continue
            if len(parts) != 5 or parts[3] != "=" or parts[1] not in self.SYMBOLS:
                raise InputError(f"dump line {lineno}: cannot parse {line!r}")
            self._table[(self.SYMBOLS[parts[1]], int(parts[0]), int(parts[2]))] = int(parts[4])

    def describe(self):
        return self.header.get("graph", "dump")

    def consts(self):
        return self.zero, self.one

    def in_domain(self, c):
        if c < self.bound:
            return c in self._domain
        raise BudgetExceeded(f"code {c} lies beyond the dump bound {self.bound}")

    def _op(self, name, c1, c2):
        got = self._table.get((name, c1, c2))
        if got is None:
            raise BudgetExceeded(f"dump has no entry for {c1} {name} {c2}")
        return got

    def add(self, c1, c2):
        return self._op("add", c1, c2)

    def sub(self, c1, c2):
        return self._op("sub", c1, c2)

    def mul(self, c1, c2):
        return self._op("mul", c1, c2)
