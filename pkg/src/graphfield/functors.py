"""Graphs to fields and back.

``F_obj`` builds the coded field of a graph.  The way back, ``G_obj``, sees a
field only through its oracle surface (``zero``, ``one``, ``add``, ``sub``,
``mul``, ``in_domain``): it enumerates the points of ``p = 0`` in increasing
``pi`` order to find the vertex generators, then for every vertex pair
searches the edge curve ``Y_{u_i u_j}`` and the non-edge curve
``Y_{u_i + u_j}`` in strict alternation; exactly one of them has a point.

Morphisms go through the same points: a field homomorphism moves vertex
points to vertex points (``G_mor``), and a graph morphism pins down the
images of all generators (``recover_hom``).
"""

import threading
from itertools import count

from .errors import BudgetExceeded, InputError, NotAPoint
from .graphs import GraphMorphism, GraphOracle
from .presentation import COLUMN, Presentation, inv_by_search, pi, pi_inv
from .tower import Ext, coeff_parts, pair_of_index

DEFAULT_BUDGET = 10**6


class SearchBudget:
    """Caps on candidate codes examined: per search call and overall."""

    def __init__(self, per_call=DEFAULT_BUDGET, total=None):
        if per_call <= 0 or (total is not None and total <= 0):
            raise InputError("search budgets must be positive")
        self.per_call = per_call
        self.total = total
        self.used = 0
        self._lock = threading.Lock()

    def charge(self, steps, what):
        with self._lock:
            self.used += 1
            if self.total is not None and self.used > self.total:
                raise BudgetExceeded(f"global budget of {self.total} codes exhausted during {what}", self.used)
        if steps > self.per_call:
            raise BudgetExceeded(f"{what}: no answer within {self.per_call} candidate codes", steps)


def F_obj(G, mode=COLUMN):
    return Presentation(G, mode)


class Decoder:
    """Oracle-only searches on one presentation, with their memo tables."""

    def __init__(self, F, budget=None):
        self.F = F
        self.budget = budget if budget is not None else SearchBudget()
        self._points = []
        self._next_m = 0
        self._powers = {}
        self._q_parts = {}
        self._edges = {}
        self._lock = threading.RLock()
        one = F.one
        two = F.add(one, one)
        four = F.add(two, two)
        eight = F.add(four, four)
        self._c4 = four
        self._c10 = F.add(eight, two)
        self._c16 = F.add(eight, eight)

    # curve values through the oracle

    def _pows(self, a):
        got = self._powers.get(a)
        if got is None:
            F = self.F
            a2 = F.mul(a, a)
            got = (a2, F.mul(a2, a), F.mul(a2, a2))
            self._powers[a] = got
        return got

    def p_value(self, a, b):
        F = self.F
        _, _, a4 = self._pows(a)
        _, b3, b4 = self._pows(b)
        out = F.add(a4, F.mul(self._c16, F.mul(a, b3)))
        out = F.add(out, F.mul(self._c10, b4))
        out = F.add(out, F.mul(self._c16, b))
        return F.sub(out, self._c4)

    def q_parts(self, a, b):
        """``(S, R)`` with ``q(t, a, b) = S + t R``."""
        key = (a, b)
        got = self._q_parts.get(key)
        if got is None:
            F = self.F
            _, _, a4 = self._pows(a)
            _, b3, b4 = self._pows(b)
            S = F.add(F.add(a4, b4), F.one)
            R = F.add(F.add(F.add(a4, F.mul(a, b3)), b), F.one)
            got = (S, R)
            self._q_parts[key] = got
        return got

    def q_value(self, t, a, b):
        S, R = self.q_parts(a, b)
        return self.F.add(S, self.F.mul(t, R))

    def _candidates(self, start=0):
        in_domain = self.F.in_domain
        for m in count(start):
            a, b = pi_inv(m)
            if in_domain(a) and in_domain(b):
                yield m, a, b

    # vertex points

    def point(self, i):
        """``delta(i)``: the ``i``-th solution of ``p = 0`` in ``pi`` order."""
        with self._lock:
            while len(self._points) <= i:
                self._find_next_point()
            return self._points[i]

    def _find_next_point(self):
        zero = self.F.zero
        steps = 0
        what = f"search for vertex point {len(self._points)}"
        for m, a, b in self._candidates(self._next_m):
            steps += 1
            self.budget.charge(steps, what)
            if self.p_value(a, b) == zero:
                self._points.append((a, b))
                self._next_m = m + 1
                return

    def index_of(self, point):
        """``delta^{-1}``; ``None`` if ``point`` is not a solution of ``p = 0``."""
        a, b = point
        if not (self.F.in_domain(a) and self.F.in_domain(b)):
            return None
        if self.p_value(a, b) != self.F.zero:
            return None
        target = pi(a, b)
        i = 0
        while True:
            got = self.point(i)
            if got == point:
                return i
            if pi(*got) > target:
                return None
            i += 1

    # pair points and edges

    def curve_point(self, t, what="curve search"):
        """First point of ``Y_t`` in ``pi`` order."""
        zero = self.F.zero
        steps = 0
        for m, a, b in self._candidates():
            steps += 1
            self.budget.charge(steps, what)
            if self.q_value(t, a, b) == zero:
                return a, b

    def decide_pair(self, i, j):
        """Dovetail the two curves for ``{i, j}``; returns ``(is_edge, point, m)``."""
        key = (max(i, j), min(i, j))
        got = self._edges.get(key)
        if got is not None:
            return got
        ui, uj = self.point(key[0])[0], self.point(key[1])[0]
        t_edge = self.F.mul(ui, uj)
        t_non = self.F.add(ui, uj)
        zero = self.F.zero
        steps = 0
        what = f"dovetail for pair {key}"
        for m, a, b in self._candidates():
            for is_edge, t in ((True, t_edge), (False, t_non)):
                steps += 1
                self.budget.charge(steps, what)
                if self.q_value(t, a, b) == zero:
                    got = (is_edge, (a, b), m)
                    self._edges[key] = got
                    return got

    def graph(self, n):
        edges = [(i, j) for i in range(n) for j in range(i) if self.decide_pair(i, j)[0]]
        return GraphOracle.finite(n, edges)


_decoders_lock = threading.Lock()


def decoder_for(F, budget=None):
    """Shared ``Decoder`` per presentation object, so repeated calls reuse searches.

    The decoder lives on the presentation, so it is freed together with it.
    """
    with _decoders_lock:
        got = getattr(F, "_shared_decoder", None)
        if got is None:
            got = Decoder(F, budget)
            F._shared_decoder = got
        elif budget is not None:
            got.budget = budget
        return got


def delta(F, i, budget=None):
    return decoder_for(F, budget).point(i)


def G_obj(F, n, budget=None):
    return decoder_for(F, budget).graph(n)


def epsilon(G, i, F=None):
    """Vertex point ``(code u_i, code v_i)`` read off the construction."""
    F = F if F is not None else F_obj(G)
    G.check_vertex(i)
    return F.encode_raw(F.tower.u_raw(i)), F.encode_raw(F.tower.v_raw(i))


# homomorphisms

class FieldHomOracle:
    """Code-to-code map between presentations, fixed by the images of generators.

    ``images`` is a callable from a level to the target codes of its
    ``(transcendental, algebraic)`` generators.  Codes of a native source are
    decoded to normal forms and evaluated at the images; other sources go
    through an expression search.  A native target evaluates in its tower,
    any other target through its oracle operations.
    """

    def __init__(self, source, target, images, budget=None, word_source=None):
        self.source = source
        self.target = target
        self._images = images
        self._cache = {}
        self._gen_raw = {}
        self.budget = budget if budget is not None else SearchBudget()
        self._words = word_source

    def generator_images(self, level):
        return self._images(level)

    def __call__(self, c):
        got = self._cache.get(c)
        if got is None:
            if isinstance(self.source, Presentation):
                raw = self.source.decode_raw(c)
                if isinstance(self.target, Presentation):
                    got = self.target.encode_raw(self._eval_native(raw))
                else:
                    got = self._eval_oracle(raw)
            else:
                if self._words is None:
                    raise InputError("a non-native source needs an expression search")
                got = self._words.apply(self, c)
            self._cache[c] = got
        return got

    # evaluation in a native target tower

    def _gen_native(self, level):
        got = self._gen_raw.get(level)
        if got is None:
            got = tuple(self.target.decode_raw(c) for c in self._images(level))
            self._gen_raw[level] = got
        return got

    def _eval_native(self, a):
        T = self.target.tower
        if type(a) is not Ext:
            return a
        tr, al = self._gen_native(a.level)
        total = T.zero
        alpow = T.one
        for k, c in enumerate(a.coeffs):
            if c.num:
                num, den = coeff_parts(a.level, c)
                val = T.div(_horner(T, [self._eval_native(e) for e in num], tr),
                            _horner(T, [self._eval_native(e) for e in den], tr))
                total = T.add(total, T.mul(val, alpow))
            if k < 3:
                alpow = T.mul(alpow, al)
        return total

    # evaluation through the target's oracle surface

    def _const_code(self, q):
        F = self.target
        num, den = int(q.p), int(q.q)
        out = _int_code(F, abs(num))
        if num < 0:
            out = F.sub(F.zero, out)
        if den != 1:
            out = F.mul(out, inv_by_search(F, _int_code(F, den), self.budget.per_call))
        return out

    def _eval_oracle(self, a):
        F = self.target
        if type(a) is not Ext:
            return self._const_code(a)
        tr, al = self._images(a.level)
        total = F.zero
        alpow = F.one
        for k, c in enumerate(a.coeffs):
            if c.num:
                num, den = coeff_parts(a.level, c)
                n = _horner_oracle(F, [self._eval_oracle(e) for e in num], tr)
                d = _horner_oracle(F, [self._eval_oracle(e) for e in den], tr)
                if d != F.one:
                    n = F.mul(n, inv_by_search(F, d, self.budget.per_call))
                total = F.add(total, F.mul(n, alpow))
            if k < 3:
                alpow = F.mul(alpow, al)
        return total

    def compose(self, other):
        """``self`` after ``other``, evaluated code by code."""
        return ComposedHom(self, other)


class ComposedHom:
    def __init__(self, outer, inner):
        self.outer = outer
        self.inner = inner
        self.source = inner.source
        self.target = outer.target

    def __call__(self, c):
        return self.outer(self.inner(c))


def _horner(T, coeffs, x):
    acc = T.zero
    for c in reversed(coeffs):
        acc = T.add(T.mul(acc, x), c)
    return acc


def _horner_oracle(F, coeffs, x):
    acc = F.zero
    for c in reversed(coeffs):
        acc = F.add(F.mul(acc, x), c)
    return acc


def _int_code(F, n):
    """Code of the integer ``n >= 0`` by doubling from ``one``."""
    out = F.zero
    power = F.one
    while n:
        if n & 1:
            out = F.add(out, power)
        n >>= 1
        if n:
            power = F.add(power, power)
    return out


class ExpressionSearch:
    """Slow path for non-native sources: express a code in the generator codes.

    Words are grown in rounds from ``one`` and the generator codes of the
    first ``n`` vertices and their pairs, combining earlier values with
    ``add``, ``sub`` and ``mul``.  A code ``c`` is matched either by a word
    directly or as a quotient ``w' / w`` once ``c * w`` equals a known word
    ``w'``.  The image is then computed by replaying the words in the target.
    """

    def __init__(self, generators, max_values=20000):
        # generators: list of (source code, target code)
        self.generators = generators
        self.max_values = max_values
        self._values = None
        self._frontier = None

    def _seed(self, F):
        self._values = {F.one: ("one",)}
        for code, image in self.generators:
            self._values.setdefault(code, ("gen", image))
        self._frontier = list(self._values)

    def _match(self, F, c):
        values = self._values
        if c in values:
            return c, None
        for w in values:
            if w != F.zero:
                cw = F.mul(c, w)
                if cw in values:
                    return cw, w
        return None

    def _grow(self, F):
        values = self._values
        fresh = []
        for a in self._frontier:
            for b in list(values):
                for name in ("add", "sub", "mul"):
                    r = getattr(F, name)(a, b)
                    if r not in values:
                        values[r] = (name, a, b)
                        fresh.append(r)
                        if len(values) >= self.max_values:
                            self._frontier = fresh
                            return bool(fresh)
        self._frontier = fresh
        return bool(fresh)

    def apply(self, hom, c):
        F = hom.source
        if self._values is None:
            self._seed(F)
        while True:
            got = self._match(F, c)
            if got is not None:
                break
            if len(self._values) >= self.max_values or not self._grow(F):
                raise BudgetExceeded(f"no expression for code {c} among {len(self._values)} words")
        num, den = got
        T = hom.target
        out = self._replay(T, num)
        if den is not None:
            out = T.mul(out, inv_by_search(T, self._replay(T, den), hom.budget.per_call))
        return out

    def _replay(self, T, code):
        memo = {}

        def go(k):
            if k in memo:
                return memo[k]
            entry = self._values[k]
            if entry[0] == "one":
                out = T.one
            elif entry[0] == "gen":
                out = entry[1]
            else:
                out = getattr(T, entry[0])(go(entry[1]), go(entry[2]))
            memo[k] = out
            return out

        return go(code)


def _levels_of(n):
    levels = [(0, i) for i in range(n)]
    levels += [(1, k) for k in range(1, n * (n - 1) // 2 + 1)]
    return levels


class _RecoveredImages:
    """Generator images of the homomorphism determined by a graph morphism."""

    def __init__(self, source, target, g, budget):
        self.source = source
        self.target = target
        self.g = g
        self.dsrc = decoder_for(source, budget)
        self.dtgt = decoder_for(target, budget)
        self._cache = {}

    def source_point(self, level):
        kind, idx = level
        if kind == 0:
            return self.dsrc.point(idx)
        return self.dsrc.decide_pair(*pair_of_index(idx))[1]

    def __call__(self, level):
        got = self._cache.get(level)
        if got is not None:
            return got
        kind, idx = level
        if kind == 0:
            got = self.dtgt.point(self.g(idx))
        else:
            i, j = pair_of_index(idx)
            gi, gj = self.g(i), self.g(j)
            if gi == gj:
                raise InputError("graph morphism is not injective")
            is_edge = self.dsrc.decide_pair(i, j)[0]
            if self.dtgt.decide_pair(gi, gj)[0] != is_edge:
                raise InputError(f"graph morphism does not preserve and reflect pair {{{i},{j}}}")
            ui, uj = self.dtgt.point(gi)[0], self.dtgt.point(gj)[0]
            t = self.target.mul(ui, uj) if is_edge else self.target.add(ui, uj)
            got = self.dtgt.curve_point(t, f"point of the image curve for pair {(i, j)}")
        self._cache[level] = got
        return got


def recover_hom(F, F2, g, budget=None, n=None):
    """The field homomorphism ``f`` with ``G_mor(f) = g``.

    A non-native source needs ``n``, the vertex prefix whose generators the
    expression search may use.
    """
    images = _RecoveredImages(F, F2, g, budget)
    words = None
    if not isinstance(F, Presentation):
        if n is None:
            raise InputError("recovering a homomorphism from a non-native source needs a vertex count")
        gens = []
        for level in _levels_of(n):
            gens.extend(zip(images.source_point(level), images(level)))
        words = ExpressionSearch(gens)
    return FieldHomOracle(F, F2, images, budget, words)


def F_mor(G, G2, g, F=None, F2=None, budget=None):
    """``F_omega(g)``, computed as the homomorphism recovered from ``g``."""
    F = F if F is not None else F_obj(G)
    F2 = F2 if F2 is not None else F_obj(G2)
    return recover_hom(F, F2, g, budget)


def G_mor(F, F2, f, n, budget=None, verify=True):
    """Vertex map ``delta_{F2}^{-1} o f o delta_F`` on the first ``n`` vertices."""
    dsrc, dtgt = decoder_for(F, budget), decoder_for(F2, budget)
    images = []
    for i in range(n):
        a, b = dsrc.point(i)
        fa, fb = f(a), f(b)
        j = dtgt.index_of((fa, fb))
        if j is None:
            raise NotAPoint(f"image of vertex point {i} is not a point of X in the target")
        images.append(j)
    g = GraphMorphism(images=images)
    if verify:
        for i in range(n):
            for j in range(i):
                if dsrc.decide_pair(i, j)[0] != dtgt.decide_pair(images[i], images[j])[0]:
                    raise NotAPoint(f"pair {{{i},{j}}} is not preserved and reflected")
    return g
