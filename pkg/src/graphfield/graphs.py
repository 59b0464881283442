"""Graph oracles, graph morphisms and their text formats.

A graph file is line oriented ASCII::

    # comment
    vertices 4
    edge 1 0
    edge 3 2

or a single ``oracle <name>`` header naming an infinite builtin.  Builtins:
``empty``, ``complete``, ``parity`` (edge iff ``i + j`` is odd), ``rado``
(for ``i < j``, edge iff bit ``i`` of ``j`` is set) and ``threshold<c>``
(edge iff ``i + j >= c``).
"""

import json
import random
import re
from itertools import combinations

from .errors import InputError, VertexOutOfRange


def _rado(i, j):
    lo, hi = min(i, j), max(i, j)
    return (hi >> lo) & 1 == 1


BUILTINS = {
    "empty": lambda i, j: False,
    "complete": lambda i, j: True,
    "parity": lambda i, j: (i + j) % 2 == 1,
    "rado": _rado,
}


def builtin_predicate(name):
    if name in BUILTINS:
        return BUILTINS[name]
    m = re.fullmatch(r"threshold(\d+)", name)
    if m:
        c = int(m.group(1))
        return lambda i, j: i + j >= c
    raise InputError(f"unknown graph oracle {name!r}")


class GraphOracle:
    """Decidable irreflexive symmetric edge relation on ``{0..n-1}`` or on all naturals."""

    def __init__(self, n=None, edges=(), oracle=None):
        if (n is None) == (oracle is None):
            raise InputError("give exactly one of a vertex count or an oracle name")
        self.n = n
        self.oracle = oracle
        if oracle is not None:
            self._pred = builtin_predicate(oracle)
            self._edges = None
        else:
            keyed = set()
            for i, j in edges:
                if i == j:
                    raise InputError(f"self-loop at vertex {i}")
                if not (0 <= i < n and 0 <= j < n):
                    raise InputError(f"edge {i} {j} outside 0..{n - 1}")
                keyed.add((max(i, j), min(i, j)))
            self._edges = frozenset(keyed)

    @classmethod
    def finite(cls, n, edges=()):
        return cls(n=n, edges=edges)

    @classmethod
    def builtin(cls, name):
        return cls(oracle=name)

    @classmethod
    def random(cls, n, rng, p=0.5):
        return cls(n=n, edges=[e for e in combinations(range(n), 2) if rng.random() < p])

    @property
    def is_finite(self):
        return self.n is not None

    def check_vertex(self, i):
        if i < 0 or (self.n is not None and i >= self.n):
            raise VertexOutOfRange(f"vertex {i} not in graph with {self.n} vertices")

    def is_edge(self, i, j):
        if i == j:
            raise ValueError("edge queries take two distinct vertices")
        self.check_vertex(i)
        self.check_vertex(j)
        if self._edges is not None:
            return (max(i, j), min(i, j)) in self._edges
        return self._pred(i, j)

    def restrict(self, n):
        """Induced subgraph on ``{0..n-1}`` as a finite graph."""
        if self.n is not None and n > self.n:
            raise VertexOutOfRange(f"cannot restrict {self.n} vertices to {n}")
        return GraphOracle.finite(n, [(i, j) for i in range(n) for j in range(i) if self.is_edge(i, j)])

    def edges(self, n=None):
        """Sorted ``(i, j)`` pairs with ``i > j`` among the first ``n`` vertices."""
        n = self.n if n is None else n
        if n is None:
            raise ValueError("infinite graph needs an explicit vertex bound")
        return [(i, j) for i in range(n) for j in range(i) if self.is_edge(i, j)]

    def describe(self):
        if self.oracle is not None:
            return f"oracle {self.oracle}"
        return f"vertices {self.n}; edges " + " ".join(f"{i}-{j}" for i, j in sorted(self._edges))

    def to_text(self):
        if self.oracle is not None:
            return f"oracle {self.oracle}\n"
        lines = [f"vertices {self.n}"] + [f"edge {i} {j}" for i, j in sorted(self._edges)]
        return "\n".join(lines) + "\n"

    def __eq__(self, other):
        if not isinstance(other, GraphOracle):
            return NotImplemented
        if self.oracle is not None or other.oracle is not None:
            return self.oracle == other.oracle and self.n == other.n
        return self.n == other.n and self._edges == other._edges

    def __hash__(self):
        return hash((self.n, self.oracle, self._edges))

    def __repr__(self):
        return f"GraphOracle({self.describe()})"


def parse_graph(text):
    n = None
    oracle = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "vertices" and len(parts) == 2:
                if n is not None or oracle is not None:
                    raise InputError(f"line {lineno}: duplicate header")
                n = int(parts[1])
                if n < 0:
                    raise InputError(f"line {lineno}: negative vertex count")
            elif parts[0] == "oracle" and len(parts) == 2:
                if n is not None or oracle is not None:
                    raise InputError(f"line {lineno}: duplicate header")
                oracle = parts[1]
                builtin_predicate(oracle)
            elif parts[0] == "edge" and len(parts) == 3:
                edges.append((int(parts[1]), int(parts[2])))
            else:
                raise InputError(f"line {lineno}: cannot parse {raw!r}")
        except ValueError as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(f"line {lineno}: {exc}") from None
    if oracle is not None:
        if edges:
            raise InputError("oracle graphs admit no edge lines")
        return GraphOracle.builtin(oracle)
    if n is None:
        raise InputError("graph file needs a 'vertices <n>' or 'oracle <name>' header")
    return GraphOracle.finite(n, edges)


def read_graph(path):
    with open(path) as fh:
        return parse_graph(fh.read())


class GraphMorphism:
    """Injective vertex map that preserves and reflects edges.

    Finite morphisms carry an explicit image list; infinite ones a named rule
    (``identity`` or ``shift<k>``, mapping ``i`` to ``i + k``).
    """

    def __init__(self, images=None, rule=None):
        if (images is None) == (rule is None):
            raise InputError("a morphism needs an image list or a rule name")
        self.images = None if images is None else tuple(images)
        self.rule = rule
        if rule is not None:
            m = re.fullmatch(r"shift(\d*)", rule)
            if rule == "identity":
                self._fn = lambda i: i
            elif m:
                k = int(m.group(1) or 1)
                self._fn = lambda i: i + k
            else:
                raise InputError(f"unknown morphism rule {rule!r}")
        elif len(set(self.images)) != len(self.images):
            raise InputError("morphism is not injective")

    @classmethod
    def identity(cls, n):
        return cls(images=range(n))

    def __call__(self, i):
        if self.images is not None:
            if not 0 <= i < len(self.images):
                raise VertexOutOfRange(f"morphism undefined at {i}")
            return self.images[i]
        return self._fn(i)

    @property
    def size(self):
        return None if self.images is None else len(self.images)

    def compose(self, other):
        """``self`` after ``other``."""
        if self.images is not None and other.images is not None:
            return GraphMorphism(images=[self(other(i)) for i in range(len(other.images))])
        if other.images is not None:
            return GraphMorphism(images=[self(i) for i in other.images])
        raise InputError("composition of rule morphisms needs a finite right factor")

    def check(self, source, target, n=None):
        """Raise ``InputError`` unless edges are preserved and reflected on ``n`` vertices."""
        n = self.size if n is None else n
        for i in range(n):
            target.check_vertex(self(i))
        for i in range(n):
            for j in range(i):
                if source.is_edge(i, j) != target.is_edge(self(i), self(j)):
                    raise InputError(f"pair {{{i},{j}}} is not preserved and reflected")

    def to_json(self):
        return {"map": list(self.images)} if self.images is not None else {"rule": self.rule}

    def __eq__(self, other):
        if not isinstance(other, GraphMorphism):
            return NotImplemented
        return self.images == other.images and self.rule == other.rule

    def __repr__(self):
        return f"GraphMorphism({self.to_json()})"


def parse_morphism(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"morphism is not JSON: {exc}") from None
    if isinstance(data, list):
        return GraphMorphism(images=[int(x) for x in data])
    if isinstance(data, dict) and "map" in data:
        return GraphMorphism(images=[int(x) for x in data["map"]])
    if isinstance(data, dict) and "rule" in data:
        return GraphMorphism(rule=str(data["rule"]))
    raise InputError("morphism JSON must be a list, {'map': [...]} or {'rule': name}")


def all_graphs(n):
    """Every labeled graph on ``n`` vertices."""
    pairs = [(i, j) for i in range(n) for j in range(i)]
    for mask in range(1 << len(pairs)):
        yield GraphOracle.finite(n, [p for b, p in enumerate(pairs) if mask >> b & 1])


def random_graphs(n, count, seed):
    rng = random.Random(seed)
    return [GraphOracle.random(n, rng) for _ in range(count)]
