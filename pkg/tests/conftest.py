import random

import pytest
from hypothesis import HealthCheck, settings

from graphfield.graphs import GraphOracle
from graphfield.presentation import Presentation
from graphfield.tower import Tower

settings.register_profile(
    "graphfield", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("graphfield")


P3 = GraphOracle.finite(3, [(1, 0), (2, 1)])
EDGE2 = GraphOracle.finite(2, [(1, 0)])
NONEDGE2 = GraphOracle.finite(2)


@pytest.fixture(scope="session")
def p3_tower():
    return Tower(P3)


@pytest.fixture(scope="session")
def p3_presentation():
    return Presentation(P3)


def generators(T, n_vertices=2, pairs=((1, 0),)):
    gens = []
    for i in range(n_vertices):
        gens += [T.u_raw(i), T.v_raw(i)]
    for i, j in pairs:
        gens += [T.x_raw(i, j), T.y_raw(i, j)]
    return gens


def random_element(T, rng, gens, terms=3, degree=2, quotient=False):
    """Sum of a few small monomials in ``gens``, optionally divided by another such sum."""
    def poly():
        out = T.zero
        for _ in range(terms):
            mono = T.const(rng.randint(-5, 5)) if rng.random() < 0.8 else T.const(f"{rng.randint(-5, 5)}/{rng.randint(1, 4)}")
            for _ in range(rng.randint(0, degree)):
                mono = T.mul(mono, rng.choice(gens))
            out = T.add(out, mono)
        return out

    a = poly()
    if quotient:
        b = poly()
        if not T.is_zero(b):
            a = T.div(a, b)
    return a


@pytest.fixture
def rng():
    return random.Random(20241014)
