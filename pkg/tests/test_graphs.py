import pytest

from graphfield.errors import InputError, VertexOutOfRange
from graphfield.graphs import (
    GraphMorphism, GraphOracle, all_graphs, parse_graph, parse_morphism, random_graphs,
)


def test_graph_file_roundtrip():
    G = parse_graph("# path\nvertices 3\nedge 0 1\nedge 2 1\nedge 1 0\n")
    assert G.edges() == [(1, 0), (2, 1)]
    assert parse_graph(G.to_text()) == G


@pytest.mark.parametrize("text", [
    "edge 0 1\n", "vertices 2\nedge 0 2\n", "vertices 2\nedge 1 1\n", "vertices -1\n",
    "oracle rado\nedge 0 1\n", "oracle nope\n", "vertices 2\nvertices 3\n", "vertices x\n",
])
def test_bad_graph_files(text):
    with pytest.raises(InputError):
        parse_graph(text)


def test_builtins():
    rado = GraphOracle.builtin("rado")
    assert rado.is_edge(0, 1) and rado.is_edge(1, 2) and not rado.is_edge(0, 2) and rado.is_edge(0, 3)
    parity = GraphOracle.builtin("parity")
    assert parity.is_edge(2, 5) and not parity.is_edge(2, 4)
    th = GraphOracle.builtin("threshold5")
    assert th.is_edge(2, 3) and not th.is_edge(1, 3)
    assert not GraphOracle.builtin("empty").is_edge(0, 1)
    assert parity.restrict(3).edges() == [(1, 0), (2, 1)]


def test_vertex_checks():
    G = GraphOracle.finite(2)
    with pytest.raises(VertexOutOfRange):
        G.check_vertex(2)


def test_all_and_random_graphs():
    graphs = list(all_graphs(3))
    assert len(graphs) == 8 and len({tuple(g.edges()) for g in graphs}) == 8
    assert [g.edges() for g in random_graphs(4, 5, 1)] == [g.edges() for g in random_graphs(4, 5, 1)]


def test_morphisms():
    C4 = GraphOracle.finite(4, [(1, 0), (2, 1), (3, 2), (3, 0)])
    rot = parse_morphism("[1, 2, 3, 0]")
    rot.check(C4, C4)
    assert rot.compose(rot) == GraphMorphism(images=[2, 3, 0, 1])
    with pytest.raises(InputError):
        GraphMorphism(images=[0, 2, 0, 1]).check(C4, C4)
    with pytest.raises(InputError):
        parse_morphism("[0, 0]")
    shift = parse_morphism('{"rule": "shift2"}')
    assert shift(5) == 7 and shift.to_json() == {"rule": "shift2"}
