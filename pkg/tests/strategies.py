from flint import fmpq
from hypothesis import strategies as st

from graphfield.expr import Add, Div, Mul, Neg, Num, Pow, Sub, Sym


def _num(pair):
    return Num(fmpq(pair[0], pair[1]))


nums = st.tuples(st.integers(0, 50), st.integers(1, 9)).map(_num)
vertex_syms = st.builds(Sym, st.sampled_from("uv"), st.integers(0, 3))
pair_syms = st.tuples(st.sampled_from("xy"), st.integers(1, 3), st.integers(0, 2)).filter(
    lambda t: t[1] > t[2]).map(lambda t: Sym(t[0], t[1], t[2]))
leaves = nums | vertex_syms | pair_syms


def _extend(children):
    binary = st.sampled_from([Add, Sub, Mul, Div])
    return (st.builds(lambda op, a, b: op(a, b), binary, children, children)
            | st.builds(Neg, children)
            | st.builds(Pow, children, st.integers(0, 4)))


exprs = st.recursive(leaves, _extend, max_leaves=12)
