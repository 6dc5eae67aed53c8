import itertools

import pytest
from hypothesis import given, strategies as st

from permqubo.poly import (
    Bus,
    Const,
    LinExpr,
    NegVar,
    QuadPoly,
    Var,
    VariableRegistry,
    assignment_from_mask,
    bit_value,
    bus_concat,
    lin_mul,
    lin_square,
    lin_sum,
    negate,
    poly_eval,
)


def test_registry_ids_are_dense_and_names_unique():
    reg = VariableRegistry()
    assert reg.new("a", "input") == 0
    bus = reg.new_bus("b", 3)
    assert bus.var_ids() == [1, 2, 3]
    assert reg.name(2) == "b[1]"
    assert reg.ids("input") == [0]
    assert len(reg) == 4 and 3 in reg and 4 not in reg
    with pytest.raises(ValueError):
        reg.new("a")
    with pytest.raises(ValueError):
        reg.new("c", "bogus")


def test_square_folds_x_squared():
    reg = VariableRegistry()
    x = Var(reg.new("x"))
    p = lin_square(LinExpr.of(x))
    assert p == QuadPoly(0, {x.id: 1})


def test_literals_and_negation():
    assert negate(Var(3)) == NegVar(3)
    assert negate(negate(Var(3))) == Var(3)
    assert negate(Const(1)) == Const(0)
    assert bit_value(NegVar(0), {0: 1}) == 0
    assert bit_value(Var(0), {}) is None


def test_bus_values_lsb_first():
    bus = Bus.const(6, 3)
    assert [b.value for b in bus] == [0, 1, 1]
    assert bus.value({}) == 6
    with pytest.raises(ValueError):
        Bus.const(8, 3)
    joined = bus_concat(Bus.const(1, 1), Bus.const(2, 2))
    assert joined.value({}) == 1 * 4 + 2


def test_eval_names_missing_variable():
    p = QuadPoly(0, {5: 1})
    with pytest.raises(KeyError, match="missing variable 5"):
        poly_eval(p, {})


def test_zero_polynomial_and_sum():
    assert QuadPoly().is_zero()
    p = QuadPoly(1, {0: 2}, {(0, 1): 3})
    assert (p - p).is_zero()
    assert QuadPoly.sum([p, p]) == p * 2


def test_substitute_matches_eval():
    p = QuadPoly(2, {0: 1, 1: -3, 2: 5}, {(0, 1): 4, (1, 2): -7, (0, 2): 2})
    q = p.substitute({1: 1})
    for a, c in itertools.product((0, 1), repeat=2):
        assert poly_eval(q, {0: a, 2: c}) == poly_eval(p, {0: a, 1: 1, 2: c})


def test_assignment_from_mask():
    assert assignment_from_mask([7, 9], 0b10) == {7: 0, 9: 1}


coef = st.integers(-20, 20)
lin_terms = st.dictionaries(st.integers(0, 5), coef, max_size=6)
quad_terms = st.dictionaries(
    st.tuples(st.integers(0, 5), st.integers(0, 5)).filter(lambda t: t[0] != t[1]), coef, max_size=8
)
polys = st.builds(QuadPoly, coef, lin_terms, quad_terms)
points = st.lists(st.integers(0, 1), min_size=6, max_size=6).map(lambda b: dict(enumerate(b)))


@given(polys, polys, points)
def test_addition_is_pointwise(p, q, x):
    assert poly_eval(p + q, x) == poly_eval(p, x) + poly_eval(q, x)


@given(polys, st.integers(-5, 5), points)
def test_scaling_is_pointwise(p, s, x):
    assert poly_eval(p * s, x) == s * poly_eval(p, x)


@given(st.dictionaries(st.integers(0, 5), coef, max_size=6), coef,
       st.dictionaries(st.integers(0, 5), coef, max_size=6), coef, points)
def test_lin_mul_is_pointwise(ta, oa, tb, ob, x):
    a, b = LinExpr(oa, ta), LinExpr(ob, tb)
    assert poly_eval(lin_mul(a, b), x) == a.evaluate(x) * b.evaluate(x)
    assert poly_eval(lin_square(a), x) == a.evaluate(x) ** 2 >= 0


@given(st.lists(st.sampled_from([Var(0), NegVar(1), Const(1), Var(2)]), max_size=6), points)
def test_lin_sum_counts_literals(bits, x):
    assert lin_sum(bits).evaluate(x) == sum(bit_value(b, x) for b in bits)
