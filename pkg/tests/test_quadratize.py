import itertools

import pytest
from hypothesis import given, strategies as st

from permqubo.poly import Const, NegVar, Var, VariableRegistry, poly_eval
from permqubo.quadratize import (
    Monomial,
    ProductTable,
    Substitution,
    choose_alpha,
    eval_multilinear,
    literal_product,
    product_penalty,
    quadratize_poly,
    reduce_negative_monomial,
)


def test_product_penalty_zero_iff_consistent():
    s = Substitution((Var(0), Var(1)), 2, 3)
    p = product_penalty(s)
    for a, b, z in itertools.product((0, 1), repeat=3):
        v = poly_eval(p, {0: a, 1: b, 2: z})
        if z == a * b:
            assert v == 0
        else:
            assert v >= 3


def test_product_penalty_on_negated_literal():
    s = Substitution((NegVar(0), Var(1)), 2, 1)
    p = product_penalty(s)
    for a, b, z in itertools.product((0, 1), repeat=3):
        assert (poly_eval(p, {0: a, 1: b, 2: z}) == 0) == (z == (1 - a) * b)


def test_choose_alpha():
    assert choose_alpha([3, -4]) == 8
    assert choose_alpha([Monomial(2, frozenset({0, 1, 2}))]) == 3
    with pytest.raises(ValueError):
        choose_alpha([])


def test_negative_monomial_reduction_minimum():
    reg = VariableRegistry()
    xs = [reg.new(f"x{i}") for i in range(4)]
    m = Monomial(-5, frozenset(xs))
    p = reduce_negative_monomial(m, reg)
    z = len(reg) - 1
    for bits in itertools.product((0, 1), repeat=4):
        asg = dict(zip(xs, bits))
        vals = {zv: poly_eval(p, {**asg, z: zv}) for zv in (0, 1)}
        target = -5 * all(bits)
        assert min(vals.values()) == target
        assert [zv for zv, v in vals.items() if v == target] == [int(all(bits))]
    with pytest.raises(ValueError):
        reduce_negative_monomial(Monomial(5, frozenset(xs)), reg)


def test_literal_product_folds_trivial_cases():
    reg = VariableRegistry()
    x = Var(reg.new("x"))
    assert literal_product(Const(1), x, reg, "a") == (x, False)
    assert literal_product(x, Const(0), reg, "a") == (Const(0), False)
    assert literal_product(x, x, reg, "a") == (x, False)
    assert literal_product(x, NegVar(x.id), reg, "a") == (Const(0), False)
    assert len(reg) == 1


def test_product_table_alpha_dominates_body():
    reg = VariableRegistry()
    a, b = Var(reg.new("a")), Var(reg.new("b"))
    t = ProductTable(reg)
    z = t.product(a, b, "z")
    from permqubo.poly import LinExpr, lin_square

    body = lin_square(LinExpr.of(z) * 3 - 2)
    poly, subs = t.finish(body)
    assert subs[0].alpha >= 2
    for va, vb in itertools.product((0, 1), repeat=2):
        vals = [poly_eval(poly, {a.id: va, b.id: vb, z.id: vz}) for vz in (0, 1)]
        best = min(vals)
        assert vals.index(best) == va * vb and vals.count(best) == 1


monomials = st.dictionaries(
    st.frozensets(st.integers(0, 4), min_size=1, max_size=5), st.integers(-6, 6), max_size=7
)


@given(monomials, st.integers(-3, 3))
def test_quadratize_preserves_minimum_over_aux(terms, offset):
    reg = VariableRegistry()
    for i in range(5):
        reg.new(f"x{i}")
    poly, subs = quadratize_poly(terms, reg, offset)
    aux = list(range(5, len(reg)))
    assert len(aux) <= 2 * len(terms) + 10
    for bits in itertools.product((0, 1), repeat=5):
        asg = dict(enumerate(bits))
        want = eval_multilinear(terms, asg, offset)
        got = min(
            poly_eval(poly, {**asg, **dict(zip(aux, zb))})
            for zb in itertools.product((0, 1), repeat=len(aux))
        )
        assert got == want
