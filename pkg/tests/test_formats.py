import itertools
import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from permqubo.encodings import commute_constraint, match_encoding, perm_encoding, constrain_value
from permqubo.formats import (
    InstanceError,
    dumps,
    encoding_to_json,
    from_qubo,
    ising_from_text,
    ising_text,
    loads,
    poly_from_json,
    poly_to_json,
    spins_of,
    to_ising,
    to_qubo,
)
from permqubo.gates import gt_gate
from permqubo.poly import QuadPoly, Var, VariableRegistry, poly_eval


@pytest.mark.parametrize("e", [
    perm_encoding(3),
    constrain_value(perm_encoding(4, "oet"), 1, 4),
    match_encoding(4, (2, 1)),
    commute_constraint(3, fixed=(2, 3, 1)),
], ids=["perm", "value", "match", "commute"])
def test_instance_roundtrip_is_byte_identical(e):
    text = dumps(encoding_to_json(e))
    inst = loads(text)
    assert inst.poly == e.poly
    assert inst.poly_matches_recipe
    assert inst.dumps() == text


def test_instance_layout():
    doc = json.loads(dumps(encoding_to_json(constrain_value(perm_encoding(3), 2, 1))))
    assert doc["schema_version"] == 1
    assert doc["meta"]["gates"] == [[0, 1], [0, 2], [1, 2]]
    assert [v["id"] for v in doc["variables"]] == list(range(len(doc["variables"])))
    assert doc["decode"]["positions"][1] == ["1", "0"]
    assert all(i < j for i, j, _ in doc["quadratic"])


def test_tampered_file_is_detected():
    e = perm_encoding(3)
    doc = encoding_to_json(e)
    doc["linear"][0][1] += 1
    assert not loads(dumps(doc)).poly_matches_recipe


@pytest.mark.parametrize("text", ["not json", "{}", '{"schema_version": 1, "meta": {}}'])
def test_bad_instances(text):
    with pytest.raises(InstanceError):
        loads(text)


def test_renamed_variable_rejected():
    doc = encoding_to_json(perm_encoding(2))
    doc["variables"][0]["name"] = "other"
    with pytest.raises(InstanceError):
        loads(dumps(doc))


def test_poly_json_rejects_floats_and_unsorted_pairs():
    with pytest.raises(InstanceError):
        poly_from_json({"offset": 0.5, "linear": [], "quadratic": []})
    with pytest.raises(InstanceError):
        poly_from_json({"offset": 0, "linear": [], "quadratic": [[2, 1, 3]]})


coef = st.integers(-30, 30)
polys = st.builds(
    QuadPoly, coef,
    st.dictionaries(st.integers(0, 9), coef, max_size=8),
    st.dictionaries(st.tuples(st.integers(0, 9), st.integers(0, 9)).filter(lambda t: t[0] != t[1]), coef, max_size=12),
)


@given(polys)
def test_poly_json_roundtrip(p):
    assert poly_from_json(json.loads(dumps(poly_to_json(p)))) == p


@given(polys)
def test_qubo_roundtrip(p):
    assert from_qubo(to_qubo(p)) == p


def test_qubo_text():
    p = QuadPoly(0, {}, {(0, 1): 1})
    assert to_qubo(p).splitlines() == ["c offset 0", "p qubo 0 2 0 1", "0 1 1"]
    assert to_qubo(QuadPoly()).splitlines() == ["c offset 0", "p qubo 0 0 0 0"]
    with pytest.raises(InstanceError):
        from_qubo("0 0 1\n")


def test_ising_equals_qubo_on_whole_gadget():
    reg = VariableRegistry()
    g = gt_gate(reg.new_bus("x", 2), reg.new_bus("y", 2), Var(reg.new("c")), reg)
    assert len(reg) == 12
    model = ising_from_text(ising_text(to_ising(g.poly)))
    for bits in itertools.product((0, 1), repeat=len(reg)):
        asg = dict(enumerate(bits))
        assert model.energy(spins_of(asg)) == poly_eval(g.poly, asg)


@given(polys)
def test_ising_preserves_energy(p):
    model = to_ising(p)
    for bits in itertools.product((0, 1), repeat=4):
        asg = {v: 0 for v in range(10)}
        asg.update(enumerate(bits))
        assert model.energy(spins_of(asg)) == poly_eval(p, asg)


def test_half_integer_offsets_are_exact():
    model = to_ising(QuadPoly(0, {0: 1}))
    assert model.offset == Fraction(1, 2) and model.h == {0: Fraction(1, 2)}
    assert "offset 1/2" in ising_text(model)
