import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from vonstaudt.etr import (ChainBoundError, ConstraintSystem, Constraint, ETRSyntaxError,
                           MissingValueError, check_assignment, const_chain, format_assignment,
                           load_system, parse, parse_assignment, pow_tower_chain, serialize,
                           solve_forward, system_from_json, system_to_json)
from vonstaudt.surd import sqrt


def test_parse_single_constraint():
    cs = parse("VAR a\nONE a\n")
    assert cs.vars == ("a",)
    assert cs.constraints == (Constraint("ONE", ("a",)),)


def test_parse_rejects_undeclared():
    with pytest.raises(ETRSyntaxError, match="line 1"):
        parse("ADD a b c\nVAR a\n")


def test_parse_rejects_duplicate_declaration():
    with pytest.raises(ETRSyntaxError, match="line 2"):
        parse("VAR x\nVAR x\n")


def test_parse_squaring_with_comments():
    cs = parse("# squaring\nVAR x\nVAR y\nMUL x x y  # y = x^2\n")
    assert cs.constraints == (Constraint("MUL", ("x", "x", "y")),)


def test_parse_arity_error():
    with pytest.raises(ETRSyntaxError, match="line 2"):
        parse("VAR x\nADD x x\n")


def test_check_examples():
    cs = parse("VAR x y\nMUL x x y\n")
    assert check_assignment(cs, {"x": 3, "y": 9}).ok
    cs = parse("VAR x\nPOS x\n")
    assert not check_assignment(cs, {"x": 0}).ok
    cs = parse("VAR x y z\nADD x y z\n")
    rep = check_assignment(cs, {"x": 2, "y": 3, "z": 5})
    assert rep.ok and rep.distinct


def test_check_reports_collisions():
    cs = parse("VAR x y z\nADD x y z\n")
    rep = check_assignment(cs, {"x": 0, "y": 3, "z": 3})
    assert rep.ok and not rep.distinct
    assert rep.collisions == [("y", "z")]


def test_check_with_surds():
    cs = parse("VAR x two\nMUL x x two\n")
    assert check_assignment(cs, {"x": sqrt(2), "two": 2}).ok
    rep = check_assignment(cs, {"x": sqrt(2), "two": sqrt(2) * sqrt(2)})
    assert rep.ok and rep.distinct


def test_missing_value():
    with pytest.raises(MissingValueError):
        check_assignment(parse("VAR x\nPOS x\n"), {})


def test_const_chain_examples():
    cs, out = const_chain(1)
    assert [str(c) for c in cs.constraints] == [f"ONE {out}"]
    cs, out = const_chain(2)
    one = cs.vars[0]
    assert [str(c) for c in cs.constraints] == [f"ONE {one}", f"ADD {one} {one} {out}"]
    cs, out = const_chain(5)
    assert len(cs.constraints) <= 5
    assert solve_forward(cs)[out] == 5


def test_const_chain_negative():
    for k in range(-2, -300, -1):
        cs, out = const_chain(k)
        assert solve_forward(cs)[out] == k
        assert len(cs.constraints) <= 2 * math.ceil(math.log2(-k)) + 2
    cs, out = const_chain(-1)
    assert solve_forward(cs)[out] == -1
    # ONE, the shared zero and the negation
    assert len(cs.constraints) == 3


def test_const_chain_unary():
    cs, out = const_chain(6, unary=True)
    assert len(cs.constraints) == 6
    assert solve_forward(cs)[out] == 6


def test_const_chain_bounds():
    with pytest.raises(ValueError):
        const_chain(0)
    with pytest.raises(ChainBoundError):
        const_chain(10**13)


def test_pow_tower_examples():
    cs, out = pow_tower_chain(0)
    assert solve_forward(cs)[out] == 2
    cs, out = pow_tower_chain(2)
    assert solve_forward(cs)[out] == 16
    assert len(cs.constraints) == 4
    cs, out = pow_tower_chain(1, small=True)
    assert solve_forward(cs)[out] == Fraction(1, 4)
    with pytest.raises(ChainBoundError):
        pow_tower_chain(-1)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10**6))
def test_chain_solution_is_forced_and_checks(k):
    cs, out = const_chain(k)
    vals = solve_forward(cs)
    assert set(vals) == set(cs.vars)
    assert vals[out] == k
    assert check_assignment(cs, vals).ok
    assert len(cs.constraints) <= 2 * math.ceil(math.log2(k)) + 2


names = st.sampled_from(["a", "b", "c", "x1", "y_2"])


@st.composite
def systems(draw):
    vs = sorted(set(draw(st.lists(names, min_size=1, max_size=5))))
    cons = []
    for _ in range(draw(st.integers(0, 6))):
        op = draw(st.sampled_from(["ADD", "MUL", "ONE", "POS"]))
        k = 3 if op in ("ADD", "MUL") else 1
        cons.append(Constraint(op, tuple(draw(st.sampled_from(vs)) for _ in range(k))))
    return ConstraintSystem(tuple(vs), tuple(cons), draw(st.booleans()))


@settings(max_examples=100, deadline=None)
@given(systems())
def test_serialize_round_trip(cs):
    assert parse(serialize(cs)) == cs
    assert system_from_json(json.loads(json.dumps(system_to_json(cs)))) == cs
    assert load_system(json.dumps(system_to_json(cs))) == cs


def test_assignment_round_trip():
    a = {"x": Fraction(-3, 2), "y": sqrt(2) + 1}
    back = parse_assignment(format_assignment(a))
    assert back["x"] == a["x"] and back["y"] == a["y"]
    assert parse_assignment('{"x": "1/2"}') == {"x": Fraction(1, 2)}
    with pytest.raises(ETRSyntaxError, match="line 1"):
        parse_assignment("x\n")
