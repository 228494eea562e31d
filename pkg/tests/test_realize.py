import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from vonstaudt.etr import check_assignment, parse, solve_forward
from vonstaudt.exact import det3
from vonstaudt.gadgets import compile_system, emit_add, emit_mul, init_frame
from vonstaudt.realize import (GeometricInfeasibility, InvalidAssignmentError, Placer,
                               RealizationError,
                               Realization, check_realization, normalize_point, orientation_signs,
                               read_value, realize, send_line_to_infinity)
from vonstaudt.surd import sqrt


class FixedPlacer(Placer):
    """Helpers a = (1, 1, 0) and b = (0, 1, 0) instead of random ones."""

    def __init__(self, cm):
        super().__init__(cm, random.Random(0))
        self._fixed = iter([(1, 1, 0), (0, 1, 0)])

    def sample_infinity(self):
        return tuple(Fraction(c) for c in next(self._fixed))


def worked(emit):
    cm = init_frame()
    l = cm.line_id("l")
    pts = []
    for v in "xyz":
        pts.append(cm.add_point(f"var:{v}", "var"))
        cm.put_on_line(pts[-1], l)
    t = emit(cm, *pts)
    placer = FixedPlacer(cm)
    for label, p in (("ZERO", (0, 0, 1)), ("ONE", (1, 0, 1)), ("INF", (1, 0, 0)),
                     ("var:x", (2, 0, 1)), ("var:y", (3, 0, 1))):
        placer.place(cm.point(label), p, check=False)
    placer.place_trace(t)
    return {k: placer.coords[v] for k, v in t.helpers.items()}, placer.coords[pts[2]]


def test_worked_add():
    h, z = worked(emit_add)
    assert h["c"] == normalize_point((0, -2, 1))
    assert h["d"] == normalize_point((3, -2, 1))
    assert z == normalize_point((5, 0, 1))


def test_worked_mul():
    h, z = worked(emit_mul)
    assert h["c"] == normalize_point((1, -1, 1))
    assert h["d"] == normalize_point((3, -3, 1))
    assert z == normalize_point((6, 0, 1))


def realize_text(text, values, seed=0):
    cs = parse(text)
    cm = compile_system(cs)
    return cs, cm, realize(cm, values, seed=seed, cs=cs)


def test_realization_represents_compiled_matroid():
    cs, cm, r = realize_text("VAR x y z w\nADD x y z\nMUL x z w\n", {"x": 2, "y": 3, "z": 5, "w": 10})
    assert check_realization(r, cm.to_matroid())
    for v, val in (("x", 2), ("y", 3), ("z", 5), ("w", 10)):
        assert read_value(r, cm.var_point[v]) == val
        assert read_value(r, f"var:{v}") == val


def test_realization_with_surds():
    cs, cm, r = realize_text("VAR x t y\nMUL x x t\nADD x t y\n",
                             {"x": sqrt(2), "t": 2, "y": 2 + sqrt(2)})
    assert check_realization(r, cm.to_matroid())
    assert read_value(r, "var:y") == 2 + sqrt(2)


def test_pos_realizes_positive_values():
    for x in (Fraction(1, 4), Fraction(9)):
        cs, cm, r = realize_text("VAR x y z\nADD x y z\nPOS x\n", {"x": x, "y": 2, "z": x + 2})
        assert check_realization(r, cm.to_matroid())


def test_pos_of_negative_is_infeasible():
    cs = parse("VAR x\nPOS x\n")
    cm = compile_system(cs)
    with pytest.raises(GeometricInfeasibility):
        realize(cm, {"x": -1})
    with pytest.raises(InvalidAssignmentError):
        realize(cm, {"x": -1}, cs=cs)


def test_pos_helper_collision_is_reported():
    # both square roots of 9 are already variable values, so the helper s has nowhere to go
    text = "VAR x y z t\nMUL x x t\nPOS t\nADD x z y\n"
    cs, cm = parse(text), compile_system(parse(text))
    values = {"x": -3, "y": 3, "z": 6, "t": 9}
    assert check_assignment(cs, values).ok
    with pytest.raises(RealizationError, match="square roots collide"):
        realize(cm, values, cs=cs)


def test_bad_assignments():
    cs = parse("VAR x y z\nADD x y z\n")
    cm = compile_system(cs)
    with pytest.raises(InvalidAssignmentError):
        realize(cm, {"x": 2, "y": 3, "z": 6}, cs=cs)
    with pytest.raises(InvalidAssignmentError):
        realize(cm, {"x": 1, "y": 3, "z": 4})


def test_realize_is_deterministic():
    text, vals = "VAR x y z\nMUL x y z\n", {"x": 2, "y": -3, "z": -6}
    a = realize_text(text, vals, seed=5)[2]
    b = realize_text(text, vals, seed=5)[2]
    assert a.points == b.points


def test_send_line_to_infinity():
    cs, cm, r = realize_text("VAR x y z\nADD x y z\n", {"x": 2, "y": 3, "z": 5})
    # a vertical line left of every finite point
    far = max(abs(p[0] / p[2]) for p in r.points if p[2] != 0) + 1
    s = send_line_to_infinity(r, (1, 0, far))
    before, after = orientation_signs(r.points), orientation_signs(s.points)
    zeros = {t for t, v in before.items() if v == 0}
    assert zeros == {t for t, v in after.items() if v == 0}
    assert check_realization(s, cm.to_matroid())
    with pytest.raises(ValueError):
        send_line_to_infinity(r, (0, 1, 0))
    t = send_line_to_infinity(r, (0, 1, 0), on_line=[p for p, q in enumerate(r.points) if q[1] == 0])
    assert all(t.points[i][2] == 0 for i in (r.index("ZERO"), r.index("ONE")))


def test_read_value_rejects_off_line_points():
    cs, cm, r = realize_text("VAR x y z\nADD x y z\n", {"x": 2, "y": 3, "z": 5})
    with pytest.raises(ValueError):
        read_value(r, (0, 1, 1))
    with pytest.raises(ValueError):
        read_value(r, "INF")


values = st.fractions(min_value=-20, max_value=20, max_denominator=7).filter(lambda v: v not in (0, 1))


@settings(max_examples=25, deadline=None)
@given(values, values, st.sampled_from(["ADD", "MUL"]), st.integers(0, 10**6))
def test_read_back_recovers_assignment(x, y, op, seed):
    z = x + y if op == "ADD" else x * y
    if len({x, y, z, Fraction(0), Fraction(1)}) < 5:
        return
    cs = parse(f"VAR x y z\n{op} x y z\n")
    cm = compile_system(cs)
    r = realize(cm, {"x": x, "y": y, "z": z}, seed=seed, cs=cs)
    assert [read_value(r, f"var:{v}") for v in "xyz"] == [x, y, z]
    assert check_realization(r, cm.to_matroid())


@settings(max_examples=30, deadline=None)
@given(st.lists(st.fractions(min_value=-50, max_value=50, max_denominator=9), min_size=3, max_size=3, unique=True),
       st.fractions(min_value=-50, max_value=50, max_denominator=9))
def test_cross_ratio_is_projectively_invariant(xs, v):
    if v in xs:
        return
    zero, one, inf = ((x, 0, 1) for x in xs)
    r = Realization(["ZERO", "ONE", "INF", "p"], [zero, one, inf, (v, 0, 1)], 0)
    expected = ((v - xs[0]) * (xs[1] - xs[2])) / ((v - xs[2]) * (xs[1] - xs[0]))
    assert read_value(r, "p") == expected
