from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from vonstaudt.etr import check_assignment, serialize, solve_forward
from vonstaudt.normalize import (And, Eq, FeasibilityBoundError, Ge, Gt, NormalizationParams, Not,
                                 Or, PolynomialFormatError, SparsePolynomial, eliminate_formula,
                                 etrami_polynomials, flatten_to_etrami, format_polys, parse_polys,
                                 run_pipeline, to_distinct, to_feasibility, to_strict_ineq,
                                 transport_solution)
from vonstaudt.surd import sqrt


def V(n, i):
    return SparsePolynomial.var(n, i)


def to_sympy(p, syms):
    return sum(c * sympy.prod([s ** k for s, k in zip(syms, e)]) for e, c in p.terms.items())


def test_feasibility_of_single_add():
    x, y, z = V(3, 0), V(3, 1), V(3, 2)
    p = to_feasibility([x + y - z])
    expected = {(2, 0, 0): 1, (1, 1, 0): 2, (1, 0, 1): -2, (0, 2, 0): 1, (0, 1, 1): -2, (0, 0, 2): 1}
    assert p.terms == expected


def test_feasibility_of_nothing():
    assert to_feasibility([], 2).is_zero()


def test_feasibility_degree_four():
    x, y, z = V(3, 0), V(3, 1), V(3, 2)
    fs = [x - 1, x * y - z]
    p = to_feasibility(fs)
    syms = sympy.symbols("a b c")
    assert sympy.expand(to_sympy(p, syms) - sum(to_sympy(f, syms) ** 2 for f in fs)) == 0
    assert p.degree() == 4
    assert p.max_coefficient() <= 36 * 27


def test_feasibility_rejects_high_degree():
    x = V(1, 0)
    with pytest.raises(FeasibilityBoundError):
        to_feasibility([x * x * x])


def test_flatten_square_root_of_two():
    x = V(1, 0)
    cs = flatten_to_etrami([x * x - 2])
    assert any(c.op == "MUL" and c.args[:2] == ("x1", "x1") for c in cs.constraints)
    vals = solve_forward(cs, {"x1": sqrt(2)})
    assert check_assignment(cs, vals).ok
    bad = solve_forward(cs, {"x1": Fraction(3, 2)})
    assert not check_assignment(cs, bad).ok


def test_flatten_unit_equation():
    cs = flatten_to_etrami([V(1, 0) - 1])
    assert serialize(cs) == "VAR x1\nONE x1\n"


def test_flatten_projects_solution():
    x, y = V(2, 0), V(2, 1)
    cs = flatten_to_etrami([x + y, x - 1])
    assert solve_forward(cs)["x2"] == -1


def test_etrami_polynomials_vanish_on_solutions():
    x = V(2, 0)
    y = V(2, 1)
    cs = flatten_to_etrami([x * y - 6, x + y - 5])
    vals = solve_forward(cs, {"x1": 2, "x2": 3})
    point = [vals[v] for v in cs.vars]
    assert all(f.evaluate(point) == 0 for f in etrami_polynomials(cs))


def test_formula_rewrites():
    x = V(1, 0)
    n, eqs = eliminate_formula(Gt(x), 1)
    assert n == 2
    # x * w^2 - 1 = 0 at x = 4, w = 1/2
    assert eqs[0].evaluate([4, Fraction(1, 2)]) == 0
    n, eqs = eliminate_formula(Not(Gt(x)), 1)
    # -x - w^2 = 0 is solvable exactly when x <= 0
    assert eqs[0].evaluate([-4, 2]) == 0
    n, eqs = eliminate_formula(Or(Eq(x - 1), Eq(x - 2)), 1)
    assert n == 1 and len(eqs) == 1
    assert eqs[0].evaluate([2]) == 0 and eqs[0].evaluate([1]) == 0 and eqs[0].evaluate([3]) != 0
    n, eqs = eliminate_formula(And(Eq(x - 3), Ge(x)), 1)
    assert len(eqs) == 2


def test_not_of_equality_becomes_disjunction():
    x = V(1, 0)
    n, eqs = eliminate_formula(Not(Eq(x)), 1)
    assert n == 3 and len(eqs) == 1
    # x = 2 with w1 = 1/sqrt(2) satisfies the first branch
    assert eqs[0].evaluate([2, 1 / sqrt(2), 5]) == 0


def test_poly_format_round_trip():
    x, y = V(2, 0), V(2, 1)
    polys = [x * x - 2 * y + 7, x * y]
    assert parse_polys(format_polys(polys)) == polys


def test_poly_format_errors():
    with pytest.raises(PolynomialFormatError, match="line 1"):
        parse_polys("term 1 2\n")
    with pytest.raises(PolynomialFormatError, match="line 2"):
        parse_polys("poly 2\nterm 1 2\n")


def test_params_formulas():
    p = V(1, 0) * V(1, 0)
    params = NormalizationParams.for_polynomial(p)
    L = 8 * len(format_polys([p]).encode())
    assert params.L == L
    import math
    assert params.Lbar == L + math.ceil(math.log2(L + 2)) + 64
    assert params.delta_chain_k == params.Lbar + 5
    assert params.R_low_k == math.ceil(8 * math.log2(L))
    assert params.R_high_k == math.floor(9 * math.log2(L))
    # 2^(2^a) >= 2^(L^(8n)) and 2^(2^b) <= 2^(L^(8n+1))
    assert 2 ** params.R_low_k >= L ** 8 and 2 ** params.R_high_k <= L ** 9


def test_strict_ineq_symbolic_chains():
    p = V(1, 0) * V(1, 0)
    si = to_strict_ineq(p)
    ds = to_distinct(si)
    assert ds.distinct_promise
    assert ds.count("POS") == 5
    assert len(ds.constraints) > si.params.delta_chain_k


def test_strict_ineq_of_square_near_zero():
    p = V(1, 0) * V(1, 0)
    si = to_strict_ineq(p)
    assert si.holds([Fraction(0)], Fraction(1, 16), 100)
    ds = to_distinct(si, (Fraction(1, 16), 100))
    vals = solve_forward(ds, {"x1": Fraction(1, 10)})
    rep = check_assignment(ds, vals)
    assert rep.ok and rep.distinct


def test_empty_polynomial():
    si = to_strict_ineq(SparsePolynomial(0))
    ds = to_distinct(si, (Fraction(1, 16), 100))
    vals = solve_forward(ds)
    assert check_assignment(ds, vals).ok


def test_dedup_of_repeated_monomial():
    x, y = V(2, 0), V(2, 1)
    si = to_strict_ineq(x * y + x * y * x)
    ds = to_distinct(si, (Fraction(1, 16), 100))
    muls = [c for c in ds.constraints if c.op == "MUL" and set(c.args[:2]) == {"x1", "x2"}]
    assert len(muls) == 1


def test_pipeline_is_deterministic():
    x = V(1, 0)
    a = run_pipeline([x * x - 2])
    b = run_pipeline([x * x - 2])
    assert serialize(a.distinct) == serialize(b.distinct)


def test_solution_outside_test_ball_is_rejected():
    x = V(1, 0)
    with pytest.raises(ValueError, match="test scale"):
        run_pipeline([x * 3 - 7], solution=[Fraction(7, 3)])


def test_distinct_solution_restricts_to_input():
    # any solution of the output satisfies |p| < delta on the etrami variables
    x = V(1, 0)
    res = run_pipeline([x * x - 2], solution=[sqrt(2)])
    vals = res.solution
    point = [vals[v] for v in res.etrami.vars]
    assert abs(res.p.evaluate(point)) < Fraction(1, 16)


coeffs = st.integers(-4, 4)


@st.composite
def quadratics(draw):
    n = draw(st.integers(1, 2))
    terms = {}
    for _ in range(draw(st.integers(1, 4))):
        e = tuple(draw(st.integers(0, 2)) for _ in range(n))
        terms[e] = draw(coeffs)
    return SparsePolynomial(n, terms)


@settings(max_examples=40, deadline=None)
@given(quadratics(), st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=4), min_size=2, max_size=2))
def test_transport_of_arbitrary_points(p, point):
    # shift p so that the chosen point is a root, then transport
    x = point[:p.n]
    q = p - p.evaluate(x) if p.evaluate(x).denominator == 1 else p * p.evaluate(x).denominator - p.evaluate(x).numerator
    assert q.evaluate(x) == 0
    # the test ball must contain the transported point, constants included
    etrami = flatten_to_etrami([q])
    base = transport_solution(etrami, {f"x{i + 1}": v for i, v in enumerate(x)})
    R = 2 * sum(v * v for v in base.values()) + 10
    res = run_pipeline([q], test_scale=(Fraction(1, 16), R), solution=x)
    assert check_assignment(res.distinct, res.solution).ok
    assert res.p.max_coefficient() <= 36 * len(res.etrami.vars) ** 3
