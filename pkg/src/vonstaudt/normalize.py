"""From polynomial systems to Distinct-ETR.

The pipeline has four stages:

* ``flatten_to_etrami``: equations p = 0 become ADD/MUL/ONE constraints.
* ``to_feasibility``: the ETRAMI constraints become one degree-4 polynomial.
* ``to_strict_ineq``: the problem becomes -delta < p(x) < delta, |x|^2 < R.
* ``to_distinct``: the strict inequalities are rewritten with positive slack
  variables.

The thresholds delta and R are astronomically small and large, so they stay as
repeated-squaring chains.  For executable tests, ``test_scale=(delta, R)``
swaps them for ordinary rationals.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import count

from .etr import ConstraintSystem, SystemBuilder, solve_forward
from .surd import as_exact, exact_sign

__all__ = [
    "And", "Eq", "Ge", "Gt", "Not", "Or",
    "FeasibilityBoundError",
    "NormalizationParams",
    "PolynomialFormatError",
    "SparsePolynomial",
    "StrictIneqInstance",
    "eliminate_formula",
    "etrami_polynomials",
    "flatten_to_etrami",
    "format_polys",
    "parse_polys",
    "run_pipeline",
    "to_distinct",
    "to_feasibility",
    "to_strict_ineq",
    "transport_solution",
]

MAX_ARITY = 10_000


class PolynomialFormatError(ValueError):
    pass


class FeasibilityBoundError(ValueError):
    """A coefficient or size bound failed; the input was not ETRAMI-shaped."""


class SparsePolynomial:
    """Integer polynomial in ``n`` variables, stored as exponent-tuple -> coefficient."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms=None):
        if n < 0 or n > MAX_ARITY:
            raise ValueError(f"arity {n} outside 0..{MAX_ARITY}")
        self.n = n
        self.terms: dict[tuple[int, ...], int] = {}
        for e, c in dict(terms or {}).items():
            e = tuple(e)
            if len(e) != n or any(x < 0 for x in e):
                raise ValueError(f"bad exponent vector {e} for arity {n}")
            c = int(c)
            if c:
                self.terms[e] = self.terms.get(e, 0) + c
                if not self.terms[e]:
                    del self.terms[e]

    @classmethod
    def var(cls, n: int, i: int) -> "SparsePolynomial":
        e = [0] * n
        e[i] = 1
        return cls(n, {tuple(e): 1})

    @classmethod
    def const(cls, n: int, c: int) -> "SparsePolynomial":
        return cls(n, {(0,) * n: c})

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_zero(self) -> bool:
        return not self.terms

    def _lift(self, other) -> "SparsePolynomial":
        if isinstance(other, SparsePolynomial):
            if other.n != self.n:
                raise ValueError("arity mismatch")
            return other
        return SparsePolynomial.const(self.n, other)

    def __add__(self, other):
        o = self._lift(other)
        out = dict(self.terms)
        for e, c in o.terms.items():
            out[e] = out.get(e, 0) + c
        return SparsePolynomial(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return SparsePolynomial(self.n, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return SparsePolynomial(self.n, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = SparsePolynomial.const(self.n, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, SparsePolynomial):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def evaluate(self, values):
        total = Fraction(0)
        for e, c in self.terms.items():
            t = Fraction(c)
            for v, k in zip(values, e):
                if k:
                    t = t * v ** k
            total = total + t
        return as_exact(total)

    def max_coefficient(self) -> int:
        return max((abs(c) for c in self.terms.values()), default=0)

    def __repr__(self):
        return f"SparsePolynomial({self.n}, {self.terms!r})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms.items():
            mono = "*".join(f"x{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
            if not mono:
                parts.append(f"{c:+d}")
            elif abs(c) == 1:
                parts.append(("-" if c < 0 else "+") + mono)
            else:
                parts.append(f"{c:+d}*{mono}")
        text = "".join(parts)
        return text[1:] if text.startswith("+") else text


def format_polys(polys) -> str:
    out = []
    for p in polys:
        out.append(f"poly {p.n}")
        out += [f"term {c} " + " ".join(map(str, e)) for e, c in p.terms.items()]
    return "\n".join(out) + ("\n" if out else "")


def parse_polys(text: str) -> list[SparsePolynomial]:
    """``poly <n>`` opens an equation ``= 0``; ``term <c> <e1..en>`` adds a term."""
    polys: list[tuple[int, dict]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#")[0].strip()
        if not line:
            continue
        toks = line.split()
        try:
            if toks[0] == "poly":
                if len(toks) != 2:
                    raise ValueError
                polys.append((int(toks[1]), {}))
            elif toks[0] == "term":
                if not polys:
                    raise PolynomialFormatError(f"line {lineno}: term before any 'poly' header")
                n, terms = polys[-1]
                if len(toks) != n + 2:
                    raise PolynomialFormatError(f"line {lineno}: expected {n} exponents")
                e = tuple(int(t) for t in toks[2:])
                if any(x < 0 for x in e):
                    raise ValueError
                terms[e] = terms.get(e, 0) + int(toks[1])
            else:
                raise PolynomialFormatError(f"line {lineno}: unknown keyword {toks[0]!r}")
        except ValueError:
            raise PolynomialFormatError(f"line {lineno}: malformed {line!r}") from None
    return [SparsePolynomial(n, t) for n, t in polys]


# --- formula front end ---------------------------------------------------------

@dataclass(frozen=True)
class Eq:
    p: SparsePolynomial


@dataclass(frozen=True)
class Gt:
    p: SparsePolynomial


@dataclass(frozen=True)
class Ge:
    p: SparsePolynomial


@dataclass(frozen=True)
class Not:
    f: object


@dataclass(frozen=True)
class And:
    parts: tuple

    def __init__(self, *parts):
        object.__setattr__(self, "parts", tuple(parts))


@dataclass(frozen=True)
class Or:
    parts: tuple

    def __init__(self, *parts):
        object.__setattr__(self, "parts", tuple(parts))


def _push_not(f, negate=False):
    if isinstance(f, Not):
        return _push_not(f.f, not negate)
    if isinstance(f, (And, Or)):
        parts = [_push_not(g, negate) for g in f.parts]
        flip = isinstance(f, And) == negate
        return Or(*parts) if flip else And(*parts)
    if not negate:
        return f
    if isinstance(f, Eq):
        return Or(Gt(f.p), Gt(-f.p))
    if isinstance(f, Gt):
        return Ge(-f.p)
    return Gt(-f.p)


def _widen(p: SparsePolynomial, n: int) -> SparsePolynomial:
    return SparsePolynomial(n, {e + (0,) * (n - p.n): c for e, c in p.terms.items()})


def eliminate_formula(f, n: int) -> tuple[int, list[SparsePolynomial]]:
    """Rewrite a formula tree over {=, >, >=, and, or, not} into equations ``= 0``.

    Rules: negations are pushed to the leaves; ``p >= 0`` becomes
    ``p - w^2 = 0`` and ``p > 0`` becomes ``p*w^2 - 1 = 0`` with a fresh ``w``;
    a conjunction inside a disjunction becomes a sum of squares, and a
    disjunction becomes the product of its sides.  Returns the new arity and
    the equation list.
    """
    f = _push_not(f)
    fresh = count(n)
    leaves: list = []

    def collect(g):
        if isinstance(g, (Eq, Gt, Ge)):
            leaves.append(g)
        else:
            for h in g.parts:
                collect(h)
    collect(f)
    slack = {id(g): next(fresh) for g in leaves if not isinstance(g, Eq)}
    total = n + len(slack)

    def leaf(g):
        p = _widen(g.p, total)
        if isinstance(g, Eq):
            return p
        w = SparsePolynomial.var(total, slack[id(g)])
        return p - w * w if isinstance(g, Ge) else p * w * w - 1

    def single(g):
        if isinstance(g, (Eq, Gt, Ge)):
            return leaf(g)
        if isinstance(g, And):
            out = SparsePolynomial(total)
            for h in g.parts:
                s = single(h)
                out = out + s * s
            return out
        out = SparsePolynomial.const(total, 1)
        for h in g.parts:
            out = out * single(h)
        return out

    if isinstance(f, And):
        return total, [single(g) for g in f.parts]
    return total, [single(f)]


# --- ETRAMI ----------------------------------------------------------------------

def _graded_lex(e):
    return (sum(e), tuple(-x for x in e))


class _PolyBuilder:
    """Builds monomials and sums on top of a SystemBuilder."""

    def __init__(self, b: SystemBuilder, names):
        self.b = b
        self.names = list(names)
        self.monos: dict[tuple, str] = {}

    def monomial(self, e) -> str:
        e = tuple(e)
        if e in self.monos:
            return self.monos[e]
        if sum(e) == 0:
            v = self.b.one()
        elif sum(e) == 1:
            v = self.names[e.index(1)]
        else:
            j = max(i for i, k in enumerate(e) if k)
            prev = list(e)
            prev[j] -= 1
            v = self.b.mul(self.monomial(prev), self.names[j], hint="mono")
        self.monos[e] = v
        return v

    def term(self, e, c: int) -> str:
        """Variable holding ``|c| * x^e``."""
        if sum(e) == 0:
            return self.b.const(abs(c))
        m = self.monomial(e)
        if abs(c) == 1:
            return m
        return self.b.mul(self.b.const(abs(c)), m, hint="term")

    def polynomial(self, p: SparsePolynomial) -> str:
        for e in sorted(p.terms, key=_graded_lex):
            self.monomial(e)
        acc = None
        for e, c in p.terms.items():
            t = self.term(e, c)
            if acc is None:
                acc = t if c > 0 else self.b.neg(t)
            elif c > 0:
                acc = self.b.add(acc, t, hint="sum")
            else:
                key = ("SUB", acc, t)
                if key not in self.b._defs:
                    d = self.b.fresh("sum")
                    self.b.emit("ADD", d, t, acc)
                    self.b._defs[key] = d
                acc = self.b._defs[key]
        return acc if acc is not None else self.b.zero()


def _var_names(n: int) -> list[str]:
    return [f"x{i + 1}" for i in range(n)]


def flatten_to_etrami(equations, names=None) -> ConstraintSystem:
    """ADD/MUL/ONE system whose solutions restricted to ``names`` solve ``equations``."""
    equations = list(equations)
    n = equations[0].n if equations else (len(names) if names else 0)
    if any(p.n != n for p in equations):
        raise ValueError("equations have different arities")
    names = list(names) if names else _var_names(n)
    b = SystemBuilder("t")
    for v in names:
        b.declare(v)
    pb = _PolyBuilder(b, names)
    for p in equations:
        if p.is_zero():
            continue
        nonconst = [e for e in p.terms if sum(e)]
        if len(p.terms) == 2 and len(nonconst) == 1 and sum(nonconst[0]) == 1 \
                and p.terms[nonconst[0]] == -p.terms.get((0,) * n, 0) and abs(p.terms[nonconst[0]]) == 1:
            b.emit("ONE", names[nonconst[0].index(1)])
            continue
        v = pb.polynomial(p)
        one = b.one()
        b.emit("ADD", one, v, one)
    return b.build(distinct_promise=False)


def etrami_polynomials(cs: ConstraintSystem) -> list[SparsePolynomial]:
    """One polynomial per constraint: x+y-z, x*y-z or x-1."""
    n = len(cs.vars)
    index = {v: i for i, v in enumerate(cs.vars)}
    x = [SparsePolynomial.var(n, i) for i in range(n)]
    out = []
    for c in cs.constraints:
        a = [x[index[v]] for v in c.args]
        if c.op == "ADD":
            out.append(a[0] + a[1] - a[2])
        elif c.op == "MUL":
            out.append(a[0] * a[1] - a[2])
        elif c.op == "ONE":
            out.append(a[0] - 1)
        else:
            raise ValueError("POS constraints are not part of ETRAMI")
    return out


def to_feasibility(fs, n: int | None = None) -> SparsePolynomial:
    """Sum of squares of the ETRAMI polynomials, with its size bounds asserted."""
    fs = list(fs)
    if n is None:
        n = fs[0].n if fs else 0
    if len(set(fs)) > 3 * n ** 3:
        raise FeasibilityBoundError(f"{len(set(fs))} distinct constraints exceed 3n^3 = {3 * n ** 3}")
    p = SparsePolynomial(n)
    for f in fs:
        if f.degree() > 2:
            raise FeasibilityBoundError(f"constraint polynomial {f} has degree above 2")
        p = p + f * f
    bound = 36 * n ** 3
    if p.max_coefficient() > bound:
        raise FeasibilityBoundError(f"coefficient {p.max_coefficient()} exceeds 36n^3 = {bound}")
    return p


# --- strict inequalities -----------------------------------------------------------

@dataclass(frozen=True)
class NormalizationParams:
    """Bit sizes and tower indices.

    ``delta = 2**(-2**delta_chain_k)``; the radius ``R`` is squeezed between
    ``2**(2**R_low_k)`` and ``2**(2**R_high_k)``.
    """

    n: int
    L: int
    Lbar: int
    delta_chain_k: int
    R_low_k: int
    R_high_k: int

    @property
    def R_chain_k(self) -> int:
        return self.R_low_k

    @classmethod
    def for_polynomial(cls, p: SparsePolynomial) -> "NormalizationParams":
        n = p.n
        L = max(8 * len(format_polys([p]).encode()), 2)
        Lbar = L + n * math.ceil(math.log2(L + 2)) + 64
        lg = math.log2(L)
        return cls(n, L, Lbar, Lbar + 5,
                   math.ceil(8 * n * lg), math.floor((8 * n + 1) * lg))

    def to_json(self) -> dict:
        return {"n": self.n, "L": self.L, "Lbar": self.Lbar,
                "delta_chain_k": self.delta_chain_k,
                "R_low_k": self.R_low_k, "R_high_k": self.R_high_k,
                "Lbar_formula": "L + n*ceil(log2(L+2)) + 64"}


@dataclass(frozen=True)
class StrictIneqInstance:
    """``-delta < p(x) < delta`` and ``sum x_i^2 < R`` with delta, R in chain form."""

    p: SparsePolynomial
    params: NormalizationParams
    chain_sizes: dict = field(default_factory=dict, compare=False)

    @property
    def n(self) -> int:
        return self.p.n

    def holds(self, x, delta, R) -> bool:
        v = self.p.evaluate(x)
        norm = sum((xi * xi for xi in x), Fraction(0))
        return exact_sign(v + delta) > 0 and exact_sign(delta - v) > 0 and exact_sign(R - norm) > 0


def to_strict_ineq(p: SparsePolynomial, params: NormalizationParams | None = None) -> StrictIneqInstance:
    params = params or NormalizationParams.for_polynomial(p)
    sizes = {"delta": params.delta_chain_k + 2,
             "R_low": params.R_low_k + 2,
             "R_high": params.R_high_k + 2}
    return StrictIneqInstance(p, params, sizes)


def to_distinct(si: StrictIneqInstance, test_scale=None, names=None) -> ConstraintSystem:
    """Distinct-ETR system with slack variables ``a = P + delta``, ``b = delta - P``,
    ``c = R - X``, all required positive.

    ``test_scale=(delta, R)`` builds both from rational constants; otherwise
    delta is a repeated-squaring chain and R is a free variable squeezed
    between two chains.
    """
    n = si.n
    names = list(names) if names else _var_names(n)
    b = SystemBuilder("g")
    for v in names:
        b.declare(v)
    pb = _PolyBuilder(b, names)
    if test_scale is not None:
        delta = b.rational(Fraction(test_scale[0]))
        R = b.rational(Fraction(test_scale[1]))
    else:
        delta = b.tower(si.params.delta_chain_k, small=True)
        lo = b.tower(si.params.R_low_k)
        hi = b.tower(si.params.R_high_k)
        R = b.fresh("R")
        s1, s2 = b.fresh("slack"), b.fresh("slack")
        b.emit("ADD", lo, s1, R)
        b.emit("ADD", R, s2, hi)
        b.emit("POS", s1)
        b.emit("POS", s2)
    P = pb.polynomial(si.p)
    X = None
    for i in range(n):
        sq = pb.monomial(tuple(2 if j == i else 0 for j in range(n)))
        X = sq if X is None else b.add(X, sq, hint="norm")
    if X is None:
        X = b.zero()
    a, bb, c = b.fresh("a"), b.fresh("b"), b.fresh("c")
    b.emit("ADD", P, delta, a)
    b.emit("ADD", bb, P, delta)
    b.emit("ADD", c, X, R)
    for s in (a, bb, c):
        b.emit("POS", s)
    return b.build(distinct_promise=True)


def transport_solution(cs: ConstraintSystem, x: dict) -> dict:
    """Extend values of the input variables to every variable of ``cs``."""
    vals = solve_forward(cs, x)
    missing = [v for v in cs.vars if v not in vals]
    if missing:
        raise ValueError(f"could not determine {', '.join(missing)} by forward evaluation")
    return vals


@dataclass
class PipelineResult:
    etrami: ConstraintSystem
    p: SparsePolynomial
    strict: StrictIneqInstance
    distinct: ConstraintSystem
    solution: dict | None = None

    def metadata(self) -> dict:
        return {"params": self.strict.params.to_json(),
                "chain_sizes": self.strict.chain_sizes,
                "etrami_constraints": len(self.etrami.constraints),
                "feasibility_terms": len(self.p.terms),
                "distinct_constraints": len(self.distinct.constraints)}


def _perturbations(n: int, rng):
    yield [Fraction(0)] * n
    for scale in (1000, 10000, 100000):
        for _ in range(40):
            yield [Fraction(rng.randint(-20, 20), scale) for _ in range(n)]


def run_pipeline(equations, test_scale=(Fraction(1, 16), 100), solution=None, seed=0) -> PipelineResult:
    """Run every stage; if ``solution`` (values for x1..xn) is given, transport it.

    The transported point is the exact ETRAMI extension of ``solution``,
    nudged by small rationals when needed so that all values are pairwise
    distinct while staying inside the strict-inequality region.
    """
    import random

    equations = list(equations)
    etrami = flatten_to_etrami(equations)
    p = to_feasibility(etrami_polynomials(etrami), len(etrami.vars))
    si = to_strict_ineq(p)
    distinct = to_distinct(si, test_scale, names=etrami.vars)
    result = PipelineResult(etrami, p, si, distinct)
    if solution is None:
        return result
    names = _var_names(equations[0].n) if equations else []
    base = transport_solution(etrami, dict(zip(names, solution)))
    point = [base[v] for v in etrami.vars]
    rng = random.Random(seed)
    delta, R = Fraction(test_scale[0]), Fraction(test_scale[1])
    fallback = None
    for eps in _perturbations(len(point), rng):
        x = [as_exact(v + e) for v, e in zip(point, eps)]
        if not si.holds(x, delta, R):
            continue
        vals = transport_solution(distinct, dict(zip(etrami.vars, x)))
        fallback = fallback or vals
        if _pairwise_distinct([vals[v] for v in distinct.vars]):
            result.solution = vals
            return result
    if fallback is None:
        raise ValueError("solution does not fit the test scale; |x|^2 must stay below R")
    result.solution = fallback
    return result


def _pairwise_distinct(values) -> bool:
    rational = [v for v in values if isinstance(v, Fraction)]
    if len(set(rational)) != len(rational):
        return False
    others = [v for v in values if not isinstance(v, Fraction)]
    return all(others[i] != w for i in range(len(others)) for w in others[i + 1:] + rational)


def metadata_json(result: PipelineResult) -> str:
    return json.dumps(result.metadata(), indent=2, sort_keys=True)
