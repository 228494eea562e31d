"""Distinct-ETR constraint systems.

A system declares variables and constrains them with four kinds of atoms::

    ADD x y z    x + y = z
    MUL x y z    x * y = z
    ONE x        x = 1
    POS x        x > 0

Systems also carry the distinctness promise flag: if a solution exists then one
exists with pairwise distinct values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .surd import Surd, as_exact, exact_sign

__all__ = [
    "Constraint",
    "ConstraintSystem",
    "CheckReport",
    "ETRSyntaxError",
    "MissingValueError",
    "SystemBuilder",
    "check_assignment",
    "const_chain",
    "format_assignment",
    "parse",
    "parse_assignment",
    "pow_tower_chain",
    "serialize",
    "solve_forward",
    "system_from_json",
    "system_to_json",
]

ARITY = {"ADD": 3, "MUL": 3, "ONE": 1, "POS": 1}
MAX_CONSTANT = 10**12
MAX_TOWER = 10**6


class ETRSyntaxError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class MissingValueError(KeyError):
    pass


class ChainBoundError(ValueError):
    pass


@dataclass(frozen=True)
class Constraint:
    op: str
    args: tuple[str, ...]

    def __str__(self) -> str:
        return " ".join((self.op,) + self.args)


@dataclass(frozen=True)
class ConstraintSystem:
    vars: tuple[str, ...]
    constraints: tuple[Constraint, ...]
    distinct_promise: bool = True

    def __post_init__(self):
        seen = set()
        for v in self.vars:
            if v in seen:
                raise ETRSyntaxError(f"variable {v!r} declared twice")
            seen.add(v)
        for c in self.constraints:
            if c.op not in ARITY or len(c.args) != ARITY[c.op]:
                raise ETRSyntaxError(f"malformed constraint {c}")
            for a in c.args:
                if a not in seen:
                    raise ETRSyntaxError(f"undeclared variable {a!r} in {c}")

    def count(self, op: str) -> int:
        return sum(c.op == op for c in self.constraints)


def parse(text: str) -> ConstraintSystem:
    declared: list[str] = []
    known: set[str] = set()
    constraints: list[Constraint] = []
    promise = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#")[0].strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "VAR":
            if not rest:
                raise ETRSyntaxError("VAR needs a name", lineno)
            for name in rest:
                if name in known:
                    raise ETRSyntaxError(f"variable {name!r} declared twice", lineno)
                declared.append(name)
                known.add(name)
        elif head == "PROMISE":
            if rest != ["distinct"]:
                raise ETRSyntaxError("expected 'PROMISE distinct'", lineno)
            promise = True
        elif head in ARITY:
            if len(rest) != ARITY[head]:
                raise ETRSyntaxError(f"{head} takes {ARITY[head]} arguments, got {len(rest)}", lineno)
            for name in rest:
                if name not in known:
                    raise ETRSyntaxError(f"undeclared variable {name!r}", lineno)
            constraints.append(Constraint(head, tuple(rest)))
        else:
            raise ETRSyntaxError(f"unknown keyword {head!r}", lineno)
    return ConstraintSystem(tuple(declared), tuple(constraints), promise)


def serialize(cs: ConstraintSystem) -> str:
    lines = []
    if cs.distinct_promise:
        lines.append("PROMISE distinct")
    lines += [f"VAR {v}" for v in cs.vars]
    lines += [str(c) for c in cs.constraints]
    return "\n".join(lines) + "\n"


def system_to_json(cs: ConstraintSystem) -> dict:
    return {
        "vars": list(cs.vars),
        "constraints": [[c.op, *c.args] for c in cs.constraints],
        "distinct_promise": cs.distinct_promise,
    }


def system_from_json(data: dict) -> ConstraintSystem:
    return ConstraintSystem(
        tuple(data["vars"]),
        tuple(Constraint(c[0], tuple(c[1:])) for c in data["constraints"]),
        bool(data.get("distinct_promise", True)),
    )


def load_system(text: str) -> ConstraintSystem:
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return system_from_json(json.loads(stripped))
    return parse(text)


# --- assignments ---------------------------------------------------------------

def parse_assignment(text: str) -> dict:
    """``name value`` per line (values rational or surd text), or a JSON object."""
    from .exact import parse_number

    stripped = text.lstrip()
    if stripped.startswith("{"):
        return {k: parse_number(str(v)) for k, v in json.loads(stripped).items()}
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#")[0].strip()
        if not line:
            continue
        parts = line.replace("=", " ").split()
        if len(parts) != 2:
            raise ETRSyntaxError("expected '<name> <value>'", lineno)
        try:
            out[parts[0]] = parse_number(parts[1])
        except (ValueError, ZeroDivisionError):
            raise ETRSyntaxError(f"bad value {parts[1]!r}", lineno) from None
    return out


def format_assignment(a: dict) -> str:
    return "".join(f"{k} {v}\n" for k, v in a.items())


@dataclass
class CheckReport:
    results: list[tuple[Constraint, bool]]
    distinct: bool
    collisions: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(passed for _, passed in self.results)

    @property
    def failures(self) -> list[Constraint]:
        return [c for c, passed in self.results if not passed]

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "distinct": self.distinct,
            "failed": [str(c) for c in self.failures],
            "collisions": [list(p) for p in self.collisions],
        }


def _holds(c: Constraint, v) -> bool:
    if c.op == "ADD":
        return v[0] + v[1] == v[2]
    if c.op == "MUL":
        return v[0] * v[1] == v[2]
    if c.op == "ONE":
        return v[0] == 1
    return exact_sign(v[0]) > 0


def check_assignment(cs: ConstraintSystem, a: dict) -> CheckReport:
    """Evaluate every constraint exactly; also report pairwise distinctness."""
    missing = [v for v in cs.vars if v not in a]
    if missing:
        raise MissingValueError(f"no value for {', '.join(missing)}")
    results = [(c, _holds(c, [a[x] for x in c.args])) for c in cs.constraints]
    by_value: dict = {}
    collisions = []
    for name in cs.vars:
        value = as_exact(a[name])
        key = value if not isinstance(value, Surd) else None
        if key is not None and key in by_value:
            collisions.append((by_value[key], name))
            continue
        if key is None:
            hit = next((n for n in cs.vars[:cs.vars.index(name)] if a[n] == value), None)
            if hit is not None:
                collisions.append((hit, name))
                continue
        else:
            by_value[key] = name
    if any(isinstance(as_exact(a[n]), Surd) for n in cs.vars):
        # surd values may equal rationals; recheck those pairs exactly
        names = list(cs.vars)
        collisions = sorted({(names[i], names[j])
                             for i in range(len(names)) for j in range(i + 1, len(names))
                             if a[names[i]] == a[names[j]]})
    return CheckReport(results, not collisions, collisions)


def solve_forward(cs: ConstraintSystem, known: dict | None = None) -> dict:
    """Propagate values through definitional constraints until nothing changes.

    ``ONE`` fixes a value; ``ADD`` determines any one argument from the other
    two; ``MUL`` determines its product, or a factor when the other factor is
    a known non-zero value.
    """
    vals = dict(known or {})
    changed = True
    while changed:
        changed = False
        for c in cs.constraints:
            if c.op == "ONE" and c.args[0] not in vals:
                vals[c.args[0]] = Fraction(1)
                changed = True
            elif c.op == "ADD":
                x, y, z = c.args
                kx, ky, kz = x in vals, y in vals, z in vals
                if kx and ky and not kz:
                    vals[z] = vals[x] + vals[y]
                elif kx and kz and not ky:
                    vals[y] = vals[z] - vals[x]
                elif ky and kz and not kx:
                    vals[x] = vals[z] - vals[y]
                elif x == y and kz and not kx:
                    vals[x] = vals[z] / 2
                else:
                    continue
                changed = True
            elif c.op == "MUL":
                x, y, z = c.args
                kx, ky, kz = x in vals, y in vals, z in vals
                if kx and ky and not kz:
                    vals[z] = vals[x] * vals[y]
                elif kx and kz and not ky and vals[x] != 0:
                    vals[y] = vals[z] / vals[x]
                elif ky and kz and not kx and vals[y] != 0:
                    vals[x] = vals[z] / vals[y]
                else:
                    continue
                changed = True
    return {k: as_exact(v) for k, v in vals.items()}


# --- construction ----------------------------------------------------------------

class SystemBuilder:
    """Accumulates variables and constraints with memoised definitions.

    Identical definitions (same operation on the same operands, commutativity
    taken into account) return the existing variable instead of a new one.
    """

    def __init__(self, prefix: str = "t"):
        self.prefix = prefix
        self.vars: list[str] = []
        self._declared: set[str] = set()
        self.constraints: list[Constraint] = []
        self._seen: set[Constraint] = set()
        self._defs: dict[tuple, str] = {}
        self._consts: dict[Fraction, str] = {}
        self._counter = 0
        self._one: str | None = None
        self._zero: str | None = None

    def declare(self, name: str) -> str:
        if name not in self._declared:
            self._declared.add(name)
            self.vars.append(name)
        return name

    def fresh(self, hint: str | None = None) -> str:
        while True:
            self._counter += 1
            name = f"{hint or self.prefix}_{self._counter}"
            if name not in self._declared:
                return self.declare(name)

    def emit(self, op: str, *args: str) -> None:
        c = Constraint(op, tuple(args))
        if c not in self._seen:
            self._seen.add(c)
            self.constraints.append(c)

    def one(self) -> str:
        if self._one is None:
            self._one = self.fresh("one")
            self.emit("ONE", self._one)
            self._consts[Fraction(1)] = self._one
        return self._one

    def zero(self) -> str:
        if self._zero is None:
            one = self.one()
            self._zero = self.fresh("zero")
            self.emit("ADD", one, self._zero, one)
            self._consts[Fraction(0)] = self._zero
        return self._zero

    def add(self, x: str, y: str, hint: str | None = None) -> str:
        key = ("ADD",) + tuple(sorted((x, y)))
        if key not in self._defs:
            z = self.fresh(hint or "s")
            self.emit("ADD", x, y, z)
            self._defs[key] = z
        return self._defs[key]

    def mul(self, x: str, y: str, hint: str | None = None) -> str:
        key = ("MUL",) + tuple(sorted((x, y)))
        if key not in self._defs:
            z = self.fresh(hint or "m")
            self.emit("MUL", x, y, z)
            self._defs[key] = z
        return self._defs[key]

    def neg(self, x: str, hint: str | None = None) -> str:
        key = ("NEG", x)
        if key not in self._defs:
            m = self.fresh(hint or "neg")
            self.emit("ADD", m, x, self.zero())
            self._defs[key] = m
        return self._defs[key]

    def const(self, k: int, unary: bool = False) -> str:
        """Variable forced to the integer ``k``."""
        if abs(k) > MAX_CONSTANT:
            raise ChainBoundError(f"|{k}| exceeds the constant bound {MAX_CONSTANT}")
        q = Fraction(k)
        if q in self._consts:
            return self._consts[q]
        if k == 0:
            return self.zero()
        if k < 0:
            v = self.neg(self.const(-k, unary), hint=f"c_neg{-k}")
        elif unary:
            one = self.one()
            prev = one
            for i in range(2, k + 1):
                prev = self._consts.get(Fraction(i)) or self._record(i, self.add(prev, one, hint=f"c{i}"))
            v = prev
        else:
            one = self.one()
            v = one
            value = 1
            for bit in bin(k)[3:]:
                value *= 2
                v = self._consts.get(Fraction(value)) or self._record(value, self.add(v, v, hint=f"c{value}"))
                if bit == "1":
                    value += 1
                    v = self._consts.get(Fraction(value)) or self._record(value, self.add(v, one, hint=f"c{value}"))
        return self._record(k, v)

    def _record(self, value, var: str) -> str:
        self._consts.setdefault(Fraction(value), var)
        return var

    def rational(self, q) -> str:
        """Variable forced to the rational ``q`` (as ``q.denominator * v = q.numerator``)."""
        q = Fraction(q)
        if q in self._consts:
            return self._consts[q]
        if q.denominator == 1:
            return self.const(q.numerator)
        num = self.const(q.numerator)
        den = self.const(q.denominator)
        v = self.fresh("r")
        self.emit("MUL", v, den, num)
        return self._record(q, v)

    def tower(self, k: int, small: bool = False) -> str:
        """Variable forced to ``2**(2**k)`` (or its reciprocal) by repeated squaring."""
        if k < 0 or k > MAX_TOWER:
            raise ChainBoundError(f"tower index {k} outside 0..{MAX_TOWER}")
        one = self.one()
        x = self.fresh("half" if small else "two")
        if small:
            self.emit("ADD", x, x, one)
        else:
            self.emit("ADD", one, one, x)
        for i in range(1, k + 1):
            nxt = self.fresh("tw")
            self.emit("MUL", x, x, nxt)
            x = nxt
        return x

    def build(self, distinct_promise: bool = False) -> ConstraintSystem:
        return ConstraintSystem(tuple(self.vars), tuple(self.constraints), distinct_promise)


def const_chain(k: int, unary: bool = False) -> tuple[ConstraintSystem, str]:
    """Fragment forcing its output variable to ``k`` (double-and-add unless ``unary``)."""
    if k == 0:
        raise ValueError("const_chain needs k != 0")
    b = SystemBuilder("a")
    out = b.const(k, unary=unary)
    return b.build(), out


def pow_tower_chain(k: int, small: bool = False) -> tuple[ConstraintSystem, str]:
    """Fragment of ``k + 2`` constraints forcing ``2**(2**k)`` or ``2**(-2**k)``."""
    b = SystemBuilder("x")
    out = b.tower(k, small)
    return b.build(), out
