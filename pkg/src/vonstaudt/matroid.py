"""Matroids given by an explicit list of bases.

Elements are labelled ``0..n-1``.  Bases are stored as sorted tuples in
lexicographic order; the same family is also kept as a set of bitmasks, which
is what the rank and exchange computations actually use.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations

__all__ = [
    "DegenerateLineSetError",
    "LineSet",
    "MalformedMatroidError",
    "Matroid",
    "MatroidError",
    "ValidationReport",
    "bases_from_circuits",
    "circuits",
    "format_matroid",
    "from_lines",
    "is_independent",
    "matroid_to_json",
    "parse_matroid",
    "rank_of",
    "uniform",
    "validate_axioms",
]


class MatroidError(ValueError):
    pass


class MalformedMatroidError(MatroidError):
    """Structural problem with the input (labels, sizes), not an axiom failure."""


class DegenerateLineSetError(MatroidError):
    """Every triple lies on a line, so the line set has rank below 3."""


def _mask(s) -> int:
    m = 0
    for e in s:
        m |= 1 << e
    return m


def _elements(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


@dataclass(frozen=True)
class Matroid:
    n: int
    r: int
    bases: tuple[tuple[int, ...], ...]
    _masks: frozenset = field(init=False, repr=False, compare=False)

    def __init__(self, n: int, r: int, bases):
        if n < 0 or r < 0:
            raise MalformedMatroidError(f"negative size: n={n}, r={r}")
        canon = set()
        for b in bases:
            t = tuple(sorted(b))
            if len(set(t)) != len(t):
                raise MalformedMatroidError(f"basis {t} repeats an element")
            if len(t) != r:
                raise MalformedMatroidError(f"basis {t} has size {len(t)}, expected {r}")
            if any(e < 0 or e >= n for e in t):
                raise MalformedMatroidError(f"basis {t} has a label outside 0..{n - 1}")
            canon.add(t)
        if not canon:
            raise MalformedMatroidError("a matroid needs at least one basis")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "bases", tuple(sorted(canon)))
        object.__setattr__(self, "_masks", frozenset(_mask(b) for b in canon))

    @property
    def masks(self) -> frozenset:
        return self._masks

    def is_basis(self, s) -> bool:
        return _mask(s) in self._masks

    def __len__(self) -> int:
        return len(self.bases)


def uniform(r: int, n: int) -> Matroid:
    return Matroid(n, r, combinations(range(n), r))


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    kind: str  # "pass" | "exchange"
    witness: tuple | None = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def validate_axioms(m: Matroid) -> ValidationReport:
    """Check the basis exchange property on every ordered pair of bases.

    On failure the witness is ``(B1, B2, x)``: removing ``x`` from ``B1`` cannot
    be repaired by any element of ``B2 - B1``.
    """
    masks = m.masks
    ordered = [_mask(b) for b in m.bases]
    for b1 in ordered:
        for b2 in ordered:
            if b1 == b2:
                continue
            only1 = b1 & ~b2
            only2 = b2 & ~b1
            for x in _elements(only1):
                base = b1 & ~(1 << x)
                if not any((base | (1 << y)) in masks for y in _elements(only2)):
                    w = (_elements(b1), _elements(b2), x)
                    return ValidationReport(
                        False, "exchange", w,
                        f"no y in {_elements(only2)} makes {_elements(b1)} - {x} + y a basis",
                    )
    return ValidationReport(True, "pass")


def _check_subset(m: Matroid, s) -> int:
    mask = 0
    for e in s:
        if e < 0 or e >= m.n:
            raise MatroidError(f"element {e} outside 0..{m.n - 1}")
        mask |= 1 << e
    return mask


def rank_of(m: Matroid, s) -> int:
    """Rank of ``s``: the largest overlap of ``s`` with a basis."""
    mask = _check_subset(m, s)
    return max((mask & b).bit_count() for b in m.masks)


def is_independent(m: Matroid, s) -> bool:
    s = set(s)
    return rank_of(m, s) == len(s)


def circuits(m: Matroid) -> tuple[tuple[int, ...], ...]:
    """All minimal dependent sets, found by enumerating subsets of size <= r+1."""
    found: list[tuple[int, ...]] = []
    found_masks: list[int] = []
    for k in range(1, min(m.r + 1, m.n) + 1):
        for s in combinations(range(m.n), k):
            mask = _mask(s)
            if any(c & mask == c for c in found_masks):
                continue
            if max((mask & b).bit_count() for b in m.masks) < k:
                found.append(s)
                found_masks.append(mask)
    return tuple(found)


def bases_from_circuits(n: int, circs) -> tuple[tuple[int, ...], ...]:
    """Maximal subsets of ``range(n)`` containing no circuit."""
    cmasks = [_mask(c) for c in circs]
    for k in range(n, -1, -1):
        found = [s for s in combinations(range(n), k)
                 if not any(c & _mask(s) == c for c in cmasks)]
        if found:
            return tuple(found)
    return ((),)


@dataclass(frozen=True)
class LineSet:
    """Rank-3 incidence data: lines are the maximal collinear groups of points."""

    n: int
    lines: tuple[tuple[int, ...], ...]

    def __init__(self, n: int, lines):
        canon = sorted({tuple(sorted(set(line))) for line in lines})
        for line in canon:
            if len(line) < 3:
                raise MalformedMatroidError(f"line {line} has fewer than 3 points")
            if any(e < 0 or e >= n for e in line):
                raise MalformedMatroidError(f"line {line} has a label outside 0..{n - 1}")
        for l1, l2 in combinations(canon, 2):
            if len(set(l1) & set(l2)) > 1:
                raise MalformedMatroidError(f"lines {l1} and {l2} share two points")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "lines", tuple(canon))


def from_lines(ls: LineSet) -> Matroid:
    """Simple rank-3 matroid whose dependent triples are exactly the collinear ones."""
    dependent = {t for line in ls.lines for t in combinations(line, 3)}
    bases = [t for t in combinations(range(ls.n), 3) if t not in dependent]
    if not bases:
        raise DegenerateLineSetError(
            f"all {ls.n} points are collinear; the line set has rank below 3")
    return Matroid(ls.n, 3, bases)


# --- text and JSON formats ----------------------------------------------------

def format_matroid(obj: Matroid | LineSet) -> str:
    if isinstance(obj, Matroid):
        head = f"matroid n={obj.n} r={obj.r}\nbases\n"
        rows = obj.bases
    else:
        head = f"matroid n={obj.n} r=3\nlines\n"
        rows = obj.lines
    return head + "".join(" ".join(map(str, row)) + "\n" for row in rows)


def matroid_to_json(obj: Matroid | LineSet) -> dict:
    if isinstance(obj, Matroid):
        return {"n": obj.n, "r": obj.r, "bases": [list(b) for b in obj.bases]}
    return {"n": obj.n, "r": 3, "lines": [list(line) for line in obj.lines]}


def _from_fields(n: int, r: int, bases=None, lines=None) -> Matroid | LineSet:
    if lines is not None:
        if r != 3:
            raise MalformedMatroidError("a line set describes a rank-3 matroid")
        return LineSet(n, lines)
    if bases is None:
        raise MalformedMatroidError("expected 'bases' or 'lines'")
    return Matroid(n, r, bases)


def parse_matroid(text: str) -> Matroid | LineSet:
    """Parse the ``matroid n=.. r=..`` text format or its JSON mirror."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
            return _from_fields(int(data["n"]), int(data["r"]), data.get("bases"), data.get("lines"))
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise MalformedMatroidError(f"bad matroid JSON: {exc}") from exc
    rows = [(i + 1, line.split("#")[0].strip()) for i, line in enumerate(text.splitlines())]
    rows = [(i, line) for i, line in rows if line]
    if not rows:
        raise MalformedMatroidError("empty matroid file")
    lineno, header = rows[0]
    parts = header.split()
    try:
        if parts[0] != "matroid" or len(parts) != 3:
            raise ValueError
        fields = dict(p.split("=") for p in parts[1:])
        n, r = int(fields["n"]), int(fields["r"])
    except (ValueError, KeyError):
        raise MalformedMatroidError(f"line {lineno}: expected 'matroid n=<int> r=<int>'") from None
    if len(rows) < 2 or rows[1][1] not in ("bases", "lines"):
        raise MalformedMatroidError(f"line {lineno + 1}: expected 'bases' or 'lines'")
    kind = rows[1][1]
    sets = []
    for i, line in rows[2:]:
        try:
            sets.append([int(tok) for tok in line.split()])
        except ValueError:
            raise MalformedMatroidError(f"line {i}: expected integers, got {line!r}") from None
    if kind == "bases":
        if r == 0 and not sets:
            sets = [[]]
        return _from_fields(n, r, bases=sets)
    return _from_fields(n, r, lines=sets)
