"""Exact linear algebra over the rationals (and real surds).

Rational matrices are reduced with fraction-free Bareiss elimination on
integer rows.  Matrices containing :class:`~vonstaudt.surd.Surd` entries fall
back to ordinary Gauss-Jordan elimination, which only needs exact field
operations and an exact zero test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .matroid import Matroid, MatroidError
from .surd import Surd, as_exact

__all__ = [
    "PointConfig",
    "RationalMatrix",
    "cross",
    "det3",
    "format_matrix",
    "format_points",
    "matroid_from_matrix",
    "parse_matrix",
    "parse_number",
    "parse_points",
    "rank",
    "rank_by_columns",
    "submatrix_rank",
]

MAX_MATRIX_COLUMNS = 20


class MatrixFormatError(ValueError):
    pass


def parse_number(text: str):
    text = text.strip()
    if "sqrt" in text:
        return as_exact(Surd.parse(text))
    return Fraction(text)


def _fmt(x) -> str:
    return str(x)


@dataclass(frozen=True)
class RationalMatrix:
    rows: tuple[tuple, ...]

    def __init__(self, rows):
        rows = tuple(tuple(as_exact(Fraction(x) if isinstance(x, (int, str)) else x) for x in row)
                     for row in rows)
        if rows and len({len(r) for r in rows}) != 1:
            raise ValueError("matrix rows have different lengths")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_columns(cls, columns, nrows: int | None = None) -> "RationalMatrix":
        columns = [tuple(c) for c in columns]
        if not columns:
            return cls([()] * (nrows or 0))
        return cls(list(zip(*columns)))

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def column(self, j: int) -> tuple:
        return tuple(row[j] for row in self.rows)

    def select_columns(self, cols) -> "RationalMatrix":
        cols = list(cols)
        for j in cols:
            if j < 0 or j >= self.ncols:
                raise IndexError(f"column {j} outside 0..{self.ncols - 1}")
        return RationalMatrix([[row[j] for j in cols] for row in self.rows])

    def is_rational(self) -> bool:
        return all(isinstance(x, Fraction) for row in self.rows for x in row)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]


def _integer_rows(rows) -> list[list[int]]:
    out = []
    for row in rows:
        den = 1
        for x in row:
            den = den * x.denominator // math.gcd(den, x.denominator)
        out.append([int(x * den) for x in row])
    return out


def _bareiss_rank(m: list[list[int]]) -> int:
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    rnk = 0
    prev = 1
    for col in range(ncols):
        pivot = next((i for i in range(rnk, nrows) if m[i][col] != 0), None)
        if pivot is None:
            continue
        m[rnk], m[pivot] = m[pivot], m[rnk]
        p = m[rnk][col]
        for i in range(rnk + 1, nrows):
            f = m[i][col]
            row = m[i]
            prow = m[rnk]
            for j in range(col + 1, ncols):
                row[j] = (row[j] * p - f * prow[j]) // prev
            row[col] = 0
        prev = p
        rnk += 1
        if rnk == nrows:
            break
    return rnk


def _gauss_rank(rows) -> int:
    m = [list(r) for r in rows]
    nrows = len(m)
    ncols = len(m[0]) if m else 0
    rnk = 0
    for col in range(ncols):
        pivot = next((i for i in range(rnk, nrows) if m[i][col] != 0), None)
        if pivot is None:
            continue
        m[rnk], m[pivot] = m[pivot], m[rnk]
        inv = 1 / m[rnk][col]
        for i in range(rnk + 1, nrows):
            f = m[i][col]
            if f != 0:
                f = f * inv
                m[i] = [a - f * b for a, b in zip(m[i], m[rnk])]
        rnk += 1
        if rnk == nrows:
            break
    return rnk


def rank(a: RationalMatrix) -> int:
    """Exact column rank (Bareiss on rational input, Gauss-Jordan on surds)."""
    if a.nrows == 0 or a.ncols == 0:
        return 0
    if a.is_rational():
        return _bareiss_rank(_integer_rows(a.rows))
    return _gauss_rank(a.rows)


def rank_by_columns(a: RationalMatrix) -> int:
    """Rank by eliminating on the transpose: an independent pivot order."""
    if a.nrows == 0 or a.ncols == 0:
        return 0
    cols = [a.column(j) for j in range(a.ncols)]
    return _gauss_rank(cols)


def det3(p, q, r):
    """Determinant of the 3x3 matrix with columns p, q, r."""
    return (p[0] * (q[1] * r[2] - q[2] * r[1])
            - q[0] * (p[1] * r[2] - p[2] * r[1])
            + r[0] * (p[1] * q[2] - p[2] * q[1]))


def cross(p, q) -> tuple:
    return (p[1] * q[2] - p[2] * q[1],
            p[2] * q[0] - p[0] * q[2],
            p[0] * q[1] - p[1] * q[0])


def submatrix_rank(a: RationalMatrix, cols) -> int:
    cols = list(cols)
    for j in cols:
        if j < 0 or j >= a.ncols:
            raise IndexError(f"column {j} outside 0..{a.ncols - 1}")
    if not cols:
        return 0
    if a.nrows == 3 and len(cols) == 3:
        if det3(a.column(cols[0]), a.column(cols[1]), a.column(cols[2])) != 0:
            return 3
    return rank(a.select_columns(cols))


def matroid_from_matrix(a: RationalMatrix, max_cols: int = MAX_MATRIX_COLUMNS) -> Matroid:
    """The vector matroid M[A] on the columns of ``a``."""
    if a.ncols > max_cols:
        raise MatroidError(f"{a.ncols} columns exceeds the enumeration guard of {max_cols}")
    r = rank(a)
    bases = [s for s in combinations(range(a.ncols), r) if submatrix_rank(a, s) == r]
    return Matroid(a.ncols, r, bases)


@dataclass(frozen=True)
class PointConfig:
    """Homogeneous plane points; ``labels[i]`` names point ``i``."""

    points: tuple[tuple, tuple, tuple]
    labels: tuple[str, ...]

    def __init__(self, points, labels=None):
        pts = tuple(tuple(as_exact(Fraction(x) if isinstance(x, (int, str)) else x) for x in p)
                    for p in points)
        for i, p in enumerate(pts):
            if len(p) != 3:
                raise ValueError(f"point {i} is not a triple")
            if all(x == 0 for x in p):
                raise ValueError(f"point {i} is the zero vector")
        if labels is None:
            labels = [str(i) for i in range(len(pts))]
        labels = tuple(labels)
        if len(labels) != len(pts):
            raise ValueError("one label per point")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.points)

    def matrix(self) -> RationalMatrix:
        return RationalMatrix.from_columns(self.points, 3)


def format_matrix(a: RationalMatrix) -> str:
    lines = [f"matrix {a.nrows} {a.ncols}"]
    lines += [" ".join(_fmt(x) for x in row) for row in a.rows]
    return "\n".join(lines) + "\n"


def _data_lines(text: str):
    for i, line in enumerate(text.splitlines(), 1):
        body = line.split("#")[0].strip()
        if body:
            yield i, body


def parse_matrix(text: str) -> RationalMatrix:
    rows = list(_data_lines(text))
    if not rows or rows[0][1].split()[0] != "matrix":
        raise MatrixFormatError("line 1: expected 'matrix <rows> <cols>'")
    try:
        _, nr, nc = rows[0][1].split()
        nr, nc = int(nr), int(nc)
    except ValueError:
        raise MatrixFormatError(f"line {rows[0][0]}: expected 'matrix <rows> <cols>'") from None
    body = rows[1:]
    if len(body) != nr:
        raise MatrixFormatError(f"expected {nr} rows, found {len(body)}")
    out = []
    for i, line in body:
        toks = line.split()
        if len(toks) != nc:
            raise MatrixFormatError(f"line {i}: expected {nc} entries, found {len(toks)}")
        try:
            out.append([parse_number(t) for t in toks])
        except (ValueError, ZeroDivisionError):
            raise MatrixFormatError(f"line {i}: bad rational in {line!r}") from None
    if nr == 0:
        return RationalMatrix([])
    return RationalMatrix(out)


def format_points(pc: PointConfig) -> str:
    lines = [f"points {len(pc)}"]
    for p, label in zip(pc.points, pc.labels):
        lines.append(" ".join(_fmt(x) for x in p) + f" {label}")
    return "\n".join(lines) + "\n"


def parse_points(text: str) -> PointConfig:
    rows = list(_data_lines(text))
    if not rows or rows[0][1].split()[0] != "points":
        raise MatrixFormatError("line 1: expected 'points <n>'")
    n = int(rows[0][1].split()[1])
    body = rows[1:]
    if len(body) != n:
        raise MatrixFormatError(f"expected {n} points, found {len(body)}")
    pts, labels = [], []
    for i, line in body:
        toks = line.split()
        if len(toks) not in (3, 4):
            raise MatrixFormatError(f"line {i}: expected 'x y z [label]'")
        try:
            pts.append(tuple(parse_number(t) for t in toks[:3]))
        except (ValueError, ZeroDivisionError):
            raise MatrixFormatError(f"line {i}: bad coordinate in {line!r}") from None
        labels.append(toks[3] if len(toks) == 4 else str(len(labels)))
    return PointConfig(pts, labels)
