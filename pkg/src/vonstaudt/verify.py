"""Certificate checking: does a matrix represent an explicit-bases matroid?

The check runs in time polynomial in the number of bases.  After confirming
the rank and that every listed basis is a full-rank column set, it only looks
at sets one exchange away from a listed basis: if the matrix had an extra
basis, one of those neighbours would already be independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .exact import RationalMatrix, det3, matroid_from_matrix, rank
from .matroid import Matroid, MatroidError

__all__ = [
    "DimensionMismatchError",
    "VerificationOutcome",
    "brute_force_equal",
    "verify_representation",
]

REPRESENTS = "represents"
RANK_MISMATCH = "rank-mismatch"
MISSING_BASIS = "missing-basis"
EXTRA_BASIS = "extra-basis"


class DimensionMismatchError(MatroidError):
    pass


@dataclass(frozen=True)
class VerificationOutcome:
    verdict: str
    witness: tuple | None = None
    detail: dict = field(default_factory=dict, compare=False)

    @property
    def represents(self) -> bool:
        return self.verdict == REPRESENTS

    def __bool__(self) -> bool:
        return self.represents

    def to_json(self) -> dict:
        out = {"verdict": self.verdict}
        if self.verdict == MISSING_BASIS:
            out["basis"] = list(self.witness)
        elif self.verdict == EXTRA_BASIS:
            b, x, y = self.witness
            out.update(basis=list(b), x=x, y=y,
                       independent_set=sorted(set(b) - {x} | {y}))
        out.update(self.detail)
        return out


class _ColumnRanks:
    """Rank queries on column subsets, with columns pre-scaled to integers."""

    def __init__(self, a: RationalMatrix):
        self.a = a
        self.cols = [a.column(j) for j in range(a.ncols)]
        if a.is_rational():
            scaled = []
            for col in self.cols:
                den = 1
                for x in col:
                    den = den * x.denominator // math.gcd(den, x.denominator)
                scaled.append(tuple(Fraction(int(x * den)) for x in col))
            self.cols = scaled

    def rank(self, cols) -> int:
        cols = list(cols)
        if not cols:
            return 0
        if self.a.nrows == 3 and len(cols) == 3:
            c = self.cols
            if det3(c[cols[0]], c[cols[1]], c[cols[2]]) != 0:
                return 3
        return rank(RationalMatrix.from_columns([self.cols[j] for j in cols]))


def verify_representation(m: Matroid, a: RationalMatrix) -> VerificationOutcome:
    """Decide whether ``M[a] == m``; the first failing witness is returned."""
    if a.ncols != m.n:
        raise DimensionMismatchError(f"matrix has {a.ncols} columns but the matroid has {m.n} elements")
    ranks = _ColumnRanks(a)
    ra = rank(a) if a.nrows else 0
    if ra != m.r:
        return VerificationOutcome(RANK_MISMATCH, None, {"matrix_rank": ra, "matroid_rank": m.r})
    for b in m.bases:
        if ranks.rank(b) < m.r:
            return VerificationOutcome(MISSING_BASIS, b)
    masks = m.masks
    dependent: set[int] = set()
    for b in m.bases:
        bmask = 0
        for e in b:
            bmask |= 1 << e
        for x in b:
            rest = bmask & ~(1 << x)
            for y in range(m.n):
                if bmask >> y & 1:
                    continue
                s = rest | (1 << y)
                if s in masks or s in dependent:
                    continue
                cols = [e for e in range(m.n) if s >> e & 1]
                if ranks.rank(cols) == m.r:
                    return VerificationOutcome(EXTRA_BASIS, (b, x, y))
                dependent.add(s)
    return VerificationOutcome(REPRESENTS)


def brute_force_equal(m: Matroid, a: RationalMatrix, max_n: int = 10) -> bool:
    """Oracle: enumerate every column subset of ``a`` and compare basis families."""
    if m.n > max_n or a.ncols > max_n:
        raise MatroidError(f"brute force limited to {max_n} elements")
    if a.ncols != m.n:
        return False
    if a.nrows == 0:
        return m.r == 0
    other = matroid_from_matrix(a, max_cols=max_n)
    return other.r == m.r and other.bases == m.bases
