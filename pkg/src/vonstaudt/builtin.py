"""Small named matroids with bundled matrices."""

from __future__ import annotations

from fractions import Fraction

from .exact import RationalMatrix
from .matroid import LineSet, Matroid, from_lines, uniform

__all__ = ["BUILTINS", "builtin", "builtin_matrix"]

FANO_LINES = ((0, 3, 6), (0, 1, 2), (0, 4, 5), (2, 5, 6), (1, 4, 6), (2, 3, 4), (1, 3, 5))
NONFANO_LINES = tuple(line for line in FANO_LINES if line != (1, 3, 5))

# columns are the nonzero vectors of GF(2)^3, labelled so that each Fano line
# is closed under XOR; read over the rationals, line {2,5,6} becomes a basis
FANO_BINARY_COLUMNS = ((0, 0, 1), (0, 1, 0), (0, 1, 1), (1, 0, 0), (1, 1, 1), (1, 1, 0), (1, 0, 1))

_t = Fraction(2, 3)
NONFANO_POINTS = ((0, 0, 1), (1, 0, 1), (2, 0, 1), (1, 1, 1), (0, 2, 1), (0, 1, 1), (_t, _t, 1))


def builtin(name: str) -> Matroid:
    if name == "fano":
        return from_lines(LineSet(7, FANO_LINES))
    if name == "nonfano":
        return from_lines(LineSet(7, NONFANO_LINES))
    if name == "u24":
        return uniform(2, 4)
    if name == "u34":
        return uniform(3, 4)
    raise KeyError(f"unknown builtin {name!r}; choose from {', '.join(BUILTINS)}")


def builtin_matrix(name: str) -> RationalMatrix:
    """Bundled matrix: a representation, or for Fano the binary matrix read over Q."""
    if name == "fano":
        return RationalMatrix.from_columns(FANO_BINARY_COLUMNS)
    if name == "nonfano":
        return RationalMatrix.from_columns(NONFANO_POINTS)
    if name == "u24":
        return RationalMatrix([[1, 0, 1, 1], [0, 1, 1, 2]])
    if name == "u34":
        return RationalMatrix.from_columns([(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)])
    raise KeyError(f"unknown builtin {name!r}")


BUILTINS = ("fano", "nonfano", "u24", "u34")
