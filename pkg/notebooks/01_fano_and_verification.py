"""
Matroids from bases, and checking a matrix against one
======================================================

"""

from itertools import combinations

import numpy as np

from vonstaudt.builtin import FANO_LINES, builtin, builtin_matrix
from vonstaudt.exact import matroid_from_matrix
from vonstaudt.matroid import circuits, rank_of, validate_axioms
from vonstaudt.verify import verify_representation

# The Fano plane: seven points, seven lines, every other triple a basis
fano = builtin("fano")
print(len(fano.bases), "bases out of", len(list(combinations(range(7), 3))), "triples")
print("exchange axiom holds:", validate_axioms(fano).ok)
print("circuit sizes:", sorted({len(c) for c in circuits(fano)}))

# Its binary matrix, read over the rationals.  Over GF(2) every line is a
# dependent triple; over Q one of them becomes independent.
a = builtin_matrix("fano")
print(np.array([[int(x) for x in row] for row in a.rows]))
out = verify_representation(fano, a)
b, x, y = out.witness
print("verdict:", out.verdict)
print("new basis", tuple(sorted(set(b) - {x} | {y})), "is a Fano line:",
      tuple(sorted(set(b) - {x} | {y})) in FANO_LINES)

# Over Q exactly one line breaks, so the vector matroid has one basis more
print("vector matroid has", len(matroid_from_matrix(a).bases), "bases")

# The bundled non-Fano drops a different line and comes with its own real points
nonfano = builtin("nonfano")
print("non-Fano:", verify_representation(nonfano, builtin_matrix("nonfano")).verdict)

# rank is the largest overlap with a basis
print("rank of a line:", rank_of(fano, FANO_LINES[0]), " rank of everything:", rank_of(fano, range(7)))
