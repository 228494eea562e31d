"""
From polynomial equations to a matroid, and order types
=======================================================

"""

from fractions import Fraction

from vonstaudt.etr import check_assignment
from vonstaudt.normalize import SparsePolynomial, run_pipeline
from vonstaudt.order_type import (chirotope_from_points, count_formula, induced_chirotope,
                                  realize_simulation, simulate)
from vonstaudt.surd import sqrt

# x^2 = 2 becomes a sum of squares, then a strict inequality |p| < delta
# inside a ball of radius R, then a constraint system with distinct values
x = SparsePolynomial.var(1, 0)
res = run_pipeline([x * x - 2], test_scale=(Fraction(1, 16), 100), solution=[sqrt(2)])
print("three-address form:", len(res.etrami.constraints), "constraints")
print("sum of squares:", res.p)
print("final system:", len(res.distinct.constraints), "constraints")
report = check_assignment(res.distinct, res.solution)
print("transported solution satisfies it:", report.ok, " distinct:", report.distinct)

# Five points: a square with its centre nudged off the diagonals
pts = [(0, 0), (4, 0), (4, 4), (0, 4), (Fraction(3, 2), Fraction(5, 2))]
chi = chirotope_from_points(pts)
sim = simulate(chi)
print("simulation:", sim.cm.counts(), " predicted:", count_formula(sim))
r = realize_simulation(sim, pts, seed=0)
print("same order type up to reflection:", induced_chirotope(sim, r).equal_up_to_sign(chi))
