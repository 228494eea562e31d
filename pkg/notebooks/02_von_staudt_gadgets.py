"""
Arithmetic with points and lines
================================

A value x is the point (x, 0, 1) on the line through ZERO, ONE and INF.
Addition and multiplication are drawn with four helper points each.
"""

import numpy as np

from vonstaudt.etr import check_assignment, parse
from vonstaudt.gadgets import compile_system, expected_counts
from vonstaudt.realize import GeometricInfeasibility, check_realization, read_value, realize

system = parse("""
VAR x y z w
ADD x y z      # z = x + y
MUL z z w      # w = z^2
POS x
""")
values = {"x": 2, "y": 3, "z": 5, "w": 25}
print(check_assignment(system, values).ok)

cm = compile_system(system)
print("points and lines:", cm.counts(), " closed form:", expected_counts(system))

r = realize(cm, values, seed=1)
print("represents the compiled matroid:", check_realization(r, cm.to_matroid()))
print({v: read_value(r, f"var:{v}") for v in system.vars})

# Finite points of the realization, as floats for a quick look
pts = np.array([[float(c) for c in p] for p in r.points if p[2] != 0])
pts = pts[:, :2] / pts[:, 2:]
print(pts.shape[0], "finite points, bounding box", pts.min(axis=0).round(2), pts.max(axis=0).round(2))

# x > 0 is drawn as x = s * s, so a negative x has nowhere to put s
negative = parse("VAR x\nPOS x\n")
try:
    realize(compile_system(negative), {"x": -1})
except GeometricInfeasibility as exc:
    print("x = -1:", exc)
