"""Rank-3 order types and their simulation by matroids.

A chirotope assigns -1, 0 or +1 to each ordered triple and is alternating.
``simulate`` builds a matroid that contains the elements. Collinear triples
become lines. Each oriented triple ``(a, b, e)`` gets a gadget that forces
``e`` onto the correct side of the line ``ab``, relative to a reference
element ``c``:

* ``c'`` is a new point on line ``ac``, on the same side of ``a`` as ``c``;
* ``d`` is where line ``ab`` meets the new line through ``c'`` and ``e``;
* same orientation: ``e`` lies on the same side of ``d`` as ``c'``;
* opposite orientation: ``d`` lies strictly between ``c'`` and ``e``.

Each "same side" condition is a POS gadget in the local frame of the line.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .exact import PointConfig, det3
from .gadgets import CompiledMatroid, GadgetTrace, emit_pos
from .realize import (GeometricInfeasibility, Placer, Realization, RealizationError,
                      RESTARTS, normalize_point)
from .surd import exact_sign

__all__ = [
    "Chirotope",
    "ChirotopeFormatError",
    "DegenerateChirotopeError",
    "Simulation",
    "chirotope_from_points",
    "format_chirotope",
    "parse_chirotope",
    "realize_simulation",
    "simulate",
]


class ChirotopeFormatError(ValueError):
    pass


class DegenerateChirotopeError(ValueError):
    """Every triple is collinear; the simulating matroid would have rank below 3."""


def _parity_sort(t):
    t = list(t)
    sign = 1
    for i in range(len(t)):
        for j in range(len(t) - 1 - i):
            if t[j] > t[j + 1]:
                t[j], t[j + 1] = t[j + 1], t[j]
                sign = -sign
    return tuple(t), sign


@dataclass(frozen=True)
class Chirotope:
    n: int
    signs: dict = field(hash=False)

    def __post_init__(self):
        for t in combinations(range(self.n), 3):
            if t not in self.signs:
                raise ChirotopeFormatError(f"no sign for triple {t}")
            if self.signs[t] not in (-1, 0, 1):
                raise ChirotopeFormatError(f"sign of {t} must be -1, 0 or 1")

    def __call__(self, i: int, j: int, k: int) -> int:
        if len({i, j, k}) < 3:
            raise ValueError("chirotope needs three distinct elements")
        t, s = _parity_sort((i, j, k))
        return s * self.signs[t]

    def negated(self) -> "Chirotope":
        return Chirotope(self.n, {t: -s for t, s in self.signs.items()})

    def restrict(self, elements) -> "Chirotope":
        elements = list(elements)
        return Chirotope(len(elements), {t: self(*(elements[i] for i in t))
                                         for t in combinations(range(len(elements)), 3)})

    def equal_up_to_sign(self, other: "Chirotope") -> bool:
        return self.n == other.n and (self.signs == other.signs or self.negated().signs == other.signs)


def chirotope_from_points(pc) -> Chirotope:
    pts = pc.points if isinstance(pc, PointConfig) else [tuple(p) for p in pc]
    norm = []
    for i, p in enumerate(pts):
        if len(p) == 2:
            p = (Fraction(p[0]), Fraction(p[1]), Fraction(1))
        if p[2] == 0:
            raise ValueError(f"point {i} is at infinity")
        norm.append(normalize_point(p))
    return Chirotope(len(norm), {t: exact_sign(det3(*(norm[i] for i in t)))
                                 for t in combinations(range(len(norm)), 3)})


def format_chirotope(chi: Chirotope) -> str:
    lines = [f"chirotope {chi.n}"]
    lines += [f"{i} {j} {k} {chi.signs[(i, j, k)]}" for i, j, k in combinations(range(chi.n), 3)]
    return "\n".join(lines) + "\n"


def parse_chirotope(text: str) -> Chirotope:
    rows = [(i, l.split("#")[0].strip()) for i, l in enumerate(text.splitlines(), 1)]
    rows = [(i, l) for i, l in rows if l]
    if not rows or rows[0][1].split()[0] != "chirotope":
        raise ChirotopeFormatError("line 1: expected 'chirotope <n>'")
    try:
        n = int(rows[0][1].split()[1])
    except (IndexError, ValueError):
        raise ChirotopeFormatError(f"line {rows[0][0]}: expected 'chirotope <n>'") from None
    signs = {}
    for i, line in rows[1:]:
        try:
            a, b, c, s = (int(x) for x in line.split())
        except ValueError:
            raise ChirotopeFormatError(f"line {i}: expected 'i j k s'") from None
        if max(a, b, c) >= n or min(a, b, c) < 0 or len({a, b, c}) < 3:
            raise ChirotopeFormatError(f"line {i}: bad triple")
        t, p = _parity_sort((a, b, c))
        signs[t] = p * s
    return Chirotope(n, signs)


# --- simulation ------------------------------------------------------------------

@dataclass
class Simulation:
    cm: CompiledMatroid
    chirotope: Chirotope
    order: list[int]                       # insertion order of original elements
    element_point: dict[int, int]          # original element -> point id
    stats: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"order": self.order,
                "element_point": {str(k): v for k, v in self.element_point.items()},
                "stats": self.stats, "compiled": self.cm.to_json()}


def _inf_point(cm: CompiledMatroid, lid: int, tag: str, subs: list) -> int:
    linf = cm.line_id("linf")
    common = cm.lines[lid] & cm.lines[linf]
    if common:
        return min(common)
    p = cm.add_point(f"inf{tag}", "helper", "determined")
    cm.put_on_line(p, lid)
    cm.put_on_line(p, linf)
    subs.append(GadgetTrace("MEET", (p,), (p, p, p), lid, lines=[lid, linf]))
    return p


def _line(cm: CompiledMatroid, p: int, q: int) -> tuple[int, bool]:
    lid = cm.common_line(p, q)
    if lid is not None:
        return lid, False
    return cm.add_line([p, q]), True


def _orient(cm, A, B, E, C, same: bool, tag: str, stats: dict) -> GadgetTrace:
    subs: list[GadgetTrace] = []
    L_ac, new_ac = _line(cm, A, C)
    n_before = len(cm)
    i_ac = _inf_point(cm, L_ac, f"{tag}.ac", subs)
    stats["shared_inf_points"] += len(cm) == n_before
    cp = cm.add_point(f"ot{tag}.c'", "helper", "free-on-line")
    cm.put_on_line(cp, L_ac)
    subs.append(GadgetTrace("CHOOSE", (cp,), (A, C, i_ac), L_ac))
    subs.append(emit_pos(cm, cp, (A, C, i_ac), L_ac, tag=f"{tag}.side"))
    L_ab, new_ab = _line(cm, A, B)
    lp = cm.add_line([cp, E])
    d = cm.add_point(f"ot{tag}.d", "helper", "determined")
    cm.put_on_line(d, L_ab)
    cm.put_on_line(d, lp)
    subs.append(GadgetTrace("MEET", (d,), (d, d, d), L_ab, lines=[L_ab, lp]))
    i_lp = _inf_point(cm, lp, f"{tag}.lp", subs)
    if same:
        subs.append(emit_pos(cm, E, (d, cp, i_lp), lp, tag=f"{tag}.same"))
    else:
        subs.append(emit_pos(cm, d, (cp, E, i_lp), lp, tag=f"{tag}.opp1"))
        subs.append(emit_pos(cm, d, (E, cp, i_lp), lp, tag=f"{tag}.opp2"))
    stats["same" if same else "opposite"] += 1
    stats["pos"] += 2 if same else 3
    stats["orient_lines"] += 1 + new_ac + new_ab
    return GadgetTrace("GROUP", (A, B, E), (A, C, i_ac), L_ac, sub=subs,
                       constraint=f"orient {cm.labels[A]} {cm.labels[B]} {cm.labels[E]} "
                                  f"{'like' if same else 'against'} {cm.labels[C]}")


def simulate(chi: Chirotope) -> Simulation:
    """Matroid whose valid representations induce the order type ``chi`` (up to reflection)."""
    base = next((t for t in combinations(range(chi.n), 3) if chi.signs[t] != 0), None)
    if base is None:
        raise DegenerateChirotopeError("all triples are collinear; nothing of rank 3 to simulate")
    order = list(base) + [i for i in range(chi.n) if i not in base]
    cm = CompiledMatroid()
    cm.add_line([], name="linf")
    pts = [cm.add_point(f"e:{order[i]}", "element", "element") for i in range(chi.n)]
    stats = {"collinear": 0, "collinear_lines": 0, "same": 0, "opposite": 0, "pos": 0,
             "orient_lines": 0, "shared_inf_points": 0}
    for i in range(3, chi.n):
        e = order[i]
        for a, b in combinations(range(i), 2):
            if chi(order[a], order[b], e) == 0:
                stats["collinear"] += 1
                lid = cm.common_line(pts[a], pts[b])
                if lid is None:
                    cm.add_line([pts[a], pts[b], pts[i]])
                    stats["collinear_lines"] += 1
                else:
                    cm.put_on_line(pts[i], lid)
        for a, b in combinations(range(i), 2):
            s = chi(order[a], order[b], e)
            if s == 0:
                continue
            pivot, other, c = _reference(chi, order, a, b, i)
            same = s == chi(order[a], order[b], order[c])
            t = _orient(cm, pts[pivot], pts[other], pts[i], pts[c], same, f"{i}.{a}.{b}", stats)
            cm.traces.append(t)
    return Simulation(cm, chi, order, {order[i]: pts[i] for i in range(chi.n)}, stats)


def _reference(chi, order, a, b, i):
    """Lexicographically smallest earlier ``c`` off line ab with e off line (pivot, c)."""
    e = order[i]
    for pivot, other in ((a, b), (b, a)):
        for c in range(i):
            if c in (a, b) or chi(order[a], order[b], order[c]) == 0:
                continue
            if chi(order[pivot], order[c], e) != 0:
                return pivot, other, c
    raise DegenerateChirotopeError(f"no reference triple for element {e}")


def count_formula(sim: Simulation) -> dict:
    """Points and lines predicted from the per-gadget tallies.

    Every orientation gadget adds c', d, the infinite point of the line
    through c' and e, and usually the infinite point of line ac; every POS
    gadget adds 10 points and 10 lines.
    """
    s = sim.stats
    k = s["same"] + s["opposite"]
    return {"points": sim.chirotope.n + 4 * k - s["shared_inf_points"] + 10 * s["pos"],
            "lines": 1 + s["collinear_lines"] + s["orient_lines"] + 10 * s["pos"]}


# --- realization -------------------------------------------------------------------

def _perspective(points, rng):
    """Random map (x, y) -> (x, y) / (1 + alpha*x + beta*y) with a positive denominator.

    Such a map keeps every orientation but breaks accidental parallels, which
    would otherwise put determined points at infinity onto element lines.
    """
    pts = [tuple(Fraction(c) for c in p[:2]) for p in points]
    scale = max((abs(c) for p in pts for c in p), default=1) or 1
    while True:
        alpha = Fraction(rng.randint(-1000, 1000), 4000) / scale
        beta = Fraction(rng.randint(-1000, 1000), 4000) / scale
        dens = [1 + alpha * x + beta * y for x, y in pts]
        if all(d > 0 for d in dens):
            return [(x / d, y / d, Fraction(1)) for (x, y), d in zip(pts, dens)]


def realize_simulation(sim: Simulation, points, seed: int = 0) -> Realization:
    """Place elements at a perspective image of ``points`` and solve every gadget.

    ``points`` is indexed by original element (pairs or finite homogeneous
    triples).
    """
    from .realize import _assert_lines

    cm = sim.cm
    points = [normalize_point(p if len(p) == 3 else (p[0], p[1], 1)) for p in points]
    last = None
    for attempt in range(RESTARTS):
        rng = random.Random(f"{seed}:{attempt}")
        seeds = _perspective(points, rng)
        placer = Placer(cm, rng)
        for elem, pid in sim.element_point.items():
            placer.place(pid, seeds[elem], check=False)
        try:
            for t in cm.traces:
                placer.place_trace(t)
        except GeometricInfeasibility:
            raise
        except RealizationError as exc:
            last = exc
            continue
        r = Realization(list(cm.labels), [placer.coords[i] for i in range(len(cm))],
                        seed, placer.resamples, attempt)
        _assert_lines(cm, r)
        return r
    raise RealizationError(f"{RESTARTS} restarts exhausted: {last}")


def induced_chirotope(sim: Simulation, r: Realization) -> Chirotope:
    pts = [r.points[sim.element_point[e]] for e in range(sim.chirotope.n)]
    return chirotope_from_points(pts)


def simulation_json(sim: Simulation) -> str:
    return json.dumps(sim.to_json())
