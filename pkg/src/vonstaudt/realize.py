"""Exact point configurations for compiled matroids.

Variable points go on the x-axis at their assigned values and the line at
infinity is ``z = 0``.  Each gadget draws its two free helpers as random
integer directions ``(p, q, 0)`` and computes the other two helpers by exact
line intersection.  A candidate is rejected when a new point coincides with a
placed point or is collinear with two placed points on no shared registered
line.  A float matrix screens these collinearities and exact determinants
decide the close calls.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .etr import ConstraintSystem, check_assignment
from .exact import PointConfig, cross, det3
from .gadgets import CompiledMatroid, GadgetTrace
from .matroid import Matroid
from .surd import Surd, as_exact, exact_sign
from .verify import verify_representation

__all__ = [
    "GeometricInfeasibility",
    "InvalidAssignmentError",
    "Realization",
    "RealizationError",
    "check_realization",
    "normalize_point",
    "read_value",
    "realize",
    "send_line_to_infinity",
]

HELPER_RANGE = 10**6
RETRIES_PER_GADGET = 64
RESTARTS = 8
FLOAT_TOL = 1e-9


class RealizationError(RuntimeError):
    def __init__(self, message: str, triple=None):
        self.triple = triple
        super().__init__(message)


class GeometricInfeasibility(RealizationError):
    pass


class InvalidAssignmentError(ValueError):
    pass


class _Reject(Exception):
    def __init__(self, triple):
        self.triple = triple


def normalize_point(p) -> tuple:
    """Scale finite points to ``z = 1``; scale points at infinity to a unit leading entry."""
    p = tuple(as_exact(x) for x in p)
    if all(x == 0 for x in p):
        raise RealizationError("degenerate intersection (zero vector)")
    if p[2] != 0:
        return tuple(as_exact(x / p[2]) for x in p[:2]) + (Fraction(1),)
    lead = p[0] if p[0] != 0 else p[1]
    return tuple(as_exact(x / lead) for x in p)


def _to_float(p) -> np.ndarray:
    v = np.array([float(x) for x in p])
    return v / np.linalg.norm(v)


@dataclass
class Realization:
    labels: list[str]
    points: list[tuple]
    seed: int
    resamples: list[int] = field(default_factory=list)
    restarts: int = 0
    transform: tuple | None = None

    def config(self) -> PointConfig:
        return PointConfig(self.points, self.labels)

    def matrix(self):
        return self.config().matrix()

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def metadata(self) -> dict:
        return {"seed": self.seed, "restarts": self.restarts,
                "resamples": self.resamples, "retry_bound": RETRIES_PER_GADGET,
                "restart_bound": RESTARTS, "helper_range": HELPER_RANGE}


class Placer:
    """Incremental exact placement with freedom checks against every placed pair."""

    def __init__(self, cm: CompiledMatroid, rng: random.Random):
        self.cm = cm
        self.rng = rng
        self.coords: dict[int, tuple] = {}
        self.order: list[int] = []
        self._floats: list[np.ndarray] = []
        self.resamples: list[int] = []

    # bookkeeping ------------------------------------------------------------
    def place(self, pid: int, p, check: bool = True) -> None:
        p = normalize_point(p)
        if pid in self.coords:
            raise RealizationError(f"{self.cm.labels[pid]} placed twice")
        if check:
            self._check(pid, p)
        self.coords[pid] = p
        self.order.append(pid)
        self._floats.append(_to_float(p))

    def unplace_from(self, k: int) -> None:
        for pid in self.order[k:]:
            del self.coords[pid]
        del self.order[k:]
        del self._floats[k:]

    def _check(self, pid: int, p) -> None:
        if not self.order:
            return
        pf = _to_float(p)
        Q = np.array(self._floats)
        # coincidence: cross(p, q) == 0
        cr = np.cross(pf, Q)
        near = np.where(np.abs(cr).max(axis=1) < FLOAT_TOL)[0]
        for i in near:
            q = self.coords[self.order[i]]
            if all(x == 0 for x in cross(p, q)):
                raise _Reject((pid, self.order[i]))
        D = cr @ Q.T
        D = np.abs(D)
        np.fill_diagonal(D, np.inf)
        ii, jj = np.where(D < FLOAT_TOL)
        for i, j in zip(ii, jj):
            if i >= j:
                continue
            q, r = self.order[i], self.order[j]
            if self._registered(pid, q, r):
                continue
            if det3(p, self.coords[q], self.coords[r]) == 0:
                raise _Reject((pid, q, r))

    def _registered(self, p, q, r) -> bool:
        return bool(self.cm.lines_of(p) & self.cm.lines_of(q) & self.cm.lines_of(r))

    def sample_infinity(self) -> tuple:
        hr = HELPER_RANGE
        p = self.rng.randint(-hr, hr)
        q = self.rng.randint(1, hr) * self.rng.choice((-1, 1))
        return (Fraction(p), Fraction(q), Fraction(0))

    # frames -------------------------------------------------------------------
    def local_value(self, frame, pid):
        """Affine coordinate of a placed point in the frame ``(o, u, inf)``."""
        o, u = self.coords[frame[0]], self.coords[frame[1]]
        p = self.coords[pid]
        if p[2] == 0:
            raise RealizationError(f"{self.cm.labels[pid]} is at infinity")
        k = 0 if u[0] != o[0] else 1
        return as_exact((p[k] - o[k]) / (u[k] - o[k]))

    def frame_point(self, frame, lam) -> tuple:
        o, u = self.coords[frame[0]], self.coords[frame[1]]
        return tuple(as_exact(a + lam * (b - a)) for a, b in zip(o, u))

    # gadgets -------------------------------------------------------------------
    def place_trace(self, t: GadgetTrace) -> None:
        if t.kind == "POS":
            self._place_pos(t)
        elif t.kind in ("ADD", "MUL"):
            self._retry(lambda: self._try_gadget(t), t)
        elif t.kind == "MEET":
            l1, l2 = (self._line_equation(lid, t.inputs[0]) for lid in t.lines)
            self.place(t.inputs[0], cross(l1, l2))
        elif t.kind == "CHOOSE":
            # a positive square keeps the later square root rational
            q = Fraction(self.rng.randint(1, 999), self.rng.randint(1, 999))
            self.place(t.inputs[0], self.frame_point(t.frame, q * q))
        elif t.kind == "GROUP":
            self._retry(lambda: self._try_group(t), t)
        else:
            raise RealizationError(f"unknown trace kind {t.kind!r}")

    def _try_group(self, t: GadgetTrace) -> None:
        try:
            for sub in t.sub:
                self.place_trace(sub)
        except GeometricInfeasibility:
            raise
        except RealizationError as exc:
            raise _Reject(exc.triple or ()) from exc

    def _line_equation(self, lid: int, exclude: int) -> tuple:
        if lid == self.cm.named_lines.get("linf"):
            return (Fraction(0), Fraction(0), Fraction(1))
        placed = [p for p in sorted(self.cm.lines[lid]) if p != exclude and p in self.coords]
        for i, p in enumerate(placed):
            for q in placed[i + 1:]:
                eq = cross(self.coords[p], self.coords[q])
                if any(x != 0 for x in eq):
                    return eq
        raise RealizationError(f"line {lid} has fewer than two placed points")

    def _retry(self, attempt, t) -> None:
        mark = len(self.order)
        last = None
        for n in range(RETRIES_PER_GADGET):
            try:
                attempt()
                self.resamples.append(n)
                return
            except _Reject as r:
                last = r.triple
                self.unplace_from(mark)
        names = tuple(self.cm.labels[i] for i in last if isinstance(i, int)) if last else None
        raise RealizationError(
            f"{t.kind} gadget: {RETRIES_PER_GADGET} helper samples all created an "
            f"unregistered collinearity, last at {names}", names)

    def _try_gadget(self, t: GadgetTrace) -> None:
        o, u, inf = (self.coords[p] for p in t.frame)
        x, y = self.coords[t.inputs[0]], self.coords[t.inputs[1]]
        h = t.helpers
        a, b = self.sample_infinity(), self.sample_infinity()
        self.place(h["a"], a)
        self.place(h["b"], b)
        a, b = self.coords[h["a"]], self.coords[h["b"]]
        if t.kind == "ADD":
            c = normalize_point(cross(cross(o, b), cross(x, a)))
            self.place(h["c"], c)
            d = normalize_point(cross(cross(inf, c), cross(y, b)))
        else:
            c = normalize_point(cross(cross(u, b), cross(x, a)))
            self.place(h["c"], c)
            d = normalize_point(cross(cross(o, c), cross(b, y)))
        self.place(h["d"], d)
        out = cross(cross(a, d), cross(o, u))
        z = t.inputs[2]
        if z in self.coords:
            if det3(a, d, self.coords[z]) != 0:
                raise RealizationError(
                    f"{t.constraint or t.kind}: output does not match the placed value")
        else:
            self.place(z, out)

    def _place_pos(self, t: GadgetTrace) -> None:
        target = t.inputs[0]
        value = self.local_value(t.frame, target)
        if exact_sign(value) <= 0:
            raise GeometricInfeasibility(
                f"{t.constraint or 'POS'}: no real square root of {value}; "
                "the squaring sub-gadget cannot be realized")
        root = Surd.sqrt(value) if not isinstance(value, Surd) else _surd_sqrt(value)
        mark = len(self.order)
        last = None
        for sign in (1, -1):
            s = as_exact(sign * root)
            denom = value + 1 - s
            if denom == 0:
                continue
            w = as_exact(value / denom)
            try:
                self.place(t.helpers["s"], self.frame_point(t.frame, s))
                self.place(t.helpers["w"], self.frame_point(t.frame, w))
                for sub in t.sub:
                    self.place_trace(sub)
                return
            except (_Reject, RealizationError) as exc:
                last = exc
                self.unplace_from(mark)
        raise RealizationError(f"POS gadget: both square roots collide ({last})")


def _surd_sqrt(v: Surd):
    raise GeometricInfeasibility(f"square root of the irrational value {v} is not supported")


def _initial_points(cm: CompiledMatroid, a: dict) -> dict[int, tuple]:
    pts = {cm.point("ZERO"): (0, 0, 1), cm.point("ONE"): (1, 0, 1), cm.point("INF"): (1, 0, 0)}
    for v, pid in cm.var_point.items():
        p = (a[v], 0, 1)
        if pid in pts and normalize_point(pts[pid]) != normalize_point(p):
            raise InvalidAssignmentError(f"{v} = {a[v]} contradicts an identification of its point")
        pts[pid] = p
    seen = {}
    for pid, p in pts.items():
        key = normalize_point(p)
        if key in seen:
            raise InvalidAssignmentError(
                f"{cm.labels[pid]} and {cm.labels[seen[key]]} would be the same point")
        seen[key] = pid
    return pts


def realize(cm: CompiledMatroid, a: dict, seed: int = 0, cs: ConstraintSystem | None = None) -> Realization:
    """Exact realization of ``cm`` from a satisfying, pairwise-distinct assignment."""
    a = {k: as_exact(v) for k, v in a.items()}
    if cs is not None:
        report = check_assignment(cs, a)
        if not report.ok:
            raise InvalidAssignmentError(f"assignment violates {', '.join(map(str, report.failures))}")
        if not report.distinct:
            raise InvalidAssignmentError(f"assignment values are not distinct: {report.collisions}")
    if not cm.traces:
        raise RealizationError("nothing to realize: the compiled frame has no gadgets")
    base = _initial_points(cm, a)
    last = None
    for attempt in range(RESTARTS):
        rng = random.Random(f"{seed}:{attempt}")
        placer = Placer(cm, rng)
        for pid, p in base.items():
            placer.place(pid, p, check=False)
        try:
            for t in cm.traces:
                placer.place_trace(t)
        except GeometricInfeasibility:
            raise
        except RealizationError as exc:
            last = exc
            continue
        missing = [cm.labels[i] for i in range(len(cm)) if i not in placer.coords]
        if missing:
            raise RealizationError(f"points never placed: {missing}")
        r = Realization(list(cm.labels), [placer.coords[i] for i in range(len(cm))],
                        seed, placer.resamples, attempt)
        _assert_lines(cm, r)
        return r
    raise RealizationError(f"{RESTARTS} restarts exhausted: {last}", getattr(last, "triple", None))


def _assert_lines(cm: CompiledMatroid, r: Realization) -> None:
    for lid, line in enumerate(cm.lines):
        pts = sorted(line)
        if len(pts) < 3:
            continue
        p, q = r.points[pts[0]], r.points[pts[1]]
        for s in pts[2:]:
            if det3(p, q, r.points[s]) != 0:
                raise RealizationError(f"registered line {lid} is not collinear")


def check_realization(r: Realization, m: Matroid) -> bool:
    if len(r.points) != m.n:
        raise ValueError(f"realization has {len(r.points)} points, matroid has {m.n} elements")
    return verify_representation(m, r.matrix()).represents


def _bracket_coords(zero, one):
    line = cross(zero, one)
    k = next(i for i in range(3) if line[i] != 0)
    return [i for i in range(3) if i != k]


def read_value(r: Realization, pt):
    """Cross-ratio ``(x, 1; 0, inf)`` of a point on the measuring line."""
    zero, one, inf = (r.points[r.index(n)] for n in ("ZERO", "ONE", "INF"))
    x = r.points[pt] if isinstance(pt, int) else r.points[r.index(pt)] if isinstance(pt, str) else tuple(pt)
    if det3(zero, one, x) != 0:
        raise ValueError("point is not on the measuring line")
    i, j = _bracket_coords(zero, one)

    def br(p, q):
        return p[i] * q[j] - p[j] * q[i]

    if br(x, inf) == 0:
        raise ValueError("the point at infinity has no finite value")
    return as_exact(br(x, zero) * br(one, inf) / (br(x, inf) * br(one, zero)))


def send_line_to_infinity(r: Realization, line, on_line=()) -> Realization:
    """Apply a rational projective map taking ``line`` (coefficients) to ``z = 0``.

    Points in ``on_line`` may lie on the line; any other point on it is an
    error.  The map has positive determinant and leaves most points with
    positive third coordinate.
    """
    line = tuple(Fraction(c) for c in line)
    if all(c == 0 for c in line):
        raise ValueError("zero line")
    allowed = {r.index(l) if isinstance(l, str) else l for l in on_line}
    rows = None
    for i in range(3):
        for j in range(i + 1, 3):
            e = [tuple(Fraction(int(k == i)) for k in range(3)), tuple(Fraction(int(k == j)) for k in range(3))]
            if det3(e[0], e[1], line) != 0:
                rows = [e[0], e[1], line]
                break
        if rows:
            break
    if det3(*rows) < 0:
        rows[0] = tuple(-c for c in rows[0])
    values = [sum((c * x for c, x in zip(line, p)), Fraction(0)) for p in r.points]
    for idx, v in enumerate(values):
        if v == 0 and idx not in allowed:
            raise ValueError(f"point {r.labels[idx]} lies on the line sent to infinity")
    if sum(exact_sign(v) < 0 for v in values) > sum(exact_sign(v) > 0 for v in values):
        rows[2] = tuple(-c for c in rows[2])
        rows[0] = tuple(-c for c in rows[0])
    new = []
    for p in r.points:
        q = tuple(as_exact(sum((c * x for c, x in zip(row, p)), Fraction(0))) for row in rows)
        new.append(normalize_point(q))
    return Realization(list(r.labels), new, r.seed, list(r.resamples), r.restarts, tuple(rows))


def orientation_signs(points) -> dict:
    """Sign of ``det3`` for every increasing index triple."""
    from itertools import combinations
    return {t: exact_sign(det3(*(points[i] for i in t))) for t in combinations(range(len(points)), 3)}
