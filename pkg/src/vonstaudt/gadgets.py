"""Compile constraint systems into rank-3 matroids with von Staudt gadgets.

All variables live on the line ``l`` through ZERO, ONE and INF.  A second line
``linf`` meets ``l`` at INF.  Each ADD or MUL constraint adds four helper
points.  Two of them, a and b, sit on ``linf``; the other two, c and d, are
cut out by the five gadget lines.  A POS constraint adds two MUL gadgets and
two helper points on ``l``.

Gadgets also work in a local frame ``(o, u, inf)`` on any line through a
point of ``linf``; the order-type simulation relies on that.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .etr import ConstraintSystem
from .matroid import LineSet, Matroid, from_lines

__all__ = [
    "CoincidenceError",
    "CompiledMatroid",
    "GadgetTrace",
    "compile_system",
    "emit_add",
    "emit_mul",
    "emit_pos",
    "expected_counts",
    "init_frame",
]

ADD_LINES = (("o", "b", "c"), ("x", "a", "c"), ("inf", "c", "d"), ("y", "b", "d"), ("a", "d", "z"))
MUL_LINES = (("u", "b", "c"), ("x", "a", "c"), ("o", "c", "d"), ("b", "y", "d"), ("a", "d", "z"))


class CoincidenceError(ValueError):
    """The constraints force two registered points or lines to coincide."""


@dataclass
class GadgetTrace:
    kind: str                      # ADD, MUL or POS
    inputs: tuple[int, ...]        # (x, y, z) or (x,) for POS
    frame: tuple[int, int, int]    # (origin, unit, infinity)
    line: int                      # line id of the frame line
    helpers: dict[str, int] = field(default_factory=dict)
    lines: list[int] = field(default_factory=list)
    sub: list["GadgetTrace"] = field(default_factory=list)
    constraint: str | None = None

    def to_json(self) -> dict:
        out = {"kind": self.kind, "inputs": list(self.inputs), "frame": list(self.frame),
               "line": self.line, "helpers": dict(self.helpers), "lines": list(self.lines)}
        if self.sub:
            out["sub"] = [t.to_json() for t in self.sub]
        if self.constraint is not None:
            out["constraint"] = self.constraint
        return out

    @classmethod
    def from_json(cls, d: dict) -> "GadgetTrace":
        return cls(d["kind"], tuple(d["inputs"]), tuple(d["frame"]), d["line"],
                   {k: int(v) for k, v in d["helpers"].items()}, list(d["lines"]),
                   [cls.from_json(s) for s in d.get("sub", [])], d.get("constraint"))


class CompiledMatroid:
    """Point registry plus line registry, built append-only."""

    def __init__(self):
        self.labels: list[str] = []
        self.roles: list[str] = []
        self.freedom: dict[int, str] = {}
        self.lines: list[set[int]] = []
        self.named_lines: dict[str, int] = {}
        self._by_label: dict[str, int] = {}
        self._point_lines: list[set[int]] = []
        self.var_point: dict[str, int] = {}
        self.traces: list[GadgetTrace] = []

    # registry --------------------------------------------------------------
    def add_point(self, label: str, role: str, freedom: str = "fixed") -> int:
        if label in self._by_label:
            raise ValueError(f"duplicate point label {label!r}")
        pid = len(self.labels)
        self.labels.append(label)
        self.roles.append(role)
        self.freedom[pid] = freedom
        self._by_label[label] = pid
        self._point_lines.append(set())
        return pid

    def point(self, label: str) -> int:
        return self._by_label[label]

    def __len__(self) -> int:
        return len(self.labels)

    def line_id(self, name: str) -> int:
        return self.named_lines[name]

    def _check_new_incidence(self, pid: int, lid: int) -> None:
        for other in self.lines[lid]:
            shared = self._point_lines[pid] & self._point_lines[other]
            shared.discard(lid)
            if shared:
                raise CoincidenceError(
                    f"points {self.labels[pid]} and {self.labels[other]} would lie on two lines")

    def add_line(self, points, name: str | None = None) -> int:
        pts = list(dict.fromkeys(points))
        if len(pts) < len(points):
            raise CoincidenceError(f"line repeats a point: {[self.labels[p] for p in points]}")
        for i, p in enumerate(pts):
            for q in pts[i + 1:]:
                common = self._point_lines[p] & self._point_lines[q]
                if common:
                    raise CoincidenceError(
                        f"points {self.labels[p]} and {self.labels[q]} already share line {min(common)}")
        lid = len(self.lines)
        self.lines.append(set(pts))
        for p in pts:
            self._point_lines[p].add(lid)
        if name:
            self.named_lines[name] = lid
        return lid

    def put_on_line(self, pid: int, lid: int) -> None:
        if pid in self.lines[lid]:
            return
        self._check_new_incidence(pid, lid)
        self.lines[lid].add(pid)
        self._point_lines[pid].add(lid)

    def lines_of(self, pid: int) -> set[int]:
        return set(self._point_lines[pid])

    def common_line(self, p: int, q: int) -> int | None:
        common = self._point_lines[p] & self._point_lines[q]
        return min(common) if common else None

    # export ------------------------------------------------------------------
    def line_set(self) -> LineSet:
        return LineSet(len(self), [sorted(line) for line in self.lines if len(line) >= 3])

    def to_matroid(self) -> Matroid:
        return from_lines(self.line_set())

    def counts(self) -> dict:
        return {"points": len(self), "lines": len(self.lines),
                "gadgets": sum(1 + len(t.sub) for t in self.traces)}

    def to_json(self) -> dict:
        return {"points": [{"label": l, "role": r, "freedom": self.freedom[i]}
                           for i, (l, r) in enumerate(zip(self.labels, self.roles))],
                "lines": [sorted(line) for line in self.lines],
                "named_lines": dict(self.named_lines),
                "var_point": dict(self.var_point),
                "traces": [t.to_json() for t in self.traces]}

    @classmethod
    def from_json(cls, d: dict) -> "CompiledMatroid":
        cm = cls()
        for p in d["points"]:
            cm.add_point(p["label"], p["role"], p["freedom"])
        for line in d["lines"]:
            lid = len(cm.lines)
            cm.lines.append(set(line))
            for p in line:
                cm._point_lines[p].add(lid)
        cm.named_lines = {k: int(v) for k, v in d["named_lines"].items()}
        cm.var_point = {k: int(v) for k, v in d["var_point"].items()}
        cm.traces = [GadgetTrace.from_json(t) for t in d["traces"]]
        return cm


def init_frame() -> CompiledMatroid:
    cm = CompiledMatroid()
    zero = cm.add_point("ZERO", "ZERO")
    one = cm.add_point("ONE", "ONE")
    inf = cm.add_point("INF", "INF")
    cm.add_line([zero, one, inf], name="l")
    cm.add_line([inf], name="linf")
    return cm


def _standard_frame(cm: CompiledMatroid):
    return (cm.point("ZERO"), cm.point("ONE"), cm.point("INF")), cm.line_id("l")


def _emit(cm, kind, table, x, y, z, frame, line, tag) -> GadgetTrace:
    if frame is None:
        frame, line = _standard_frame(cm)
    for p in (x, y, z):
        if p not in cm.lines[line]:
            raise CoincidenceError(f"{cm.labels[p]} is not on the gadget's frame line")
    linf = cm.line_id("linf")
    if frame[2] not in cm.lines[linf]:
        raise CoincidenceError("frame infinity point must lie on linf")
    gid = len(cm.traces) if tag is None else tag
    h = {}
    for name in "abcd":
        freedom = "free-on-linf" if name in "ab" else "determined"
        h[name] = cm.add_point(f"{kind.lower()}{gid}.{name}", "helper", freedom)
        if name in "ab":
            cm.put_on_line(h[name], linf)
    roles = {"o": frame[0], "u": frame[1], "inf": frame[2], "x": x, "y": y, "z": z, **h}
    lids = [cm.add_line([roles[r] for r in names]) for names in table]
    return GadgetTrace(kind, (x, y, z), tuple(frame), line, h, lids)


def emit_add(cm: CompiledMatroid, x: int, y: int, z: int, frame=None, line=None, tag=None) -> GadgetTrace:
    """Gadget forcing ``x + y = z`` along the frame line."""
    return _emit(cm, "ADD", ADD_LINES, x, y, z, frame, line, tag)


def emit_mul(cm: CompiledMatroid, x: int, y: int, z: int, frame=None, line=None, tag=None) -> GadgetTrace:
    """Gadget forcing ``x * y = z`` along the frame line."""
    return _emit(cm, "MUL", MUL_LINES, x, y, z, frame, line, tag)


def emit_pos(cm: CompiledMatroid, x: int, frame=None, line=None, tag=None) -> GadgetTrace:
    """Gadget forcing ``x > 0``: helpers ``s`` and ``w`` on the frame line with

    * ``s * s = x`` (a MUL gadget in the frame), so ``x`` is a non-zero square;
    * ``s * o = x`` in the frame whose origin is ``w`` (a MUL gadget with the
      origin's role played by ``w``), which pins ``w`` given ``x`` and ``s``.
    """
    if frame is None:
        frame, line = _standard_frame(cm)
    if x == frame[0]:
        raise CoincidenceError("POS of the frame origin is unsatisfiable")
    gid = len(cm.traces) if tag is None else tag
    s = cm.add_point(f"pos{gid}.s", "helper", "free-on-line")
    w = cm.add_point(f"pos{gid}.w", "helper", "determined-on-line")
    cm.put_on_line(s, line)
    cm.put_on_line(w, line)
    sq = emit_mul(cm, s, s, x, frame, line, tag=f"{gid}.sq")
    shifted = emit_mul(cm, s, frame[0], x, (w, frame[1], frame[2]), line, tag=f"{gid}.sh")
    return GadgetTrace("POS", (x,), tuple(frame), line, {"s": s, "w": w},
                       sq.lines + shifted.lines, [sq, shifted])


# --- compiling whole systems ------------------------------------------------------

class _Classes:
    def __init__(self, names):
        self.parent = {v: v for v in names}

    def find(self, v):
        while self.parent[v] != v:
            self.parent[v] = self.parent[self.parent[v]]
            v = self.parent[v]
        return v

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb in ("@ZERO", "@ONE"):
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


def _resolve_aliases(cs: ConstraintSystem) -> _Classes:
    cls = _Classes(list(cs.vars) + ["@ZERO", "@ONE"])
    changed = True
    while changed:
        changed = False
        for c in cs.constraints:
            f = [cls.find(v) for v in c.args]
            if c.op == "ONE":
                changed |= cls.union("@ONE", f[0])
            elif c.op == "ADD":
                x, y, z = f
                if x == z:
                    changed |= cls.union("@ZERO", y)
                elif y == z:
                    changed |= cls.union("@ZERO", x)
                elif x == "@ZERO":
                    changed |= cls.union(y, z)
                elif y == "@ZERO":
                    changed |= cls.union(x, z)
            elif c.op == "MUL":
                x, y, z = f
                if "@ZERO" in (x, y):
                    changed |= cls.union("@ZERO", z)
                elif x == "@ONE":
                    changed |= cls.union(y, z)
                elif y == "@ONE":
                    changed |= cls.union(x, z)
        if cls.find("@ZERO") == cls.find("@ONE"):
            raise CoincidenceError("the constraints force 0 = 1")
    return cls


def compile_system(cs: ConstraintSystem) -> CompiledMatroid:
    """Lower every constraint to a gadget; forced equalities become shared points.

    ``ONE x`` identifies x with ONE, ``x + y = x`` identifies y with ZERO and
    so on; constraints that become identities after this are dropped.
    """
    cls = _resolve_aliases(cs)
    cm = init_frame()
    l = cm.line_id("l")
    rep_point = {cls.find("@ZERO"): cm.point("ZERO"), cls.find("@ONE"): cm.point("ONE")}
    for v in cs.vars:
        r = cls.find(v)
        if r not in rep_point:
            rep_point[r] = cm.add_point(f"var:{v}", "var", "variable")
            cm.put_on_line(rep_point[r], l)
        cm.var_point[v] = rep_point[r]
    zero, one = cm.point("ZERO"), cm.point("ONE")
    for c in cs.constraints:
        pts = [cm.var_point[v] for v in c.args]
        if c.op == "ONE":
            continue
        if c.op == "POS":
            if pts[0] == zero:
                raise CoincidenceError(f"{c}: the variable is forced to 0")
            if pts[0] == one:
                continue
            t = emit_pos(cm, pts[0])
        else:
            x, y, z = pts
            if c.op == "ADD" and (zero in (x, y) or x == z or y == z):
                continue
            if c.op == "MUL":
                if zero in (x, y) or (one in (x, y) and z in (x, y)):
                    continue
                if z in (x, y):
                    raise CoincidenceError(f"{c}: x*y = x forces a degenerate gadget")
            t = (emit_add if c.op == "ADD" else emit_mul)(cm, x, y, z)
        t.constraint = str(c)
        cm.traces.append(t)
    return cm


def expected_counts(cs: ConstraintSystem) -> dict:
    """Closed-form sizes for a system without forced equalities."""
    k = sum(c.op in ("ADD", "MUL") for c in cs.constraints)
    p = cs.count("POS")
    return {"points": 3 + len(cs.vars) + 4 * k + 10 * p, "lines": 2 + 5 * k + 10 * p}
