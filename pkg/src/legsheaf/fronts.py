"""Legendrian fronts: finite point fronts over a point and piecewise linear
multi-sheet fronts over the real line.

A PL sheet is the graph of a piecewise linear function given by breakpoints
with strictly increasing rational x. Sheets end only at cusp events, where
exactly two sheets share an endpoint with equal value and distinct slopes;
a front is a closed immersed curve collection.

Reeb chords live where the slope difference of a sheet pair changes sign
at a breakpoint (the PL shadow of a tangency of the smooth gap function);
the chord length is the height gap there. Degrees come from Maslov
potentials: for a chord with bottom sheet a and top sheet b,

    deg = n + 1 + d(b) - d(a) - ind,

where ind is 1 if the gap function has a local maximum at the chord and 0
at a local minimum, and n is the Legendrian dimension (0 for point fronts,
1 for PL fronts). The potential convention is calibrated so the standard
unknot chord has degree 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Optional


Rat = Fraction


def rat(x) -> Rat:
    if isinstance(x, Rat):
        return x
    if isinstance(x, int):
        return Rat(x)
    if isinstance(x, str):
        return Rat(x)
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return Rat(int(x[0]), int(x[1]))
    raise TypeError(f"cannot parse rational from {x!r}")


def rat_str(x: Rat) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Chord:
    x: Optional[Rat]          # None for point fronts
    t_bottom: Rat
    t_top: Rat
    length: Rat
    degree: Optional[int]     # None when potentials are inconsistent
    witness: tuple            # (bottom id, top id) sheet/point indices

    def as_dict(self):
        return {
            "x": rat_str(self.x) if self.x is not None else None,
            "t_bottom": rat_str(self.t_bottom),
            "t_top": rat_str(self.t_top),
            "length": rat_str(self.length),
            "degree": self.degree,
            "witness": list(self.witness),
        }


@dataclass
class ValidationReport:
    issues: list = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def add(self, msg: str):
        self.issues.append(msg)


class PointFront:
    """Finite subset of the real line; the Legendrian is 0-dimensional."""

    n = 0
    kind = "point"

    def __init__(self, points, potentials=None):
        self.points = [rat(p) for p in points]
        self.potentials = list(potentials) if potentials is not None else [0] * len(self.points)

    def validate(self) -> ValidationReport:
        rep = ValidationReport()
        if not self.points:
            rep.add("point front needs at least one point")
        for a, b in zip(self.points, self.points[1:]):
            if not a < b:
                rep.add(f"points not strictly increasing at {rat_str(a)}")
        if len(self.potentials) != len(self.points):
            rep.add("one potential required per point")
        return rep

    def components(self) -> int:
        return len(self.points)

    def betti(self):
        return (len(self.points),)

    def enumerate_chords(self):
        rep = self.validate()
        if not rep.ok:
            raise ValueError("invalid front: " + "; ".join(rep.issues))
        chords = []
        m = len(self.points)
        for i in range(m):
            for j in range(i + 1, m):
                tb, tt = self.points[i], self.points[j]
                deg = 1 + self.potentials[j] - self.potentials[i]
                chords.append(Chord(None, tb, tt, tt - tb, deg, (i, j)))
        return chords

    def translate(self, c) -> "PointFront":
        c = rat(c)
        return PointFront([p + c for p in self.points], list(self.potentials))

    def negate(self) -> "PointFront":
        pts = [-p for p in reversed(self.points)]
        pots = [-q for q in reversed(self.potentials)]
        return PointFront(pts, pots)

    def as_dict(self):
        return {
            "kind": "point",
            "points": [rat_str(p) for p in self.points],
            "potentials": list(self.potentials),
        }

    def __eq__(self, other):
        return (
            isinstance(other, PointFront)
            and self.points == other.points
            and self.potentials == other.potentials
        )


class Sheet:
    def __init__(self, breakpoints):
        self.breakpoints = [(rat(x), rat(t)) for x, t in breakpoints]

    @property
    def x_min(self):
        return self.breakpoints[0][0]

    @property
    def x_max(self):
        return self.breakpoints[-1][0]

    def xs(self):
        return [x for x, _ in self.breakpoints]

    def value(self, x) -> Rat:
        x = rat(x)
        bps = self.breakpoints
        if not (self.x_min <= x <= self.x_max):
            raise ValueError(f"x={x} outside sheet domain")
        for (x0, t0), (x1, t1) in zip(bps, bps[1:]):
            if x0 <= x <= x1:
                return t0 + (t1 - t0) * (x - x0) / (x1 - x0)
        return bps[-1][1]

    def slope_between(self, i: int) -> Rat:
        (x0, t0), (x1, t1) = self.breakpoints[i], self.breakpoints[i + 1]
        return (t1 - t0) / (x1 - x0)

    def slope_at(self, x) -> Rat:
        """Slope on the open segment containing x (x must avoid breakpoints)."""
        x = rat(x)
        for i, ((x0, _), (x1, _)) in enumerate(zip(self.breakpoints, self.breakpoints[1:])):
            if x0 < x < x1:
                return self.slope_between(i)
        raise ValueError(f"x={x} is a breakpoint or outside domain")

    def segments(self):
        """(x0, x1, slope) per linear piece."""
        out = []
        for i, ((x0, t0), (x1, t1)) in enumerate(zip(self.breakpoints, self.breakpoints[1:])):
            out.append((x0, x1, (t1 - t0) / (x1 - x0)))
        return out

    def translate(self, c) -> "Sheet":
        c = rat(c)
        return Sheet([(x, t + c) for x, t in self.breakpoints])

    def negate(self) -> "Sheet":
        return Sheet([(x, -t) for x, t in self.breakpoints])


@dataclass(frozen=True)
class Cusp:
    x: Rat
    sheets: tuple       # (index, index)
    kind: str           # "left" or "right"


class PLFront:
    """Closed PL multi-sheet front over the line; the Legendrian is a link."""

    n = 1
    kind = "pl"

    def __init__(self, sheets, cusps, potentials=None):
        self.sheets = [s if isinstance(s, Sheet) else Sheet(s) for s in sheets]
        self.cusps = []
        for c in cusps:
            if isinstance(c, Cusp):
                self.cusps.append(c)
            else:
                self.cusps.append(Cusp(rat(c["x"]), tuple(c["sheets"]), c["kind"]))
        if potentials is None:
            potentials = [0] * len(self.sheets)
        self.potentials = list(potentials)

    # -- validation --------------------------------------------------------

    def validate(self) -> ValidationReport:
        rep = ValidationReport()
        for si, s in enumerate(self.sheets):
            if len(s.breakpoints) < 2:
                rep.add(f"sheet {si}: needs at least two breakpoints")
                continue
            for (x0, _), (x1, _) in zip(s.breakpoints, s.breakpoints[1:]):
                if not x0 < x1:
                    rep.add(f"sheet {si}: breakpoints not strictly increasing at x={rat_str(x0)}")
        if rep.issues:
            return rep
        self._validate_cusps(rep)
        self._validate_pairs(rep)
        self._validate_potentials(rep)
        return rep

    def _endpoint_slope(self, si: int, side: str) -> Rat:
        s = self.sheets[si]
        return s.slope_between(0) if side == "left" else s.slope_between(len(s.breakpoints) - 2)

    def _validate_cusps(self, rep: ValidationReport):
        seen = {}
        for c in self.cusps:
            a, b = c.sheets
            if a == b or not (0 <= a < len(self.sheets)) or not (0 <= b < len(self.sheets)):
                rep.add(f"cusp at x={rat_str(c.x)}: bad sheet pair {c.sheets}")
                continue
            for si in (a, b):
                sheet = self.sheets[si]
                end = sheet.breakpoints[0] if c.kind == "left" else sheet.breakpoints[-1]
                if end[0] != c.x:
                    rep.add(f"cusp at x={rat_str(c.x)}: sheet {si} endpoint not at that x")
            try:
                va = self.sheets[a].value(c.x)
                vb = self.sheets[b].value(c.x)
                if va != vb:
                    rep.add(f"cusp at x={rat_str(c.x)}: sheets {a},{b} have unequal values")
            except ValueError:
                continue
            sa = self._endpoint_slope(a, c.kind)
            sb = self._endpoint_slope(b, c.kind)
            if sa == sb:
                rep.add(f"cusp at x={rat_str(c.x)}: sheets {a},{b} have equal slopes (degenerate)")
            for si in (a, b):
                key = (si, c.kind)
                if key in seen:
                    rep.add(f"sheet {si} has two {c.kind} cusps")
                seen[key] = c
        for si in range(len(self.sheets)):
            for side in ("left", "right"):
                if (si, side) not in seen:
                    rep.add(f"sheet {si}: {side} endpoint not matched by a cusp (front not closed)")

    def _event_xs(self):
        xs = set()
        for s in self.sheets:
            xs.update(s.xs())
        for c in self.cusps:
            xs.add(c.x)
        return xs

    def _pair_segments(self, i: int, j: int):
        """Common refinement of two sheets' segments: (x0, x1, slope_i, slope_j)."""
        si, sj = self.sheets[i], self.sheets[j]
        lo = max(si.x_min, sj.x_min)
        hi = min(si.x_max, sj.x_max)
        if not lo < hi:
            return []
        cuts = sorted({x for x in si.xs() + sj.xs() if lo <= x <= hi} | {lo, hi})
        out = []
        for x0, x1 in zip(cuts, cuts[1:]):
            mid = (x0 + x1) / 2
            out.append((x0, x1, si.slope_at(mid), sj.slope_at(mid)))
        return out

    def _validate_pairs(self, rep: ValidationReport):
        event_xs = self._event_xs()
        crossings = []
        cusp_pairs = {frozenset(c.sheets) for c in self.cusps}
        for i in range(len(self.sheets)):
            for j in range(i + 1, len(self.sheets)):
                segs = self._pair_segments(i, j)
                for (x0, x1, mi, mj) in segs:
                    if mi == mj:
                        rep.add(
                            f"sheets {i},{j}: parallel segments on "
                            f"[{rat_str(x0)},{rat_str(x1)}] (degenerate chord family)"
                        )
                        continue
                    vi0 = self.sheets[i].value(x0)
                    vj0 = self.sheets[j].value(x0)
                    d0 = vi0 - vj0
                    d1 = self.sheets[i].value(x1) - self.sheets[j].value(x1)
                    if d0 == 0:
                        # equal values at a segment endpoint: fine only at cusps
                        if not (frozenset((i, j)) in cusp_pairs and x0 in (
                            max(self.sheets[i].x_min, self.sheets[j].x_min),
                        )):
                            if x0 != max(self.sheets[i].x_min, self.sheets[j].x_min) and x0 != min(
                                self.sheets[i].x_max, self.sheets[j].x_max
                            ):
                                rep.add(
                                    f"sheets {i},{j}: touch at breakpoint x={rat_str(x0)} "
                                    "(non-generic coincidence)"
                                )
                        continue
                    if (d0 > 0) != (d1 > 0) and d1 != 0:
                        # transverse crossing inside the segment
                        xc = x0 + (x1 - x0) * d0 / (d0 - d1)
                        if xc in event_xs:
                            rep.add(
                                f"sheets {i},{j}: crossing at event x={rat_str(xc)} "
                                "(non-generic coincidence)"
                            )
                        crossings.append((xc, self.sheets[i].value(xc), i, j))
        pts = {}
        for (xc, tc, i, j) in crossings:
            if (xc, tc) in pts:
                rep.add(f"triple point at ({rat_str(xc)},{rat_str(tc)})")
            pts[(xc, tc)] = (i, j)
        # every crossing point must avoid all other sheets
        for (xc, tc), (i, j) in pts.items():
            for k, s in enumerate(self.sheets):
                if k in (i, j):
                    continue
                if s.x_min < xc < s.x_max and s.value(xc) == tc:
                    rep.add(f"triple point with sheet {k} at ({rat_str(xc)},{rat_str(tc)})")

    def _validate_potentials(self, rep: ValidationReport):
        if len(self.potentials) != len(self.sheets):
            rep.add("one Maslov potential required per sheet")
            return
        for c in self.cusps:
            a, b = c.sheets
            sa = self._endpoint_slope(a, c.kind)
            sb = self._endpoint_slope(b, c.kind)
            if sa == sb:
                continue
            if c.kind == "left":
                upper = a if sa > sb else b
            else:
                upper = a if sa < sb else b
            lower = b if upper == a else a
            if self.potentials[lower] != self.potentials[upper] + 1:
                rep.add(
                    f"cusp at x={rat_str(c.x)}: potentials violate the cusp rule "
                    f"(lower sheet {lower} must be upper {upper} + 1)"
                )

    # -- geometry ----------------------------------------------------------

    def crossings(self):
        """Transverse intersections (x, t, i, j) between sheets."""
        out = []
        for i in range(len(self.sheets)):
            for j in range(i + 1, len(self.sheets)):
                segs = self._pair_segments(i, j)
                for (x0, x1, mi, mj) in segs:
                    if mi == mj:
                        continue
                    d0 = self.sheets[i].value(x0) - self.sheets[j].value(x0)
                    d1 = self.sheets[i].value(x1) - self.sheets[j].value(x1)
                    if d0 != 0 and d1 != 0 and (d0 > 0) != (d1 > 0):
                        xc = x0 + (x1 - x0) * d0 / (d0 - d1)
                        out.append((xc, self.sheets[i].value(xc), i, j))
        return sorted(out)

    def components(self) -> int:
        parent = list(range(len(self.sheets)))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for c in self.cusps:
            ra, rb = find(c.sheets[0]), find(c.sheets[1])
            if ra != rb:
                parent[ra] = rb
        return len({find(i) for i in range(len(self.sheets))})

    def betti(self):
        c = self.components()
        return (c, c)

    def potentials_consistent(self) -> bool:
        rep = ValidationReport()
        self._validate_potentials(rep)
        return rep.ok

    def enumerate_chords(self, require_potentials: bool = True):
        rep = self.validate()
        hard = [m for m in rep.issues if "cusp rule" not in m]
        if hard:
            raise ValueError("invalid front: " + "; ".join(hard))
        graded = rep.ok
        if require_potentials and not graded:
            raise ValueError("inconsistent potentials: " + "; ".join(rep.issues))
        chords = []
        for i in range(len(self.sheets)):
            for j in range(i + 1, len(self.sheets)):
                chords.extend(self._pair_chords(i, j, graded))
        chords.sort(key=lambda ch: (ch.x, ch.t_bottom))
        return chords

    def _pair_chords(self, i: int, j: int, graded: bool):
        segs = self._pair_segments(i, j)
        out = []
        for (s0, s1) in zip(segs, segs[1:]):
            x = s0[1]
            diff0 = s0[2] - s0[3]
            diff1 = s1[2] - s1[3]
            if diff0 == 0 or diff1 == 0 or (diff0 > 0) == (diff1 > 0):
                continue
            vi = self.sheets[i].value(x)
            vj = self.sheets[j].value(x)
            if vi == vj:
                continue
            if vi > vj:
                top, bot = i, j
                gap_slope0, gap_slope1 = diff0, diff1
            else:
                top, bot = j, i
                gap_slope0, gap_slope1 = -diff0, -diff1
            ind = 1 if (gap_slope0 > 0 and gap_slope1 < 0) else 0
            deg = None
            if graded:
                deg = 2 + self.potentials[top] - self.potentials[bot] - ind
            out.append(
                Chord(x, min(vi, vj), max(vi, vj), abs(vi - vj), deg, (bot, top))
            )
        return out

    def translate(self, c) -> "PLFront":
        c = rat(c)
        return PLFront(
            [s.translate(c) for s in self.sheets],
            list(self.cusps),
            list(self.potentials),
        )

    def negate(self) -> "PLFront":
        """Mirror front with all heights negated and potentials negated."""
        return PLFront(
            [s.negate() for s in self.sheets],
            list(self.cusps),
            [-q for q in self.potentials],
        )

    def as_dict(self):
        return {
            "kind": "pl",
            "sheets": [
                {"breakpoints": [[rat_str(x), rat_str(t)] for x, t in s.breakpoints]}
                for s in self.sheets
            ],
            "cusps": [
                {"x": rat_str(c.x), "sheets": list(c.sheets), "kind": c.kind}
                for c in self.cusps
            ],
            "potentials": list(self.potentials),
        }

    def __eq__(self, other):
        return (
            isinstance(other, PLFront)
            and [s.breakpoints for s in self.sheets] == [s.breakpoints for s in other.sheets]
            and self.cusps == other.cusps
            and self.potentials == other.potentials
        )


def mixed_chords(f1, f2):
    """Chords between two fronts (slope-match sign flips across the pair).

    Returns (chords, degenerate_pairs). Sheet pairs with identical slope
    step functions (pure Reeb translates) form Bott families and are
    reported in degenerate_pairs instead of producing chords. Witnesses
    are ((front index, sheet index), ...) with the bottom end first.
    """
    if isinstance(f1, PointFront) and isinstance(f2, PointFront):
        chords = []
        for i, t in enumerate(f1.points):
            for j, s in enumerate(f2.points):
                if t == s:
                    continue
                tb, tt = min(t, s), max(t, s)
                bot = (0, i) if t < s else (1, j)
                top = (1, j) if t < s else (0, i)
                db = f1.potentials[i] if bot[0] == 0 else f2.potentials[bot[1]]
                dt = f2.potentials[j] if top[0] == 1 else f1.potentials[top[1]]
                chords.append(Chord(None, tb, tt, tt - tb, 1 + dt - db, (bot, top)))
        return chords, []
    if not (isinstance(f1, PLFront) and isinstance(f2, PLFront)):
        raise TypeError("mixed_chords needs two fronts of the same kind")
    merged = PLFront(
        [Sheet(s.breakpoints) for s in f1.sheets] + [Sheet(s.breakpoints) for s in f2.sheets],
        [],
        list(f1.potentials) + list(f2.potentials),
    )
    n1 = len(f1.sheets)
    chords = []
    degenerate = []
    for i in range(n1):
        for j in range(n1, n1 + len(f2.sheets)):
            segs = merged._pair_segments(i, j)
            if segs and all(mi == mj for (_, _, mi, mj) in segs):
                degenerate.append(((0, i), (1, j - n1)))
                continue
            if any(mi == mj for (_, _, mi, mj) in segs):
                raise ValueError(
                    f"sheets ({i},{j - n1}) share a parallel segment: pair not transverse"
                )
            for ch in merged._pair_chords(i, j, True):
                bot, top = ch.witness
                tag = lambda k: (0, k) if k < n1 else (1, k - n1)
                chords.append(
                    Chord(ch.x, ch.t_bottom, ch.t_top, ch.length, ch.degree, (tag(bot), tag(top)))
                )
    return chords, degenerate


def min_chord_lengths(front, chords) -> dict:
    """c_i = min length over chords of degree i or n-i, for i in 0..n.

    Degrees outside [0, n] never feed the displacement bound; absent
    degrees give no entry (interpreted as +infinity).
    """
    n = front.n
    out = {}
    for i in range(n + 1):
        lens = [ch.length for ch in chords if ch.degree in (i, n - i)]
        if lens:
            out[i] = min(lens)
    return out


# -- serialization ---------------------------------------------------------


def front_to_json(front) -> str:
    return json.dumps(front.as_dict(), indent=1, sort_keys=True)


def front_from_dict(d) -> "PointFront | PLFront":
    if d.get("kind") == "point":
        return PointFront([rat(p) for p in d["points"]], d.get("potentials"))
    if d.get("kind") == "pl":
        sheets = [Sheet([(rat(x), rat(t)) for x, t in s["breakpoints"]]) for s in d["sheets"]]
        return PLFront(sheets, d.get("cusps", []), d.get("potentials"))
    raise ValueError(f"unknown front kind {d.get('kind')!r}")


def load_front(path: str):
    with open(path) as fh:
        return front_from_dict(json.load(fh))
