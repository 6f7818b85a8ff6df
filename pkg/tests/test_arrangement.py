from fractions import Fraction

import pytest

from legsheaf import corpus
from legsheaf.arrangement import (
    ArrangementError,
    arrange,
    arrange_pl,
    arrange_points,
)
from legsheaf.fronts import PLFront, Sheet


def brute_force_crossing_count(f1, f2):
    """Independent oracle: count segment-pair intersections by direct
    per-segment linear solves, no shared code with the arrangement."""
    def segs(front):
        out = []
        for s in front.sheets:
            for (x0, t0), (x1, t1) in zip(s.breakpoints, s.breakpoints[1:]):
                out.append((x0, t0, x1, t1))
        return out

    count = 0
    for (a0, b0, a1, b1) in segs(f1):
        for (c0, d0, c1, d1) in segs(f2):
            lo = max(a0, c0)
            hi = min(a1, c1)
            if not lo < hi:
                continue
            sa = Fraction(b1 - b0, a1 - a0)
            sb = Fraction(d1 - d0, c1 - c0)
            if sa == sb:
                continue
            # b0 + sa (x - a0) = d0 + sb (x - c0)
            x = Fraction(d0 - b0 + sa * a0 - sb * c0, sa - sb)
            if lo < x < hi:
                count += 1
    return count


def test_point_arrangement():
    cx = arrange([corpus.point_pair()])
    assert len(cx.vertices()) == 2
    assert len(cx.edges()) == 3
    assert sum(1 for c in cx.cells if c.unbounded) == 2
    # deterministic ids
    assert [c.id for c in cx.cells] == ["c0.0", "c0.1", "c1.0", "c1.1", "c1.2"]


def test_point_locate():
    cx = arrange([corpus.point_pair()])
    v = cx.cells[cx.locate(0)]
    assert v.dim == 0 and v.key == (0,)
    e = cx.cells[cx.locate(Fraction(1, 2))]
    assert e.dim == 1


def test_unknot_arrangement_counts():
    f = corpus.unknot()
    cx = arrange([f])
    # walls at x = -1, 0, 1
    assert len({c.key[0] for c in cx.vertices()}) == 3
    arcs = cx.arcs()
    assert len(arcs) == 4
    # every arc has one face above and one below
    for a in arcs:
        cx.face_above(a.index)
        cx.face_below(a.index)


def test_unknot_self_overlay_crossings():
    f = corpus.unknot()
    g = f.translate(1)
    cx = arrange([f, f], [0, 1])
    crossing_vertices = [c for c in cx.vertices() if c.vertex_type == "crossing"]
    oracle = brute_force_crossing_count(f, g)
    assert len(crossing_vertices) == oracle == 2


def test_overlay_at_chord_length_errors():
    f = corpus.unknot()
    with pytest.raises(ArrangementError):
        arrange([f, f], [0, 2])  # u equal to the chord length: fronts touch


def test_trefoil_arrangement():
    f = corpus.trefoil()
    cx = arrange([f])
    crossings = [c for c in cx.vertices() if c.vertex_type == "crossing"]
    assert len(crossings) == 3
    cusps = [c for c in cx.vertices() if c.vertex_type == "cusp"]
    assert len(cusps) == 4


def test_regions_unknot():
    f = corpus.unknot()
    cx = arrange([f])
    regions = cx.regions()
    # eye interior + outside
    assert len(set(regions.values())) == 2
    unbounded_regions = {regions[c.index] for c in cx.faces() if c.unbounded}
    assert len(unbounded_regions) == 1


def test_regions_trefoil():
    cx = arrange([corpus.trefoil()])
    regions = cx.regions()
    # outside, outer eye, inner eye, two braid gaps
    assert len(set(regions.values())) == 5


def test_locate_2d():
    f = corpus.unknot()
    cx = arrange([f])
    c = cx.cells[cx.locate(Fraction(1, 2), 0)]
    assert c.kind == "face"
    c = cx.cells[cx.locate(Fraction(1, 2), Fraction(1, 2))]
    assert c.kind == "arc"
    c = cx.cells[cx.locate(0, 1)]
    assert c.kind == "vertex"
    c = cx.cells[cx.locate(0, 5)]
    assert c.kind == "wall" and c.unbounded
    c = cx.cells[cx.locate(7, 7)]
    assert c.kind == "face" and c.unbounded


def test_marked_point():
    f = corpus.unknot()
    cx = arrange([f], marked_points=[(Fraction(1, 2), 5)])
    v = cx.cells[cx.locate(Fraction(1, 2), 5)]
    assert v.vertex_type == "marked"
    with pytest.raises(ArrangementError):
        arrange([f], marked_points=[(Fraction(1, 2), Fraction(1, 2))])  # on the front


def test_extra_walls_refine():
    f = corpus.unknot()
    cx = arrange([f])
    cy = arrange([f], extra_walls=[Fraction(1, 3)])
    assert len(cy.cells) > len(cx.cells)


def test_incidence_signs_cancel():
    # finalize already asserts this; exercise a couple of complexes
    arrange([corpus.trefoil()])
    arrange([corpus.link2()])
    f = corpus.unknot()
    arrange([f, f], [0, Fraction(1, 2)])
