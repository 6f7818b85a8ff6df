"""Constructors for the bundled example fronts and sheaves."""

from __future__ import annotations

from fractions import Fraction

from ..fronts import PLFront, PointFront, Sheet, rat


def point_pair() -> PointFront:
    # two points; potentials make the half-open interval sheaf simple
    return PointFront([0, 1], [0, -1])


def unknot() -> PLFront:
    top = Sheet([(-1, 0), (0, 1), (1, 0)])
    bot = Sheet([(-1, 0), (0, -1), (1, 0)])
    return PLFront(
        [top, bot],
        [
            {"x": -1, "sheets": (0, 1), "kind": "left"},
            {"x": 1, "sheets": (0, 1), "kind": "right"},
        ],
        potentials=[-1, 0],
    )


def trefoil() -> PLFront:
    """Max-tb trefoil: rainbow closure of the 2-strand 3-crossing braid.

    Sheets: 0 = outer top arc, 1 = inner top arc, 2 and 3 = the braid pair.
    Crossings at x = 6, 8, 10; five Reeb chords, degrees {0,0,0,1,1}.
    """
    T = Sheet([(0, 0), (15, Fraction(-15, 16)), (18, Fraction(-167, 16))])
    S = Sheet([
        (2, Fraction(-1, 2)),
        (11, Fraction(-35, 16)),
        (12, Fraction(-43, 16)),
        (14, Fraction(-123, 16)),
    ])
    m = Sheet([
        (2, Fraction(-1, 2)),
        (3, Fraction(-5, 2)),
        (7, Fraction(-19, 4)),
        (9, Fraction(-43, 8)),
        (18, Fraction(-167, 16)),
    ])
    bot = Sheet([(0, 0), (1, -2), (14, Fraction(-123, 16))])
    return PLFront(
        [T, S, m, bot],
        [
            {"x": 0, "sheets": (0, 3), "kind": "left"},
            {"x": 2, "sheets": (1, 2), "kind": "left"},
            {"x": 14, "sheets": (1, 3), "kind": "right"},
            {"x": 18, "sheets": (0, 2), "kind": "right"},
        ],
        potentials=[-1, -1, 0, 0],
    )


def link2() -> PLFront:
    """Two disjoint unknots stacked vertically, second one taller and offset
    so no sheet pair is parallel; potentials shifted to mix chord degrees."""
    t1 = Sheet([(-1, 0), (0, 1), (1, 0)])
    b1 = Sheet([(-1, 0), (0, -1), (1, 0)])
    t2 = Sheet([(Fraction(-3, 4), 4), (Fraction(1, 4), 6), (Fraction(5, 4), 4)])
    b2 = Sheet([(Fraction(-3, 4), 4), (Fraction(1, 4), 2), (Fraction(5, 4), 4)])
    return PLFront(
        [t1, b1, t2, b2],
        [
            {"x": -1, "sheets": (0, 1), "kind": "left"},
            {"x": 1, "sheets": (0, 1), "kind": "right"},
            {"x": Fraction(-3, 4), "sheets": (2, 3), "kind": "left"},
            {"x": Fraction(5, 4), "sheets": (2, 3), "kind": "right"},
        ],
        potentials=[-1, 0, -3, -2],
    )


def noncompact_front() -> PointFront:
    return PointFront([0], [0])


def zigzag() -> PLFront:
    """Stabilized (loose-style) unknot with a zigzag; rotation number is
    nonzero, so no consistent Maslov potential exists. Corpus data only."""
    a = Sheet([(-2, 0), (-1, Fraction(3, 2)), (0, 1)])
    b = Sheet([(-2, 0), (0, -2), (2, 0)])
    c = Sheet([(-1, Fraction(1, 2)), (0, 1)])
    d = Sheet([(-1, Fraction(1, 2)), (2, 0)])
    return PLFront(
        [a, b, c, d],
        [
            {"x": -2, "sheets": (0, 1), "kind": "left"},
            {"x": 0, "sheets": (0, 2), "kind": "right"},
            {"x": -1, "sheets": (2, 3), "kind": "left"},
            {"x": 2, "sheets": (1, 3), "kind": "right"},
        ],
        potentials=[0, 1, 1, 2],
    )


def cusp_family_front(a) -> PLFront:
    """PL surrogate of the cusp family: an eye whose left cusp sits at
    x = -a. For a > 0 the fiber over x = 0 meets two sheets at heights
    +-a; for a <= 0 the front misses x = 0 entirely."""
    a = rat(a)
    up = Sheet([(-a, 0), (1, 1 + a), (2 + a, 0)])
    lo = Sheet([(-a, 0), (1, -(1 + a)), (2 + a, 0)])
    return PLFront(
        [up, lo],
        [
            {"x": -a, "sheets": (0, 1), "kind": "left"},
            {"x": 2 + a, "sheets": (0, 1), "kind": "right"},
        ],
        potentials=[-1, 0],
    )


def swap_family_fronts(s) -> PLFront:
    """Crossing-model surrogate: two overlapping eyes; as s passes the
    swap value the two sheets over x = 0 exchange heights."""
    s = rat(s)
    t1 = Sheet([(-1, 0), (0, 1), (1, 0)])
    b1 = Sheet([(-1, 0), (0, -1), (1, 0)])
    t2 = Sheet([(Fraction(-5, 8), s), (Fraction(1, 8), s + Fraction(3, 2)), (Fraction(7, 8), s)])
    b2 = Sheet([(Fraction(-5, 8), s), (Fraction(1, 8), s - Fraction(3, 2)), (Fraction(7, 8), s)])
    return PLFront(
        [t1, b1, t2, b2],
        [
            {"x": -1, "sheets": (0, 1), "kind": "left"},
            {"x": 1, "sheets": (0, 1), "kind": "right"},
            {"x": Fraction(-5, 8), "sheets": (2, 3), "kind": "left"},
            {"x": Fraction(7, 8), "sheets": (2, 3), "kind": "right"},
        ],
        potentials=[-1, 0, -1, 0],
    )


# sheaf builders need the cellsheaf machinery; imported lazily to keep the
# front constructors importable on their own


def halfopen_sheaf(front=None, field=None):
    """k_{[0,1)} on the two point front."""
    from ..cellsheaf import indicator_point_sheaf
    from ..field import GF

    front = front or point_pair()
    field = field or GF(2)
    return indicator_point_sheaf(front, field, rat(0), rat(1), closed_left=True)


def eye_sheaf(front=None, field=None):
    from ..cellsheaf import indicator_eye_sheaf
    from ..field import GF

    front = front or unknot()
    field = field or GF(2)
    return indicator_eye_sheaf(front, field, top_sheet=0, bottom_sheet=1)


def link2_sheaf(front=None, field=None):
    from ..cellsheaf import indicator_eye_sheaf, sheaf_direct_sum
    from ..field import GF

    front = front or link2()
    field = field or GF(2)
    s1 = indicator_eye_sheaf(front, field, top_sheet=0, bottom_sheet=1)
    s2 = indicator_eye_sheaf(front, field, top_sheet=2, bottom_sheet=3)
    return sheaf_direct_sum(s1, s2)


def trefoil_sheaf(front=None, field=None):
    from ..cellsheaf import region_sheaf
    from ..field import GF

    front = front or trefoil()
    field = field or GF(2)
    regions = [
        ((Fraction(1, 2), Fraction(-1, 2)), 1),          # outer eye
        ((5, -2), 2),                                    # inner eye
        ((Fraction(13, 2), Fraction(-71, 16)), 1),       # braid gap, c1..c2
        ((Fraction(17, 2), Fraction(-21, 4)), 1),        # braid gap, c2..c3
    ]
    arc_maps = [
        (1, Fraction(5), [[1], [1]]),          # inner top arc: outer -> inner
        (2, Fraction(4), [[1, 0]]),            # braid sheet before c1
        (2, Fraction(17, 2), [[1, 0]]),        # braid sheet between c2 and c3
        (3, Fraction(13, 2), [[0, 1]]),        # bottom sheet between c1 and c2
        (3, Fraction(12), [[0, 1]]),           # bottom sheet after c3
    ]
    return region_sheaf(front, field, regions, arc_maps)


def noncompact_sheaf(front=None, field=None):
    """The half-line pattern k_{[0,+inf)}: valid singular support but
    non-compact support; theorem checks must reject it."""
    from ..cellsheaf import indicator_point_sheaf
    from ..field import GF

    front = front or noncompact_front()
    field = field or GF(2)
    return indicator_point_sheaf(front, field, rat(0), None, closed_left=True)


def cusp_family_sheaf(a, field=None):
    from ..cellsheaf import indicator_eye_sheaf
    from ..field import GF

    field = field or GF(2)
    front = cusp_family_front(a)
    return front, indicator_eye_sheaf(front, field, top_sheet=0, bottom_sheet=1)


def swap_family_sheaf(s, field=None):
    from ..cellsheaf import indicator_eye_sheaf, sheaf_direct_sum
    from ..field import GF

    field = field or GF(2)
    front = swap_family_fronts(s)
    s1 = indicator_eye_sheaf(front, field, top_sheet=0, bottom_sheet=1)
    s2 = indicator_eye_sheaf(front, field, top_sheet=2, bottom_sheet=3)
    return front, sheaf_direct_sum(s1, s2)


CORPUS_BUILDERS = {
    "point-pair": point_pair,
    "unknot": unknot,
    "trefoil": trefoil,
    "link2": link2,
    "noncompact-point": noncompact_front,
    "zigzag": zigzag,
}


def corpus_names():
    return sorted(CORPUS_BUILDERS)


def build(name: str):
    return CORPUS_BUILDERS[name]()
