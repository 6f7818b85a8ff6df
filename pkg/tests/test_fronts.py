from fractions import Fraction

import pytest

from legsheaf import corpus
from legsheaf.fronts import (
    PLFront,
    PointFront,
    Sheet,
    front_from_dict,
    min_chord_lengths,
    mixed_chords,
)


def test_point_front_valid():
    assert corpus.point_pair().validate().ok


def test_point_front_invalid_order():
    assert not PointFront([1, 0]).validate().ok


def test_point_front_chords():
    chords = corpus.point_pair().enumerate_chords()
    assert len(chords) == 1
    ch = chords[0]
    assert ch.length == 1
    assert ch.degree == 0


def test_point_front_betti():
    assert corpus.point_pair().betti() == (2,)


def test_unknot_valid_and_chords():
    f = corpus.unknot()
    assert f.validate().ok
    chords = f.enumerate_chords()
    assert len(chords) == 1
    assert chords[0].length == 2
    assert chords[0].x == 0
    assert chords[0].degree == 0
    assert f.betti() == (1, 1)


def test_parallel_sheets_invalid():
    f = PLFront(
        [Sheet([(0, 0), (1, 1)]), Sheet([(0, 1), (1, 2)])],
        [],
        [0, 0],
    )
    issues = f.validate().issues
    assert any("parallel" in m for m in issues)


def test_open_front_invalid():
    f = PLFront([Sheet([(0, 0), (1, 1)]), Sheet([(0, 0), (1, -1)])], [], [0, 1])
    issues = f.validate().issues
    assert any("not matched by a cusp" in m for m in issues)


def test_trefoil_valid_five_chords():
    f = corpus.trefoil()
    rep = f.validate()
    assert rep.ok, rep.issues
    chords = f.enumerate_chords()
    assert len(chords) == 5
    degs = sorted(ch.degree for ch in chords)
    assert degs == [0, 0, 0, 1, 1]
    lens = sorted(ch.length for ch in chords)
    assert lens == [
        Fraction(1, 8),
        Fraction(1, 8),
        Fraction(67, 16),
        Fraction(35, 8),
        Fraction(125, 16),
    ]
    assert len(f.crossings()) == 3
    assert f.betti() == (1, 1)


def test_link2():
    f = corpus.link2()
    assert f.validate().ok, f.validate().issues
    chords = f.enumerate_chords()
    assert len(chords) == 6
    degs = sorted(ch.degree for ch in chords)
    assert degs == [-2, -1, 0, 0, 0, 1]
    assert f.betti() == (2, 2)
    # duality-style pairing |Q_i| + |Q_{1-i}| >= b_i holds
    from collections import Counter

    q = Counter(ch.degree for ch in chords)
    for i in (0, 1):
        assert q[i] + q[1 - i] >= 2


def test_zigzag_potentials_inconsistent():
    f = corpus.zigzag()
    rep = f.validate()
    assert any("cusp rule" in m for m in rep.issues)
    with pytest.raises(ValueError):
        f.enumerate_chords()
    # lengths still enumerable without gradings
    chords = f.enumerate_chords(require_potentials=False)
    assert all(ch.degree is None for ch in chords)


def test_involution_heights_negated():
    # chord lengths and degrees are preserved under height negation with
    # negated potentials (the mirror anti-contactomorphism)
    for f in (corpus.unknot(), corpus.trefoil(), corpus.link2()):
        g = f.negate()
        assert g.validate().ok, g.validate().issues
        a = sorted((ch.length, ch.degree) for ch in f.enumerate_chords())
        b = sorted((ch.length, ch.degree) for ch in g.enumerate_chords())
        assert a == b


def test_translation_invariance():
    f = corpus.trefoil()
    g = f.translate(Fraction(7, 3))
    a = sorted((ch.length, ch.degree) for ch in f.enumerate_chords())
    b = sorted((ch.length, ch.degree) for ch in g.enumerate_chords())
    assert a == b


def test_sign_flip_matches_bruteforce_scan():
    # chords per sheet pair = sign changes of the slope difference step
    # function, counted by brute-force dense scan over breakpoints
    f = corpus.trefoil()
    for i in range(len(f.sheets)):
        for j in range(i + 1, len(f.sheets)):
            segs = f._pair_segments(i, j)
            diffs = [mi - mj for (_, _, mi, mj) in segs]
            flips = sum(
                1
                for a, b in zip(diffs, diffs[1:])
                if a != 0 and b != 0 and (a > 0) != (b > 0)
            )
            chords = f._pair_chords(i, j, True)
            assert len(chords) == flips


def test_min_chord_lengths_unknot():
    f = corpus.unknot()
    chords = f.enumerate_chords()
    c = min_chord_lengths(f, chords)
    assert c == {0: 2, 1: 2}


def test_min_chord_lengths_point():
    f = corpus.point_pair()
    c = min_chord_lengths(f, f.enumerate_chords())
    assert c == {0: 1}


def test_min_chord_lengths_absent_degree():
    f = corpus.trefoil()
    c = min_chord_lengths(f, f.enumerate_chords())
    # degrees 0 and 1 both present; c_0 = c_1 = min over all
    assert c[0] == Fraction(1, 8)
    assert c[1] == Fraction(1, 8)


def test_mixed_chords_point():
    f = corpus.point_pair()
    g = f.translate(Fraction(1, 4))
    chords, degen = mixed_chords(f, g)
    assert len(chords) == 4
    assert not degen


def test_mixed_chords_unknot_translate():
    f = corpus.unknot()
    g = f.translate(Fraction(1, 2))
    chords, degen = mixed_chords(f, g)
    # parallel pairs (top, top') and (bottom, bottom') are Bott-degenerate
    assert len(degen) == 2
    assert len(chords) == 2
    assert {ch.length for ch in chords} == {Fraction(3, 2), Fraction(5, 2)}


def test_front_json_roundtrip():
    for f in (corpus.point_pair(), corpus.unknot(), corpus.trefoil()):
        d = f.as_dict()
        g = front_from_dict(d)
        assert g == f


def test_cusp_family():
    for a in (Fraction(1, 2), Fraction(-1, 4)):
        f = corpus.cusp_family_front(a)
        assert f.validate().ok, f.validate().issues
        chords = f.enumerate_chords()
        assert len(chords) == 1
        assert chords[0].degree == 0


def test_swap_family_fronts_valid():
    for s in (Fraction(-25, 64), Fraction(-7, 64)):
        f = corpus.swap_family_fronts(s)
        rep = f.validate()
        assert rep.ok, (s, rep.issues)
