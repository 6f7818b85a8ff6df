"""Constructible sheaves on front arrangements.

A sheaf is one graded stalk per cell plus generization maps along covering
face relations (vertex -> edge, edge -> face); longer relations compose.
The singular support condition for fronts with upward coorientation says:
across every front arc the generization toward the upper side is an
isomorphism, only the downward map carries information; at crossings the
four-region square has acyclic total complex, and at cusps the downward
composite around the cusp is an isomorphism.

Duals are computed stalkwise as duals of compactly supported sections over
open stars (shifted by the ambient dimension), then minimized to stalks
with zero differential; this reproduces the classical one dimensional
interval duals exactly.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .arrangement import CellComplex, arrange, rat
from .complexes import ChainMap, CochainComplex, complex_from_dims
from .field import Field
from .fronts import PLFront, PointFront
from .linalg import Matrix

ZERO = None  # absent stalk


# -- generization maps as degree dicts --------------------------------------


def gen_identity(field: Field, stalk: CochainComplex):
    return {d: Matrix.identity(field, n) for d, n in stalk.terms.items()}


def gen_compose(field, g2, g1, source, middle, target):
    """g2 o g1 degreewise (source -> middle -> target stalks)."""
    out = {}
    for d in set(g1) | set(g2):
        a = g1.get(d)
        b = g2.get(d)
        if a is None or b is None:
            continue
        m = b.matmul(a)
        if not m.is_zero():
            out[d] = m
    return out


def gen_matrix(field, g, source: CochainComplex, target: CochainComplex, d: int) -> Matrix:
    m = g.get(d)
    if m is None:
        return Matrix.zero(field, target.dim(d), source.dim(d))
    return m


def gen_is_iso(field, g, source, target) -> bool:
    if source.terms != target.terms:
        return False
    for d, n in source.terms.items():
        m = gen_matrix(field, g, source, target, d)
        if m.rank() != n:
            return False
    return True


def gen_invert(field, g, source, target):
    out = {}
    for d, n in source.terms.items():
        m = gen_matrix(field, g, source, target, d)
        inv = m.solve(Matrix.identity(field, n))
        if inv is None:
            raise ValueError("generization map not invertible")
        out[d] = inv
    return out


def gen_equal(field, g1, g2, source, target) -> bool:
    for d in set(g1) | set(g2):
        if gen_matrix(field, g1, source, target, d).data != gen_matrix(field, g2, source, target, d).data:
            return False
    return True


class SheafError(ValueError):
    pass


class CellSheaf:
    def __init__(self, complex: CellComplex, field: Field, stalks, gens, fronts=None,
                 ss_up: bool = True):
        self.complex = complex
        self.field = field
        self.stalks = {i: c for i, c in stalks.items() if c.total_dim() > 0}
        self.gens = {}
        for (a, b), g in gens.items():
            if a in self.stalks and b in self.stalks and g:
                self.gens[(a, b)] = g
        self.fronts = fronts or []
        self.ss_up = ss_up

    def stalk(self, i: int) -> CochainComplex:
        c = self.stalks.get(i)
        if c is None:
            return CochainComplex(self.field, {}, {}, check=False)
        return c

    def gen(self, a: int, b: int):
        """Generization map for any relation a <= b (composed if needed)."""
        if a == b:
            return gen_identity(self.field, self.stalk(a))
        if (a, b) in self.gens:
            return self.gens[(a, b)]
        if b in self.complex.up.get(a, []):
            return {}
        # compose through a middle cell
        for m in self.complex.up.get(a, []):
            if b in self.complex.up.get(m, []):
                return gen_compose(
                    self.field, self.gen(m, b), self.gen(a, m),
                    self.stalk(a), self.stalk(m), self.stalk(b),
                )
        raise KeyError(f"cells {a} and {b} are not comparable")

    def support_cells(self):
        return sorted(self.stalks)

    def is_compact(self) -> bool:
        return all(not self.complex.cells[i].unbounded for i in self.stalks)

    def total_rank(self) -> int:
        return sum(c.total_dim() for c in self.stalks.values())

    def downward_map(self, arc_idx: int):
        """Map from the region above a front arc to the region below."""
        fa = self.complex.face_above(arc_idx)
        fb = self.complex.face_below(arc_idx)
        up = self.gen(arc_idx, fa)
        inv = gen_invert(self.field, up, self.stalk(arc_idx), self.stalk(fa))
        down = self.gen(arc_idx, fb)
        return fa, fb, gen_compose(self.field, down, inv, self.stalk(fa),
                                   self.stalk(arc_idx), self.stalk(fb))


# -- validation --------------------------------------------------------------


def check_ss(sheaf: CellSheaf, report_only: bool = False):
    """Validation report: list of (kind, message). Empty means valid."""
    issues = []
    cx = sheaf.complex
    fld = sheaf.field

    def iso(a, b, what):
        g = sheaf.gen(a, b)
        if not gen_is_iso(fld, g, sheaf.stalk(a), sheaf.stalk(b)):
            issues.append(("ss", f"{what}: generization {cx.cells[a].id} -> "
                                 f"{cx.cells[b].id} must be an isomorphism"))

    # chain map property of every stored generization
    for (a, b), g in sheaf.gens.items():
        try:
            ChainMap(sheaf.stalk(a), sheaf.stalk(b), dict(g))
        except ValueError as exc:
            issues.append(("data", f"generization {cx.cells[a].id} -> {cx.cells[b].id}: {exc}"))

    # functoriality: vertex -> face through every edge agrees
    for v in range(len(cx.cells)):
        if cx.cells[v].dim != 0:
            continue
        targets = {}
        for e in cx.up[v]:
            for f in cx.up.get(e, []):
                comp = gen_compose(fld, sheaf.gen(e, f), sheaf.gen(v, e),
                                   sheaf.stalk(v), sheaf.stalk(e), sheaf.stalk(f))
                if f in targets:
                    if not gen_equal(fld, targets[f], comp, sheaf.stalk(v), sheaf.stalk(f)):
                        issues.append(("data", f"generization not functorial from "
                                       f"{cx.cells[v].id} to {cx.cells[f].id}"))
                else:
                    targets[f] = comp

    # compact support
    for i in sheaf.stalks:
        if cx.cells[i].unbounded:
            issues.append(("support", f"nonzero stalk on unbounded cell {cx.cells[i].id}"))
            break

    if cx.ambient_dim == 1:
        for c in cx.vertices():
            for e in cx.up[c.index]:
                if cx.covers[(c.index, e)] == -1:  # edge above the point
                    iso(c.index, e, f"point {c.id}: upward generization")
        return issues

    # 2-D local models
    for c in cx.cells:
        if c.kind == "wall":
            for f in cx.up[c.index]:
                iso(c.index, f, f"wall edge {c.id}")
        elif c.kind == "arc":
            iso(c.index, cx.face_above(c.index), f"front arc {c.id}")

    for v in cx.vertices():
        edges = cx.up[v.index]
        wall_up = [e for e in edges if cx.cells[e].kind == "wall" and cx.covers[(v.index, e)] == -1]
        wall_dn = [e for e in edges if cx.cells[e].kind == "wall" and cx.covers[(v.index, e)] == 1]
        arcs = [e for e in edges if cx.cells[e].kind == "arc"]
        if v.vertex_type in ("breakpoint", "wall", "marked"):
            for e in arcs:
                iso(v.index, e, f"smooth front point {v.id}")
            for e in wall_up:
                iso(v.index, e, f"smooth front point {v.id}")
            if v.vertex_type == "marked":
                for e in wall_dn:
                    iso(v.index, e, f"marked point {v.id}")
        elif v.vertex_type == "crossing":
            _check_crossing(sheaf, v, arcs, wall_up, issues)
        elif v.vertex_type == "cusp":
            _check_cusp(sheaf, v, arcs, wall_up, wall_dn, issues)
    return issues


def _classify_crossing_arcs(cx, v, arcs):
    """Return (ul, ur, ll, lr) arc indices around a crossing vertex."""
    left, right = [], []
    for e in arcs:
        cell = cx.cells[e]
        x0, x1 = cell.span
        (side := left if x1 == v.key[0] else right).append(e)

    def height(e, side_right):
        cell = cx.cells[e]
        # value at the far endpoint
        (lo, hi, t0, t1) = cell.key
        return t0 if not side_right else t1

    left.sort(key=lambda e: cx.cells[e].key[2], reverse=True)   # by t at far left end
    right.sort(key=lambda e: cx.cells[e].key[3], reverse=True)
    return left[0], right[0], left[1], right[1]


def _wall_transport(sheaf, v, wall_edges, upward: bool):
    """Transport between the two faces flanking the wall edge above/below v."""
    cx = sheaf.complex
    fld = sheaf.field
    w = wall_edges[0]
    fs = cx.up[w]
    f_left = next(f for f in fs if cx.covers[(w, f)] == 1)
    f_right = next(f for f in fs if cx.covers[(w, f)] == -1)
    gl = sheaf.gen(w, f_left)
    gr = sheaf.gen(w, f_right)
    inv = gen_invert(fld, gl, sheaf.stalk(w), sheaf.stalk(f_left))
    return f_left, f_right, gen_compose(fld, gr, inv, sheaf.stalk(f_left),
                                        sheaf.stalk(w), sheaf.stalk(f_right))


def _check_crossing(sheaf, v, arcs, wall_up, issues):
    from .complexes import totalize

    cx = sheaf.complex
    fld = sheaf.field
    if len(arcs) != 4 or not wall_up:
        issues.append(("data", f"crossing {v.id}: unexpected local cell structure"))
        return
    try:
        ul, ur, ll, lr = _classify_crossing_arcs(cx, v, arcs)
        f_tl, f_l, d_ul = sheaf.downward_map(ul)
        f_tr, f_r, d_ur = sheaf.downward_map(ur)
        _, f_bl, d_ll = sheaf.downward_map(ll)
        _, f_br, d_lr = sheaf.downward_map(lr)
        wtl, wtr, w_top = _wall_transport(sheaf, v, wall_up, True)
    except (ValueError, KeyError) as exc:
        issues.append(("ss", f"crossing {v.id}: {exc}"))
        return
    # assemble the square with top-left as the corner; move to the right
    # column through the wall transport above the crossing
    A = sheaf.stalk(f_tl)
    B1, B2, C = sheaf.stalk(f_l), sheaf.stalk(f_r), sheaf.stalk(f_br)
    a1 = d_ul
    a2 = gen_compose(fld, d_ur, w_top, A, sheaf.stalk(f_tr), B2)
    b2 = d_lr
    # bottom wall transport from f_bl to f_br
    wall_dn = [e for e in cx.up[v.index]
               if cx.cells[e].kind == "wall" and cx.covers[(v.index, e)] == 1]
    _, _, w_bot = _wall_transport(sheaf, v, wall_dn, False)
    b1 = gen_compose(fld, w_bot, d_ll, B1, sheaf.stalk(f_bl), C)
    left_comp = gen_compose(fld, b1, a1, A, B1, C)
    right_comp = gen_compose(fld, b2, a2, A, B2, C)
    if not gen_equal(fld, left_comp, right_comp, A, C):
        issues.append(("data", f"crossing {v.id}: square does not commute"))
        return
    # total complex of A -> B1 (+) B2 -> C must be acyclic
    grid = {}
    d_h = {}
    for d in set(A.terms) | set(B1.terms) | set(B2.terms) | set(C.terms):
        grid[(0, d)] = A.dim(d)
        grid[(1, d)] = B1.dim(d) + B2.dim(d)
        grid[(2, d)] = C.dim(d)
        m1 = gen_matrix(fld, a1, A, B1, d)
        m2 = gen_matrix(fld, a2, A, B2, d)
        d_h[(0, d)] = m1.vstack(m2)
        n1 = gen_matrix(fld, b1, B1, C, d)
        n2 = gen_matrix(fld, b2, B2, C, d)
        d_h[(1, d)] = n1.hstack(n2.neg())
    grid = {k: n for k, n in grid.items() if n > 0}
    d_v = {}
    for (i, d) in list(grid):
        src = (A, None, C)[i] if i != 1 else None
        if i == 0:
            d_v[(i, d)] = A.d(d)
        elif i == 2:
            d_v[(i, d)] = C.d(d)
        else:
            d_v[(i, d)] = Matrix.direct_sum(B1.d(d), B2.d(d))
    tot = totalize(fld, grid, d_h, d_v)
    if tot.cohomology():
        issues.append(("ss", f"crossing {v.id}: four-region square is not exact"))


def _check_cusp(sheaf, v, arcs, wall_up, wall_dn, issues):
    cx = sheaf.complex
    fld = sheaf.field
    if len(arcs) != 2:
        issues.append(("data", f"cusp {v.id}: expected two arcs"))
        return
    for e in wall_up + wall_dn:
        g = sheaf.gen(v.index, e)
        if not gen_is_iso(fld, g, sheaf.stalk(v.index), sheaf.stalk(e)):
            issues.append(("ss", f"cusp {v.id}: stalk must match the outside region"))
            return
    # identify upper and lower arcs by their far-end heights
    a, b = arcs
    right = cx.cells[a].span[0] == v.key[0]
    if right:
        upper, lower = (a, b) if cx.cells[a].key[3] > cx.cells[b].key[3] else (b, a)
    else:
        upper, lower = (a, b) if cx.cells[a].key[2] > cx.cells[b].key[2] else (b, a)
    try:
        g_up = sheaf.gen(v.index, upper)
        if not gen_is_iso(fld, g_up, sheaf.stalk(v.index), sheaf.stalk(upper)):
            issues.append(("ss", f"cusp {v.id}: stalk must restrict isomorphically "
                           "to the upper arc"))
        f_o, f_i, d_u = sheaf.downward_map(upper)
        f_i2, f_o2, d_l = sheaf.downward_map(lower)
        if f_i != f_i2:
            issues.append(("data", f"cusp {v.id}: arcs do not bound a common region"))
            return
        comp = gen_compose(fld, d_l, d_u, sheaf.stalk(f_o), sheaf.stalk(f_i), sheaf.stalk(f_o2))
        if not gen_is_iso(fld, comp, sheaf.stalk(f_o), sheaf.stalk(f_o2)):
            issues.append(("ss", f"cusp {v.id}: outside -> inside -> outside composite "
                           "is not an isomorphism"))
    except (ValueError, KeyError) as exc:
        issues.append(("ss", f"cusp {v.id}: {exc}"))


def validate_or_raise(sheaf: CellSheaf):
    issues = [i for i in check_ss(sheaf) if i[0] != "support"]
    if issues:
        raise SheafError("; ".join(m for _, m in issues))
    return sheaf


# -- section models ----------------------------------------------------------


def cell_model(sheaf: CellSheaf, cells=None):
    """Compactly supported sections over the union of the given cells
    (must be an up-closed subset; defaults to everything).

    Returns (complex, basis) with basis[n] = list of (cell, internal degree,
    offset) coordinates. Equals derived sections when the support is compact.
    """
    cx = sheaf.complex
    fld = sheaf.field
    cells = sorted(set(cells)) if cells is not None else sorted(sheaf.stalks)
    cells = [c for c in cells if c in sheaf.stalks]
    basis = {}
    offsets = {}
    for c in cells:
        st = sheaf.stalks[c]
        dimc = cx.cells[c].dim
        for d, n in st.terms.items():
            tot = d + dimc
            basis.setdefault(tot, [])
            offsets[(c, d)] = (tot, len(basis[tot]))
            basis[tot].extend((c, d, k) for k in range(n))
    terms = {n: len(v) for n, v in basis.items()}
    diff = {}
    cellset = set(cells)
    for n in sorted(terms):
        if terms.get(n + 1, 0) == 0:
            continue
        m = Matrix.zero(fld, terms[n + 1], terms[n])
        for c in cells:
            st = sheaf.stalks[c]
            dimc = cx.cells[c].dim
            for d in st.terms:
                if d + dimc != n:
                    continue
                col = offsets[(c, d)][1]
                # internal differential with Koszul sign (-1)^{dim c}
                if st.dim(d + 1):
                    row = offsets[(c, d + 1)][1]
                    blk = st.d(d)
                    if dimc % 2:
                        blk = blk.neg()
                    _paste_block(m, blk, row, col, fld)
                # generization to covering cells with incidence signs
                for c2 in cx.up.get(c, []):
                    if c2 not in cellset or c2 not in sheaf.stalks:
                        continue
                    g = sheaf.gen(c, c2)
                    blk = gen_matrix(fld, g, st, sheaf.stalks[c2], d)
                    if blk.rows == 0 or blk.cols == 0:
                        continue
                    sign = cx.covers[(c, c2)]
                    if sign == -1:
                        blk = blk.neg()
                    if (c2, d) in offsets:
                        row = offsets[(c2, d)][1]
                        _paste_block(m, blk, row, col, fld)
        diff[n] = m
    cxx = CochainComplex(fld, terms, diff)
    return cxx, basis, offsets


def _paste_block(m: Matrix, blk: Matrix, row: int, col: int, fld):
    for i in range(blk.rows):
        for j in range(blk.cols):
            if not fld.is_zero(blk.data[i][j]):
                m.data[row + i][col + j] = fld.add(m.data[row + i][col + j], blk.data[i][j])


def star(cx: CellComplex, idx: int):
    """Open star: all cells whose closure contains the cell (up-set)."""
    out = {idx}
    frontier = [idx]
    while frontier:
        nxt = []
        for c in frontier:
            for c2 in cx.up.get(c, []):
                if c2 not in out:
                    out.add(c2)
                    nxt.append(c2)
        frontier = nxt
    return out


# -- homotopy minimization ---------------------------------------------------


def homotopy_reduce(c: CochainComplex):
    """(H, p, iota) with H the zero-differential model, p o iota = id."""
    fld = c.field
    h_terms = {}
    p_comp = {}
    i_comp = {}
    for d in c.terms:
        n = c.dim(d)
        prev = c.d(d - 1) if c.dim(d - 1) else Matrix.zero(fld, n, 0)
        # image basis
        _, piv = prev.rref()
        img_cols = []
        red, pivots = prev.rref()
        img = Matrix(fld, n, len(pivots))
        for k, pc in enumerate(pivots):
            for r in range(n):
                img.data[r][k] = prev.data[r][pc]
        # kernel of the outgoing differential
        if c.dim(d + 1):
            kern = c.d(d).kernel_basis()
        else:
            kern = Matrix.identity(fld, n)
        # extend image basis inside the kernel
        combo = img.hstack(kern)
        _, piv2 = combo.rref()
        h_cols = [p - img.cols for p in piv2 if p >= img.cols]
        hbasis = Matrix(fld, n, len(h_cols))
        for k, kc in enumerate(h_cols):
            for r in range(n):
                hbasis.data[r][k] = kern.data[r][kc]
        # extend to all of C^d
        zpart = img.hstack(hbasis)
        full = zpart.hstack(Matrix.identity(fld, n))
        _, piv3 = full.rref()
        w_cols = [p - zpart.cols for p in piv3 if p >= zpart.cols]
        wbasis = Matrix(fld, n, len(w_cols))
        for k, kc in enumerate(w_cols):
            wbasis.data[kc][k] = fld.one()
        M = img.hstack(hbasis).hstack(wbasis)
        Minv = M.solve(Matrix.identity(fld, n))
        if Minv is None:
            raise AssertionError("basis change not invertible")
        hdim = hbasis.cols
        if hdim:
            h_terms[d] = hdim
            proj = Matrix(fld, hdim, n)
            proj.data = [Minv.data[img.cols + k][:] for k in range(hdim)]
            p_comp[d] = proj
            i_comp[d] = hbasis
    H = complex_from_dims(fld, h_terms)
    p = ChainMap(c, H, p_comp)
    iota = ChainMap(H, c, i_comp)
    return H, p, iota


def minimize_sheaf(sheaf: CellSheaf) -> CellSheaf:
    """Replace every stalk by its cohomology; transported maps stay strictly
    functorial because the minimal models carry zero differential."""
    reduced = {}
    for i, st in sheaf.stalks.items():
        reduced[i] = homotopy_reduce(st)
    stalks = {i: H for i, (H, _, _) in reduced.items()}
    gens = {}
    for (a, b), g in sheaf.gens.items():
        if a not in reduced or b not in reduced:
            continue
        _, pa, ia = reduced[a]
        _, pb, ib = reduced[b]
        out = {}
        for d in stalks[a].terms:
            if not stalks[b].dim(d):
                continue
            m = pb.component(d).matmul(
                gen_matrix(sheaf.field, g, sheaf.stalk(a), sheaf.stalk(b), d).matmul(
                    ia.component(d)
                )
            )
            if not m.is_zero():
                out[d] = m
        gens[(a, b)] = out
    return CellSheaf(sheaf.complex, sheaf.field, stalks, gens,
                     fronts=sheaf.fronts, ss_up=sheaf.ss_up)


# -- constructors ------------------------------------------------------------


def indicator_point_sheaf(front: PointFront, field: Field, a, b, closed_left=True,
                          rank: int = 1) -> CellSheaf:
    """k^rank on [a, b) (or (a, b] when closed_left is False; b None = +inf).

    The open-left variant has downward singular support; it is built with
    ss_up False and skips the upward validation."""
    cx = arrange([front])
    a = rat(a)
    b = rat(b) if b is not None else None

    def member(t):
        if closed_left:
            return a <= t and (b is None or t < b)
        return a < t and (b is None or t <= b)

    return _indicator(cx, field, lambda s: member(s[0]), rank, [front],
                      validate=closed_left, ss_up=closed_left)


def indicator_eye_sheaf(front: PLFront, field: Field, top_sheet: int, bottom_sheet: int,
                        rank: int = 1, complex: CellComplex | None = None) -> CellSheaf:
    """k^rank on the region between two cusp-paired sheets, closed along the
    bottom sheet and open along the top (the standard simple sheaf)."""
    cx = complex or arrange([front])
    top = front.sheets[top_sheet]
    bot = front.sheets[bottom_sheet]

    def member(pt):
        x, t = pt
        if not (top.x_min <= x <= top.x_max):
            return False
        return bot.value(x) <= t < top.value(x)

    return _indicator(cx, field, member, rank, [front])


def _indicator(cx, field, member, rank, fronts, validate=True, ss_up=True):
    stalks = {}
    for c in cx.cells:
        if member(c.sample):
            stalks[c.index] = complex_from_dims(field, {0: rank})
    gens = {}
    ident = Matrix.identity(field, rank)
    for (a, b) in cx.covers:
        if a in stalks and b in stalks:
            gens[(a, b)] = {0: ident}
    s = CellSheaf(cx, field, stalks, gens, fronts=fronts, ss_up=ss_up)
    return validate_or_raise(s) if validate else s


def region_sheaf(front: PLFront, field: Field, regions, arc_maps,
                 complex: CellComplex | None = None) -> CellSheaf:
    """Sheaf from complement-region data.

    regions: list of ((x, t) sample, dim or {deg: dim}); unspecified regions
    are zero. arc_maps: list of (sheet index, x sample, entries) giving the
    downward map (upper region -> lower region) on the smooth arc containing
    that x; maps forced by a zero side may be omitted.
    """
    cx = complex or arrange([front])
    region_of = cx.regions()

    region_dims = {}
    for (pt, dims) in regions:
        x, t = rat(pt[0]), rat(pt[1])
        cell = cx.locate(x, t)
        if cx.cells[cell].kind != "face":
            raise SheafError(f"region sample ({x},{t}) is not inside a region")
        rid = region_of[cell]
        if isinstance(dims, int):
            dims = {0: dims}
        region_dims[rid] = dims

    def region_stalk(face_idx):
        rid = region_of[face_idx]
        dims = region_dims.get(rid)
        return complex_from_dims(field, dims) if dims else None

    # smooth-arc decomposition per sheet: events are cusps and crossings
    crossings = front.crossings()
    sheet_events = {}
    for si, s in enumerate(front.sheets):
        evs = {s.x_min, s.x_max}
        for (xc, tc, i, j) in crossings:
            if si in (i, j):
                evs.add(xc)
        sheet_events[si] = sorted(evs)

    def smooth_arc_of(si, x):
        evs = sheet_events[si]
        for lo, hi in zip(evs, evs[1:]):
            if lo < x < hi:
                return (lo, hi)
        raise SheafError(f"x={x} is an event of sheet {si}")

    arc_map_table = {}
    for (si, xs, entries) in arc_maps:
        arc_map_table[(si, smooth_arc_of(si, rat(xs)))] = entries

    stalks = {}
    gens = {}

    for c in cx.faces():
        st = region_stalk(c.index)
        if st:
            stalks[c.index] = st

    def stalk_of(i):
        return stalks.get(i) or complex_from_dims(field, {})

    def down_matrix(arc_cell):
        """Downward map on a front arc piece (upper region -> lower)."""
        fa = cx.face_above(arc_cell.index)
        fb = cx.face_below(arc_cell.index)
        up, dn = stalk_of(fa), stalk_of(fb)
        if up.total_dim() == 0 or dn.total_dim() == 0:
            return None
        fi, si = arc_cell.sheet
        xmid = arc_cell.sample[0]
        key = (si, smooth_arc_of(si, xmid))
        entries = arc_map_table.get(key)
        if entries is None:
            raise SheafError(
                f"arc of sheet {si} near x={xmid} joins two nonzero regions: "
                "an explicit downward map is required"
            )
        return Matrix(field, dn.dim(0), up.dim(0), entries)

    # arcs: stalk = upper region, gens up = id, down = the arc map
    for c in cx.arcs():
        fa = cx.face_above(c.index)
        fb = cx.face_below(c.index)
        up = stalk_of(fa)
        if up.total_dim():
            stalks[c.index] = up
            gens[(c.index, fa)] = gen_identity(field, up)
        dmat = down_matrix(c)
        if dmat is not None:
            gens[(c.index, fb)] = {0: dmat}
        elif up.total_dim() and stalk_of(fb).total_dim():
            raise SheafError("unreachable")

    # wall edges: stalk = adjacent region (same on both sides)
    for c in cx.edges():
        if c.kind != "wall":
            continue
        fs = cx.up[c.index]
        st = stalk_of(fs[0])
        if st.total_dim():
            stalks[c.index] = st
            for f in fs:
                gens[(c.index, f)] = gen_identity(field, st)

    # vertices by local type
    for v in cx.vertices():
        edges = cx.up[v.index]
        arcs = [e for e in edges if cx.cells[e].kind == "arc"]
        wall_up = [e for e in edges if cx.cells[e].kind == "wall"
                   and cx.covers[(v.index, e)] == -1]
        wall_dn = [e for e in edges if cx.cells[e].kind == "wall"
                   and cx.covers[(v.index, e)] == 1]

        def set_vertex(stalk, maps):
            if stalk.total_dim() == 0:
                return
            stalks[v.index] = stalk
            for e, g in maps.items():
                if g:
                    gens[(v.index, e)] = g

        if v.vertex_type in ("breakpoint", "wall"):
            # smooth front point: stalk = the arc stalk (= upper region)
            if arcs:
                st = stalks.get(arcs[0])
                if st is None:
                    # upper region zero; vertex stalk is zero, down maps trivial
                    continue
                maps = {}
                for e in arcs:
                    maps[e] = gen_identity(field, st)
                for e in wall_up:
                    maps[e] = gen_identity(field, st)
                dmat = down_matrix(cx.cells[arcs[0]])
                for e in wall_dn:
                    if dmat is not None:
                        maps[e] = {0: dmat}
                set_vertex(st, maps)
            continue
        if v.vertex_type == "marked":
            st = stalk_of(wall_up[0]) if wall_up else None
            if st and st.total_dim():
                maps = {e: gen_identity(field, st) for e in wall_up + wall_dn}
                set_vertex(st, maps)
            continue
        if v.vertex_type == "crossing":
            ul, ur, ll, lr = _classify_crossing_arcs(cx, v, arcs)
            st = stalks.get(ul)
            if st is None:
                continue
            maps = {ul: gen_identity(field, st), ur: gen_identity(field, st)}
            for e in wall_up:
                maps[e] = gen_identity(field, st)
            dl = down_matrix(cx.cells[ul])
            dr = down_matrix(cx.cells[ur])
            if dl is not None:
                maps[ll] = {0: dl}
            if dr is not None:
                maps[lr] = {0: dr}
            # to the bottom wall: composite through either side (must agree)
            lower_arc = cx.cells[ll]
            d2 = down_matrix(lower_arc)
            if dl is not None and d2 is not None:
                maps_down = {0: d2.matmul(dl)}
                for e in wall_dn:
                    maps[e] = maps_down
            set_vertex(st, maps)
            continue
        if v.vertex_type == "cusp":
            # stalk = outside region (the wall side)
            st = stalk_of(wall_up[0]) if wall_up else None
            if st is None or st.total_dim() == 0:
                continue
            right = cx.cells[arcs[0]].span[0] == v.key[0]
            if right:
                upper, lower = sorted(arcs, key=lambda e: cx.cells[e].key[3], reverse=True)
            else:
                upper, lower = sorted(arcs, key=lambda e: cx.cells[e].key[2], reverse=True)
            maps = {e: gen_identity(field, st) for e in wall_up + wall_dn}
            maps[upper] = gen_identity(field, st)
            du = down_matrix(cx.cells[upper])
            if du is not None:
                maps[lower] = {0: du}
            set_vertex(st, maps)

    s = CellSheaf(cx, field, stalks, gens, fronts=[front])
    return validate_or_raise(s)


# -- algebraic operations ----------------------------------------------------


def sheaf_direct_sum(a: CellSheaf, b: CellSheaf) -> CellSheaf:
    if a.complex is not b.complex and len(a.complex.cells) != len(b.complex.cells):
        raise SheafError("direct sum needs sheaves on the same complex")
    stalks = {}
    for i in set(a.stalks) | set(b.stalks):
        stalks[i] = a.stalk(i).direct_sum(b.stalk(i))
    gens = {}
    for (x, y) in set(a.gens) | set(b.gens):
        out = {}
        src = stalks.get(x)
        if src is None or y not in stalks:
            continue
        for d in src.terms:
            ma = gen_matrix(a.field, a.gen(x, y), a.stalk(x), a.stalk(y), d)
            mb = gen_matrix(b.field, b.gen(x, y), b.stalk(x), b.stalk(y), d)
            m = Matrix.direct_sum(ma, mb)
            if not m.is_zero():
                out[d] = m
        gens[(x, y)] = out
    return CellSheaf(a.complex, a.field, stalks, gens, fronts=a.fronts, ss_up=a.ss_up)


def sheaf_shift(s: CellSheaf, n: int) -> CellSheaf:
    stalks = {i: c.shift(n) for i, c in s.stalks.items()}
    gens = {}
    for (a, b), g in s.gens.items():
        gens[(a, b)] = {d - n: m for d, m in g.items()}
    return CellSheaf(s.complex, s.field, stalks, gens, fronts=s.fronts, ss_up=s.ss_up)


def transport(sheaf: CellSheaf, target: CellComplex, offset=Fraction(0)) -> CellSheaf:
    """Carry a sheaf to a finer complex (optionally sampling at t - offset,
    which transports translate(s, offset) onto the target)."""
    src = sheaf.complex
    loccache = {}

    def locate(cell):
        if cell.index in loccache:
            return loccache[cell.index]
        if src.ambient_dim == 1:
            idx = src.locate(cell.sample[0] - offset)
        else:
            idx = src.locate(cell.sample[0], cell.sample[1] - offset)
        loccache[cell.index] = idx
        return idx

    stalks = {}
    for c in target.cells:
        st = sheaf.stalks.get(locate(c))
        if st is not None:
            stalks[c.index] = st
    gens = {}
    for (a, b) in target.covers:
        if a not in stalks or b not in stalks:
            continue
        sa, sb = locate(target.cells[a]), locate(target.cells[b])
        if sa == sb:
            gens[(a, b)] = gen_identity(sheaf.field, stalks[a])
        else:
            gens[(a, b)] = sheaf.gen(sa, sb)
    return CellSheaf(target, sheaf.field, stalks, gens, fronts=sheaf.fronts,
                     ss_up=sheaf.ss_up)


def translate_sheaf(sheaf: CellSheaf, c) -> CellSheaf:
    """The pushforward along vertical translation by c (heights + c)."""
    c = rat(c)
    if not sheaf.fronts:
        raise SheafError("translate needs the underlying front")
    fronts = [f.translate(c) for f in sheaf.fronts]
    cx = arrange(fronts)
    out = transport(sheaf, cx, offset=c)
    out.fronts = fronts
    return out


def propagation_map(source: CellSheaf, target: CellSheaf, c, common: CellComplex):
    """Cellwise shadow of the canonical map source -> T_{c,*} source, where
    target is translate(source, c) transported to the common complex.

    Returns {cell index: degree dict} mapping source stalks to target stalks
    on the common complex; naturality is asserted.
    """
    c = rat(c)
    if c < 0:
        raise ValueError("propagation step must be nonnegative")
    srcT = transport(source, common)
    tgtT = transport(target, common)
    base = source  # descent runs inside the source sheaf's own complex
    comps = {}
    for cell in common.cells:
        a = srcT.stalks.get(cell.index)
        b = tgtT.stalks.get(cell.index)
        if a is None or b is None:
            continue
        if common.ambient_dim == 1:
            t_hi = cell.sample[0]
            g = _descend_1d(base, t_hi, t_hi - c)
        else:
            x, t = cell.sample
            g = _descend_2d(base, x, t, t - c)
        if g:
            comps[cell.index] = g
    _assert_natural(srcT, tgtT, comps)
    return srcT, tgtT, comps


def _assert_natural(src: CellSheaf, tgt: CellSheaf, comps):
    cx = src.complex
    fld = src.field
    for (a, b) in cx.covers:
        if a not in src.stalks or b not in src.stalks:
            continue
        if a not in tgt.stalks or b not in tgt.stalks:
            continue
        lhs = gen_compose(fld, tgt.gen(a, b), comps.get(a, {}), src.stalk(a),
                          tgt.stalk(a), tgt.stalk(b))
        rhs = gen_compose(fld, comps.get(b, {}), src.gen(a, b), src.stalk(a),
                          src.stalk(b), tgt.stalk(b))
        if not gen_equal(fld, lhs, rhs, src.stalk(a), tgt.stalk(b)):
            raise AssertionError(
                f"propagation map is not natural across {cx.cells[a].id} -> {cx.cells[b].id}"
            )


def _descend_1d(sheaf: CellSheaf, t_hi, t_lo):
    cx = sheaf.complex
    fld = sheaf.field
    cur = cx.locate(t_hi)
    g = gen_identity(fld, sheaf.stalk(cur))
    stalk = sheaf.stalk(cur)
    while True:
        cell = cx.cells[cur]
        if cell.dim == 0:
            # step off the point downward
            lower = [e for e in cx.up[cur] if cx.covers[(cur, e)] == 1]
            nxt = lower[0]
            g = gen_compose(fld, sheaf.gen(cur, nxt), g, stalk, sheaf.stalk(cur), sheaf.stalk(nxt))
            cur = nxt
            continue
        lo, hi = cell.span
        lo_val = None if lo == (-1, Fraction(0)) else lo[1]
        if lo_val is not None and lo_val >= t_lo:
            if lo_val == t_lo:
                # land exactly on the point: enter through its upward iso
                v = cx.locate(t_lo)
                up = sheaf.gen(v, cur)
                inv = gen_invert(fld, up, sheaf.stalk(v), sheaf.stalk(cur))
                return gen_compose(fld, inv, g, stalk, sheaf.stalk(cur), sheaf.stalk(v))
            # cross the point downward
            v = cx.locate(lo_val)
            up = sheaf.gen(v, cur)
            inv = gen_invert(fld, up, sheaf.stalk(v), sheaf.stalk(cur))
            g = gen_compose(fld, inv, g, stalk, sheaf.stalk(cur), sheaf.stalk(v))
            cur = v
            continue
        return g


def _descend_2d(sheaf: CellSheaf, x, t_hi, t_lo):
    cx = sheaf.complex
    fld = sheaf.field
    if t_hi == t_lo:
        cur = cx.locate(x, t_hi)
        return gen_identity(fld, sheaf.stalk(cur))
    cur = cx.locate(x, t_hi)
    stalk0 = sheaf.stalk(cur)
    g = gen_identity(fld, stalk0)
    pos_cell = cur
    while True:
        cell = cx.cells[pos_cell]
        if cell.kind in ("arc", "vertex"):
            # step off downward
            if cell.kind == "arc":
                below = cx.face_below(pos_cell)
            else:
                lower = [e for e in cx.up[pos_cell]
                         if cx.cells[e].kind == "wall" and cx.covers[(pos_cell, e)] == 1]
                below = lower[0]
            g = gen_compose(fld, sheaf.gen(pos_cell, below), g, stalk0,
                            sheaf.stalk(pos_cell), sheaf.stalk(below))
            pos_cell = below
            continue
        # face or wall edge: find its lower boundary height at x
        if cell.kind == "face":
            below_piece = cell.span[4]
            if below_piece is None:
                lo_val = None
            else:
                lo_val = _piece_value(cx, below_piece, x)
            next_cell = below_piece
        else:  # wall edge
            _, lo, hi = cell.span
            lo_val = None if lo == (-1, Fraction(0)) else lo[1]
            next_cell = cx.locate(x, lo_val) if lo_val is not None else None
        if lo_val is None or lo_val < t_lo:
            return g
        if lo_val == t_lo:
            up = sheaf.gen(next_cell, pos_cell)
            inv = gen_invert(fld, up, sheaf.stalk(next_cell), sheaf.stalk(pos_cell))
            return gen_compose(fld, inv, g, stalk0, sheaf.stalk(pos_cell), sheaf.stalk(next_cell))
        up = sheaf.gen(next_cell, pos_cell)
        inv = gen_invert(fld, up, sheaf.stalk(next_cell), sheaf.stalk(pos_cell))
        g = gen_compose(fld, inv, g, stalk0, sheaf.stalk(pos_cell), sheaf.stalk(next_cell))
        pos_cell = next_cell


def _piece_value(cx: CellComplex, arc_idx: int, x):
    (lo, hi, t0, t1) = cx.cells[arc_idx].key
    x0, x1 = lo[1], hi[1]
    return t0 + (t1 - t0) * (x - x0) / (x1 - x0)


# -- dual and tensor ---------------------------------------------------------


def dual(sheaf: CellSheaf) -> CellSheaf:
    """Stalkwise dual of compactly supported star sections, shifted by the
    ambient dimension; minimized to zero-differential stalks."""
    cx = sheaf.complex
    fld = sheaf.field
    N = cx.ambient_dim
    models = {}
    bases = {}
    for c in cx.cells:
        st = star(cx, c.index)
        sup = [i for i in st if i in sheaf.stalks]
        if not sup:
            continue
        cm, basis, offsets = cell_model(sheaf, sup)
        models[c.index] = (cm, basis, offsets, set(sup))
    stalks = {}
    for i, (cm, _, _, _) in models.items():
        stalks[i] = cm.dual().shift(-N)
    gens = {}
    for (a, b) in cx.covers:
        if a not in models or b not in models:
            continue
        cma, basa, offa, supa = models[a]
        cmb, basb, offb, supb = models[b]
        # inclusion of the smaller star's sections, dualized to a projection
        out = {}
        for dd in stalks[a].terms:
            # stalk degree dd corresponds to section degree N - dd
            n = N - dd
            rows = len(basb.get(n, []))
            cols = len(basa.get(n, []))
            if rows == 0 or cols == 0:
                continue
            m = Matrix.zero(fld, rows, cols)
            index_a = {coord: k for k, coord in enumerate(basa.get(n, []))}
            for r, coord in enumerate(basb.get(n, [])):
                k = index_a.get(coord)
                if k is not None:
                    m.data[r][k] = fld.one()
            if not m.is_zero():
                out[dd] = m
        gens[(a, b)] = out
    raw = CellSheaf(cx, fld, stalks, gens, fronts=sheaf.fronts, ss_up=False)
    return minimize_sheaf(raw)


def tensor(a: CellSheaf, b: CellSheaf) -> CellSheaf:
    if len(a.complex.cells) != len(b.complex.cells):
        raise SheafError("tensor needs sheaves on a common complex; refine first")
    fld = a.field
    stalks = {}
    for i in set(a.stalks) & set(b.stalks):
        t = a.stalks[i].tensor(b.stalks[i])
        if t.total_dim():
            stalks[i] = t
    gens = {}
    for (x, y) in set(a.complex.covers):
        if x not in stalks or y not in stalks:
            continue
        gens[(x, y)] = _tensor_gen(fld, a.gen(x, y), b.gen(x, y),
                                   a.stalk(x), b.stalk(x), a.stalk(y), b.stalk(y))
    return CellSheaf(a.complex, fld, stalks, gens, fronts=a.fronts,
                     ss_up=a.ss_up and b.ss_up)


def _tensor_pairs(A: CochainComplex, B: CochainComplex):
    pairs = {}
    for i in A.terms:
        for j in B.terms:
            pairs.setdefault(i + j, []).append((i, j))
    for ps in pairs.values():
        ps.sort()
    offsets = {}
    for n, ps in pairs.items():
        acc = 0
        offsets[n] = {}
        for ij in ps:
            offsets[n][ij] = acc
            acc += A.dim(ij[0]) * B.dim(ij[1])
    return pairs, offsets


def _tensor_gen(fld, gA, gB, A1, B1, A2, B2):
    src = A1.tensor(B1)
    tgt = A2.tensor(B2)
    pairs1, off1 = _tensor_pairs(A1, B1)
    pairs2, off2 = _tensor_pairs(A2, B2)
    out = {}
    for n in pairs1:
        if n not in pairs2:
            continue
        m = Matrix.zero(fld, tgt.dim(n), src.dim(n))
        wrote = False
        for (i, j) in pairs1[n]:
            if (i, j) not in off2.get(n, {}):
                continue
            ma = gen_matrix(fld, gA, A1, A2, i)
            mb = gen_matrix(fld, gB, B1, B2, j)
            blk = ma.kron(mb)
            if blk.is_zero():
                continue
            _paste_block(m, blk, off2[n][(i, j)], off1[n][(i, j)], fld)
            wrote = True
        if wrote:
            out[n] = m
    return out


# -- microstalks -------------------------------------------------------------


def microstalk(sheaf: CellSheaf, arc_idx: int, potential: int = 0) -> CochainComplex:
    """Tot(upper -> lower) across the arc, shifted by the Maslov potential."""
    cell = sheaf.complex.cells[arc_idx]
    if cell.kind != "arc":
        raise ValueError("microstalk needs a smooth front arc cell")
    fa, fb, dmap = sheaf.downward_map(arc_idx)
    up, dn = sheaf.stalk(fa), sheaf.stalk(fb)
    comps = {d: gen_matrix(sheaf.field, dmap, up, dn, d) for d in up.terms
             if dn.dim(d)}
    from .complexes import cone

    f = ChainMap(up, dn, comps)
    return cone(f).shift(-1).shift(-potential)


def microlocal_rank(sheaf: CellSheaf, front) -> tuple:
    """(rank, pure, dims per component) with constancy enforced per component."""
    cx = sheaf.complex
    comp_of_sheet = _sheet_components(front)
    seen = {}
    for c in cx.arcs():
        fi, si = c.sheet
        pot = front.potentials[si]
        m = microstalk(sheaf, c.index, pot).cohomology()
        key = comp_of_sheet[si]
        if key in seen:
            if seen[key] != m:
                raise SheafError(
                    f"microlocal rank jumps across arcs of component {key}: {seen[key]} vs {m}"
                )
        else:
            seen[key] = m
    dims = {k: v for k, v in sorted(seen.items())}
    ranks = {k: sum(v.values()) for k, v in dims.items()}
    pure = all(len(v) <= 1 for v in dims.values())
    rset = set(ranks.values())
    rank = rset.pop() if len(rset) == 1 else None
    return rank, pure, dims


def point_microstalks(sheaf: CellSheaf, front: PointFront):
    """Microstalk dims at each point of a point front."""
    cx = sheaf.complex
    out = []
    for k, p in enumerate(front.points):
        v = cx.locate(p)
        above = next(e for e in cx.up[v] if cx.covers[(v, e)] == -1)
        below = next(e for e in cx.up[v] if cx.covers[(v, e)] == 1)
        up_st = sheaf.stalk(v)
        g_up = sheaf.gen(v, above)
        inv = gen_invert(sheaf.field, g_up, up_st, sheaf.stalk(above))
        down = gen_compose(sheaf.field, sheaf.gen(v, below), inv,
                           sheaf.stalk(above), up_st, sheaf.stalk(below))
        comps = {d: gen_matrix(sheaf.field, down, sheaf.stalk(above), sheaf.stalk(below), d)
                 for d in sheaf.stalk(above).terms if sheaf.stalk(below).dim(d)}
        from .complexes import cone

        f = ChainMap(sheaf.stalk(above), sheaf.stalk(below), comps)
        m = cone(f).shift(-1).shift(-front.potentials[k])
        out.append(m.cohomology())
    return out


def _sheet_components(front: PLFront):
    parent = list(range(len(front.sheets)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for c in front.cusps:
        ra, rb = find(c.sheets[0]), find(c.sheets[1])
        if ra != rb:
            parent[ra] = rb
    return {i: find(i) for i in range(len(front.sheets))}


# -- serialization -----------------------------------------------------------


def sheaf_to_dict(sheaf: CellSheaf) -> dict:
    def num(x):
        if isinstance(x, Fraction):
            return f"{x.numerator}/{x.denominator}"
        return int(x)

    stalks = {}
    for i, st in sheaf.stalks.items():
        stalks[sheaf.complex.cells[i].id] = {str(d): n for d, n in st.terms.items()}
    gens = {}
    for (a, b), g in sheaf.gens.items():
        key = f"{sheaf.complex.cells[a].id}->{sheaf.complex.cells[b].id}"
        gens[key] = {str(d): [[num(x) for x in row] for row in m.data] for d, m in g.items()}
    return {"stalks": stalks, "gens": gens}


def sheaf_from_dict(d: dict, front, field: Field) -> CellSheaf:
    cx = arrange([front])
    stalks = {}
    for cid, dims in d["stalks"].items():
        idx = cx.by_id[cid]
        stalks[idx] = complex_from_dims(field, {int(k): v for k, v in dims.items()})
    gens = {}
    for key, degs in d.get("gens", {}).items():
        a, b = key.split("->")
        ai, bi = cx.by_id[a], cx.by_id[b]
        g = {}
        for ds, entries in degs.items():
            dd = int(ds)
            rows = len(entries)
            cols = len(entries[0]) if rows else 0
            g[dd] = Matrix(field, rows, cols, entries)
        gens[(ai, bi)] = g
    return CellSheaf(cx, field, stalks, gens, fronts=[front])


def load_sheaf(path: str, front, field: Field) -> CellSheaf:
    with open(path) as fh:
        return sheaf_from_dict(json.load(fh), front, field)
