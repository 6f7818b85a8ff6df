"""Bounded cochain complexes of finite dimensional vector spaces.

Grading is cohomological (upper index); the shift [n] lowers the degree
index by n, so (C[n])^i = C^{n+i} and k[-1] is a line in degree 1.
The mapping cone convention is fixed once for the whole package:
cone(f)^i = source^{i+1} (+) target^i with differential
[-d_src, 0; f, d_tgt].
"""

from __future__ import annotations

from .field import Field
from .linalg import Matrix


class CochainComplex:
    """terms: degree -> dimension (only nonzero degrees stored);
    diff: degree -> Matrix, d^i mapping term i to term i+1."""

    def __init__(self, field: Field, terms=None, diff=None, check: bool = True):
        self.field = field
        self.terms = {d: n for d, n in (terms or {}).items() if n > 0}
        self.diff = {}
        for d, m in (diff or {}).items():
            if m is None or (m.rows == 0 and m.cols == 0):
                continue
            self.diff[d] = m
        if check:
            self.validate()

    def dim(self, d: int) -> int:
        return self.terms.get(d, 0)

    def d(self, deg: int) -> Matrix:
        m = self.diff.get(deg)
        if m is None:
            m = Matrix.zero(self.field, self.dim(deg + 1), self.dim(deg))
        return m

    def degrees(self):
        return sorted(self.terms)

    def validate(self):
        for d, m in self.diff.items():
            if m.rows != self.dim(d + 1) or m.cols != self.dim(d):
                raise ValueError(
                    f"differential at degree {d} has shape {m.rows}x{m.cols}, "
                    f"expected {self.dim(d+1)}x{self.dim(d)}"
                )
        for d in list(self.terms):
            if self.dim(d) and self.dim(d + 1) and self.dim(d + 2):
                comp = self.d(d + 1).matmul(self.d(d))
                if not comp.is_zero():
                    raise ValueError(f"d o d != 0 between degrees {d} and {d+2}")

    def total_dim(self) -> int:
        return sum(self.terms.values())

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * n for d, n in self.terms.items())

    def cohomology(self) -> dict:
        """degree -> dim H^degree, zero degrees omitted."""
        out = {}
        for d in self.terms:
            n = self.dim(d)
            rk_out = self.d(d).rank() if self.dim(d + 1) else 0
            rk_in = self.d(d - 1).rank() if self.dim(d - 1) else 0
            h = n - rk_out - rk_in
            if h:
                out[d] = h
        return out

    def shift(self, n: int) -> "CochainComplex":
        """C[n] with (C[n])^i = C^{n+i}; odd shifts negate differentials."""
        terms = {d - n: v for d, v in self.terms.items()}
        sign = -1 if n % 2 else 1
        diff = {}
        for d, m in self.diff.items():
            diff[d - n] = m if sign == 1 else m.neg()
        return CochainComplex(self.field, terms, diff, check=False)

    def direct_sum(self, other: "CochainComplex") -> "CochainComplex":
        f = self.field
        terms = dict(self.terms)
        for d, v in other.terms.items():
            terms[d] = terms.get(d, 0) + v
        diff = {}
        for d in set(self.diff) | set(other.diff):
            a = self.d(d)
            b = other.d(d)
            diff[d] = Matrix.block(
                [
                    [a, Matrix.zero(f, a.rows, b.cols)],
                    [Matrix.zero(f, b.rows, a.cols), b],
                ]
            )
        return CochainComplex(f, terms, diff, check=False)

    def dual(self) -> "CochainComplex":
        """Hom(C, k): term at -d is the dual of C^d, d(f) = -(-1)^n f o d."""
        f = self.field
        terms = {-d: v for d, v in self.terms.items()}
        diff = {}
        for d, m in self.diff.items():
            # dual differential at degree -(d+1): transpose with Koszul sign
            sign = -1 if (-(d + 1)) % 2 else 1
            mt = m.transpose()
            diff[-(d + 1)] = mt.neg() if sign == 1 else mt
        return CochainComplex(f, terms, diff, check=False)

    def tensor(self, other: "CochainComplex") -> "CochainComplex":
        """Total tensor with d(a (x) b) = da (x) b + (-1)^|a| a (x) db."""
        f = self.field
        terms = {}
        pairs = {}
        for i, ni in self.terms.items():
            for j, nj in other.terms.items():
                terms[i + j] = terms.get(i + j, 0) + ni * nj
                pairs.setdefault(i + j, []).append((i, j))
        for ps in pairs.values():
            ps.sort()
        offsets = {}
        for n, ps in pairs.items():
            off = {}
            acc = 0
            for (i, j) in ps:
                off[(i, j)] = acc
                acc += self.dim(i) * other.dim(j)
            offsets[n] = off
        diff = {}
        for n in sorted(terms):
            if terms.get(n + 1, 0) == 0 or terms[n] == 0:
                continue
            m = Matrix.zero(f, terms[n + 1], terms[n])
            for (i, j) in pairs[n]:
                src_off = offsets[n][(i, j)]
                # horizontal component: d_self (x) id
                if self.dim(i + 1) and (i + 1, j) in offsets.get(n + 1, {}):
                    tgt_off = offsets[n + 1][(i + 1, j)]
                    blk = self.d(i).kron(Matrix.identity(f, other.dim(j)))
                    _paste(m, blk, tgt_off, src_off, f)
                # vertical component: (-1)^i id (x) d_other
                if other.dim(j + 1) and (i, j + 1) in offsets.get(n + 1, {}):
                    tgt_off = offsets[n + 1][(i, j + 1)]
                    blk = Matrix.identity(f, self.dim(i)).kron(other.d(j))
                    if i % 2:
                        blk = blk.neg()
                    _paste(m, blk, tgt_off, src_off, f)
            diff[n] = m
        return CochainComplex(f, terms, diff, check=False)

    def minimize(self) -> "CochainComplex":
        """Quasi-isomorphic complex with zero differential (field coefficients)."""
        coh = self.cohomology()
        return CochainComplex(self.field, coh, {}, check=False)


def _paste(target: Matrix, block: Matrix, row_off: int, col_off: int, f: Field):
    for i in range(block.rows):
        trow = target.data[row_off + i]
        brow = block.data[i]
        for j in range(block.cols):
            if not f.is_zero(brow[j]):
                trow[col_off + j] = f.add(trow[col_off + j], brow[j])


class ChainMap:
    """Degreewise map commuting with differentials; absent degrees are zero."""

    def __init__(self, source: CochainComplex, target: CochainComplex, components=None, check=True):
        if source.field != target.field:
            raise ValueError("chain map over mixed fields")
        self.field = source.field
        self.source = source
        self.target = target
        self.components = {}
        for d, m in (components or {}).items():
            if m.rows == 0 or m.cols == 0 or m.is_zero():
                continue
            self.components[d] = m
        if check:
            self.validate()

    def component(self, d: int) -> Matrix:
        m = self.components.get(d)
        if m is None:
            return Matrix.zero(self.field, self.target.dim(d), self.source.dim(d))
        return m

    def validate(self):
        for d, m in self.components.items():
            if m.rows != self.target.dim(d) or m.cols != self.source.dim(d):
                raise ValueError(f"chain map component at degree {d} has wrong shape")
        degs = set(self.source.terms) | set(self.components)
        for d in degs:
            left = self.target.d(d).matmul(self.component(d))
            right = self.component(d + 1).matmul(self.source.d(d))
            if left.data != right.data:
                raise ValueError(f"chain map does not commute with d at degree {d}")

    def compose(self, first: "ChainMap") -> "ChainMap":
        """self o first."""
        comps = {}
        for d in set(first.components) | set(self.components):
            comps[d] = self.component(d).matmul(first.component(d))
        return ChainMap(first.source, self.target, comps, check=False)

    @classmethod
    def identity(cls, c: CochainComplex) -> "ChainMap":
        comps = {d: Matrix.identity(c.field, n) for d, n in c.terms.items()}
        return cls(c, c, comps, check=False)

    @classmethod
    def zero(cls, source: CochainComplex, target: CochainComplex) -> "ChainMap":
        return cls(source, target, {}, check=False)

    def map_cohomology(self) -> dict:
        """degree -> rank of H^degree(self), zero ranks omitted."""
        out = {}
        f = self.field
        for d in set(self.source.terms) | set(self.target.terms):
            if not self.source.dim(d) or not self.target.dim(d):
                continue
            kern = self.source.d(d).kernel_basis() if self.source.dim(d + 1) else Matrix.identity(f, self.source.dim(d))
            img = self.component(d).matmul(kern)
            bd = self.target.d(d - 1)
            if self.target.dim(d - 1):
                r = img.hstack(bd).rank() - bd.rank()
            else:
                r = img.rank()
            if r:
                out[d] = r
        return out


def cone(f: ChainMap) -> CochainComplex:
    """Mapping cone: cone(f)^i = src^{i+1} (+) tgt^i, d = [-d_src, 0; f, d_tgt]."""
    src, tgt = f.source, f.target
    fld = f.field
    terms = {}
    degs = set()
    for d, n in src.terms.items():
        terms[d - 1] = terms.get(d - 1, 0) + n
    for d, n in tgt.terms.items():
        terms[d] = terms.get(d, 0) + n
    degs = set(terms)
    diff = {}
    for i in sorted(degs):
        rows = terms.get(i + 1, 0)
        cols = terms.get(i, 0)
        if rows == 0 or cols == 0:
            continue
        a = src.d(i + 1).neg()                    # src^{i+1} -> src^{i+2}
        b = Matrix.zero(fld, src.dim(i + 2), tgt.dim(i))
        c = f.component(i + 1)                    # src^{i+1} -> tgt^{i+1}
        dd = tgt.d(i)
        diff[i] = Matrix.block([[a, b], [c, dd]])
    return CochainComplex(fld, terms, diff)


def totalize(field: Field, grid_terms, d_h, d_v) -> CochainComplex:
    """Total complex of a double complex.

    grid_terms: (i, j) -> dimension. d_h maps (i,j)->(i+1,j), d_v maps
    (i,j)->(i,j+1); the two differentials must commute, the vertical one
    is twisted by (-1)^i so the total differential squares to zero.
    """
    terms = {}
    pairs = {}
    for (i, j), n in grid_terms.items():
        if n <= 0:
            continue
        terms[i + j] = terms.get(i + j, 0) + n
        pairs.setdefault(i + j, []).append((i, j))
    for ps in pairs.values():
        ps.sort()
    offsets = {}
    for n, ps in pairs.items():
        acc = 0
        off = {}
        for ij in ps:
            off[ij] = acc
            acc += grid_terms[ij]
        offsets[n] = off

    def get(dmap, ij):
        m = dmap.get(ij)
        return m

    diff = {}
    for n in sorted(terms):
        if terms.get(n + 1, 0) == 0:
            continue
        m = Matrix.zero(field, terms[n + 1], terms[n])
        for (i, j) in pairs[n]:
            src_off = offsets[n][(i, j)]
            h = get(d_h, (i, j))
            if h is not None and (i + 1, j) in offsets.get(n + 1, {}):
                if h.rows != grid_terms.get((i + 1, j), 0) or h.cols != grid_terms[(i, j)]:
                    raise ValueError(f"horizontal map at {(i,j)} has wrong shape")
                _paste(m, h, offsets[n + 1][(i + 1, j)], src_off, field)
            v = get(d_v, (i, j))
            if v is not None and (i, j + 1) in offsets.get(n + 1, {}):
                if v.rows != grid_terms.get((i, j + 1), 0) or v.cols != grid_terms[(i, j)]:
                    raise ValueError(f"vertical map at {(i,j)} has wrong shape")
                blk = v.neg() if i % 2 else v
                _paste(m, blk, offsets[n + 1][(i, j + 1)], src_off, field)
        diff[n] = m
    return CochainComplex(field, terms, diff)


def complex_from_dims(field: Field, dims: dict) -> CochainComplex:
    """Complex with the given dimensions and zero differential."""
    return CochainComplex(field, dims, {}, check=False)


def hom_complex(a: CochainComplex, b: CochainComplex) -> CochainComplex:
    """Hom(A, B) with Hom^n = prod_i Hom(A^i, B^{i+n})."""
    return b.tensor(a.dual())
