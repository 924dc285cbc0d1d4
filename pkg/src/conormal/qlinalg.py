"""Exact rational linear algebra and homological primitives.

Everything is over the rationals (python Fractions), so all equalities
tested elsewhere in the library are exact.  Matrices act on column
vectors: a differential d^n : V^n -> V^{n+1} of a cochain complex is a
matrix with dim V^{n+1} rows and dim V^n columns.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm


class LinAlgError(ValueError):
    pass


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise LinAlgError("matrix entries must be exact rationals, got %r" % (x,))


class Matrix:
    """Dense matrix of Fractions."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows, cols, data=None):
        if rows < 0 or cols < 0:
            raise LinAlgError("negative matrix shape")
        self.rows = rows
        self.cols = cols
        if data is None:
            z = Fraction(0)
            self.data = [[z] * cols for _ in range(rows)]
        else:
            if len(data) != rows or any(len(r) != cols for r in data):
                raise LinAlgError("matrix data does not match shape")
            self.data = [[_frac(x) for x in row] for row in data]

    @classmethod
    def zeros(cls, rows, cols):
        return cls(rows, cols)

    @classmethod
    def identity(cls, n):
        m = cls(n, n)
        for i in range(n):
            m.data[i][i] = Fraction(1)
        return m

    @classmethod
    def from_rows(cls, rows):
        nr = len(rows)
        nc = len(rows[0]) if nr else 0
        return cls(nr, nc, rows)

    @classmethod
    def column(cls, entries):
        return cls(len(entries), 1, [[e] for e in entries])

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def __setitem__(self, ij, v):
        i, j = ij
        self.data[i][j] = _frac(v)

    def copy(self):
        m = Matrix(self.rows, self.cols)
        m.data = [row[:] for row in self.data]
        return m

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and self.data == other.data

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(tuple(r) for r in self.data)))

    def __repr__(self):
        return "Matrix(%d, %d, %r)" % (self.rows, self.cols, [[str(x) for x in r] for r in self.data])

    def is_zero(self):
        return all(x == 0 for row in self.data for x in row)

    def __add__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise LinAlgError("shape mismatch in addition")
        m = Matrix(self.rows, self.cols)
        m.data = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.data, other.data)]
        return m

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        c = _frac(c)
        m = Matrix(self.rows, self.cols)
        m.data = [[c * x for x in row] for row in self.data]
        return m

    def __mul__(self, other):
        """Matrix product; skips zero entries (our matrices are sparse)."""
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.cols != other.rows:
            raise LinAlgError("shape mismatch in product: %dx%d * %dx%d"
                              % (self.rows, self.cols, other.rows, other.cols))
        out = Matrix(self.rows, other.cols)
        odata = out.data
        bdata = other.data
        for i, row in enumerate(self.data):
            orow = odata[i]
            for k, a in enumerate(row):
                if a:
                    brow = bdata[k]
                    for j, b in enumerate(brow):
                        if b:
                            orow[j] += a * b
        return out

    def transpose(self):
        m = Matrix(self.cols, self.rows)
        for i in range(self.rows):
            for j in range(self.cols):
                m.data[j][i] = self.data[i][j]
        return m

    def kron(self, other):
        """Kronecker product, blocks of self scaled by entries... rows follow self-major order."""
        m = Matrix(self.rows * other.rows, self.cols * other.cols)
        for i in range(self.rows):
            for j in range(self.cols):
                a = self.data[i][j]
                if a:
                    for k in range(other.rows):
                        orow = m.data[i * other.rows + k]
                        brow = other.data[k]
                        for l in range(other.cols):
                            if brow[l]:
                                orow[j * other.cols + l] = a * brow[l]
        return m

    @classmethod
    def assemble(cls, rows, cols, blocks):
        """Build a matrix from (row_offset, col_offset, Matrix) blocks."""
        m = cls(rows, cols)
        for r0, c0, blk in blocks:
            if r0 + blk.rows > rows or c0 + blk.cols > cols:
                raise LinAlgError("block out of range")
            for i in range(blk.rows):
                mrow = m.data[r0 + i]
                brow = blk.data[i]
                for j in range(blk.cols):
                    if brow[j]:
                        mrow[c0 + j] += brow[j]
        return m

    def submatrix(self, row_idx, col_idx):
        m = Matrix(len(row_idx), len(col_idx))
        for i, ri in enumerate(row_idx):
            src = self.data[ri]
            m.data[i] = [src[cj] for cj in col_idx]
        return m

    def trace(self):
        if self.rows != self.cols:
            raise LinAlgError("trace of non-square matrix")
        return sum((self.data[i][i] for i in range(self.rows)), Fraction(0))


def rank(m: Matrix) -> int:
    """Exact rank by fraction-free (Bareiss) elimination.

    Rows are first scaled integral (rank-preserving); pivots are chosen
    by a deterministic first-nonzero row-major scan.
    """
    a = []
    for row in m.data:
        denom = lcm(*[x.denominator for x in row]) if row else 1
        a.append([int(x * denom) for x in row])
    n_rows, n_cols = m.rows, m.cols
    r = 0
    prev = 1
    for c in range(n_cols):
        piv = None
        for i in range(r, n_rows):
            if a[i][c]:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        for i in range(r + 1, n_rows):
            ric = a[i][c]
            arow, rrow = a[i], a[r]
            for j in range(c + 1, n_cols):
                arow[j] = (arow[j] * p - ric * rrow[j]) // prev
            arow[c] = 0
        prev = p
        r += 1
        if r == n_rows:
            break
    return r


def rref(m: Matrix):
    """Reduced row echelon form by plain rational Gauss-Jordan.

    Returns (R, pivot_columns).  Kept independent of the Bareiss rank
    so the two can be tested against each other.
    """
    a = [row[:] for row in m.data]
    n_rows, n_cols = m.rows, m.cols
    pivots = []
    r = 0
    for c in range(n_cols):
        piv = None
        for i in range(r, n_rows):
            if a[i][c]:
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        a[r] = [x / p for x in a[r]]
        for i in range(n_rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    out = Matrix(n_rows, n_cols)
    out.data = a
    return out, pivots


def kernel_basis(m: Matrix):
    """Columns spanning ker(m), from the rref free variables."""
    r, pivots = rref(m)
    pivset = set(pivots)
    basis = []
    for c in range(m.cols):
        if c in pivset:
            continue
        v = [Fraction(0)] * m.cols
        v[c] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -r.data[i][c]
        basis.append(v)
    return basis


def solve_unique(a: Matrix, b: Matrix) -> Matrix:
    """Solve a @ x = b where the columns of a are independent."""
    aug = Matrix(a.rows, a.cols + b.cols)
    for i in range(a.rows):
        aug.data[i] = a.data[i] + b.data[i]
    r, pivots = rref(aug)
    if any(p >= a.cols for p in pivots):
        raise LinAlgError("inconsistent linear system")
    if len(pivots) != a.cols:
        raise LinAlgError("solve_unique requires independent columns")
    x = Matrix(a.cols, b.cols)
    for i, pc in enumerate(pivots):
        x.data[pc] = r.data[i][a.cols:]
    return x


class VectComplex:
    """Bounded cochain complex of finite-dimensional rational spaces.

    dims: degree -> dimension (zero dims dropped).
    diffs: degree n -> matrix of d^n : V^n -> V^{n+1} (missing = zero).
    """

    __slots__ = ("dims", "diffs")

    def __init__(self, dims, diffs=None, check_shapes=True):
        self.dims = {n: d for n, d in dims.items() if d}
        self.diffs = {}
        for n, m in (diffs or {}).items():
            if m.is_zero():
                continue
            self.diffs[n] = m
        if check_shapes:
            for n, m in self.diffs.items():
                if m.cols != self.dims.get(n, 0) or m.rows != self.dims.get(n + 1, 0):
                    raise LinAlgError(
                        "differential at degree %d has shape %dx%d, expected %dx%d"
                        % (n, m.rows, m.cols, self.dims.get(n + 1, 0), self.dims.get(n, 0)))

    def dim(self, n) -> int:
        return self.dims.get(n, 0)

    def degrees(self):
        return sorted(self.dims)

    def d(self, n) -> Matrix:
        m = self.diffs.get(n)
        if m is None:
            m = Matrix.zeros(self.dim(n + 1), self.dim(n))
        return m

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def is_zero(self) -> bool:
        return not self.dims

    def check(self):
        """Verify d^2 = 0; raises naming the offending degree."""
        for n in self.diffs:
            if self.dim(n + 2) and not (self.d(n + 1) * self.d(n)).is_zero():
                raise LinAlgError("d^2 != 0 at degree %d" % n)
        return self

    def __eq__(self, other):
        if not isinstance(other, VectComplex):
            return NotImplemented
        return self.dims == other.dims and all(
            self.d(n) == other.d(n) for n in set(self.diffs) | set(other.diffs))

    def __repr__(self):
        return "VectComplex(dims=%r)" % (self.dims,)


ZERO_COMPLEX = VectComplex({})


def single(degree=0, dim=1) -> VectComplex:
    """The complex with one space k^dim placed in the given degree."""
    return VectComplex({degree: dim})


def euler(v: VectComplex) -> int:
    """Alternating sum of dimensions (= alternating sum of homology ranks)."""
    return sum((-1 if n % 2 else 1) * d for n, d in v.dims.items())


def homology_ranks(v: VectComplex) -> dict:
    """dim H^n for every degree; rejects complexes with d^2 != 0."""
    v.check()
    out = {}
    rk = {n: rank(v.d(n)) for n in v.dims}
    for n in v.dims:
        h = v.dim(n) - rk.get(n, 0) - rk.get(n - 1, 0)
        if h < 0:
            raise LinAlgError("negative homology rank at degree %d" % n)
        if h:
            out[n] = h
    return out


def shift(v: VectComplex, k: int) -> VectComplex:
    """v[k]: degree n component is v^{n+k}; differential scaled by (-1)^k."""
    sign = -1 if k % 2 else 1
    return VectComplex({n - k: d for n, d in v.dims.items()},
                       {n - k: m.scale(sign) for n, m in v.diffs.items()})


def dual(v: VectComplex) -> VectComplex:
    """Linear dual: degree -n gets (V^n)^*, differentials transposed."""
    dims = {-n: d for n, d in v.dims.items()}
    diffs = {}
    for n, m in v.diffs.items():
        # d^{-n-2}_dual : (V^{n+2...}) -- the map into degree -n is (d^n)^T
        diffs[-n - 1] = m.transpose()
    return VectComplex(dims, diffs)


def direct_sum(a: VectComplex, b: VectComplex) -> VectComplex:
    dims = {}
    for n in set(a.dims) | set(b.dims):
        dims[n] = a.dim(n) + b.dim(n)
    diffs = {}
    for n in dims:
        if dims.get(n + 1, 0) and (n in a.diffs or n in b.diffs):
            diffs[n] = Matrix.assemble(
                dims.get(n + 1, 0), dims[n],
                [(0, 0, a.d(n)), (a.dim(n + 1), a.dim(n), b.d(n))])
    return VectComplex(dims, diffs)


def tensor_index(a: VectComplex, b: VectComplex):
    """Offsets of the (p, q) blocks inside (a (x) b)^n, p ascending."""
    index = {}
    dims = {}
    for p in sorted(a.dims):
        for q in sorted(b.dims):
            n = p + q
            off = dims.get(n, 0)
            index[(p, q)] = off
            dims[n] = off + a.dim(p) * b.dim(q)
    return dims, index


def tensor(a: VectComplex, b: VectComplex) -> VectComplex:
    """Tensor product with the Koszul differential d(x)1 + (-1)^p 1(x)d."""
    dims, index = tensor_index(a, b)
    diffs = {}
    for (p, q), off in index.items():
        blocks = []
        if a.dim(p + 1):
            blocks.append(((p + 1, q), a.d(p).kron(Matrix.identity(b.dim(q)))))
        if b.dim(q + 1):
            sgn = -1 if p % 2 else 1
            blocks.append(((p, q + 1), Matrix.identity(a.dim(p)).kron(b.d(q)).scale(sgn)))
        n = p + q
        for tgt, blk in blocks:
            if blk.is_zero():
                continue
            cur = diffs.get(n)
            if cur is None:
                cur = Matrix.zeros(dims.get(n + 1, 0), dims[n])
                diffs[n] = cur
            for i in range(blk.rows):
                row = cur.data[index[tgt] + i]
                brow = blk.data[i]
                for j in range(blk.cols):
                    if brow[j]:
                        row[off + j] += brow[j]
    return VectComplex(dims, diffs)


# ---------------------------------------------------------------------------
# chain maps (dicts degree -> Matrix)

def chain_map_zero():
    return {}


def chain_component(phi, n, src: VectComplex, tgt: VectComplex) -> Matrix:
    m = phi.get(n)
    if m is None:
        m = Matrix.zeros(tgt.dim(n), src.dim(n))
    return m


def is_chain_map(src: VectComplex, tgt: VectComplex, phi) -> bool:
    for n, m in phi.items():
        if m.rows != tgt.dim(n) or m.cols != src.dim(n):
            return False
    for n in set(src.dims):
        lhs = tgt.d(n) * chain_component(phi, n, src, tgt)
        rhs = chain_component(phi, n + 1, src, tgt) * src.d(n)
        if lhs != rhs:
            return False
    return True


def compose_chain_maps(phi, psi):
    """phi after psi, degreewise."""
    out = {}
    for n, m in phi.items():
        other = psi.get(n)
        if other is not None:
            p = m * other
            if not p.is_zero():
                out[n] = p
    return out


def add_chain_maps(phi, psi):
    out = dict(phi)
    for n, m in psi.items():
        out[n] = out[n] + m if n in out else m
    return {n: m for n, m in out.items() if not m.is_zero()}


def scale_chain_map(phi, c):
    return {n: m.scale(c) for n, m in phi.items()}


def identity_chain_map(v: VectComplex):
    return {n: Matrix.identity(d) for n, d in v.dims.items()}


def dual_chain_map(phi, src: VectComplex, tgt: VectComplex):
    """Dual of phi: src -> tgt, as a chain map dual(tgt) -> dual(src)."""
    out = {}
    for n, m in phi.items():
        out[-n] = m.transpose()
    return out


def shift_chain_map(phi, k):
    return {n - k: m for n, m in phi.items()}


def tensor_chain_maps(phi, psi, asrc, bsrc, atgt, btgt):
    """(phi (x) psi) between tensor complexes (both maps of degree 0)."""
    sdims, sindex = tensor_index(asrc, bsrc)
    tdims, tindex = tensor_index(atgt, btgt)
    out = {}
    for (p, q), soff in sindex.items():
        fp = chain_component(phi, p, asrc, atgt)
        gq = chain_component(psi, q, bsrc, btgt)
        if fp.is_zero() or gq.is_zero():
            continue
        blk = fp.kron(gq)
        n = p + q
        cur = out.get(n)
        if cur is None:
            cur = Matrix.zeros(tdims.get(n, 0), sdims.get(n, 0))
            out[n] = cur
        toff = tindex[(p, q)]
        for i in range(blk.rows):
            row = cur.data[toff + i]
            brow = blk.data[i]
            for j in range(blk.cols):
                if brow[j]:
                    row[soff + j] += brow[j]
    return {n: m for n, m in out.items() if not m.is_zero()}


def trace_endo(phi, v: VectComplex) -> Fraction:
    """Alternating trace of a chain endomorphism; rejects non-commuting phi."""
    if not is_chain_map(v, v, phi):
        raise LinAlgError("endomorphism does not commute with the differential")
    total = Fraction(0)
    for n, d in v.dims.items():
        m = phi.get(n)
        if m is not None:
            total += (-1 if n % 2 else 1) * m.trace()
    return total


def cohomology_trace(phi, v: VectComplex) -> Fraction:
    """Alternating trace of the induced endomorphism of H^*(v).

    Independent of trace_endo: builds explicit bases of cohomology and
    solves for the induced matrices.
    """
    if not is_chain_map(v, v, phi):
        raise LinAlgError("endomorphism does not commute with the differential")
    v.check()
    total = Fraction(0)
    for n in v.dims:
        ker = kernel_basis(v.d(n))
        if not ker:
            continue
        dprev = v.d(n - 1)
        # columns: image basis first, then kernel vectors extending it
        cols = [[dprev.data[i][j] for i in range(dprev.rows)] for j in range(dprev.cols)]
        base_rank = rank(Matrix(v.dim(n), len(cols), [list(r) for r in zip(*cols)])
                         if cols else Matrix.zeros(v.dim(n), 0))
        chosen = []
        cur = cols[:]
        cur_rank = base_rank
        for z in ker:
            trial = cur + [z]
            tr_rank = rank(Matrix(v.dim(n), len(trial), [list(r) for r in zip(*trial)]))
            if tr_rank > cur_rank:
                chosen.append(z)
                cur = trial
                cur_rank = tr_rank
        if not chosen:
            continue
        basis = Matrix(v.dim(n), len(cur), [list(r) for r in zip(*cur)])
        # independent columns of basis: re-select via rref pivots
        _, pivots = rref(basis)
        ind = basis.submatrix(range(v.dim(n)), pivots)
        img = chain_component(phi, n, v, v) * Matrix(
            v.dim(n), len(chosen), [list(r) for r in zip(*chosen)])
        coeff = solve_unique(ind, img)
        # the chosen vectors sit at columns len(cols)..len(cur)-1 of `basis`;
        # every one of them is a pivot column (each strictly grew the rank)
        col_pos = {c: i for i, c in enumerate(pivots)}
        h_positions = [col_pos[len(cols) + i] for i in range(len(chosen))]
        tr = sum((coeff.data[h_positions[i]][i] for i in range(len(chosen))), Fraction(0))
        total += (-1 if n % 2 else 1) * tr
    return total


def total_complex(columns, horizontal) -> VectComplex:
    """Total complex of a double complex.

    columns: i -> VectComplex (vertical differentials).
    horizontal: (i, n) -> Matrix mapping columns[i]^n -> columns[i+1]^n.
    Total degree = i + n; d_tot = d_h + (-1)^i d_v.  Verifies that the
    grid commutes and squares to zero, naming the offending bidegree.
    """
    cols = {i: c for i, c in columns.items() if not c.is_zero()}
    for i, c in cols.items():
        try:
            c.check()
        except LinAlgError as e:
            raise LinAlgError("column %d: %s" % (i, e))

    def horiz(i, n):
        m = horizontal.get((i, n))
        if m is None:
            src = cols.get(i, ZERO_COMPLEX)
            tgt = cols.get(i + 1, ZERO_COMPLEX)
            m = Matrix.zeros(tgt.dim(n), src.dim(n))
        return m

    for (i, n), m in horizontal.items():
        src = cols.get(i, ZERO_COMPLEX)
        tgt = cols.get(i + 1, ZERO_COMPLEX)
        if m.cols != src.dim(n) or m.rows != tgt.dim(n):
            raise LinAlgError("horizontal map at bidegree (%d, %d) has wrong shape" % (i, n))
    for i in cols:
        for n in cols[i].dims:
            if cols.get(i + 2, ZERO_COMPLEX).dim(n) and not (horiz(i + 1, n) * horiz(i, n)).is_zero():
                raise LinAlgError("horizontal d^2 != 0 at bidegree (%d, %d)" % (i, n))
            if cols.get(i + 1, ZERO_COMPLEX).dim(n + 1):
                if horiz(i, n + 1) * cols[i].d(n) != cols.get(i + 1, ZERO_COMPLEX).d(n) * horiz(i, n):
                    raise LinAlgError("grid does not commute at bidegree (%d, %d)" % (i, n))

    # offsets of bidegree (i, n) inside total degree i + n, ordered by i
    dims = {}
    index = {}
    for i in sorted(cols):
        for n in sorted(cols[i].dims):
            t = i + n
            index[(i, n)] = dims.get(t, 0)
            dims[t] = dims.get(t, 0) + cols[i].dim(n)
    diffs = {}
    for (i, n), off in index.items():
        t = i + n
        blocks = []
        h = horiz(i, n)
        if not h.is_zero():
            blocks.append(((i + 1, n), h))
        dv = cols[i].d(n)
        if not dv.is_zero():
            blocks.append(((i, n + 1), dv.scale(-1 if i % 2 else 1)))
        for tgt, blk in blocks:
            cur = diffs.get(t)
            if cur is None:
                cur = Matrix.zeros(dims.get(t + 1, 0), dims[t])
                diffs[t] = cur
            toff = index[tgt]
            for r in range(blk.rows):
                row = cur.data[toff + r]
                brow = blk.data[r]
                for c in range(blk.cols):
                    if brow[c]:
                        row[off + c] += brow[c]
    return VectComplex(dims, diffs).check()
