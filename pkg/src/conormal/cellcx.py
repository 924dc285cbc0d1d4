"""Finite regular cell complexes as graded posets with incidence signs.

A complex stores its cells (id -> dimension) and the codimension-1
incidence numbers; the full face order is the transitive closure of the
incidence pairs.  Product cells are identified by (id_a, id_b) tuples.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class CellComplexError(ValueError):
    pass


@dataclass(frozen=True)
class Cell:
    id: object
    dim: int


class CellComplex:
    """Graded poset of cells with +-1 incidence numbers (immutable)."""

    def __init__(self, cells, incidence, product_of=None):
        """cells: id -> dim; incidence: (coface_id, face_id) -> +-1."""
        self._cells = dict(cells)
        self._incidence = dict(incidence)
        self.product_of = product_of  # (A, B) when built by product()
        self._faces = {c: [] for c in self._cells}
        self._cofaces = {c: [] for c in self._cells}
        for (tau, sigma), sign in self._incidence.items():
            if tau not in self._cells or sigma not in self._cells:
                raise CellComplexError("incidence pair (%r, %r) mentions unknown cell" % (tau, sigma))
            if sign not in (1, -1):
                raise CellComplexError("incidence sign must be +-1 at (%r, %r)" % (tau, sigma))
            self._faces[tau].append(sigma)
            self._cofaces[sigma].append(tau)
        self._below = None

    # -- basic queries ------------------------------------------------------

    def cell_ids(self):
        return list(self._cells)

    def cells(self):
        return [Cell(c, d) for c, d in self._cells.items()]

    def __contains__(self, cid):
        return cid in self._cells

    def __len__(self):
        return len(self._cells)

    def dim(self, cid) -> int:
        return self._cells[cid]

    def top_dim(self) -> int:
        return max(self._cells.values(), default=-1)

    def cells_of_dim(self, d):
        return [c for c, cd in self._cells.items() if cd == d]

    def faces(self, cid):
        """Codimension-1 faces."""
        return self._faces[cid]

    def cofaces(self, cid):
        return self._cofaces[cid]

    def incidence(self, tau, sigma) -> int:
        """Sign of the codim-1 pair (tau, sigma); 0 if not incident."""
        return self._incidence.get((tau, sigma), 0)

    def incidence_pairs(self):
        return dict(self._incidence)

    def _closure(self):
        if self._below is None:
            below = {c: set() for c in self._cells}
            for c in sorted(self._cells, key=self._cells.get):
                for f in self._faces[c]:
                    below[c].add(f)
                    below[c] |= below[f]
            self._below = below
        return self._below

    def lt(self, a, b) -> bool:
        """Strict face relation a < b."""
        return a in self._closure()[b]

    def leq(self, a, b) -> bool:
        return a == b or self.lt(a, b)

    def star(self, cid):
        """Open star: all cofaces of cid, including cid (an up-set)."""
        out = {cid}
        frontier = [cid]
        while frontier:
            nxt = []
            for c in frontier:
                for cf in self._cofaces[c]:
                    if cf not in out:
                        out.add(cf)
                        nxt.append(cf)
            frontier = nxt
        return out

    def is_upset(self, cells) -> bool:
        cells = set(cells)
        return all(cf in cells for c in cells for cf in self._cofaces[c])

    def up_closure(self, cells):
        out = set()
        for c in cells:
            out |= self.star(c)
        return out

    def euler_characteristic(self) -> int:
        return sum((-1) ** d for d in self._cells.values())

    def same_as(self, other) -> bool:
        """Structural equality of cells and incidence data."""
        return self._cells == other._cells and self._incidence == other._incidence

    def __repr__(self):
        counts = {}
        for d in self._cells.values():
            counts[d] = counts.get(d, 0) + 1
        return "CellComplex(%s)" % (", ".join("%d cells of dim %d" % (n, d)
                                              for d, n in sorted(counts.items())) or "empty")

    # -- validation ---------------------------------------------------------

    def validate(self):
        """Report of every grading / d^2 violation (empty report = valid)."""
        problems = []
        for (tau, sigma) in self._incidence:
            if self._cells[tau] - self._cells[sigma] != 1:
                problems.append("incidence pair (%r, %r) is not codimension 1" % (tau, sigma))
        # d^2 = 0 over every codim-2 interval
        for tau in self._cells:
            acc = {}
            for sigma in self._faces[tau]:
                s1 = self._incidence[(tau, sigma)]
                for rho in self._faces[sigma]:
                    acc[rho] = acc.get(rho, 0) + s1 * self._incidence[(sigma, rho)]
            for rho, total in acc.items():
                if total != 0:
                    problems.append("d^2 != 0 on interval (%r, %r): sum %d" % (rho, tau, total))
        return problems


EMPTY = CellComplex({}, {})

POINT = CellComplex({"pt": 0}, {})


def from_simplicial(simplices) -> CellComplex:
    """Complex generated by a list of simplices (sorted vertex lists).

    All faces are materialized; the incidence sign for deleting the i-th
    vertex is (-1)^i.  Cell ids are dot-joined vertex strings.
    """
    seen = set()
    for s in simplices:
        key = tuple(s)
        if list(key) != sorted(set(key)):
            raise CellComplexError("vertex list %r is not strictly sorted" % (s,))
        if key in seen:
            raise CellComplexError("duplicate simplex %r" % (s,))
        seen.add(key)
    all_simplices = set()
    stack = [tuple(s) for s in simplices]
    while stack:
        s = stack.pop()
        if s in all_simplices or not s:
            continue
        all_simplices.add(s)
        for i in range(len(s)):
            stack.append(s[:i] + s[i + 1:])
    cells = {simplex_id(s): len(s) - 1 for s in all_simplices}
    incidence = {}
    for s in all_simplices:
        if len(s) == 1:
            continue
        for i in range(len(s)):
            face = s[:i] + s[i + 1:]
            incidence[(simplex_id(s), simplex_id(face))] = (-1) ** i
    return CellComplex(cells, incidence)


def simplex_id(vertices):
    return ".".join(str(v) for v in vertices)


def simplex_vertices(cid):
    return cid.split(".")


# ---------------------------------------------------------------------------
# cellular maps

class CellularMapError(ValueError):
    pass


@dataclass
class CellularMap:
    """Order-preserving, dimension-nonincreasing map of cell complexes.

    orientation_sign is defined exactly on the cells whose dimension is
    preserved; projection_of tags the projections returned by product().
    """
    source: CellComplex
    target: CellComplex
    assignment: dict
    orientation_sign: dict = field(default_factory=dict)
    projection_of: tuple = None  # (product_complex, "first" | "second")

    def __post_init__(self):
        src, tgt = self.source, self.target
        for c in src.cell_ids():
            if c not in self.assignment:
                raise CellularMapError("cell %r has no image" % (c,))
            img = self.assignment[c]
            if img not in tgt:
                raise CellularMapError("image %r of %r is not a target cell" % (img, c))
            if tgt.dim(img) > src.dim(c):
                raise CellularMapError("map raises dimension on cell %r" % (c,))
        for (tau, sigma) in src.incidence_pairs():
            if not tgt.leq(self.assignment[sigma], self.assignment[tau]):
                raise CellularMapError("map is not order-preserving on %r < %r" % (sigma, tau))
        preserved = {c for c in src.cell_ids() if src.dim(c) == tgt.dim(self.assignment[c])}
        if set(self.orientation_sign) != preserved:
            raise CellularMapError("orientation_sign must be defined exactly on "
                                   "dimension-preserving cells")
        for c, s in self.orientation_sign.items():
            if s not in (1, -1):
                raise CellularMapError("orientation sign must be +-1 on %r" % (c,))

    def __call__(self, cid):
        return self.assignment[cid]

    def sign(self, cid) -> int:
        return self.orientation_sign[cid]

    def is_endomorphism(self) -> bool:
        return self.source.same_as(self.target)

    def fixed_cells(self):
        return [c for c, img in self.assignment.items() if img == c]


def identity_map(x: CellComplex) -> CellularMap:
    return CellularMap(x, x, {c: c for c in x.cell_ids()},
                       {c: 1 for c in x.cell_ids()})


def collapse_to_point(x: CellComplex, point=POINT) -> CellularMap:
    pt = point.cell_ids()[0]
    return CellularMap(x, point, {c: pt for c in x.cell_ids()},
                       {c: 1 for c in x.cells_of_dim(0)})


def _perm_sign(seq):
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def simplicial_map(source: CellComplex, target: CellComplex, vertex_map) -> CellularMap:
    """Cellular map induced by a map of vertices.

    vertex_map keys/values are vertex names (as they appear in cell ids).
    The image of every simplex must be a simplex of the target;
    orientation signs are permutation parities on nondegenerate cells.
    """
    vm = {str(k): str(v) for k, v in vertex_map.items()}
    assignment = {}
    signs = {}
    for c in source.cell_ids():
        verts = simplex_vertices(c)
        try:
            imgs = [vm[v] for v in verts]
        except KeyError as e:
            raise CellularMapError("vertex %s has no image" % e)
        img_sorted = sorted(set(imgs), key=_vertex_key)
        img_id = ".".join(img_sorted)
        if img_id not in target:
            raise CellularMapError("image %r of simplex %r is not a target simplex"
                                   % (img_id, c))
        assignment[c] = img_id
        if len(img_sorted) == len(verts):
            order = [img_sorted.index(v) for v in imgs]
            signs[c] = _perm_sign(order)
    return CellularMap(source, target, assignment, signs)


def _vertex_key(v):
    try:
        return (0, int(v))
    except ValueError:
        return (1, v)


# ---------------------------------------------------------------------------
# products

def product(a: CellComplex, b: CellComplex):
    """Product complex with Leibniz incidence signs and its two projections.

    Cells are (id_a, id_b); [(s,t):(s',t)] = [s:s'] and
    [(s,t):(s,t')] = (-1)^{dim s} [t:t'].
    """
    cells = {}
    for ca in a.cell_ids():
        for cb in b.cell_ids():
            cells[(ca, cb)] = a.dim(ca) + b.dim(cb)
    incidence = {}
    for (tau, sigma), sign in a.incidence_pairs().items():
        for cb in b.cell_ids():
            incidence[((tau, cb), (sigma, cb))] = sign
    for (tau, sigma), sign in b.incidence_pairs().items():
        for ca in a.cell_ids():
            s = sign if a.dim(ca) % 2 == 0 else -sign
            incidence[((ca, tau), (ca, sigma))] = s
    p = CellComplex(cells, incidence, product_of=(a, b))
    proj_a = CellularMap(p, a, {(ca, cb): ca for (ca, cb) in cells},
                         {c: 1 for c, d in cells.items() if a.dim(c[0]) == d},
                         projection_of=(p, "first"))
    proj_b = CellularMap(p, b, {(ca, cb): cb for (ca, cb) in cells},
                         {c: 1 for c, d in cells.items() if b.dim(c[1]) == d},
                         projection_of=(p, "second"))
    return p, proj_a, proj_b


def product_map(f: CellularMap, g: CellularMap,
                source: CellComplex = None, target: CellComplex = None) -> CellularMap:
    """f x g between product complexes (built if not supplied)."""
    if source is None:
        source, _, _ = product(f.source, g.source)
    if target is None:
        target, _, _ = product(f.target, g.target)
    assignment = {}
    signs = {}
    for (ca, cb) in source.cell_ids():
        img = (f(ca), g(cb))
        assignment[(ca, cb)] = img
        if target.dim(img) == source.dim((ca, cb)):
            signs[(ca, cb)] = f.sign(ca) * g.sign(cb)
    return CellularMap(source, target, assignment, signs)


def factors_of(x: CellComplex):
    if x.product_of is None:
        raise CellComplexError("complex is not a registered product")
    return x.product_of
