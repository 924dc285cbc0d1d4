"""Lefschetz fixed point formalism for cellular self-maps.

An instance is a cellular endomorphism f of a complex, a sheaf F on it,
and a family of chain maps phi_s : F(f(s)) -> F(s) compatible with the
restrictions.  The global side is the alternating trace of the induced
endomorphism of the sections complex (returned through the cohomology
route and cross-checked against the matrix trace); the local side sums
signed traces over setwise-fixed cells.
"""

from __future__ import annotations

from fractions import Fraction

from .cellcx import CellularMap
from .qlinalg import (Matrix, chain_component, compose_chain_maps,
                      identity_chain_map, is_chain_map, trace_endo,
                      cohomology_trace)
from .sheaf import CellularSheaf, SheafError, sections, _chain_maps_equal


class LefschetzError(SheafError):
    pass


class LefschetzInstance:
    def __init__(self, f: CellularMap, sheaf: CellularSheaf, phi):
        if not f.is_endomorphism():
            raise LefschetzError("the map must be a self-map")
        if not f.source.same_as(sheaf.base):
            raise LefschetzError("sheaf and map live on different complexes")
        self.f = f
        self.sheaf = sheaf
        self.phi = {c: {n: m for n, m in comp.items() if not m.is_zero()}
                    for c, comp in phi.items()}

    def phi_at(self, cid):
        return self.phi.get(cid, {})

    def validate(self):
        problems = []
        f, sh = self.f, self.sheaf
        for c, comp in self.phi.items():
            if not is_chain_map(sh.stalk(f(c)), sh.stalk(c), comp):
                problems.append("phi at %r is not a chain map" % (c,))
        for (t, s) in f.source.incidence_pairs():
            lhs = compose_chain_maps(sh.res(s, t), self.phi_at(s))
            rhs = compose_chain_maps(self.phi_at(t), sh.res_long(f(s), f(t)))
            if not _chain_maps_equal(lhs, rhs, sh.stalk(f(s)), sh.stalk(t)):
                problems.append("phi does not commute with restriction (%r, %r)"
                                % (s, t))
        return problems


def _induced_endo(inst: LefschetzInstance):
    """The chain endomorphism of the sections complex and that complex."""
    sh, f = inst.sheaf, inst.f
    vc, index = sections(sh, sh.base.cell_ids(), sh.base.dim)
    phi = {}
    for c in sh.base.cell_ids():
        img = f(c)
        if sh.base.dim(img) != sh.base.dim(c):
            continue
        comp = inst.phi_at(c)
        if not comp:
            continue
        sgn = f.sign(c)
        for p, m in comp.items():
            if (img, p) not in index or (c, p) not in index:
                continue
            n, src_off = index[(img, p)]
            n2, tgt_off = index[(c, p)]
            cur = phi.get(n)
            if cur is None:
                cur = Matrix.zeros(vc.dim(n), vc.dim(n))
                phi[n] = cur
            for i in range(m.rows):
                row = cur.data[tgt_off + i]
                mrow = m.data[i]
                for j in range(m.cols):
                    if mrow[j]:
                        row[src_off + j] += sgn * mrow[j]
    if not is_chain_map(vc, vc, phi):
        raise LefschetzError("phi family does not induce a chain endomorphism")
    return vc, phi


def global_trace(inst: LefschetzInstance) -> Fraction:
    """Alternating trace of the induced map on hypercohomology.

    Computed on cohomology and cross-checked against the cochain-level
    matrix trace (the two must agree by the Hopf argument).
    """
    vc, phi = _induced_endo(inst)
    on_cochains = trace_endo(phi, vc)
    on_cohomology = cohomology_trace(phi, vc)
    if on_cochains != on_cohomology:
        raise LefschetzError("cochain and cohomology traces disagree "
                             "(%s vs %s)" % (on_cochains, on_cohomology))
    return on_cohomology


def local_trace_sum(inst: LefschetzInstance) -> Fraction:
    """Signed sum of local traces over setwise-fixed cells."""
    sh, f = inst.sheaf, inst.f
    total = Fraction(0)
    for c in f.fixed_cells():
        comp = inst.phi_at(c)
        if not comp:
            continue
        stalk = sh.stalk(c)
        local = Fraction(0)
        for p, m in comp.items():
            if stalk.dim(p):
                local += (-1 if p % 2 else 1) * m.trace()
        total += (-1) ** sh.base.dim(c) * f.sign(c) * local
    return total


def constant_phi(f: CellularMap, sheaf: CellularSheaf, scalar=1):
    """phi acting by a scalar on every stalk (stalks at c and f(c) must
    have equal dimensions, e.g. constant or f-invariant sheaves)."""
    phi = {}
    for c in sheaf.base.cell_ids():
        src, tgt = sheaf.stalk(f(c)), sheaf.stalk(c)
        if src.dims != tgt.dims:
            raise LefschetzError("stalks at %r and %r have different shapes" % (c, f(c)))
        phi[c] = {n: Matrix.identity(d).scale(scalar) for n, d in tgt.dims.items()}
    return LefschetzInstance(f, sheaf, phi)
