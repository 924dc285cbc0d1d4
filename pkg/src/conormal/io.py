"""JSON instance files.

An instance file describes one cell complex plus named objects on it:
sheaves, cellular maps, integer cycles, trace-kernel build trees and
Lefschetz instances.  Rationals are written as strings like "3/4" (or
bare integers), matrices as row-major lists of rows.  A complex is
either a list of simplices (vertex lists) or an explicit graded poset
with signed codim-1 incidence.  Cell ids are strings; simplices get the
dot-joined id of their sorted vertex list ("0.1.2").  The characters
"|" and "," are reserved for ids of product cells in reports.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .cellcx import (CellComplex, CellularMap, CellComplexError,
                     CellularMapError, from_simplicial, simplicial_map,
                     identity_map, collapse_to_point, POINT)
from .qlinalg import Matrix, VectComplex, LinAlgError
from .sheaf import (CellularSheaf, SheafError, constant, verdier_dual,
                    shift_sheaf, extend_by_zero)
from .mueu import LagCycle
from .tracekernel import tk, external_tk, compose_tk, shift_twist
from .lefschetz import LefschetzInstance, constant_phi


class ParseError(Exception):
    pass


FORMAT_VERSION = 1


# ---------------------------------------------------------------------------
# scalars and matrices

def parse_fraction(value) -> Fraction:
    if isinstance(value, bool):
        raise ParseError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as e:
            raise ParseError("bad rational %r: %s" % (value, e))
    raise ParseError("bad rational %r" % (value,))


def fmt_fraction(q: Fraction) -> str:
    return str(Fraction(q))


def parse_matrix(rows) -> Matrix:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise ParseError("a matrix must be a list of rows")
    if rows and len({len(r) for r in rows}) != 1:
        raise ParseError("ragged matrix")
    return Matrix.from_rows([[parse_fraction(x) for x in row] for row in rows])


def fmt_matrix(m: Matrix):
    return [[fmt_fraction(x) for x in row] for row in m.data]


# ---------------------------------------------------------------------------
# complexes

def parse_complex(node):
    """Returns (CellComplex, simplices-or-None)."""
    if not isinstance(node, dict):
        raise ParseError("'complex' must be an object")
    if "simplices" in node:
        simplices = node["simplices"]
        if not isinstance(simplices, list):
            raise ParseError("'simplices' must be a list of vertex lists")
        try:
            cx = from_simplicial([tuple(s) for s in simplices])
        except (CellComplexError, TypeError) as e:
            raise ParseError("bad simplicial complex: %s" % e)
        return cx, [tuple(s) for s in simplices]
    if "poset" in node:
        poset = node["poset"]
        try:
            cells = {str(c): int(d) for c, d in poset["cells"].items()}
            incidence = {}
            for entry in poset.get("incidence", []):
                coface, face, sign = entry
                incidence[(str(coface), str(face))] = int(sign)
        except (KeyError, TypeError, ValueError, AttributeError) as e:
            raise ParseError("bad poset complex: %s" % e)
        try:
            cx = CellComplex(cells, incidence)
        except CellComplexError as e:
            raise ParseError("bad poset complex: %s" % e)
        # deeper invariants (grading, boundary-squares-to-zero) are left
        # to `validate`, which reports them as validation failures
        return cx, None
    raise ParseError("'complex' needs either 'simplices' or 'poset'")


def describe_complex(cx: CellComplex):
    """Poset form of a complex, usable as a counterexample payload."""
    return {"poset": {
        "cells": {str(c): cx.dim(c) for c in cx.cell_ids()},
        "incidence": [[str(t), str(s), sign]
                      for (t, s), sign in sorted(cx.incidence_pairs().items(),
                                                 key=lambda kv: (str(kv[0][0]),
                                                                 str(kv[0][1])))],
    }}


# ---------------------------------------------------------------------------
# sheaves

def parse_vect_complex(node) -> VectComplex:
    try:
        dims = {int(n): int(d) for n, d in node.get("dims", {}).items()}
    except (ValueError, AttributeError) as e:
        raise ParseError("bad stalk dims: %s" % e)
    diffs = {}
    for n, rows in node.get("d", {}).items():
        try:
            n = int(n)
        except ValueError:
            raise ParseError("differential degree %r is not an integer" % (n,))
        diffs[n] = parse_matrix(rows)
    try:
        return VectComplex(dims, diffs)
    except LinAlgError as e:
        raise ParseError("bad stalk complex: %s" % e)


def describe_vect_complex(v: VectComplex):
    node = {"dims": {str(n): d for n, d in sorted(v.dims.items())}}
    if v.diffs:
        node["d"] = {str(n): fmt_matrix(m) for n, m in sorted(v.diffs.items())}
    return node


def _parse_chain_map(node):
    out = {}
    for n, rows in node.items():
        try:
            out[int(n)] = parse_matrix(rows)
        except ValueError:
            raise ParseError("chain map degree %r is not an integer" % (n,))
    return out


def parse_sheaf(spec, cx, resolved):
    """One named sheaf; `resolved` maps already-built names to sheaves."""
    if spec == "constant":
        return constant(cx)
    if not isinstance(spec, dict):
        raise ParseError("bad sheaf spec %r" % (spec,))
    if "dual_of" in spec:
        other = resolved.get(spec["dual_of"])
        if other is None:
            return None  # not ready yet; caller retries
        return verdier_dual(other)
    if "shift_of" in spec:
        other = resolved.get(spec["shift_of"])
        if other is None:
            return None
        return shift_sheaf(other, int(spec.get("d", 0)))
    if "extend_by_zero" in spec:
        inner = spec["extend_by_zero"]
        other = resolved.get(inner.get("of"))
        if other is None and inner.get("of") is not None:
            return None
        if other is None:
            other = constant(cx)
        upset = {str(c) for c in inner.get("upset", [])}
        missing = upset - set(map(str, cx.cell_ids()))
        if missing:
            raise ParseError("extend_by_zero mentions unknown cells %s"
                             % sorted(missing))
        try:
            return extend_by_zero(other, upset)
        except SheafError as e:
            raise ParseError(str(e))
    if "stalks" in spec:
        known = set(map(str, cx.cell_ids()))
        stalks = {}
        for c, node in spec["stalks"].items():
            if c not in known:
                raise ParseError("stalk on unknown cell %r" % (c,))
            stalks[c] = parse_vect_complex(node)
        restrictions = {}
        for entry in spec.get("restrictions", []):
            try:
                s, t = str(entry["from"]), str(entry["to"])
            except (KeyError, TypeError) as e:
                raise ParseError("bad restriction entry: %s" % e)
            if s not in known or t not in known:
                raise ParseError("restriction between unknown cells %r -> %r"
                                 % (s, t))
            restrictions[(s, t)] = _parse_chain_map(entry.get("maps", {}))
        return CellularSheaf(cx, stalks, restrictions)
    raise ParseError("sheaf spec needs 'stalks', 'dual_of', 'shift_of', "
                     "'extend_by_zero' or the string \"constant\"")


def describe_sheaf(sheaf: CellularSheaf):
    stalks = {str(c): describe_vect_complex(v)
              for c, v in sorted(sheaf.stalks.items(), key=lambda kv: str(kv[0]))}
    restrictions = [{"from": str(s), "to": str(t),
                     "maps": {str(n): fmt_matrix(m) for n, m in sorted(phi.items())}}
                    for (s, t), phi in sorted(sheaf.restrictions.items(),
                                              key=lambda kv: (str(kv[0][0]),
                                                              str(kv[0][1])))]
    return {"stalks": stalks, "restrictions": restrictions}


# ---------------------------------------------------------------------------
# maps, cycles, kernels, lefschetz

def parse_map(spec, cx, simplices):
    if not isinstance(spec, dict):
        raise ParseError("bad map spec %r" % (spec,))
    target = spec.get("target", "self")
    if "vertex_map" in spec:
        if simplices is None:
            raise ParseError("'vertex_map' needs a simplicial complex")
        vm = {str(k): str(v) for k, v in spec["vertex_map"].items()}
        if target == "point":
            return collapse_to_point(cx)
        if target != "self":
            raise ParseError("map target must be 'self' or 'point'")
        try:
            return simplicial_map(cx, cx, vm)
        except (CellularMapError, CellComplexError, KeyError) as e:
            raise ParseError("bad vertex map: %s" % e)
    if "cells" in spec:
        assignment = {str(k): str(v) for k, v in spec["cells"].items()}
        signs = {str(k): int(v) for k, v in spec.get("signs", {}).items()}
        tgt = POINT if target == "point" else cx
        if target == "point":
            assignment = {str(c): "pt" for c in cx.cell_ids()}
        try:
            return CellularMap(cx, tgt, assignment, signs)
        except CellularMapError as e:
            raise ParseError("bad cellular map: %s" % e)
    if target == "point":
        return collapse_to_point(cx)
    if spec.get("identity"):
        return identity_map(cx)
    raise ParseError("map spec needs 'vertex_map', 'cells' or 'identity'")


def parse_cycle(spec, cx) -> LagCycle:
    if not isinstance(spec, dict):
        raise ParseError("a cycle is an object of cell -> integer weight")
    known = set(map(str, cx.cell_ids()))
    weights = {}
    for c, w in spec.items():
        if c not in known:
            raise ParseError("cycle weight on unknown cell %r" % (c,))
        if not isinstance(w, int) or isinstance(w, bool):
            raise ParseError("cycle weight at %r must be an integer" % (c,))
        weights[c] = w
    return LagCycle(cx, weights)


def describe_cycle(cycle: LagCycle):
    return {str(c): w for c, w in sorted(cycle.weights.items(),
                                         key=lambda kv: (cycle.base.dim(kv[0]),
                                                         str(kv[0])))}


def parse_kernel(tree, sheaves):
    """A trace-kernel build tree over the file's named sheaves."""
    if not isinstance(tree, dict) or len(tree) > 2:
        raise ParseError("bad kernel tree %r" % (tree,))
    if "tk" in tree:
        name = tree["tk"]
        if name not in sheaves:
            raise ParseError("kernel references unknown sheaf %r" % (name,))
        return tk(sheaves[name])
    if "external" in tree:
        parts = tree["external"]
        if not isinstance(parts, list) or len(parts) != 2:
            raise ParseError("'external' takes exactly two subtrees")
        return external_tk(parse_kernel(parts[0], sheaves),
                           parse_kernel(parts[1], sheaves))
    if "compose" in tree:
        parts = tree["compose"]
        if not isinstance(parts, list) or len(parts) != 2:
            raise ParseError("'compose' takes exactly two subtrees")
        return compose_tk(parse_kernel(parts[0], sheaves),
                          parse_kernel(parts[1], sheaves))
    if "twist" in tree:
        inner = tree["twist"]
        return shift_twist(parse_kernel(inner.get("of", {}), sheaves),
                           int(inner.get("d", 0)))
    raise ParseError("kernel tree needs 'tk', 'external', 'compose' or 'twist'")


def parse_lefschetz(spec, maps, sheaves):
    try:
        f = maps[spec["map"]]
        sheaf = sheaves[spec["sheaf"]]
    except (KeyError, TypeError) as e:
        raise ParseError("lefschetz instance references unknown object: %s" % e)
    if "phi" in spec:
        phi = {str(c): _parse_chain_map(node) for c, node in spec["phi"].items()}
        return LefschetzInstance(f, sheaf, phi)
    scalar = parse_fraction(spec.get("scalar", 1))
    return constant_phi(f, sheaf, scalar)


# ---------------------------------------------------------------------------
# whole files

class Instance:
    """Everything named in one instance file."""

    def __init__(self, cx, simplices, sheaves, maps, cycles, kernels, lefschetz):
        self.complex = cx
        self.simplices = simplices
        self.sheaves = sheaves
        self.maps = maps
        self.cycles = cycles
        self.kernels = kernels
        self.lefschetz = lefschetz


def parse_instance(doc) -> Instance:
    if not isinstance(doc, dict):
        raise ParseError("the top level must be an object")
    version = doc.get("version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ParseError("unsupported format version %r" % (version,))
    if "complex" not in doc:
        raise ParseError("missing 'complex'")
    cx, simplices = parse_complex(doc["complex"])

    sheaf_specs = doc.get("sheaves", {})
    if not isinstance(sheaf_specs, dict):
        raise ParseError("'sheaves' must map names to specs")
    sheaves = {}
    pending = dict(sheaf_specs)
    while pending:
        progressed = False
        for name in list(pending):
            try:
                built = parse_sheaf(pending[name], cx, sheaves)
            except SheafError as e:
                raise ParseError("sheaf %r: %s" % (name, e))
            if built is not None:
                sheaves[name] = built
                del pending[name]
                progressed = True
        if not progressed:
            raise ParseError("unresolvable sheaf references: %s"
                             % sorted(pending))

    maps = {name: parse_map(spec, cx, simplices)
            for name, spec in doc.get("maps", {}).items()}
    cycles = {name: parse_cycle(spec, cx)
              for name, spec in doc.get("cycles", {}).items()}
    kernels = {name: parse_kernel(tree, sheaves)
               for name, tree in doc.get("kernels", {}).items()}
    lefschetz = {name: parse_lefschetz(spec, maps, sheaves)
                 for name, spec in doc.get("lefschetz", {}).items()}
    return Instance(cx, simplices, sheaves, maps, cycles, kernels, lefschetz)


def load_instance(path) -> Instance:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ParseError("cannot read %s: %s" % (path, e))
    except json.JSONDecodeError as e:
        raise ParseError("invalid JSON in %s: %s" % (path, e))
    return parse_instance(doc)
