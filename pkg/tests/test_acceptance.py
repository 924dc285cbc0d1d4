"""Acceptance gate: one test per criterion, exact (zero-tolerance)
equalities throughout, one printed PASS/FAIL line each.

Criteria 1-9 drive the seeded suites in conormal.checks at the required
instance counts; criterion 10 verifies the suites are sensitive by
flipping the class-building sign and demanding failures.
"""

import random
import time

from conormal.cellcx import identity_map, simplicial_map
from conormal.sheaf import constant, euler_char, verdier_dual
from conormal.mueu import mueu, degree, set_negative_control
from conormal.qlinalg import euler
from conormal.lefschetz import global_trace, local_trace_sum, constant_phi
from conormal.checks import run_checks
from conormal.randgen import hollow_triangle, tetra_boundary


SEED = 20260823


def _report(num, label, ok, extra=""):
    print("criterion %2d (%s): %s%s" % (num, label, "PASS" if ok else "FAIL",
                                        " " + extra if extra else ""))
    assert ok, "criterion %d (%s) failed" % (num, label)


def _suite(num, label, name, cases, budget=None, **kw):
    t0 = time.monotonic()
    r = run_checks(seed=SEED, cases=cases, suites=[name], **kw)
    elapsed = time.monotonic() - t0
    ok = r.ok and (budget is None or elapsed < budget)
    extra = "%d cases in %.1fs" % (cases, elapsed)
    if not r.ok:
        extra += "; first failure: %s" % (r.failures[0],)
    _report(num, label, ok, extra)


def test_criterion_01_index_theorem():
    _suite(1, "degree(mueu) == euler_char, >=500 instances", "index", 500,
           budget=60.0, max_dim=3, max_cells=40)


def test_criterion_02_kernel_composition():
    _suite(2, "mueu of composed kernels", "compose", 200)


def test_criterion_03_external_product():
    _suite(3, "mueu of external products", "external", 200)


def test_criterion_04_direct_image():
    _suite(4, "mueu of direct images", "pushforward", 200)


def test_criterion_05_tensor_star():
    _suite(5, "tensor / star pairing and abstract index", "tensor", 200)


def test_criterion_06_point_case():
    _suite(6, "eu_point(tk(V)) == chi(V)", "point", 100)


def test_criterion_07_twist_invariance():
    _suite(7, "shift twists preserve the class", "twist", 100)


def test_criterion_08_lefschetz():
    cx = hollow_triangle()
    fixtures = [
        (identity_map(cx), 0),
        (simplicial_map(cx, cx, {"0": "1", "1": "2", "2": "0"}), 0),
        (simplicial_map(cx, cx, {"0": "0", "1": "2", "2": "1"}), 2),
    ]
    ok = True
    for f, expected in fixtures:
        inst = constant_phi(f, constant(cx))
        ok = ok and global_trace(inst) == local_trace_sum(inst) == expected
    r = run_checks(seed=SEED, cases=100, suites=["lefschetz"])
    _report(8, "Lefschetz fixtures + 100 random instances", ok and r.ok)


def test_criterion_09_duality():
    s1 = constant(hollow_triangle())
    d1 = verdier_dual(s1)
    ok = all(euler(d1.stalk(c)) == -1 for c in s1.base.cell_ids())
    ok = ok and degree(mueu(d1)) == 0
    s2 = constant(tetra_boundary())
    d2 = verdier_dual(s2)
    ok = ok and all(euler(d2.stalk(c)) == 1 for c in s2.base.cell_ids())
    ok = ok and degree(mueu(d2)) == 2
    r = run_checks(seed=SEED, cases=100, suites=["duality"])
    _report(9, "duality fixtures + biduality chi on 100 random", ok and r.ok)


def test_criterion_10_negative_control():
    set_negative_control(True)
    try:
        r = run_checks(seed=SEED, cases=25,
                       suites=["index", "compose", "tensor"])
    finally:
        set_negative_control(False)
    broken = {name for name, _, _ in r.failures}
    ok = broken == {"index", "compose", "tensor"}
    honest = run_checks(seed=SEED, cases=25,
                        suites=["index", "compose", "tensor"])
    _report(10, "negative control breaks suites 1, 2, 5",
            ok and honest.ok, "broken: %s" % sorted(broken))
