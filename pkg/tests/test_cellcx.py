import random

import pytest

from conormal.cellcx import (CellComplex, CellComplexError, CellularMapError,
                             POINT, from_simplicial, simplicial_map,
                             identity_map, collapse_to_point, product,
                             product_map, factors_of, CellularMap)
from conormal.randgen import (interval, hollow_triangle, full_simplex,
                              tetra_boundary, torus7, circle, random_complex,
                              random_cellular_map, random_symmetry)


def test_from_simplicial_interval():
    cx = interval()
    assert sorted(cx.cell_ids()) == ["0", "0.1", "1"]
    assert cx.dim("0.1") == 1
    assert cx.incidence("0.1", "0") == -1
    assert cx.incidence("0.1", "1") == 1
    assert cx.validate() == []


def test_boundary_squares_to_zero_on_fixtures():
    for cx in (full_simplex(3), tetra_boundary(), torus7(), circle(5)):
        assert cx.validate() == []


def test_euler_characteristics():
    assert interval().euler_characteristic() == 1
    assert hollow_triangle().euler_characteristic() == 0
    assert full_simplex(3).euler_characteristic() == 1
    assert tetra_boundary().euler_characteristic() == 2
    assert torus7().euler_characteristic() == 0
    assert len(torus7()) == 42  # 7 + 21 + 14


def test_validate_catches_broken_sign():
    cx = interval()
    bad = CellComplex({c: cx.dim(c) for c in cx.cell_ids()},
                      {("0.1", "0"): 1, ("0.1", "1"): 1})
    assert bad.validate() == []  # a single edge has no codim-2 intervals
    sq = full_simplex(3)
    inc = sq.incidence_pairs()
    inc[("0.1", "0")] = -inc[("0.1", "0")]
    broken = CellComplex({c: sq.dim(c) for c in sq.cell_ids()}, inc)
    assert broken.validate() != []


def test_star_and_upsets():
    cx = hollow_triangle()
    assert set(cx.star("0")) == {"0", "0.1", "0.2"}
    assert cx.is_upset({"0.1"})
    assert not cx.is_upset({"0"})
    assert set(cx.up_closure(["1"])) == {"1", "0.1", "1.2"}


def test_closure_order():
    cx = full_simplex(3)
    assert cx.lt("0", "0.1.2")
    assert cx.leq("0.1", "0.1.2")
    assert not cx.lt("0.1", "0.2")


def test_product_complex():
    a, b = interval(), hollow_triangle()
    p, pa, pb = product(a, b)
    assert p.validate() == []
    assert len(p) == len(a) * len(b)
    assert p.euler_characteristic() == 0
    fa, fb = factors_of(p)
    assert fa.same_as(a) and fb.same_as(b)
    assert pa(("0.1", "2")) == "0.1"
    assert pb(("0.1", "2")) == "2"


def test_product_leibniz_signs():
    # d(e x e') picks up (-1)^{dim e} on the second factor
    a = interval()
    p, _, _ = product(a, a)
    e = "0.1"
    assert p.incidence((e, e), ("0", e)) == a.incidence(e, "0")
    assert p.incidence((e, e), (e, "0")) == -a.incidence(e, "0")
    assert p.validate() == []


def test_simplicial_map_signs():
    cx = hollow_triangle()
    rot = simplicial_map(cx, cx, {"0": "1", "1": "2", "2": "0"})
    assert rot("0.1") == "1.2"
    assert rot.sign("0.1") == 1
    refl = simplicial_map(cx, cx, {"0": "0", "1": "2", "2": "1"})
    assert refl("1.2") == "1.2"
    assert refl.sign("1.2") == -1  # orientation reversed
    assert set(refl.fixed_cells()) == {"0", "1.2"}


def test_simplicial_map_collapse_is_order_preserving():
    cx = hollow_triangle()
    f = simplicial_map(cx, cx, {"0": "0", "1": "0", "2": "2"})
    assert f("0.1") == "0"
    assert f("0.2") == "0.2"


def test_cellular_map_rejects_non_monotone():
    cx = interval()
    with pytest.raises(CellularMapError):
        CellularMap(cx, cx, {"0": "0.1", "1": "1", "0.1": "0.1"},
                    {"0.1": 1})


def test_collapse_and_identity():
    cx = tetra_boundary()
    f = collapse_to_point(cx)
    assert f.target.same_as(POINT)
    i = identity_map(cx)
    assert all(i(c) == c and i.sign(c) == 1 for c in cx.cell_ids())


def test_product_map():
    a = interval()
    p, _, _ = product(a, a)
    f = collapse_to_point(a)
    q, _, _ = product(POINT, a)
    g = product_map(f, identity_map(a), source=p, target=q)
    assert g(("0.1", "1")) == ("pt", "1")


def test_random_complexes_are_valid():
    rng = random.Random(3)
    for _ in range(25):
        cx = random_complex(rng)
        assert cx.validate() == []
        assert len(cx) <= 40


def test_random_maps_are_valid():
    rng = random.Random(4)
    for _ in range(25):
        cx = random_complex(rng, max_dim=2, max_cells=25)
        f = random_cellular_map(rng, cx)
        # CellularMap validates monotonicity on construction
        for c in f.source.cell_ids():
            assert f(c) in f.target


def test_random_symmetry_is_automorphism():
    rng = random.Random(5)
    for _ in range(15):
        cx, f = random_symmetry(rng)
        assert f.source.same_as(cx) and f.target.same_as(cx)
        assert sorted(map(str, (f(c) for c in cx.cell_ids()))) == \
            sorted(map(str, cx.cell_ids()))
