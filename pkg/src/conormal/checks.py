"""Seeded property suites: each case builds random instances and checks
one of the calculus identities through two independent code paths
(cycle arithmetic vs hypercohomology totalization).

Cases are independently seeded from (seed, case index), so reports are
deterministic and merging concurrent runs is trivial.
"""

from __future__ import annotations

import json
import os
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .cellcx import POINT, product
from .qlinalg import euler
from .sheaf import (CellularSheaf, euler_char, external, tensor_sheaf,
                    pushforward, verdier_dual, kernel_compose)
from .mueu import (mueu, degree, external_cycle, star, compose_cycle,
                   pushforward_cycle, support_compose)
from .tracekernel import tk, eu_point, shift_twist, external_tk
from .lefschetz import global_trace, local_trace_sum
from . import randgen
from .io import describe_complex, describe_sheaf


@dataclass
class CheckReport:
    seed: int
    cases: int
    suites: list
    failures: list = field(default_factory=list)
    wall_time: float = 0.0

    @property
    def ok(self):
        return not self.failures

    def lines(self):
        """Deterministic textual report (no timing)."""
        out = ["seed %d" % self.seed, "cases %d" % self.cases]
        for name in self.suites:
            n_fail = sum(1 for f in self.failures if f[0] == name)
            out.append("suite %-12s %s" % (name, "ok" if n_fail == 0
                                           else "%d failures" % n_fail))
        for name, case, detail in self.failures:
            out.append("FAIL %s case %d: %s" % (name, case, detail))
        return out


def _case_rng(seed, suite, case):
    return random.Random("%d/%s/%d" % (seed, suite, case))


def _sheaf_blob(cx, sheaf):
    return {"complex": describe_complex(cx), "sheaf": describe_sheaf(sheaf)}


# ---------------------------------------------------------------------------
# individual cases; each returns None or a failure detail dict

def case_index(rng, max_dim=3, max_cells=40):
    cx = randgen.random_complex(rng, max_dim=max_dim, max_cells=max_cells)
    f = randgen.random_sheaf(rng, cx)
    lhs = degree(mueu(f))
    rhs = euler_char(f)
    if lhs != rhs:
        return {"identity": "degree(mueu(F)) == euler_char(F)",
                "lhs": lhs, "rhs": rhs, **_sheaf_blob(cx, f)}
    return None


_SMALL_FACTORS = "point interval triangle".split()
_MIDDLE_FACTORS = "interval triangle square hexagon".split()


def _factor(rng, pool):
    name = rng.choice(pool)
    if name == "point":
        return POINT
    if name == "interval":
        return randgen.interval()
    if name == "triangle":
        return randgen.hollow_triangle()
    if name == "square":
        return randgen.circle(4)
    return randgen.circle(6)


def case_compose(rng, **_):
    m1 = _factor(rng, _SMALL_FACTORS)
    m2 = _factor(rng, _MIDDLE_FACTORS)
    m3 = _factor(rng, _SMALL_FACTORS)
    p12, _, _ = product(m1, m2)
    p23, _, _ = product(m2, m3)
    k12 = randgen.random_sheaf(rng, p12, max_pieces=2, degree_range=(-1, 1))
    k23 = randgen.random_sheaf(rng, p23, max_pieces=2, degree_range=(-1, 1))
    lhs = mueu(kernel_compose(k12, k23))
    rhs = compose_cycle(mueu(k12), mueu(k23))
    if lhs != rhs:
        return {"identity": "mueu(K12 o K23) == mueu(K12) o mueu(K23)",
                "lhs": {str(c): w for c, w in lhs.weights.items()},
                "rhs": {str(c): w for c, w in rhs.weights.items()}}
    if not lhs.support <= support_compose(mueu(k12).support, mueu(k23).support):
        return {"identity": "support estimate for composed cycles"}
    return None


def case_external(rng, **_):
    a = randgen.random_complex(rng, max_dim=2, max_vertices=5, max_cells=15)
    b = randgen.random_complex(rng, max_dim=2, max_vertices=5, max_cells=15)
    f = randgen.random_sheaf(rng, a, max_pieces=2)
    g = randgen.random_sheaf(rng, b, max_pieces=2)
    lhs = mueu(external(f, g))
    rhs = external_cycle(mueu(f), mueu(g))
    if lhs.weights != rhs.weights:
        return {"identity": "mueu(F x G) == mueu(F) x mueu(G)",
                "lhs": {str(c): w for c, w in lhs.weights.items()},
                "rhs": {str(c): w for c, w in rhs.weights.items()}}
    return None


def case_pushforward(rng, **_):
    cx = randgen.random_complex(rng, max_dim=2, max_vertices=6, max_cells=25)
    f = randgen.random_cellular_map(rng, cx)
    sheaf = randgen.random_sheaf(rng, f.source, max_pieces=2)
    lhs = mueu(pushforward(f, sheaf))
    rhs = pushforward_cycle(f, mueu(sheaf))
    if lhs != rhs:
        return {"identity": "mueu(Rf_* F) == f_mu(mueu F)",
                "lhs": {str(c): w for c, w in lhs.weights.items()},
                "rhs": {str(c): w for c, w in rhs.weights.items()},
                **_sheaf_blob(f.source, sheaf)}
    return None


def case_tensor(rng, **_):
    cx = randgen.random_complex(rng, max_dim=2, max_vertices=6, max_cells=25)
    f = randgen.random_sheaf(rng, cx, max_pieces=2)
    g = randgen.random_sheaf(rng, cx, max_pieces=2)
    fg = tensor_sheaf(f, g)
    if mueu(fg) != star(mueu(f), mueu(g)):
        return {"identity": "mueu(F (x) G) == mueu(F) * mueu(G)",
                **_sheaf_blob(cx, f)}
    if degree(star(mueu(f), mueu(g))) != euler_char(fg):
        return {"identity": "degree(mueu F * mueu G) == euler_char(F (x) G)",
                **_sheaf_blob(cx, f)}
    return None


def case_point(rng, **_):
    v = randgen.random_vect_complex(rng)
    sheaf = CellularSheaf(POINT, {"pt": v}, {})
    if eu_point(tk(sheaf)) != euler(v):
        return {"identity": "eu_point(tk(V)) == chi(V)", "dims": dict(v.dims)}
    return None


def _random_trace_kernel(rng):
    kind = rng.random()
    cx = randgen.random_complex(rng, max_dim=1, max_vertices=4, max_cells=9)
    k = tk(randgen.random_sheaf(rng, cx, max_pieces=2, degree_range=(-1, 1)))
    if kind < 0.3:
        cx2 = randgen.random_complex(rng, max_dim=1, max_vertices=3, max_cells=7)
        k = external_tk(k, tk(randgen.random_sheaf(rng, cx2, max_pieces=1)))
    elif kind < 0.4:
        k = shift_twist(k, rng.randint(-2, 2))
    return k


def case_twist(rng, **_):
    k = _random_trace_kernel(rng)
    d = rng.randint(-3, 3)
    twisted = shift_twist(k, d)
    if twisted.euler_class != k.euler_class:
        return {"identity": "class(shift_twist(K, d)) == class(K)", "d": d}
    return None


def case_lefschetz(rng, **_):
    inst = randgen.random_lefschetz_instance(rng)
    problems = inst.validate()
    if problems:
        return {"identity": "lefschetz instance validity", "problems": problems}
    g = global_trace(inst)
    l = local_trace_sum(inst)
    if g != l:
        return {"identity": "global_trace == local_trace_sum",
                "global": str(g), "local": str(l)}
    return None


def case_duality(rng, **_):
    cx = randgen.random_complex(rng, max_dim=2, max_vertices=5, max_cells=12)
    f = randgen.random_sheaf(rng, cx, max_pieces=2, degree_range=(-1, 1))
    df = verdier_dual(f)
    if euler_char(df) != euler_char(f):
        return {"identity": "euler_char(DF) == euler_char(F)",
                **_sheaf_blob(cx, f)}
    ddf = verdier_dual(df)
    for c in cx.cell_ids():
        if euler(ddf.stalk(c)) != euler(f.stalk(c)):
            return {"identity": "stalkwise chi of DDF == stalkwise chi of F",
                    "cell": str(c), **_sheaf_blob(cx, f)}
    return None


SUITES = {
    "index": case_index,
    "compose": case_compose,
    "external": case_external,
    "pushforward": case_pushforward,
    "tensor": case_tensor,
    "point": case_point,
    "twist": case_twist,
    "lefschetz": case_lefschetz,
    "duality": case_duality,
}


def run_checks(seed=1, cases=100, suites=None, max_dim=3, max_cells=40) -> CheckReport:
    names = list(suites) if suites else list(SUITES)
    for n in names:
        if n not in SUITES:
            raise ValueError("unknown suite %r" % (n,))
    t0 = time.monotonic()
    report = CheckReport(seed=seed, cases=cases, suites=names)
    workers = 1
    try:
        workers = max(1, min(16, int(os.environ.get("CONORMAL_THREADS", "1"))))
    except ValueError:
        pass

    def run_case(args):
        name, i = args
        rng = _case_rng(seed, name, i)
        try:
            detail = SUITES[name](rng, max_dim=max_dim, max_cells=max_cells)
        except Exception as e:  # a crash is a failure with the exception
            detail = {"exception": "%s: %s" % (type(e).__name__, e)}
        return (name, i, detail)

    jobs = [(name, i) for name in names for i in range(cases)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(run_case, jobs))
    else:
        results = [run_case(j) for j in jobs]
    for name, i, detail in results:
        if detail is not None:
            report.failures.append((name, i, json.dumps(detail, sort_keys=True)))
    report.failures.sort(key=lambda f: (f[0], f[1]))
    report.wall_time = time.monotonic() - t0
    return report
