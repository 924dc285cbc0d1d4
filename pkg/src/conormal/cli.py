"""Command line front end.

Exit codes: 0 success, 1 validation failure, 2 property violation,
3 parse error.  Output on stdout is deterministic; timing goes to
stderr.  CONORMAL_THREADS caps the worker count of `check`.
"""

from __future__ import annotations

import argparse
import json
import sys

from .cellcx import POINT, product
from .qlinalg import euler
from .sheaf import (euler_char, pushforward, PushforwardError, verdier_dual,
                    kernel_compose, SheafError)
from .mueu import (mueu, degree, compose_cycle, pushforward_cycle,
                   set_negative_control)
from .tracekernel import TraceKernelError
from .lefschetz import global_trace, local_trace_sum, LefschetzError
from . import io, checks
from .tracekernel import _relabel_sheaf

OK, VALIDATION_FAILURE, PROPERTY_VIOLATION, PARSE_ERROR = 0, 1, 2, 3


def _load(path):
    return io.load_instance(path)


def _cell_sort_key(base):
    return lambda c: (base.dim(c), str(c))


def _print_cycle(cycle):
    base = cycle.base
    for c in sorted(cycle.weights, key=_cell_sort_key(base)):
        print("%+d %s" % (cycle.weights[c], c))
    print("degree %d" % degree(cycle))


def _named(table, name, what):
    if name not in table:
        print("no %s named %r in this file" % (what, name), file=sys.stderr)
        raise io.ParseError("unknown %s %r" % (what, name))
    return table[name]


# ---------------------------------------------------------------------------
# subcommands

def cmd_validate(args):
    inst = _load(args.file)
    problems = inst.complex.validate()
    for name, sheaf in inst.sheaves.items():
        problems += ["sheaf %s: %s" % (name, p) for p in sheaf.validate()]
    for name, lf in inst.lefschetz.items():
        problems += ["lefschetz %s: %s" % (name, p) for p in lf.validate()]
    if problems:
        for p in problems:
            print(p)
        return VALIDATION_FAILURE
    print("ok: %d cells, %d sheaves, %d maps" %
          (len(inst.complex), len(inst.sheaves), len(inst.maps)))
    return OK


def cmd_chi(args):
    inst = _load(args.file)
    sheaf = _named(inst.sheaves, args.sheaf, "sheaf")
    print(euler_char(sheaf))
    return OK


def cmd_cc(args):
    inst = _load(args.file)
    sheaf = _named(inst.sheaves, args.sheaf, "sheaf")
    _print_cycle(mueu(sheaf))
    return OK


def cmd_check(args):
    if args.negative_control:
        set_negative_control(True)
    try:
        report = checks.run_checks(seed=args.seed, cases=args.cases,
                                   suites=args.suite or None,
                                   max_dim=args.max_dim,
                                   max_cells=args.max_cells)
    finally:
        set_negative_control(False)
    for line in report.lines():
        print(line)
    print("wall time %.2fs" % report.wall_time, file=sys.stderr)
    if not report.ok:
        name, case, detail = report.failures[0]
        out = args.counterexample or "counterexample.json"
        payload = {"suite": name, "case": case, "seed": report.seed,
                   "detail": json.loads(detail)}
        with open(out, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
        print("first counterexample written to %s" % out, file=sys.stderr)
        return PROPERTY_VIOLATION
    return OK


def _lift_left(sheaf):
    """View a sheaf on M as a kernel on product(point, M)."""
    p, _, _ = product(POINT, sheaf.base)
    return _relabel_sheaf(sheaf, p, lambda c: ("pt", c))


def _lift_right(sheaf):
    p, _, _ = product(sheaf.base, POINT)
    return _relabel_sheaf(sheaf, p, lambda c: (c, "pt"))


def cmd_compose(args):
    """Compose two sheaves on the file's complex M viewed as kernels
    point -> M and M -> point, then compare the Euler class of the
    composite against the composition of the classes."""
    inst = _load(args.file)
    k12 = _lift_left(_named(inst.sheaves, args.k12, "sheaf"))
    k23 = _lift_right(_named(inst.sheaves, args.k23, "sheaf"))
    composed = kernel_compose(k12, k23)
    got = mueu(composed)
    expected = compose_cycle(mueu(k12), mueu(k23))
    _print_cycle(got)
    if got != expected:
        print("class of composite disagrees with composed classes")
        return PROPERTY_VIOLATION
    print("compose ok")
    return OK


def cmd_pushforward(args):
    inst = _load(args.file)
    sheaf = _named(inst.sheaves, args.sheaf, "sheaf")
    f = _named(inst.maps, args.map, "map")
    if not f.source.same_as(sheaf.base):
        print("map source is not the sheaf base", file=sys.stderr)
        return VALIDATION_FAILURE
    try:
        pushed = pushforward(f, sheaf)
    except PushforwardError as e:
        print("pushforward not representable: %s" % e)
        return VALIDATION_FAILURE
    for c in sorted(pushed.base.cell_ids(), key=_cell_sort_key(pushed.base)):
        print("chi %s = %d" % (c, euler(pushed.stalk(c))))
    if mueu(pushed) != pushforward_cycle(f, mueu(sheaf)):
        print("class of pushforward disagrees with pushed class")
        return PROPERTY_VIOLATION
    print("pushforward ok, degree %d" % degree(mueu(pushed)))
    return OK


def cmd_dual(args):
    inst = _load(args.file)
    sheaf = _named(inst.sheaves, args.sheaf, "sheaf")
    df = verdier_dual(sheaf)
    for c in sorted(df.base.cell_ids(), key=_cell_sort_key(df.base)):
        print("chi %s = %d" % (c, euler(df.stalk(c))))
    if euler_char(df) != euler_char(sheaf):
        print("duality changed the global index")
        return PROPERTY_VIOLATION
    print("dual ok, degree %d" % euler_char(df))
    return OK


def cmd_lefschetz(args):
    inst = _load(args.file)
    lf = _named(inst.lefschetz, args.instance, "lefschetz instance")
    problems = lf.validate()
    if problems:
        for p in problems:
            print(p)
        return VALIDATION_FAILURE
    g = global_trace(lf)
    l = local_trace_sum(lf)
    print("global %s" % g)
    print("local %s" % l)
    if g != l:
        print("trace mismatch")
        return PROPERTY_VIOLATION
    print("lefschetz ok")
    return OK


def cmd_expand(args):
    inst = _load(args.file)
    k = _named(inst.kernels, args.kernel, "kernel")
    under = k.underlying
    for c in sorted(under.base.cell_ids(), key=_cell_sort_key(under.base)):
        v = under.stalk(c)
        if not v.is_zero():
            print("chi %s = %d" % (c, euler(v)))
    print("class:")
    _print_cycle(k.euler_class)
    return OK


# ---------------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(
        prog="conormal",
        description="Exact calculus of cellular sheaves, cycles and "
                    "trace kernels on finite cell complexes.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a JSON instance file")
    p.add_argument("file")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("chi", help="global index of a named sheaf")
    p.add_argument("file")
    p.add_argument("sheaf")
    p.set_defaults(fn=cmd_chi)

    p = sub.add_parser("cc", help="characteristic cycle of a named sheaf")
    p.add_argument("file")
    p.add_argument("sheaf")
    p.set_defaults(fn=cmd_cc)

    p = sub.add_parser("check", help="run seeded property suites")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--suite", action="append", choices=sorted(checks.SUITES),
                   help="restrict to a suite (repeatable)")
    p.add_argument("--max-dim", type=int, default=3)
    p.add_argument("--max-cells", type=int, default=40)
    p.add_argument("--counterexample", help="failure output path")
    p.add_argument("--negative-control", action="store_true",
                   help=argparse.SUPPRESS)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("compose", help="compose two sheaves as kernels "
                                       "point -> M -> point")
    p.add_argument("file")
    p.add_argument("k12")
    p.add_argument("k23")
    p.set_defaults(fn=cmd_compose)

    p = sub.add_parser("pushforward", help="push a sheaf along a named map")
    p.add_argument("file")
    p.add_argument("sheaf")
    p.add_argument("map")
    p.set_defaults(fn=cmd_pushforward)

    p = sub.add_parser("dual", help="stalkwise indices of the dual sheaf")
    p.add_argument("file")
    p.add_argument("sheaf")
    p.set_defaults(fn=cmd_dual)

    p = sub.add_parser("lefschetz", help="run a named fixed point instance")
    p.add_argument("file")
    p.add_argument("instance")
    p.set_defaults(fn=cmd_lefschetz)

    p = sub.add_parser("expand", help="expand a named trace-kernel tree")
    p.add_argument("file")
    p.add_argument("kernel")
    p.set_defaults(fn=cmd_expand)

    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except io.ParseError as e:
        print("parse error: %s" % e, file=sys.stderr)
        return PARSE_ERROR
    except (SheafError, TraceKernelError, LefschetzError) as e:
        print("validation failure: %s" % e, file=sys.stderr)
        return VALIDATION_FAILURE


if __name__ == "__main__":
    sys.exit(main())
