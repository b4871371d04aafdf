"""Command-line entry point.

Exit codes: 0 success, 1 informative negative (no robust matching, empty
polytope, failed corpus fact), 2 bad input or unsupported regime,
3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .compression import bouquet_for_pair, check_bouquet, robust_poset_details
from .corpus import verify_corpus
from .da import RunLog, deferred_acceptance, firm_optimal_robust, worker_optimal_robust
from .errors import BoundaryThetaError, ContractViolation, InputError, InvariantViolation, SizeRefusal
from .instance import generate_pair, merged_profile
from .io import format_matching, read_instance, serialize_instance
from .lp import build_lp, check_integrality, export_lp_text, solve_feasible, theta_round
from .rotations import build_rotation_poset, enumerate_lattice
from .xp import XPStats, robust_xp_decide, robust_xp_enumerate

OK, NEGATIVE, BAD_INPUT, INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(BAD_INPUT)


def _print_blocks(ms, out) -> int:
    k = 0
    for m in ms:
        if k:
            out.write("\n")
        out.write(format_matching(m))
        k += 1
    return k


def cmd_stable(args, out) -> int:
    out.write(format_matching(deferred_acceptance(read_instance(args.file), args.side)))
    return OK


def cmd_enumerate(args, out) -> int:
    inst = read_instance(args.file)
    k = _print_blocks(enumerate_lattice(build_rotation_poset(inst), inst), out)
    out.write(f"# {k} stable matchings\n")
    return OK


def cmd_poset(args, out) -> int:
    p = build_rotation_poset(read_instance(args.file))
    if args.dot:
        out.write(p.to_dot())
        return OK
    labels = p.labels()
    for v in p.order:
        out.write(f"{v} {labels.get(v, 's' if v == p.s else 't')}\n")
    for u, v in p.hasse:
        out.write(f"{u} -> {v}\n")
    return OK


def cmd_robust_optimal(args, out) -> int:
    a, b = read_instance(args.a), read_instance(args.b)
    log = RunLog(verbose=args.trace)
    fn = worker_optimal_robust if args.side == "worker" else firm_optimal_robust
    m = fn(a, b, log=log, force=args.force)
    for line in log.trace:
        print(line, file=sys.stderr)
    if m is None:
        out.write("no robust stable matching\n")
        return NEGATIVE
    out.write(format_matching(m))
    return OK


def cmd_robust_xp(args, out) -> int:
    a, b = read_instance(args.a), read_instance(args.b)
    stats = XPStats()
    if not args.enumerate and not args.count_only:
        m = robust_xp_decide(a, b, stats)
        if m is None:
            out.write("no robust stable matching\n")
            return NEGATIVE
        out.write(format_matching(m))
        return OK
    it = robust_xp_enumerate(a, b, stats)
    k = 0
    for m in it:
        if args.limit is not None and k >= args.limit:
            break
        if not args.count_only:
            if k:
                out.write("\n")
            out.write(format_matching(m))
        k += 1
    out.write(f"# {k} robust stable matchings\n")
    return OK if k else NEGATIVE


def cmd_bouquet(args, out) -> int:
    a, b = read_instance(args.a), read_instance(args.b)
    bq = bouquet_for_pair(a, b)
    out.write(f"# searched {'dual' if bq.dual else 'primal'} order, {bq.oracle_calls} oracle calls\n")
    for r in bq.tails:
        out.write(f"tail {r}: flower {' '.join(str(u) for u in sorted(bq.flowers[r]))}\n")
    for u, v in sorted(bq.edges):
        out.write(f"edge {u} -> {v}\n")
    bad = check_bouquet(bq)
    for msg in bad:
        out.write(f"violation: {msg}\n")
    return INTERNAL if bad else OK


def cmd_robust_poset(args, out) -> int:
    a, b = read_instance(args.a), read_instance(args.b)
    comp = robust_poset_details(a, b).compression
    if args.dot:
        out.write(comp.to_dot())
    else:
        for i, meta in enumerate(comp.metas):
            tag = " s" if i == comp.a_s else ""
            tag += " t" if i == comp.a_t else ""
            out.write(f"meta {i}{tag}: {' '.join(str(v) for v in sorted(meta))}\n")
        for u, v in comp.meta_hasse():
            out.write(f"{u} -> {v}\n")
    if comp.is_empty:
        out.write("# no robust stable matching\n")
        return NEGATIVE
    return OK


def cmd_lp_check(args, out) -> int:
    insts = [read_instance(p) for p in [args.a] + args.others]
    if args.export:
        out.write(export_lp_text(build_lp(insts)))
        return OK
    rep = check_integrality(insts)
    out.write(f"{rep.verdict}: {rep.reason}\n")
    out.write(f"# {rep.integral_points} integral points, {rep.facets} facets, {rep.lps_solved} LPs\n")
    if rep.witness is not None:
        out.write(f"{rep.witness}\n")
    if rep.integral and rep.integral_points == 0:
        return NEGATIVE
    return OK


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad rational {text!r}, expected p/q") from None


def cmd_theta_round(args, out) -> int:
    a, b = read_instance(args.a), read_instance(args.b)
    x = solve_feasible(build_lp([a, b]))
    if x is None:
        out.write("polytope is empty\n")
        return NEGATIVE
    theta = _fraction(args.theta)
    ma, mb = theta_round(x, a, theta), theta_round(x, b, theta)
    out.write("# rounded under A\n" + format_matching(ma))
    out.write("# rounded under B\n" + format_matching(mb))
    return OK


def cmd_verify_paper(args, out) -> int:
    t = time.perf_counter()
    results = verify_corpus()
    for r in results:
        out.write(r.line() + "\n")
    bad = sum(not r.ok for r in results)
    out.write(f"# {len(results) - bad}/{len(results)} facts hold ({time.perf_counter() - t:.2f}s)\n")
    return OK if not bad else NEGATIVE


def cmd_gen(args, out) -> int:
    if not (0 <= args.p <= args.n and 0 <= args.q <= args.n):
        raise InputError("need 0 <= p, q <= n")
    a, b = generate_pair(args.n, args.p, args.q, args.seed)
    if args.prefix:
        Path(f"{args.prefix}_a.txt").write_text(serialize_instance(a))
        Path(f"{args.prefix}_b.txt").write_text(serialize_instance(b))
        prof = merged_profile([a, b])
        out.write(f"wrote {args.prefix}_a.txt {args.prefix}_b.txt ({prof.p},{prof.q})\n")
    else:
        out.write("# A\n" + serialize_instance(a) + "# B\n" + serialize_instance(b))
    return OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="robustmatch", description="Stable and robust stable matchings.")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    sides = ("worker", "firm")

    s = sub.add_parser("stable", help="deferred acceptance")
    s.add_argument("file")
    s.add_argument("--side", choices=sides, default="worker")
    s.set_defaults(fn=cmd_stable)

    s = sub.add_parser("enumerate", help="all stable matchings")
    s.add_argument("file")
    s.set_defaults(fn=cmd_enumerate)

    s = sub.add_parser("poset", help="rotation poset")
    s.add_argument("file")
    s.add_argument("--dot", action="store_true")
    s.set_defaults(fn=cmd_poset)

    s = sub.add_parser("robust-optimal", help="worker- or firm-optimal robust matching")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--side", choices=sides, default="worker")
    s.add_argument("--force", action="store_true", help="run outside the guaranteed regime")
    s.add_argument("--trace", action="store_true", help="round trace on stderr")
    s.set_defaults(fn=cmd_robust_optimal)

    s = sub.add_parser("robust-xp", help="search over partners of changed agents")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--enumerate", action="store_true")
    s.add_argument("--limit", type=int)
    s.add_argument("--count-only", action="store_true")
    s.set_defaults(fn=cmd_robust_xp)

    s = sub.add_parser("bouquet", help="bouquet for a single-agent change")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(fn=cmd_bouquet)

    s = sub.add_parser("robust-poset", help="compression generating the robust set")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--dot", action="store_true")
    s.set_defaults(fn=cmd_robust_poset)

    s = sub.add_parser("lp-check", help="integrality of the robust polytope")
    s.add_argument("a")
    s.add_argument("others", nargs="+", metavar="B")
    s.add_argument("--export", action="store_true", help="print the LP instead")
    s.set_defaults(fn=cmd_lp_check)

    s = sub.add_parser("theta-round", help="round a feasible point at theta")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--theta", required=True)
    s.set_defaults(fn=cmd_theta_round)

    s = sub.add_parser("verify-paper", help="check every bundled corpus fact")
    s.set_defaults(fn=cmd_verify_paper)

    s = sub.add_parser("gen", help="random instance pair")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--p", type=int, default=0)
    s.add_argument("--q", type=int, default=0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--prefix")
    s.set_defaults(fn=cmd_gen)
    return ap


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else BAD_INPUT
    try:
        return args.fn(args, out)
    except (InputError, ContractViolation, SizeRefusal, BoundaryThetaError) as e:
        print(f"error: {e}", file=sys.stderr)
        return BAD_INPUT
    except InvariantViolation as e:
        print(f"internal error: {e}", file=sys.stderr)
        return INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
