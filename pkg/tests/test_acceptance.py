"""Acceptance criteria, one test each, at the stated sizes and time budgets.

Every test appends a ``PASS``/``FAIL`` line to the summary printed at the end
of the run.  Sizes are fixed seeds so a run is reproducible.
"""

from __future__ import annotations

import io
import random
import statistics
import time
from fractions import Fraction
from math import lcm

import pytest

from robustmatch.cli import main
from robustmatch.compression import (
    alternating_path,
    canonical_path_edges,
    check_bouquet,
    compress,
    enumerate_sublattice,
    find_bouquet,
    hybrid_instances_one_side,
    hybrid_instances_two_side,
    robust_poset_one_side,
    stable_under,
)
from robustmatch.corpus import load, verify_entry
from robustmatch.da import (
    RunLog,
    compound,
    deferred_acceptance,
    firm_optimal_robust,
    firm_optimal_strong,
    worker_optimal_robust,
    worker_optimal_strong,
)
from robustmatch.instance import MatchingSet, generate_pair, generate_upward_shift, is_stable, random_instance
from robustmatch.lattice import extremal, is_sublattice, upward_shift_predicate
from robustmatch.lp import FractionalMatching, build_lp, check_integrality, solve_feasible, theta_round
from robustmatch.oracle import all_stable_bruteforce, robust_bruteforce
from robustmatch.rotations import build_rotation_poset, enumerate_closed_sets, to_mask
from robustmatch.xp import robust_xp_decide, robust_xp_enumerate

from conftest import ACCEPTANCE


def _report(capsys, num: int, title: str, fails: list[str], elapsed: float, budget: float) -> None:
    if elapsed >= budget:
        fails = fails + [f"took {elapsed:.2f}s, budget {budget:g}s"]
    status = "PASS" if not fails else "FAIL"
    line = f"{status} criterion {num:2d}: {title} ({elapsed:.2f}s)"
    if fails:
        line += " -- " + "; ".join(fails[:4]) + (f"; +{len(fails) - 4} more" if len(fails) > 4 else "")
    ACCEPTANCE.append(line)
    with capsys.disabled():
        print("\n" + line)
    assert not fails, line


def _corpus_fails(*names: str) -> list[str]:
    out = []
    for n in names:
        out += [r.line() for r in verify_entry(load(n)) if not r.ok]
    return out


def test_criterion_01_fractional_example(capsys):
    t = time.perf_counter()
    e = load("fractional_lp")
    fails = []
    for tag in ("a", "b"):
        k = len(all_stable_bruteforce(e.instance(tag)))
        if k != 2:
            fails.append(f"{tag.upper()} has {k} stable matchings, expected 2")
    if robust_xp_decide(e.a, e.b) is not None:
        fails.append("robust_xp_decide found a matching stable under both")
    half = FractionalMatching.average([e.matching(k) for k in e.facts["lp"]["feasible_point"]])
    if solve_feasible(build_lp([e.a, e.b])) != half:
        fails.append("solve_feasible did not return the half point")
    if check_integrality([e.a, e.b]).verdict != "fractional-witness":
        fails.append("integrality check did not report a fractional witness")
    _report(capsys, 1, "fractional LP example", fails, time.perf_counter() - t, 1)


def test_criterion_02_join_meet_example(capsys):
    t = time.perf_counter()
    fails = _corpus_fails("twisted_lattice")
    _report(capsys, 2, "join/meet of two robust matchings", fails, time.perf_counter() - t, 1)


def test_criterion_03_sublattice_verdicts(capsys):
    t = time.perf_counter()
    fails = _corpus_fails("single_firm_swap", "meet_escapes", "two_firms_permuted", "one_one_permuted")
    _report(capsys, 3, "sublattice and semi-sublattice verdicts", fails, time.perf_counter() - t, 1)


def test_criterion_04_lattice_bijection(capsys):
    t = time.perf_counter()
    fails = []
    for seed in range(500):
        rng = random.Random(seed)
        inst = random_instance(rng.randint(3, 7), rng)
        p = build_rotation_poset(inst)
        closed = [c for c in enumerate_closed_sets(p) if p.s in c and p.t not in c]
        got = {p.matching_of_mask(to_mask(c)) for c in closed}
        want = all_stable_bruteforce(inst).as_set()
        if len(closed) != len(want) or got != want:
            fails.append(f"seed {seed}: {len(closed)} closed sets, {len(want)} stable matchings")
    _report(capsys, 4, "closed sets of the rotation poset vs brute force", fails, time.perf_counter() - t, 60)


def test_criterion_05_bouquet(capsys):
    t = time.perf_counter()
    fails = []
    for seed in range(300):
        rng = random.Random(seed)
        a, b = generate_pair(rng.randint(4, 7), 0, 1, seed)
        p = build_rotation_poset(a)
        bq = find_bouquet(p, stable_under(p, b))
        got = set(enumerate_sublattice(compress(p, bq.edges), a))
        if got != robust_bruteforce([a, b]).as_set():
            fails.append(f"seed {seed}: compression generates the wrong set")
        bad = check_bouquet(bq)
        if bad:
            fails.append(f"seed {seed}: {bad[0]}")
    _report(capsys, 5, "bouquet search on single-firm changes", fails, time.perf_counter() - t, 120)


def _hybrid_meet(a, hs):
    s = all_stable_bruteforce(a).as_set()
    for h in hs:
        s &= all_stable_bruteforce(h).as_set()
    return s


def test_criterion_06_hybrids(capsys):
    t = time.perf_counter()
    fails = []
    for seed in range(300):
        rng = random.Random(seed)
        n, q = rng.randint(3, 7), rng.randint(1, 3)
        a, b = generate_pair(n, 0, q, seed)
        want = robust_bruteforce([a, b]).as_set()
        if _hybrid_meet(a, hybrid_instances_one_side(a, b)) != want:
            fails.append(f"(0,{q}) seed {seed}: one-sided hybrid identity")
        if set(enumerate_sublattice(robust_poset_one_side(a, b), a)) != want:
            fails.append(f"(0,{q}) seed {seed}: robust poset generates the wrong set")
        a, b = generate_pair(n, 1, q, seed)
        if _hybrid_meet(a, hybrid_instances_two_side(a, b)) != robust_bruteforce([a, b]).as_set():
            fails.append(f"(1,{q}) seed {seed}: two-sided hybrid identity")
    _report(capsys, 6, "hybrid decompositions", fails, time.perf_counter() - t, 120)


def test_criterion_07_robust_da(capsys):
    t = time.perf_counter()
    fails = []
    for seed in range(500):
        rng = random.Random(seed)
        n = rng.randint(2, 7)
        a, b = generate_pair(n, seed % 2, rng.randint(0, n), seed)
        s = robust_bruteforce([a, b])
        used = {pr for m in s for pr in m.pairs()}
        for side, fn in (("worker", worker_optimal_robust), ("firm", firm_optimal_robust)):
            log = RunLog()
            got = fn(a, b, log=log)
            if got != extremal(s, side):
                fails.append(f"seed {seed}: {side}-optimal mismatch")
            if used & set(log.rejections):
                fails.append(f"seed {seed}: {side} run rejected a pair some robust matching uses")
    _report(capsys, 7, "robust deferred acceptance extremes", fails, time.perf_counter() - t, 120)


def test_criterion_08_strong_stability(capsys):
    t = time.perf_counter()
    fails = []
    for seed in range(300):
        rng = random.Random(seed)
        n = rng.randint(2, 7)
        a, b = generate_pair(n, 0, rng.randint(0, n), seed)
        s = robust_bruteforce([a, b])
        x = compound(a, b)
        if worker_optimal_strong(x) != extremal(s, "worker"):
            fails.append(f"seed {seed}: worker-proposing strong run")
        if firm_optimal_strong(x) != extremal(s, "firm"):
            fails.append(f"seed {seed}: firm-proposing strong run")
        y = compound(a, a)
        if worker_optimal_strong(y) != deferred_acceptance(a, "worker"):
            fails.append(f"seed {seed}: equal sources, worker side differs from DA")
        if firm_optimal_strong(y) != deferred_acceptance(a, "firm"):
            fails.append(f"seed {seed}: equal sources, firm side differs from DA")
    _report(capsys, 8, "strongly stable matchings of compound instances", fails, time.perf_counter() - t, 60)


def _median_decide(n: int, reps: int = 7) -> float:
    ts = []
    for seed in range(reps):
        a, b = generate_pair(n, 1, 1, 1000 + seed)
        t = time.perf_counter()
        robust_xp_decide(a, b)
        ts.append(time.perf_counter() - t)
    return statistics.median(ts)


def test_criterion_09_xp(capsys):
    t = time.perf_counter()
    fails = []
    for seed in range(300):
        rng = random.Random(seed)
        n = rng.randint(2, 7)
        a, b = generate_pair(n, rng.randint(0, 2), rng.randint(0, 2), seed)
        got = list(robust_xp_enumerate(a, b))
        if len(got) != len(set(got)):
            fails.append(f"seed {seed}: duplicate yields")
        if set(got) != robust_bruteforce([a, b]).as_set():
            fails.append(f"seed {seed}: yield set differs from brute force")
    _median_decide(20, 2)
    ratio = _median_decide(40) / _median_decide(20)
    if ratio > 3 * 16:
        fails.append(f"n=20 -> 40 time ratio {ratio:.1f} exceeds 48")
    _report(capsys, 9, f"guess-and-truncate enumeration, scaling ratio {ratio:.1f}", fails,
            time.perf_counter() - t, 180)


def _thetas(x: FractionalMatching, rng: random.Random, k: int = 10) -> list[Fraction]:
    # odd multiples of 1/(2L) never hit a breakpoint, all of which are multiples of 1/L
    den = lcm(*(v.denominator for row in x.x for v in row))
    return [Fraction(2 * rng.randrange(den) + 1, 2 * den) for _ in range(k)]


def test_criterion_10_lp(capsys):
    t = time.perf_counter()
    fails = []
    for seed in range(200):
        rng = random.Random(seed)
        n = rng.randint(2, 5)
        a, b = generate_pair(n, 1, rng.randint(0, n), seed)
        if not check_integrality([a, b]).integral:
            fails.append(f"pair seed {seed}: polytope not integral")
        pts = [solve_feasible(build_lp([a, b]))]
        s = list(robust_bruteforce([a, b]))
        if s:
            pts.append(FractionalMatching.average(s))
        for x in pts:
            if x is None:
                continue
            for th in _thetas(x, rng):
                if theta_round(x, a, th) != theta_round(x, b, th):
                    fails.append(f"pair seed {seed}: rounding at {th} differs between A and B")
    for seed in range(200):
        rng = random.Random(10**6 + seed)
        inst = random_instance(rng.randint(1, 6), rng)
        for x in (solve_feasible(build_lp([inst])), FractionalMatching.average(list(all_stable_bruteforce(inst)))):
            for th in _thetas(x, rng):
                if not is_stable(inst, theta_round(x, inst, th)):
                    fails.append(f"single seed {seed}: rounding at {th} is unstable")
    _report(capsys, 10, "LP integrality and threshold rounding", fails, time.perf_counter() - t, 300)


def test_criterion_11_upward_shift(capsys):
    t = time.perf_counter()
    fails = []
    done = seed = trivial = 0
    while done < 200:
        seed += 1
        a, b, sh = generate_upward_shift(3 + seed % 5, seed)
        la = all_stable_bruteforce(a)
        diff = [m for m in la if not is_stable(b, m)]
        if not diff:
            trivial += 1
            continue
        done += 1
        if not is_sublattice(MatchingSet(tuple(diff), a)):
            fails.append(f"seed {seed}: difference is not a sublattice")
        pred = [m for m in la if upward_shift_predicate(a, sh.side, sh.agent, sh.target, sh.k, m)]
        if set(pred) != set(diff):
            fails.append(f"seed {seed}: closed-form predicate disagrees")
        p = build_rotation_poset(a)
        inb = stable_under(p, b)
        e1 = find_bouquet(p, inb).edges
        e2 = find_bouquet(p, lambda c: not inb(c)).edges
        path = canonical_path_edges(p, e1, e2)
        if path is None or alternating_path(*path, p.t, p.s) is None:
            fails.append(f"seed {seed}: no alternating path")
            continue
        keep = set(la) - set(diff)
        if set(enumerate_sublattice(compress(p, path[0]), a)) != keep or \
                set(enumerate_sublattice(compress(p, path[1]), a)) != set(diff):
            fails.append(f"seed {seed}: path edges define different sublattices")
    _report(capsys, 11, f"upward shifts ({trivial} shifts with no effect skipped)", fails,
            time.perf_counter() - t, 60)


def test_criterion_12_verify_command(capsys):
    t = time.perf_counter()
    out = io.StringIO()
    code = main(["verify-paper"], out=out)
    fails = [] if code == 0 else [f"exit code {code}"] + [
        ln for ln in out.getvalue().splitlines() if ln.startswith("FAIL")]
    _report(capsys, 12, "verify-paper on the bundled corpus", fails, time.perf_counter() - t, 5)
