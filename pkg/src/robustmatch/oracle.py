"""Exhaustive ground truth for small markets.

Everything here is definition-level: every permutation is scanned for a
blocking pair and lattice laws are checked with a local pointwise
combination.  No rotation, lattice or deferred-acceptance code is used, so
the functions can serve as an independent reference for the rest of the
package.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .errors import InputError, SizeRefusal
from .instance import Instance, Matching, MatchingSet

MAX_N = 8


def _check_size(n: int) -> None:
    if n > MAX_N:
        raise SizeRefusal(f"brute force refuses n={n} (limit {MAX_N})")


def _stable_perm(inst: Instance, p: tuple[int, ...], inv: list[int]) -> bool:
    # same test as is_stable, inlined to skip building Matching objects
    wp, wr, fr = inst.worker_prefs, inst.worker_rank, inst.firm_rank
    for w, f0 in enumerate(p):
        for f in wp[w][: wr[w][f0]]:
            if fr[f][w] < fr[f][inv[f]]:
                return False
    return True


def _scan(instances: Sequence[Instance]) -> list[Matching]:
    n = instances[0].n
    inv = [0] * n
    out = []
    for p in itertools.permutations(range(n)):
        for w, f in enumerate(p):
            inv[f] = w
        if all(_stable_perm(x, p, inv) for x in instances):
            out.append(Matching(p))
    return out


def all_stable_bruteforce(inst: Instance) -> MatchingSet:
    _check_size(inst.n)
    return MatchingSet(tuple(_scan([inst])), inst)


def robust_bruteforce(instances: Sequence[Instance]) -> MatchingSet:
    """Matchings stable under every instance; ordered by the first instance."""
    if not instances:
        raise InputError("need at least one instance")
    n = instances[0].n
    if any(x.n != n for x in instances):
        raise InputError("instances have different sizes")
    _check_size(n)
    return MatchingSet(tuple(_scan(instances)), instances[0])


def strongly_stable_bruteforce(n: int, worker_rank, firm_above) -> list[Matching]:
    """Matchings with no strongly blocking pair under one-sided partial orders.

    ``worker_rank[w][f]`` is the position of ``f`` in ``w``'s list and
    ``firm_above[f][w]`` is the set of workers ``f`` strictly prefers to ``w``.
    A pair blocks strongly when the worker strictly prefers the firm and the
    firm does not strictly prefer its current partner.
    """
    _check_size(n)
    out = []
    for p in itertools.permutations(range(n)):
        inv = [0] * n
        for w, f in enumerate(p):
            inv[f] = w
        ok = True
        for w in range(n):
            for f in range(n):
                if f != p[w] and worker_rank[w][f] < worker_rank[w][p[w]] and inv[f] not in firm_above[f][w]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(Matching(p))
    return out


def _pointwise(inst: Instance, m1: Matching, m2: Matching, better: bool) -> Matching | None:
    r = inst.worker_rank
    pick = []
    for w in range(inst.n):
        a, b = m1[w], m2[w]
        pick.append(min(a, b, key=lambda f: r[w][f]) if better else max(a, b, key=lambda f: r[w][f]))
    if sorted(pick) != list(range(inst.n)):
        return None
    return Matching(tuple(pick))


@dataclass
class LatticeReport:
    ok: bool = True
    failures: list[str] = field(default_factory=list)

    def fail(self, msg: str) -> None:
        self.ok = False
        if len(self.failures) < 20:
            self.failures.append(msg)


def verify_lattice_axioms(s: MatchingSet) -> LatticeReport:
    """Closure, absorption, distributivity and unique extremes over ``s``."""
    inst = s.instance
    members = list(s)
    member_set = s.as_set()
    rep = LatticeReport()
    if not members:
        rep.fail("empty set")
        return rep

    def up(a, b):
        return _pointwise(inst, a, b, better=False)

    def down(a, b):
        return _pointwise(inst, a, b, better=True)

    for a in members:
        for b in members:
            j, mt = up(a, b), down(a, b)
            if j is None or j not in member_set:
                rep.fail(f"join not closed for {a}, {b}")
                continue
            if mt is None or mt not in member_set:
                rep.fail(f"meet not closed for {a}, {b}")
                continue
            if down(a, j) != a or up(a, mt) != a:
                rep.fail(f"absorption fails for {a}, {b}")
    if not rep.ok:
        return rep
    for a, b, c in itertools.product(members, repeat=3):
        if down(a, up(b, c)) != up(down(a, b), down(a, c)):
            rep.fail(f"meet over join fails for {a}, {b}, {c}")
        if up(a, down(b, c)) != down(up(a, b), up(a, c)):
            rep.fail(f"join over meet fails for {a}, {b}, {c}")
    r = inst.worker_rank

    def weakly_better(a, b):
        return all(r[w][a[w]] <= r[w][b[w]] for w in range(inst.n))

    tops = [a for a in members if all(weakly_better(a, b) for b in members)]
    bottoms = [a for a in members if all(weakly_better(b, a) for b in members)]
    if len(tops) != 1:
        rep.fail(f"{len(tops)} candidates for the worker-optimal element")
    if len(bottoms) != 1:
        rep.fail(f"{len(bottoms)} candidates for the firm-optimal element")
    return rep
