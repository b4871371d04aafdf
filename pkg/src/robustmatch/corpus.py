"""Bundled example instances and the facts each one is expected to exhibit.

Each entry is ``corpus/<name>_a.txt``, ``corpus/<name>_b.txt`` and
``corpus/<name>.json``.  Matchings in the JSON are 1-based firm ids listed
for workers 1..n.  ``verify_entry`` checks every fact against brute force and
the library operations and reports one line per fact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .instance import Instance, Matching, MatchingSet, classify_pair, is_blocking_pair, is_stable
from .io import read_instance
from .lattice import is_join_semi_sublattice, is_meet_semi_sublattice, is_sublattice, join, meet
from .lp import FractionalMatching, build_lp, check_integrality, solve_feasible
from .oracle import all_stable_bruteforce, robust_bruteforce
from .xp import robust_xp_decide

__all__ = ["CORPUS_DIR", "CorpusEntry", "FactResult", "load", "entries", "verify_entry", "verify_corpus"]

CORPUS_DIR = Path(__file__).with_name("corpus")

NAMES = (
    "single_firm_swap",
    "twisted_lattice",
    "meet_escapes",
    "two_firms_permuted",
    "one_one_permuted",
    "fractional_lp",
)


@dataclass
class CorpusEntry:
    name: str
    a: Instance
    b: Instance
    facts: dict

    def instance(self, tag: str) -> Instance:
        return {"a": self.a, "b": self.b}[tag]

    def matching(self, key: str) -> Matching:
        return Matching(tuple(f - 1 for f in self.facts["matchings"][key]))


@dataclass
class FactResult:
    entry: str
    fact: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        tail = f"  ({self.detail})" if self.detail and not self.ok else ""
        return f"{'PASS' if self.ok else 'FAIL'} {self.entry}: {self.fact}{tail}"


def load(name: str) -> CorpusEntry:
    if name not in NAMES:
        raise KeyError(f"unknown corpus entry {name!r}")
    facts = json.loads((CORPUS_DIR / f"{name}.json").read_text())
    return CorpusEntry(name, read_instance(CORPUS_DIR / f"{name}_a.txt"),
                       read_instance(CORPUS_DIR / f"{name}_b.txt"), facts)


def entries() -> list[CorpusEntry]:
    return [load(n) for n in NAMES]


@dataclass
class _Ctx:
    e: CorpusEntry
    out: list[FactResult] = field(default_factory=list)
    _cache: dict = field(default_factory=dict)

    def check(self, fact: str, ok: bool, detail: str = "") -> None:
        self.out.append(FactResult(self.e.name, fact, bool(ok), detail))

    def stable(self, tag: str) -> MatchingSet:
        if tag not in self._cache:
            self._cache[tag] = all_stable_bruteforce(self.e.instance(tag))
        return self._cache[tag]

    def robust(self) -> MatchingSet:
        if "robust" not in self._cache:
            self._cache["robust"] = robust_bruteforce([self.e.a, self.e.b])
        return self._cache["robust"]

    def difference(self) -> MatchingSet:
        sb = self.stable("b").as_set()
        return MatchingSet(tuple(m for m in self.stable("a") if m not in sb), self.e.a)


def _names(e: CorpusEntry, ms) -> str:
    rev = {e.matching(k): k for k in e.facts["matchings"]}
    return ", ".join(rev.get(m, str(tuple(f + 1 for f in m.partner_of_worker))) for m in ms)


def verify_entry(e: CorpusEntry) -> list[FactResult]:
    c = _Ctx(e)
    f = e.facts
    prof = classify_pair(e.a, e.b)
    c.check(f"differs on {f['profile'][0]} workers and {f['profile'][1]} firms",
            [prof.p, prof.q] == f["profile"], f"got ({prof.p},{prof.q})")
    for tag, keys in f.get("stable_sets", {}).items():
        want = {e.matching(k) for k in keys}
        got = c.stable(tag).as_set()
        c.check(f"stable matchings of {tag.upper()} are exactly {', '.join(keys)}", got == want,
                f"found {len(got)}: {_names(e, sorted(got))}")
    if "robust_empty" in f:
        r = c.robust()
        c.check("no matching is stable under both" if f["robust_empty"] else "some matching is stable under both",
                (len(r) == 0) == f["robust_empty"], f"brute force found {len(r)}: {_names(e, r)}")
        d = robust_xp_decide(e.a, e.b)
        c.check("guess-and-truncate search agrees", (d is None) == f["robust_empty"],
                f"returned {None if d is None else _names(e, [d])}")
    for k in f.get("robust_contains", []):
        c.check(f"{k} is stable under both", e.matching(k) in c.robust().as_set())
    for k in f.get("difference_contains", []):
        m = e.matching(k)
        c.check(f"{k} is stable under A but not B", is_stable(e.a, m) and not is_stable(e.b, m))
    for bp in f.get("blocking", []):
        w, fi = bp["pair"]
        inst = e.instance(bp["instance"])
        c.check(f"({w},{fi}) blocks {bp['matching']} under {bp['instance'].upper()}",
                is_blocking_pair(inst, e.matching(bp["matching"]), w - 1, fi - 1))
    for op in f.get("operations", []):
        fn = join if op["op"] == "join" else meet
        inst = e.instance(op["instance"])
        x, y = (e.matching(k) for k in op["args"])
        got = fn(inst, x, y)
        want = e.matching(op["result"])
        c.check(f"{op['op']} of {' and '.join(op['args'])} in L_{op['instance'].upper()} is {op['result']}",
                got == want, f"got {_names(e, [got])}")
        for tag in op.get("stable_under", []):
            c.check(f"{op['result']} is stable under {tag.upper()}", is_stable(e.instance(tag), want))
        for tag in op.get("unstable_under", []):
            c.check(f"{op['result']} is not stable under {tag.upper()}", not is_stable(e.instance(tag), want))
    for v in f.get("verdicts", []):
        s = c.robust() if v["set"] == "robust" else c.difference()
        s = s.with_instance(e.instance(v["lattice"]))
        label = "the robust set" if v["set"] == "robust" else "M_A minus M_B"
        where = f"L_{v['lattice'].upper()}"
        for key, pred in (("sublattice", is_sublattice), ("join_semi", is_join_semi_sublattice),
                          ("meet_semi", is_meet_semi_sublattice)):
            if key in v:
                word = {"sublattice": "a sublattice", "join_semi": "join-closed", "meet_semi": "meet-closed"}[key]
                neg = "" if v[key] else "not "
                c.check(f"{label} is {neg}{word} in {where}", pred(s) == v[key])
    lp = f.get("lp")
    if lp:
        model = build_lp([e.a, e.b])
        want = FractionalMatching.average([e.matching(k) for k in lp["feasible_point"]])
        if "same_point" in lp:
            other = FractionalMatching.average([e.matching(k) for k in lp["same_point"]])
            c.check(f"average of {' and '.join(lp['feasible_point'])} equals average of {' and '.join(lp['same_point'])}",
                    want == other)
        x = solve_feasible(model)
        c.check("exact simplex returns the average point", x == want, f"got\n{x}")
        rep = check_integrality([e.a, e.b])
        c.check(f"integrality check reports {lp['integrality']}", rep.verdict == lp["integrality"], rep.reason)
        if rep.witness is not None:
            c.check("witness is a fractional feasible point",
                    not rep.witness.is_integral() and model.is_feasible_point(rep.witness.flat()))
    return c.out


def verify_corpus(names=NAMES) -> list[FactResult]:
    out: list[FactResult] = []
    for n in names:
        out.extend(verify_entry(load(n)))
    return out
