"""Instances, matchings, blocking pairs and perturbation profiles.

Agents are 0-based integers internally.  Workers and firms live in separate
id spaces, both ``0..n-1``.  A preference list is a tuple of opposite-side ids,
most preferred first.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence

from .errors import InputError

Side = Literal["worker", "firm"]
SIDES: tuple[Side, Side] = ("worker", "firm")


def _check_side(side: str) -> None:
    if side not in SIDES:
        raise InputError(f"side must be 'worker' or 'firm', got {side!r}")


def _rank_table(prefs: tuple[tuple[int, ...], ...]) -> tuple[tuple[int, ...], ...]:
    n = len(prefs)
    table = []
    for lst in prefs:
        row = [0] * n
        for pos, other in enumerate(lst):
            row[other] = pos
        table.append(tuple(row))
    return tuple(table)


@dataclass(frozen=True)
class Instance:
    """A one-to-one market with strict complete preferences on both sides."""

    n: int
    worker_prefs: tuple[tuple[int, ...], ...]
    firm_prefs: tuple[tuple[int, ...], ...]
    worker_rank: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    firm_rank: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        wp = tuple(tuple(int(x) for x in lst) for lst in self.worker_prefs)
        fp = tuple(tuple(int(x) for x in lst) for lst in self.firm_prefs)
        if not isinstance(self.n, int) or self.n < 1:
            raise InputError(f"market size must be a positive integer, got {self.n!r}")
        full = set(range(self.n))
        for label, prefs in (("worker", wp), ("firm", fp)):
            if len(prefs) != self.n:
                raise InputError(f"expected {self.n} {label} lists, got {len(prefs)}")
            for i, lst in enumerate(prefs):
                if len(lst) != self.n or set(lst) != full:
                    raise InputError(f"{label} {i} list is not a permutation of 0..{self.n - 1}")
        object.__setattr__(self, "worker_prefs", wp)
        object.__setattr__(self, "firm_prefs", fp)
        object.__setattr__(self, "worker_rank", _rank_table(wp))
        object.__setattr__(self, "firm_rank", _rank_table(fp))

    @classmethod
    def from_lists(cls, worker_prefs: Sequence[Sequence[int]], firm_prefs: Sequence[Sequence[int]]) -> "Instance":
        return cls(len(worker_prefs), tuple(map(tuple, worker_prefs)), tuple(map(tuple, firm_prefs)))

    def prefs(self, side: Side) -> tuple[tuple[int, ...], ...]:
        return self.worker_prefs if side == "worker" else self.firm_prefs

    def rank(self, side: Side) -> tuple[tuple[int, ...], ...]:
        return self.worker_rank if side == "worker" else self.firm_rank

    def worker_prefers(self, w: int, f1: int, f2: int) -> bool:
        """True iff worker ``w`` strictly prefers ``f1`` to ``f2``."""
        r = self.worker_rank[w]
        return r[f1] < r[f2]

    def firm_prefers(self, f: int, w1: int, w2: int) -> bool:
        r = self.firm_rank[f]
        return r[w1] < r[w2]

    def transposed(self) -> "Instance":
        """Swap the roles of workers and firms."""
        return Instance(self.n, self.firm_prefs, self.worker_prefs)

    def with_lists(self, workers: dict[int, Sequence[int]] | None = None,
                   firms: dict[int, Sequence[int]] | None = None) -> "Instance":
        wp = list(self.worker_prefs)
        fp = list(self.firm_prefs)
        for w, lst in (workers or {}).items():
            wp[w] = tuple(lst)
        for f, lst in (firms or {}).items():
            fp[f] = tuple(lst)
        return Instance(self.n, tuple(wp), tuple(fp))


@dataclass(frozen=True, order=True)
class Matching:
    """Perfect matching stored as ``partner_of_worker[w] = f``."""

    partner_of_worker: tuple[int, ...]

    def __post_init__(self):
        pw = tuple(int(x) for x in self.partner_of_worker)
        if sorted(pw) != list(range(len(pw))):
            raise InputError(f"not a perfect matching: {pw}")
        object.__setattr__(self, "partner_of_worker", pw)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]]) -> "Matching":
        d = dict(pairs)
        return cls(tuple(d[w] for w in range(len(d))))

    @property
    def n(self) -> int:
        return len(self.partner_of_worker)

    def firm_partners(self) -> tuple[int, ...]:
        out = [0] * self.n
        for w, f in enumerate(self.partner_of_worker):
            out[f] = w
        return tuple(out)

    def pairs(self) -> list[tuple[int, int]]:
        return list(enumerate(self.partner_of_worker))

    def transposed(self) -> "Matching":
        return Matching(self.firm_partners())

    def __getitem__(self, w: int) -> int:
        return self.partner_of_worker[w]


def _check_ids(inst: Instance, m: Matching, w: int, f: int) -> None:
    if m.n != inst.n:
        raise InputError(f"matching has size {m.n}, instance has size {inst.n}")
    if not (0 <= w < inst.n and 0 <= f < inst.n):
        raise InputError(f"pair ({w}, {f}) out of range for n={inst.n}")


def is_blocking_pair(inst: Instance, m: Matching, w: int, f: int) -> bool:
    _check_ids(inst, m, w, f)
    fw = m.partner_of_worker[w]
    if fw == f:
        return False
    wf = m.firm_partners()[f]
    return inst.worker_rank[w][f] < inst.worker_rank[w][fw] and inst.firm_rank[f][w] < inst.firm_rank[f][wf]


def blocking_pairs(inst: Instance, m: Matching) -> list[tuple[int, int]]:
    """All blocking pairs, in (worker, firm) lexicographic order."""
    if m.n != inst.n:
        raise InputError(f"matching has size {m.n}, instance has size {inst.n}")
    mf = m.firm_partners()
    out = []
    for w in range(inst.n):
        rw = inst.worker_rank[w]
        cur = m.partner_of_worker[w]
        for f in inst.worker_prefs[w][: rw[cur]]:
            rf = inst.firm_rank[f]
            if rf[w] < rf[mf[f]]:
                out.append((w, f))
    return sorted(out)


def is_stable(inst: Instance, m: Matching) -> bool:
    if m.n != inst.n:
        raise InputError(f"matching has size {m.n}, instance has size {inst.n}")
    mf = m.firm_partners()
    for w in range(inst.n):
        rw = inst.worker_rank[w]
        for f in inst.worker_prefs[w][: rw[m.partner_of_worker[w]]]:
            rf = inst.firm_rank[f]
            if rf[w] < rf[mf[f]]:
                return False
    return True


@dataclass(frozen=True)
class PerturbationProfile:
    changed_workers: frozenset[int]
    changed_firms: frozenset[int]

    @property
    def p(self) -> int:
        return len(self.changed_workers)

    @property
    def q(self) -> int:
        return len(self.changed_firms)

    @property
    def agents(self) -> list[tuple[Side, int]]:
        return [("worker", w) for w in sorted(self.changed_workers)] + [
            ("firm", f) for f in sorted(self.changed_firms)
        ]


def classify_pair(a: Instance, b: Instance) -> PerturbationProfile:
    if a.n != b.n:
        raise InputError(f"instances have different sizes {a.n} and {b.n}")
    cw = frozenset(w for w in range(a.n) if a.worker_prefs[w] != b.worker_prefs[w])
    cf = frozenset(f for f in range(a.n) if a.firm_prefs[f] != b.firm_prefs[f])
    return PerturbationProfile(cw, cf)


def merged_profile(instances: Sequence[Instance]) -> PerturbationProfile:
    """Agents whose list differs between the first instance and any other."""
    cw: set[int] = set()
    cf: set[int] = set()
    for other in instances[1:]:
        prof = classify_pair(instances[0], other)
        cw |= prof.changed_workers
        cf |= prof.changed_firms
    return PerturbationProfile(frozenset(cw), frozenset(cf))


def apply_upward_shift(inst: Instance, side: Side, agent: int, target: int, k: int) -> Instance:
    """Move ``target`` up ``k`` places in the list of (``side``, ``agent``)."""
    _check_side(side)
    if not (0 <= agent < inst.n and 0 <= target < inst.n):
        raise InputError(f"agent {agent} or target {target} out of range")
    if k < 0:
        raise InputError(f"shift amount must be non-negative, got {k}")
    lst = list(inst.prefs(side)[agent])
    pos = lst.index(target)
    if k > pos:
        raise InputError(f"cannot shift target at position {pos} up by {k}")
    if k == 0:
        return inst
    lst.pop(pos)
    lst.insert(pos - k, target)
    if side == "worker":
        return inst.with_lists(workers={agent: lst})
    return inst.with_lists(firms={agent: lst})


def random_instance(n: int, rng: random.Random) -> Instance:
    def perm():
        p = list(range(n))
        rng.shuffle(p)
        return tuple(p)

    return Instance(n, tuple(perm() for _ in range(n)), tuple(perm() for _ in range(n)))


def generate_pair(n: int, p: int, q: int, seed: int) -> tuple[Instance, Instance]:
    """Random ``A`` plus a ``B`` differing on exactly ``p`` workers and ``q`` firms."""
    if not (0 <= p <= n and 0 <= q <= n):
        raise InputError(f"need 0 <= p,q <= n, got p={p}, q={q}, n={n}")
    if n == 1 and (p or q):
        raise InputError("a market of size 1 admits no preference change")
    rng = random.Random(seed)
    a = random_instance(n, rng)
    workers = rng.sample(range(n), p)
    firms = rng.sample(range(n), q)

    def redraw(old: tuple[int, ...]) -> tuple[int, ...]:
        lst = list(old)
        while tuple(lst) == old:
            rng.shuffle(lst)
        return tuple(lst)

    b = a.with_lists(
        workers={w: redraw(a.worker_prefs[w]) for w in workers},
        firms={f: redraw(a.firm_prefs[f]) for f in firms},
    )
    return a, b


@dataclass(frozen=True)
class UpwardShift:
    side: Side
    agent: int
    target: int
    k: int


def generate_upward_shift(n: int, seed: int) -> tuple[Instance, Instance, UpwardShift]:
    """Random instance and a random non-trivial single upward shift of it."""
    if n < 2:
        raise InputError("upward shifts need n >= 2")
    rng = random.Random(seed)
    a = random_instance(n, rng)
    side: Side = rng.choice(SIDES)
    agent = rng.randrange(n)
    pos = rng.randrange(1, n)
    target = a.prefs(side)[agent][pos]
    k = rng.randint(1, pos)
    return a, apply_upward_shift(a, side, agent, target, k), UpwardShift(side, agent, target, k)


@dataclass(frozen=True)
class MatchingSet:
    """Finite set of matchings, ordered by the dominance order of ``instance``.

    Members are kept sorted by partner array so iteration is deterministic.
    """

    matchings: tuple[Matching, ...]
    instance: Instance

    def __post_init__(self):
        ms = tuple(sorted(set(self.matchings)))
        for m in ms:
            if m.n != self.instance.n:
                raise InputError("matching size differs from instance size")
        object.__setattr__(self, "matchings", ms)

    def __len__(self) -> int:
        return len(self.matchings)

    def __iter__(self):
        return iter(self.matchings)

    def __contains__(self, m: object) -> bool:
        return m in self.as_set()

    def as_set(self) -> frozenset[Matching]:
        return frozenset(self.matchings)

    def with_instance(self, inst: Instance) -> "MatchingSet":
        return MatchingSet(self.matchings, inst)
