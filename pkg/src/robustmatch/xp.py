"""Robust stable matchings for arbitrary perturbations by guessing partners.

Every agent whose list differs between the two instances gets a guessed
partner.  The guess is rejected if it is blocked inside the guessed part,
otherwise the remaining agents form a truncated instance with incomplete
lists whose perfect stable matchings complete the guess.  The cost grows
as ``n`` to the power of the number of changed agents.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .errors import InputError, InvariantViolation
from .instance import Instance, Matching, Side, classify_pair
from .rotations import build_rotation_poset, enumerate_lattice

__all__ = [
    "PartialAssignment",
    "TruncatedInstance",
    "partial_assignments",
    "truncate",
    "robust_xp_decide",
    "robust_xp_enumerate",
    "XPStats",
]

Agent = tuple[Side, int]


@dataclass(frozen=True)
class PartialAssignment:
    """Injective guess ``worker -> firm`` covering every changed agent."""

    pairs: tuple[tuple[int, int], ...]
    changed: tuple[Agent, ...] = ()

    def __post_init__(self):
        ws = [w for w, _ in self.pairs]
        fs = [f for _, f in self.pairs]
        if len(set(ws)) != len(ws) or len(set(fs)) != len(fs):
            raise InputError(f"partial assignment is not injective: {self.pairs}")
        got = {("worker", w) for w in ws} | {("firm", f) for f in fs}
        missing = [a for a in self.changed if a not in got]
        if missing:
            raise InputError(f"changed agents left unassigned: {missing}")
        object.__setattr__(self, "pairs", tuple(sorted(self.pairs)))

    @property
    def workers(self) -> frozenset[int]:
        return frozenset(w for w, _ in self.pairs)

    @property
    def firms(self) -> frozenset[int]:
        return frozenset(f for _, f in self.pairs)

    def partner_of_worker(self) -> dict[int, int]:
        return dict(self.pairs)

    def partner_of_firm(self) -> dict[int, int]:
        return {f: w for w, f in self.pairs}


@dataclass(frozen=True)
class TruncatedInstance:
    """Instance on the unguessed agents; lists are suffix-truncated.

    ``worker_lists[w]`` holds firms in preference order (original ids).
    Lists may be incomplete; a pair is acceptable only if each lists the other.
    """

    workers: tuple[int, ...]
    firms: tuple[int, ...]
    worker_lists: dict[int, tuple[int, ...]] = field(hash=False)
    firm_lists: dict[int, tuple[int, ...]] = field(hash=False)

    def acceptable(self, w: int, f: int) -> bool:
        return f in self.worker_lists[w] and w in self.firm_lists[f]

    def deferred_acceptance(self) -> dict[int, int]:
        """Worker-proposing DA with incomplete lists; returns matched workers only."""
        frank = {f: {w: i for i, w in enumerate(lst)} for f, lst in self.firm_lists.items()}
        nxt = {w: 0 for w in self.workers}
        held: dict[int, int] = {}
        free = list(reversed(self.workers))
        while free:
            w = free.pop()
            lst = self.worker_lists[w]
            while nxt[w] < len(lst):
                f = lst[nxt[w]]
                nxt[w] += 1
                r = frank[f]
                if w not in r:
                    continue
                cur = held.get(f)
                if cur is None:
                    held[f] = w
                    break
                if r[w] < r[cur]:
                    held[f] = w
                    free.append(cur)
                    break
        return {w: f for f, w in held.items()}

    def completed(self) -> tuple[Instance, list[int], list[int]]:
        """Complete-list instance on 0-based local ids, plus the id maps.

        Each list starts with the mutually acceptable partners in order and
        continues with everyone else.  When ``self`` has a perfect stable
        matching, both extreme stable matchings agree with ``self``, so every
        stable matching of the completion uses acceptable pairs only.
        """
        wi = {w: i for i, w in enumerate(self.workers)}
        fi = {f: i for i, f in enumerate(self.firms)}
        wp = []
        for w in self.workers:
            head = [fi[f] for f in self.worker_lists[w] if self.acceptable(w, f)]
            seen = set(head)
            wp.append(head + [j for j in range(len(self.firms)) if j not in seen])
        fp = []
        for f in self.firms:
            head = [wi[w] for w in self.firm_lists[f] if self.acceptable(w, f)]
            seen = set(head)
            fp.append(head + [i for i in range(len(self.workers)) if i not in seen])
        return Instance.from_lists(wp, fp), list(self.workers), list(self.firms)


def _changed(a: Instance, b: Instance) -> tuple[Agent, ...]:
    prof = classify_pair(a, b)
    return tuple(("worker", w) for w in sorted(prof.changed_workers)) + tuple(
        ("firm", f) for f in sorted(prof.changed_firms)
    )


def partial_assignments(a: Instance, b: Instance) -> Iterator[PartialAssignment]:
    """All valid guesses, workers first then firms, partners ascending."""
    n = a.n
    changed = _changed(a, b)
    w_of_f: dict[int, int] = {}
    f_of_w: dict[int, int] = {}

    def rec(i: int) -> Iterator[PartialAssignment]:
        if i == len(changed):
            yield PartialAssignment(tuple(f_of_w.items()), changed)
            return
        side, x = changed[i]
        if side == "worker":
            if x in f_of_w:
                yield from rec(i + 1)
                return
            for f in range(n):
                if f in w_of_f:
                    continue
                f_of_w[x], w_of_f[f] = f, x
                yield from rec(i + 1)
                del f_of_w[x], w_of_f[f]
        else:
            if x in w_of_f:
                yield from rec(i + 1)
                return
            for w in range(n):
                if w in f_of_w:
                    continue
                f_of_w[w], w_of_f[x] = x, w
                yield from rec(i + 1)
                del f_of_w[w], w_of_f[x]

    yield from rec(0)


def _blocked_inside(insts: tuple[Instance, ...], pa: PartialAssignment) -> bool:
    pw, pf = pa.partner_of_worker(), pa.partner_of_firm()
    for inst in insts:
        wr, fr = inst.worker_rank, inst.firm_rank
        for w, fw in pw.items():
            for f, wf in pf.items():
                if f != fw and wr[w][f] < wr[w][fw] and fr[f][w] < fr[f][wf]:
                    return True
    return False


def truncate(a: Instance, b: Instance, pa: PartialAssignment) -> TruncatedInstance | None:
    """Truncated instance for ``pa``, or ``None`` when ``pa`` is blocked inside."""
    if a.n != b.n:
        raise InputError("instances have different sizes")
    insts = (a, b)
    if _blocked_inside(insts, pa):
        return None
    n = a.n
    tw, tf = pa.workers, pa.firms
    uw = tuple(w for w in range(n) if w not in tw)
    uf = tuple(f for f in range(n) if f not in tf)
    # cut[b] = best rank (in b's own list) of a guessed agent that b must beat
    wcut = {w: n for w in uw}
    fcut = {f: n for f in uf}
    pw, pf = pa.partner_of_worker(), pa.partner_of_firm()
    for inst in insts:
        wr, fr = inst.worker_rank, inst.firm_rank
        for x, fx in pw.items():
            for f in uf:
                if wr[x][f] < wr[x][fx]:
                    fcut[f] = min(fcut[f], a.firm_rank[f][x])
        for y, wy in pf.items():
            for w in uw:
                if fr[y][w] < fr[y][wy]:
                    wcut[w] = min(wcut[w], a.worker_rank[w][y])
    # unguessed agents have identical lists in both instances, so a's lists serve
    wl = {w: tuple(f for f in a.worker_prefs[w][: wcut[w]] if f not in tf) for w in uw}
    fl = {f: tuple(w for w in a.firm_prefs[f][: fcut[f]] if w not in tw) for f in uf}
    return TruncatedInstance(uw, uf, wl, fl)


@dataclass
class XPStats:
    assignments: int = 0
    rejected_inside: int = 0
    imperfect: int = 0


def _merge(n: int, pa: PartialAssignment, rest: dict[int, int]) -> Matching:
    out = [-1] * n
    for w, f in pa.pairs:
        out[w] = f
    for w, f in rest.items():
        out[w] = f
    return Matching(tuple(out))


def _perfect(x: TruncatedInstance, m: dict[int, int]) -> bool:
    return len(m) == len(x.workers)


def robust_xp_decide(a: Instance, b: Instance, stats: XPStats | None = None) -> Matching | None:
    """Some matching stable under both instances, or ``None`` if none exists."""
    stats = stats if stats is not None else XPStats()
    for pa in partial_assignments(a, b):
        stats.assignments += 1
        x = truncate(a, b, pa)
        if x is None:
            stats.rejected_inside += 1
            continue
        m = x.deferred_acceptance()
        if _perfect(x, m):
            return _merge(a.n, pa, m)
        stats.imperfect += 1
    return None


def robust_xp_enumerate(a: Instance, b: Instance, stats: XPStats | None = None) -> Iterator[Matching]:
    """Every matching stable under both instances, each exactly once."""
    stats = stats if stats is not None else XPStats()
    for pa in partial_assignments(a, b):
        stats.assignments += 1
        x = truncate(a, b, pa)
        if x is None:
            stats.rejected_inside += 1
            continue
        if not x.workers:
            yield _merge(a.n, pa, {})
            continue
        # one stable matching decides perfectness for all of them
        if not _perfect(x, x.deferred_acceptance()):
            stats.imperfect += 1
            continue
        local, ws, fs = x.completed()
        for lm in enumerate_lattice(build_rotation_poset(local), local):
            rest = {ws[i]: fs[j] for i, j in enumerate(lm.partner_of_worker)}
            bad = [(w, f) for w, f in rest.items() if not x.acceptable(w, f)]
            if bad:
                raise InvariantViolation(f"completed instance matched unacceptable pairs {bad}")
            yield _merge(a.n, pa, rest)
