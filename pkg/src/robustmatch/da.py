"""Deferred acceptance: classic, multi-room robust, and compound-instance.

All proposal loops are synchronous: every proposer acts, then every receiver
answers, then rejections are applied.  Runs are capped at ``n*n + n`` rounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import InputError, InvariantViolation, PreconditionError
from .instance import Instance, Matching, Side, blocking_pairs, merged_profile

__all__ = [
    "RunLog",
    "deferred_acceptance",
    "worker_optimal_robust",
    "firm_optimal_robust",
    "CompoundInstance",
    "compound",
    "is_strongly_stable",
    "worker_optimal_strong",
    "firm_optimal_strong",
]


@dataclass
class RunLog:
    """Round counter, ordered (worker, firm) rejections and optional trace."""

    verbose: bool = False
    rounds: int = 0
    rejections: list[tuple[int, int]] = field(default_factory=list)
    trace: list[str] = field(default_factory=list)

    def note(self, line: str) -> None:
        if self.verbose:
            self.trace.append(line)


def _cap(n: int) -> int:
    return n * n + n


def deferred_acceptance(inst: Instance, side: Side = "worker") -> Matching:
    """Proposer-optimal stable matching; ``side`` names the proposers."""
    if side not in ("worker", "firm"):
        raise InputError(f"bad side {side!r}")
    if side == "firm":
        return deferred_acceptance(inst.transposed(), "worker").transposed()
    n = inst.n
    nxt = [0] * n
    holder = [-1] * n
    free = list(range(n - 1, -1, -1))
    fr = inst.firm_rank
    while free:
        w = free.pop()
        f = inst.worker_prefs[w][nxt[w]]
        nxt[w] += 1
        h = holder[f]
        if h < 0:
            holder[f] = w
        elif fr[f][w] < fr[f][h]:
            holder[f] = w
            free.append(h)
        else:
            free.append(w)
    out = [0] * n
    for f, w in enumerate(holder):
        out[w] = f
    return Matching(tuple(out))


def _check_rooms(instances: Sequence[Instance]) -> int:
    if not instances:
        raise InputError("need at least one instance")
    n = instances[0].n
    if any(x.n != n for x in instances):
        raise InputError("instances have different sizes")
    return n


def _blocked_rejections(rooms: Sequence[Instance], m: Matching, side: Side) -> list[tuple[int, int]]:
    """Safe extra rejections when the rooms agree on ``m`` but some room blocks it.

    For a blocking pair (w, f) in room I, no robust matching keeps the
    receiving side's current pair: with workers proposing f drops its
    partner, with firms proposing w drops its partner.  Both follow because
    the other agent of the pair already holds its best uncrossed option.
    """
    fp = m.firm_partners()
    out = []
    for inst in rooms:
        for w, f in blocking_pairs(inst, m):
            pair = (fp[f], f) if side == "worker" else (w, m[w])
            if pair not in out:
                out.append(pair)
    return out


def _worker_rooms(rooms: Sequence[Instance], log: RunLog) -> Matching | None:
    """Workers propose in every room; a rejection anywhere crosses everywhere."""
    n = rooms[0].n
    crossed = [0] * n
    for rnd in range(1, _cap(n) + 1):
        log.rounds = rnd
        new: list[tuple[int, int]] = []
        seen = set()
        assignments = []
        for ri, inst in enumerate(rooms):
            offers: list[list[int]] = [[] for _ in range(n)]
            choice = [0] * n
            for w in range(n):
                f = next((f for f in inst.worker_prefs[w] if not crossed[w] >> f & 1), None)
                if f is None:
                    log.note(f"round {rnd}: worker {w + 1} has no firm left")
                    return None
                offers[f].append(w)
                choice[w] = f
                log.note(f"round {rnd} room {ri}: worker {w + 1} proposes to firm {f + 1}")
            for f, ws in enumerate(offers):
                if len(ws) < 2:
                    continue
                best = min(ws, key=lambda w: inst.firm_rank[f][w])
                for w in ws:
                    if w != best and (w, f) not in seen:
                        seen.add((w, f))
                        new.append((w, f))
                        log.note(f"round {rnd} room {ri}: firm {f + 1} rejects worker {w + 1}")
            assignments.append(tuple(choice))
        if not new:
            if any(a != assignments[0] for a in assignments):
                raise InvariantViolation(f"rooms ended with different matchings: {assignments}")
            m = Matching(assignments[0])
            new = _blocked_rejections(rooms, m, "worker")
            if not new:
                return m
            log.note(f"round {rnd}: agreed matching is blocked, {len(new)} extra rejections")
        for w, f in new:
            crossed[w] |= 1 << f
            log.rejections.append((w, f))
    raise InvariantViolation("round cap exceeded")


def _firm_rooms(rooms: Sequence[Instance], log: RunLog) -> Matching | None:
    """Firms propose in every room; workers also reject preemptively."""
    n = rooms[0].n
    crossed = [0] * n  # per firm, bitmask of workers that rejected it
    for rnd in range(1, _cap(n) + 1):
        log.rounds = rnd
        new: list[tuple[int, int]] = []
        seen = set()
        assignments = []
        for ri, inst in enumerate(rooms):
            offers: list[list[int]] = [[] for _ in range(n)]
            choice = [0] * n  # worker index per firm
            for f in range(n):
                w = next((w for w in inst.firm_prefs[f] if not crossed[f] >> w & 1), None)
                if w is None:
                    log.note(f"round {rnd}: firm {f + 1} has no worker left")
                    return None
                offers[w].append(f)
                choice[f] = w
                log.note(f"round {rnd} room {ri}: firm {f + 1} proposes to worker {w + 1}")
            for w, fs in enumerate(offers):
                if not fs:
                    continue
                wr = inst.worker_rank[w]
                best = min(fs, key=lambda f: wr[f])
                for f in inst.worker_prefs[w][wr[best] + 1:]:
                    if not crossed[f] >> w & 1 and (w, f) not in seen:
                        seen.add((w, f))
                        new.append((w, f))
                        log.note(f"round {rnd} room {ri}: worker {w + 1} rejects firm {f + 1}")
            inv = [0] * n
            for f, w in enumerate(choice):
                inv[w] = f
            assignments.append(tuple(inv))
        if not new:
            if any(a != assignments[0] for a in assignments):
                raise InvariantViolation(f"rooms ended with different matchings: {assignments}")
            m = Matching(assignments[0])
            new = _blocked_rejections(rooms, m, "firm")
            if not new:
                return m
            log.note(f"round {rnd}: agreed matching is blocked, {len(new)} extra rejections")
        for w, f in new:
            crossed[f] |= 1 << w
            log.rejections.append((w, f))
    raise InvariantViolation("round cap exceeded")


def _robust(instances: Sequence[Instance], side: Side, log: RunLog | None, force: bool) -> Matching | None:
    _check_rooms(instances)
    log = log if log is not None else RunLog()
    prof = merged_profile(instances)
    direct = _worker_rooms if side == "worker" else _firm_rooms
    flipped = _firm_rooms if side == "worker" else _worker_rooms
    if prof.p <= 1 or (prof.q > 1 and force):
        return direct(instances, log)
    if prof.q <= 1:
        tlog = RunLog(verbose=log.verbose)
        m = flipped([x.transposed() for x in instances], tlog)
        log.rounds = tlog.rounds
        log.rejections.extend((w, f) for f, w in tlog.rejections)
        log.trace.extend(tlog.trace)
        return None if m is None else m.transposed()
    raise PreconditionError(
        f"robust deferred acceptance is only guaranteed when p <= 1 or q <= 1 (got p={prof.p}, q={prof.q})"
    )


def worker_optimal_robust(a: Instance, b: Instance, *more: Instance, log: RunLog | None = None,
                          force: bool = False) -> Matching | None:
    """Worker-optimal matching stable under every instance, or ``None``.

    Guaranteed when at most one worker changes.  When several workers but at
    most one firm change, the roles are swapped internally (trace lines then
    name the swapped roles).  ``force`` runs the rooms
    outside the guaranteed regime; the answer is then unverified.
    """
    return _robust((a, b) + more, "worker", log, force)


def firm_optimal_robust(a: Instance, b: Instance, *more: Instance, log: RunLog | None = None,
                        force: bool = False) -> Matching | None:
    return _robust((a, b) + more, "firm", log, force)


# ------------------------------------------------------------ compound


@dataclass(frozen=True)
class CompoundInstance:
    """Total worker orders, firm orders intersected over several sources.

    ``firm_above[f][w]`` is a bitmask of the workers ``f`` strictly prefers
    to ``w`` in every source; workers outside it (and not ``w``) are ones
    ``f`` is indifferent to or likes less.
    """

    n: int
    worker_prefs: tuple[tuple[int, ...], ...]
    worker_rank: tuple[tuple[int, ...], ...]
    firm_above: tuple[tuple[int, ...], ...]

    def firm_prefers(self, f: int, w1: int, w2: int) -> bool:
        return bool(self.firm_above[f][w2] >> w1 & 1)

    def indifferent(self, f: int, w1: int, w2: int) -> bool:
        return w1 != w2 and not self.firm_prefers(f, w1, w2) and not self.firm_prefers(f, w2, w1)

    def above_sets(self) -> list[list[set[int]]]:
        return [[{u for u in range(self.n) if row[w] >> u & 1} for w in range(self.n)] for row in self.firm_above]


def compound(a: Instance, b: Instance, *more: Instance) -> CompoundInstance:
    srcs = (a, b) + more
    n = _check_rooms(srcs)
    if any(x.worker_prefs != a.worker_prefs for x in srcs):
        raise PreconditionError("compound instances need identical worker lists")
    above = []
    for f in range(n):
        row = []
        for w in range(n):
            mask = 0
            for u in range(n):
                if u != w and all(x.firm_rank[f][u] < x.firm_rank[f][w] for x in srcs):
                    mask |= 1 << u
            row.append(mask)
        above.append(tuple(row))
    return CompoundInstance(n, a.worker_prefs, a.worker_rank, tuple(above))


def is_strongly_stable(x: CompoundInstance, m: Matching) -> bool:
    """No pair where the worker strictly gains and the firm does not lose."""
    inv = m.firm_partners()
    for w in range(x.n):
        for f in x.worker_prefs[w][: x.worker_rank[w][m[w]]]:
            if not x.firm_prefers(f, inv[f], w):
                return False
    return True


def worker_optimal_strong(x: CompoundInstance, log: RunLog | None = None) -> Matching | None:
    """Workers propose; a firm keeps a proposer only if it strictly beats
    every other worker that has ever proposed to it."""
    log = log if log is not None else RunLog()
    n = x.n
    crossed = [0] * n
    ever = [0] * n
    below = [[0] * n for _ in range(n)]  # below[f][w]: workers f ranks strictly under w
    for f in range(n):
        for w in range(n):
            for u in range(n):
                if x.firm_above[f][u] >> w & 1:
                    below[f][w] |= 1 << u
    for rnd in range(1, _cap(n) + 1):
        log.rounds = rnd
        offers: list[list[int]] = [[] for _ in range(n)]
        choice = [0] * n
        for w in range(n):
            f = next((f for f in x.worker_prefs[w] if not crossed[w] >> f & 1), None)
            if f is None:
                log.note(f"round {rnd}: worker {w + 1} has no firm left")
                return None
            offers[f].append(w)
            choice[w] = f
            log.note(f"round {rnd}: worker {w + 1} proposes to firm {f + 1}")
        new = []
        for f, ws in enumerate(offers):
            if not ws:
                continue
            for w in ws:
                ever[f] |= 1 << w
            keep = next((w for w in ws if ever[f] & ~(1 << w) & ~below[f][w] == 0), None)
            for w in ws:
                if w != keep:
                    new.append((w, f))
                    log.note(f"round {rnd}: firm {f + 1} rejects worker {w + 1}")
        if not new:
            return Matching(tuple(choice))
        for w, f in new:
            crossed[w] |= 1 << f
            log.rejections.append((w, f))
    raise InvariantViolation("round cap exceeded")


def firm_optimal_strong(x: CompoundInstance, log: RunLog | None = None) -> Matching | None:
    """Firms propose to all their best uncrossed workers at once.

    The loop stops at the first round without rejections; at that point
    every firm holds exactly one acceptance.
    """
    log = log if log is not None else RunLog()
    n = x.n
    full = (1 << n) - 1
    crossed = [0] * n
    for rnd in range(1, _cap(n) + 1):
        log.rounds = rnd
        offers: list[list[int]] = [[] for _ in range(n)]
        for f in range(n):
            live = full & ~crossed[f]
            if not live:
                log.note(f"round {rnd}: firm {f + 1} has no worker left")
                return None
            for w in range(n):
                if live >> w & 1 and x.firm_above[f][w] & live == 0:
                    offers[w].append(f)
                    log.note(f"round {rnd}: firm {f + 1} proposes to worker {w + 1}")
        new = []
        held = [-1] * n
        for w, fs in enumerate(offers):
            if not fs:
                continue
            best = min(fs, key=lambda f: x.worker_rank[w][f])
            held[w] = best
            for f in fs:
                if f != best:
                    new.append((w, f))
                    log.note(f"round {rnd}: worker {w + 1} rejects firm {f + 1}")
        if not new:
            if sorted(held) != list(range(n)):
                raise InvariantViolation("round without rejections left a firm unmatched")
            return Matching(tuple(held))
        for w, f in new:
            crossed[f] |= 1 << w
            log.rejections.append((w, f))
    raise InvariantViolation("round cap exceeded")
