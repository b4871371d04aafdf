"""Dominance order, join/meet and (semi-)sublattice predicates.

``join`` gives every worker the worse of its two partners and ``meet`` the
better one.  The worker-optimal matching therefore sits at the bottom of the
join direction: it dominates every other stable matching.
"""

from __future__ import annotations

from typing import Iterable

from .errors import InputError, NoUniqueExtremumError, NotAMatchingError
from .instance import Instance, Matching, MatchingSet, Side, is_stable

__all__ = [
    "MatchingSet",
    "dominates",
    "join",
    "meet",
    "is_sublattice",
    "is_join_semi_sublattice",
    "is_meet_semi_sublattice",
    "extremal",
    "upward_shift_predicate",
]


def dominates(inst: Instance, m1: Matching, m2: Matching) -> bool:
    """Every worker weakly prefers its ``m1`` partner to its ``m2`` partner."""
    r = inst.worker_rank
    return all(r[w][m1[w]] <= r[w][m2[w]] for w in range(inst.n))


def _combine(inst: Instance, m1: Matching, m2: Matching, worse: bool) -> Matching:
    if m1.n != inst.n or m2.n != inst.n:
        raise InputError("matching size differs from instance size")
    r = inst.worker_rank
    out = []
    for w in range(inst.n):
        a, b = m1[w], m2[w]
        if (r[w][a] > r[w][b]) == worse:
            out.append(a)
        else:
            out.append(b)
    if len(set(out)) != inst.n:
        raise NotAMatchingError(f"pointwise combination {tuple(out)} assigns a firm twice")
    return Matching(tuple(out))


def join(inst: Instance, m1: Matching, m2: Matching) -> Matching:
    return _combine(inst, m1, m2, worse=True)


def meet(inst: Instance, m1: Matching, m2: Matching) -> Matching:
    return _combine(inst, m1, m2, worse=False)


def _closed_under(s: MatchingSet, op) -> bool:
    members = s.as_set()
    ms = list(s)
    for i, a in enumerate(ms):
        for b in ms[i + 1:]:
            try:
                c = op(s.instance, a, b)
            except NotAMatchingError:
                return False
            if c not in members:
                return False
    return True


def is_join_semi_sublattice(s: MatchingSet) -> bool:
    return _closed_under(s, join)


def is_meet_semi_sublattice(s: MatchingSet) -> bool:
    return _closed_under(s, meet)


def is_sublattice(s: MatchingSet) -> bool:
    return is_join_semi_sublattice(s) and is_meet_semi_sublattice(s)


def extremal(s: MatchingSet, side: Side) -> Matching | None:
    """Worker-optimal (``side='worker'``) or firm-optimal member of ``s``.

    Returns ``None`` for an empty set and raises when no single member
    dominates (is dominated by) all the others.
    """
    if side not in ("worker", "firm"):
        raise InputError(f"bad side {side!r}")
    ms = list(s)
    if not ms:
        return None
    inst = s.instance
    if side == "worker":
        cands = [a for a in ms if all(dominates(inst, a, b) for b in ms)]
    else:
        cands = [a for a in ms if all(dominates(inst, b, a) for b in ms)]
    if len(cands) != 1:
        raise NoUniqueExtremumError(f"{len(cands)} extremal candidates for side={side}")
    return cands[0]


def upward_shift_predicate(inst: Instance, side: Side, agent: int, target: int, k: int,
                           m: Matching) -> bool:
    """Closed-form test for membership in M_A minus M_B after an upward shift.

    ``inst`` is the instance before the shift; (``side``, ``agent``) moves
    ``target`` up ``k`` places.  ``m`` belongs to the difference iff it is
    stable under ``inst``, it pairs ``agent`` with one of the ``k`` agents
    that ``target`` jumps over, and ``target`` is paired with someone it
    ranks below ``agent``.
    """
    if not is_stable(inst, m):
        return False
    lst = inst.prefs(side)[agent]
    pos = lst.index(target)
    if not 1 <= k <= pos:
        raise InputError(f"shift of {k} impossible from position {pos}")
    jumped = set(lst[pos - k: pos])
    if side == "firm":
        f, w = agent, target
        mine = m.firm_partners()[f]
        return mine in jumped and inst.worker_rank[w][m[w]] > inst.worker_rank[w][f]
    w, f = agent, target
    theirs = m.firm_partners()[f]
    return m[w] in jumped and inst.firm_rank[f][theirs] > inst.firm_rank[f][w]


def matching_set(matchings: Iterable[Matching], inst: Instance) -> MatchingSet:
    return MatchingSet(tuple(matchings), inst)
