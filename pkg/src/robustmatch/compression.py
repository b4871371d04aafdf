"""Compressions of a rotation poset and the bouquet search.

An edge ``(u, v)`` added to the Hasse diagram forces every closed set that
contains ``v`` to contain ``u`` as well.  A closed set *separates* the edge
when it holds ``v`` without ``u`` and *crosses* it when it holds ``u``
without ``v``.  Shrinking the strongly connected components of the Hasse
diagram plus the extra edges gives a compression, whose closed sets generate
exactly the matchings whose closed sets separate no extra edge.

Membership oracles receive a frozenset of poset elements and must judge the
matching generated by its proper rotations; whether the dummies ``s``/``t``
are present is irrelevant to them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Literal, Sequence

import networkx as nx

from .errors import ContractViolation, InputError, InvariantViolation, PreconditionError
from .instance import Instance, Matching, Side, classify_pair, is_stable, merged_profile
from .rotations import Poset, RotationPoset, bits, build_rotation_poset, iter_ideals, to_mask

Edge = tuple[int, int]
EdgeSet = frozenset  # frozenset[Edge]
Member = Callable[[frozenset], bool]


def separates(c: Iterable[int], e: Edge) -> bool:
    c = c if isinstance(c, (set, frozenset)) else set(c)
    u, v = e
    return v in c and u not in c


def crosses(c: Iterable[int], e: Edge) -> bool:
    c = c if isinstance(c, (set, frozenset)) else set(c)
    u, v = e
    return u in c and v not in c


def _separates_mask(mask: int, e: Edge) -> bool:
    u, v = e
    return bool(mask >> v & 1) and not mask >> u & 1


def is_splitting_mask(mask: int, edges: Iterable[Edge]) -> bool:
    return all((mask >> u & 1) == (mask >> v & 1) for u, v in edges)


def respects_edges(mask: int, edges: Iterable[Edge]) -> bool:
    """True iff the closed set ``mask`` separates none of ``edges``."""
    return not any(_separates_mask(mask, e) for e in edges)


def _check_edges(p: Poset, edges: Iterable[Edge]) -> frozenset:
    out = frozenset((int(u), int(v)) for u, v in edges)
    for u, v in out:
        if not (0 <= u < p.size and 0 <= v < p.size):
            raise InputError(f"edge ({u}, {v}) mentions an unknown element")
    return out


def _forced_down(p: Poset, edges: Iterable[Edge]) -> list[int]:
    """Per element: everything a closed set containing it must also contain."""
    g = nx.DiGraph()
    g.add_nodes_from(p.elements)
    g.add_edges_from(p.hasse)
    g.add_edges_from(edges)
    out = [0] * p.size
    for v in p.elements:
        out[v] = to_mask(nx.ancestors(g, v))
    return out


def normalize_edges(p: Poset, edges: Iterable[Edge]) -> frozenset:
    """Drop edges that no proper, otherwise admissible closed set separates.

    Edges are examined in sorted order and removed one at a time, so the
    result is minimal: each kept edge is the only one some admissible closed
    set separates.
    """
    kept = sorted(_check_edges(p, edges))
    i = 0
    while i < len(kept):
        u, v = kept[i]
        rest = kept[:i] + kept[i + 1:]
        anc = _forced_down(p, rest)[v]
        # a proper set holding v must hold s and everything forced below v
        redundant = (
            u == v
            or anc >> u & 1
            or anc >> p.t & 1
            or v == p.t
            or u == p.s
        )
        if redundant:
            kept = rest
        else:
            i += 1
    return frozenset(kept)


@dataclass
class Compression:
    """Meta-elements (SCCs of Hasse diagram plus edges) and their order."""

    poset: Poset
    edges: frozenset
    metas: tuple[frozenset, ...]  # in a topological order
    meta_of: tuple[int, ...]
    meta_below: tuple[int, ...]  # bitmask over meta indices, strict predecessors
    a_s: int
    a_t: int

    @property
    def is_empty(self) -> bool:
        return self.a_s == self.a_t

    @property
    def meta_elements(self) -> tuple[frozenset, ...]:
        return self.metas

    def meta_hasse(self) -> list[tuple[int, int]]:
        out = []
        for v, below in enumerate(self.meta_below):
            covered = 0
            for u in bits(below):
                covered |= self.meta_below[u]
            out.extend((u, v) for u in bits(below & ~covered))
        return out

    def closed_sets(self) -> Iterator[frozenset]:
        """Element-level proper closed sets of the poset respecting the edges."""
        if self.is_empty:
            return
        for mask in iter_ideals(self.meta_below, fixed_in=1 << self.a_s, fixed_out=1 << self.a_t):
            yield frozenset(e for i in bits(mask) for e in self.metas[i])

    def admits(self, c: Iterable[int]) -> bool:
        mask = to_mask(c)
        return self.poset.is_proper_mask(mask) and respects_edges(mask, self.edges)

    def to_dot(self, name: str = "compression") -> str:
        p = self.poset
        labels = p.labels() if isinstance(p, RotationPoset) else {}
        lines = [f"digraph {name} {{", "  compound=true;"]
        for i, meta in enumerate(self.metas):
            tag = " (s)" if i == self.a_s else ""
            tag += " (t)" if i == self.a_t else ""
            lines.append(f"  subgraph cluster_{i} {{")
            lines.append(f'    label="meta {i}{tag}";')
            for v in sorted(meta):
                lab = labels.get(v, "s" if v == p.s else "t" if v == p.t else str(v))
                lines.append(f'    {v} [label="{lab}"];')
            lines.append("  }")
        for u, v in p.hasse:
            lines.append(f"  {u} -> {v};")
        for u, v in sorted(self.edges):
            lines.append(f"  {u} -> {v} [color=red];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def compress(p: Poset, edges: Iterable[Edge]) -> Compression:
    e = _check_edges(p, edges)
    g = nx.DiGraph()
    g.add_nodes_from(p.elements)
    g.add_edges_from(p.hasse)
    g.add_edges_from(e)
    cond = nx.condensation(g)
    mapping = cond.graph["mapping"]
    # stable topological order: break ties by smallest member position
    pos = {v: i for i, v in enumerate(p.order)}
    key = {c: min(pos[v] for v in cond.nodes[c]["members"]) for c in cond.nodes}
    topo = list(nx.lexicographical_topological_sort(cond, key=lambda c: key[c]))
    index = {c: i for i, c in enumerate(topo)}
    metas = tuple(frozenset(cond.nodes[c]["members"]) for c in topo)
    meta_of = [0] * p.size
    for v, c in mapping.items():
        meta_of[v] = index[c]
    below = [0] * len(topo)
    for c in topo:
        i = index[c]
        for d in cond.predecessors(c):
            j = index[d]
            below[i] |= below[j] | (1 << j)
    comp = Compression(p, e, metas, tuple(meta_of), tuple(below), meta_of[p.s], meta_of[p.t])
    if not comp.is_empty:
        for i, b in enumerate(below):
            if i != comp.a_s and not b >> comp.a_s & 1:
                raise InvariantViolation("meta-element not above the source meta-element")
            if i != comp.a_t and not below[comp.a_t] >> i & 1:
                raise InvariantViolation("meta-element not below the sink meta-element")
    return comp


def enumerate_sublattice(c: Compression, inst: Instance) -> Iterator[Matching]:
    """Matchings generated by the compression, each once, incrementally."""
    p = c.poset
    if not isinstance(p, RotationPoset):
        raise InputError("enumeration needs a compression of a rotation poset")
    if inst != p.instance:
        raise InputError("compression was built for a different instance")
    if c.is_empty:
        return
    cur = list(p.m0.partner_of_worker)
    groups = [sorted(v for v in meta if v not in (p.s, p.t)) for meta in c.metas]

    def add(i):
        for v in groups[i]:
            for w, _old, new in p.rotations[v - 1].moves():
                cur[w] = new

    def remove(i):
        for v in reversed(groups[i]):
            for w, old, _new in p.rotations[v - 1].moves():
                cur[w] = old

    for _ in iter_ideals(c.meta_below, fixed_in=1 << c.a_s, fixed_out=1 << c.a_t,
                         on_add=add, on_remove=remove):
        yield Matching(tuple(cur))


# ---------------------------------------------------------------- bouquets


class _Oracle:
    """Caches an element-set oracle on bitmasks."""

    def __init__(self, member: Callable[[int], bool]):
        self.member = member
        self.cache: dict[int, bool] = {}
        self.calls = 0

    def __call__(self, mask: int) -> bool:
        hit = self.cache.get(mask)
        if hit is None:
            self.calls += 1
            hit = bool(self.member(mask))
            self.cache[mask] = hit
        return hit


def _maximal(p: Poset, elems: Sequence[int]) -> list[int]:
    mask = to_mask(elems)
    return [v for v in elems if p.above[v] & mask == 0]


def _next_tail(p: Poset, S: int, m: Callable[[int], bool]) -> int | None:
    V = []
    for v in bits(S):
        _, _, Ip, Jp = p.ideal_masks(v)
        if m(p.full & ~Ip) and not m(p.full & ~Jp):
            V.append(v)
    top = _maximal(p, V)
    return top[0] if len(top) == 1 else None


def _flower(p: Poset, S: int, r: int, m: Callable[[int], bool]) -> list[int]:
    I_r = p.below[r]
    Y = 0
    for v in bits(I_r):
        J_v = p.below[v] | (1 << v)
        if m(J_v):
            Y |= J_v
    if Y == 0 and not m(1 << p.s):
        return [p.s]
    out = []
    for v in bits(S):
        I_v, J_v = p.below[v], p.below[v] | (1 << v)
        if m(Y | I_v) and not m(Y | J_v):
            out.append(v)
    return out


def _as_mask_oracle(member: Member) -> Callable[[int], bool]:
    return lambda mask: member(frozenset(bits(mask)))


def find_next_tail(p: Poset, S: Iterable[int], member: Member) -> int | None:
    """Maximal tail inside the splitting set ``S`` or ``None``."""
    return _next_tail(p, to_mask(S), _Oracle(_as_mask_oracle(member)))


def find_flower(p: Poset, S: Iterable[int], r: int, member: Member) -> frozenset:
    """Heads of the edges leaving tail ``r``."""
    return frozenset(_flower(p, to_mask(S), r, _Oracle(_as_mask_oracle(member))))


@dataclass
class Bouquet:
    """Output of the bouquet search, expressed on the poset it ran on.

    When the search ran on the dual order (``dual``), ``work_poset`` is that
    dual and ``edges`` gives the edges translated back to the original poset.
    """

    poset: Poset
    work_poset: Poset
    dual: bool
    tails: list[int] = field(default_factory=list)
    flowers: dict[int, frozenset] = field(default_factory=dict)
    splitting: dict[int, int] = field(default_factory=dict)  # tail -> S mask when found
    oracle_calls: int = 0

    @property
    def work_edges(self) -> frozenset:
        return frozenset((r, u) for r in self.tails for u in self.flowers[r])

    @property
    def edges(self) -> frozenset:
        if self.dual:
            return frozenset((v, u) for u, v in self.work_edges)
        return self.work_edges


def find_bouquet(p: Poset, member: Member, *, semi: Literal["join", "meet"] = "join") -> Bouquet:
    """Edge set defining the oracle-true sublattice L1.

    The oracle-false part L2 must be closed under join (``semi='join'``) or
    under meet (``semi='meet'``); the meet case runs on the dual order, where
    closed sets are complements.
    """
    base = _as_mask_oracle(member)
    if semi == "join":
        q, m = p, _Oracle(base)
    elif semi == "meet":
        q = p.dual()
        m = _Oracle(lambda mask: base(p.full & ~mask))
    else:
        raise InputError(f"semi must be 'join' or 'meet', got {semi!r}")
    out = Bouquet(p, q, semi == "meet")
    S = q.full
    if not m(q.full & ~(1 << q.t)):
        r: int | None = q.t
    else:
        r = _next_tail(q, S, m)
    while r is not None:
        if r in out.flowers:
            raise InvariantViolation(f"tail {r} found twice")
        F = frozenset(_flower(q, S, r, m))
        out.tails.append(r)
        out.flowers[r] = F
        out.splitting[r] = S
        rem = 0
        for u in F | {r}:
            rem |= q.above[u] | (1 << u)
        S &= ~rem
        r = _next_tail(q, S, m)
    out.oracle_calls = m.calls
    return out


def check_bouquet(b: Bouquet) -> list[str]:
    """Names of violated structural conditions; empty means all hold.

    Conditions, checked on the order the search ran on: tails form a chain,
    no two edges chain into a path of length two, heads of one flower are
    pairwise incomparable, and for tails ``r_i`` below ``r_j`` some splitting
    set holds ``F_{r_i}`` and ``r_i`` but nothing of ``F_{r_j}`` and ``r_j``.
    The last one is decided by the least candidate closure and cross-checked
    against the splitting sets recorded during the search.
    """
    q = b.work_poset
    edges = b.work_edges
    bad = []
    for i, x in enumerate(b.tails):
        for y in b.tails[i + 1:]:
            if not q.comparable(x, y):
                bad.append(f"chain: tails {x} and {y} incomparable")
    heads = {v for _, v in edges}
    tails = {u for u, _ in edges}
    for v in heads & tails:
        bad.append(f"two-path: element {v} is both head and tail")
    for r, F in b.flowers.items():
        fl = sorted(F)
        for i, x in enumerate(fl):
            for y in fl[i + 1:]:
                if q.comparable(x, y):
                    bad.append(f"incomparable heads: {x} and {y} in flower of {r}")
    for ri in b.tails:
        for rj in b.tails:
            if ri == rj or not q.precedes(ri, rj):
                continue
            want = to_mask(b.flowers[ri] | {ri})
            avoid = to_mask(b.flowers[rj] | {rj})
            closure = _splitting_closure(q, want, edges)
            if closure & avoid:
                bad.append(f"splitting set: none separates flowers of {ri} and {rj}")
                continue
            S = b.splitting[ri]
            if not (S & want == want and S & avoid == 0 and q.is_closed_mask(S)
                    and is_splitting_mask(S, edges)):
                bad.append(f"splitting set: recorded set for {ri} does not separate it from {rj}")
    return bad


def _splitting_closure(q: Poset, mask: int, edges: Iterable[Edge]) -> int:
    edges = list(edges)
    while True:
        new = q.down_closure(mask)
        for u, v in edges:
            if new >> u & 1 or new >> v & 1:
                new |= (1 << u) | (1 << v)
        if new == mask:
            return mask
        mask = new


# ---------------------------------------------------------------- hybrids


def stable_under(p: RotationPoset, inst: Instance) -> Member:
    """Oracle: is the matching generated in ``p`` stable under ``inst``?"""

    def member(c: frozenset) -> bool:
        return is_stable(inst, p.matching_of_mask(to_mask(c)))

    return member


def hybrid_instances_one_side(a: Instance, b: Instance, side: Side = "firm") -> list[Instance]:
    """Copies of ``a`` taking one changed agent's list from ``b`` each.

    With ``side='firm'`` the pair must change no worker; with
    ``side='worker'`` it must change no firm.
    """
    prof = classify_pair(a, b)
    if side == "firm":
        if prof.p:
            raise PreconditionError("firm hybrids need a pair that changes no worker")
        return [a.with_lists(firms={f: b.firm_prefs[f]}) for f in sorted(prof.changed_firms)]
    if side == "worker":
        if prof.q:
            raise PreconditionError("worker hybrids need a pair that changes no firm")
        return [a.with_lists(workers={w: b.worker_prefs[w]}) for w in sorted(prof.changed_workers)]
    raise InputError(f"bad side {side!r}")


def hybrid_instances_two_side(a: Instance, b: Instance) -> list[Instance]:
    """Copies of ``a`` taking the changed worker plus one changed firm from ``b``."""
    prof = classify_pair(a, b)
    if prof.p > 1:
        raise PreconditionError("two-sided hybrids need at most one changed worker")
    if prof.p == 0:
        return hybrid_instances_one_side(a, b, "firm")
    (w,) = prof.changed_workers
    if prof.q == 0:
        return [b]
    return [a.with_lists(workers={w: b.worker_prefs[w]}, firms={f: b.firm_prefs[f]})
            for f in sorted(prof.changed_firms)]


@dataclass
class RobustPoset:
    compression: Compression
    bouquets: list[Bouquet]
    hybrids: list[Instance]


def robust_poset_one_side(a: Instance, b: Instance, *more: Instance,
                          poset: RotationPoset | None = None) -> Compression:
    """Compression of the rotation poset of ``a`` generating the robust set.

    All instances must change only firms relative to ``a`` (or only
    workers).  One bouquet is found per single-agent hybrid and the union of
    their edges is compressed.
    """
    return robust_poset_details(a, b, *more, poset=poset).compression


def robust_poset_details(a: Instance, b: Instance, *more: Instance,
                         poset: RotationPoset | None = None) -> RobustPoset:
    others = (b,) + more
    prof = merged_profile((a,) + others)
    if prof.p and prof.q:
        raise PreconditionError("one-sided robust poset needs changes on one side only")
    p = poset if poset is not None else build_rotation_poset(a)
    if p.instance != a:
        raise InputError("poset was built for a different instance")
    side: Side = "worker" if prof.p else "firm"
    semi: Literal["join", "meet"] = "meet" if prof.p else "join"
    hybrids: list[Instance] = []
    for other in others:
        for h in hybrid_instances_one_side(a, other, side) if other != a else []:
            if h not in hybrids:
                hybrids.append(h)
    bouquets = [find_bouquet(p, stable_under(p, h), semi=semi) for h in hybrids]
    edges = frozenset().union(*(bq.edges for bq in bouquets))
    return RobustPoset(compress(p, edges), bouquets, hybrids)


def bouquet_for_pair(a: Instance, b: Instance, poset: RotationPoset | None = None) -> Bouquet:
    """Bouquet for a pair changing exactly one agent's list."""
    prof = classify_pair(a, b)
    if prof.p + prof.q != 1:
        raise PreconditionError("bouquet search needs exactly one changed agent")
    p = poset if poset is not None else build_rotation_poset(a)
    return find_bouquet(p, stable_under(p, b), semi="meet" if prof.p else "join")


def alternating_path(e1: Iterable[Edge], e2: Iterable[Edge], start: int, end: int) -> list[int] | None:
    """Vertices of the path ``start -> ... -> end`` if ``e1`` and ``e2`` form
    exactly one such path whose edges alternate between the two sets."""
    e1, e2 = set(e1), set(e2)
    if e1 & e2:
        return None
    out: dict[int, tuple[int, int]] = {}
    for tag, es in ((1, e1), (2, e2)):
        for u, v in es:
            if u in out:
                return None
            out[u] = (v, tag)
    path = [start]
    last_tag = 0
    used = 0
    while path[-1] != end:
        nxt = out.get(path[-1])
        if nxt is None:
            return None
        v, tag = nxt
        if tag == last_tag or v in path:
            return None
        path.append(v)
        last_tag = tag
        used += 1
    return path if used == len(e1) + len(e2) else None


def sublattice_matchings(c: Compression) -> list[Matching]:
    p = c.poset
    if not isinstance(p, RotationPoset):
        raise ContractViolation("needs a compression of a rotation poset")
    return list(enumerate_sublattice(c, p.instance))


def canonical_path_edges(p: Poset, e1: Iterable[Edge], e2: Iterable[Edge]) -> tuple[frozenset, frozenset] | None:
    """Rewrite two edge sets defining complementary sublattices as one path.

    Takes a shortest ``t -> s`` path through ``e1`` and ``e2``, replaces each
    run of same-set edges by a single edge from the run's start to its end,
    and drops every edge off the path.  Returns the two new edge sets, or
    ``None`` when no such path exists.  The caller is expected to confirm the
    rewritten sets still generate the same sublattices.
    """
    e1, e2 = _check_edges(p, e1), _check_edges(p, e2)
    g = nx.DiGraph()
    g.add_nodes_from(p.elements)
    g.add_edges_from(e1 | e2)
    try:
        path = nx.shortest_path(g, p.t, p.s)
    except nx.NetworkXNoPath:
        return None
    out: tuple[set, set] = (set(), set())
    start, colour = path[0], None
    for u, v in zip(path, path[1:]):
        c = 0 if (u, v) in e1 else 1
        if colour is not None and c != colour:
            out[colour].add((start, u))
            start = u
        colour = c
    if colour is not None:
        out[colour].add((start, path[-1]))
    return frozenset(out[0]), frozenset(out[1])
