"""Rotations, the rotation poset and enumeration of its closed sets.

Element ids of a :class:`RotationPoset`: ``0`` is the source dummy ``s``,
``1..R`` are the proper rotations in the order they were eliminated along
one maximal chain (a linear extension of the precedence order) and ``R + 1``
is the sink dummy ``t``.  Sets of elements are passed around as frozensets in
the public API; internally the poset uses integer bitmasks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

from .errors import ContractViolation, InputError, InvariantViolation
from .da import deferred_acceptance
from .instance import Instance, Matching, is_stable


@dataclass(frozen=True)
class Rotation:
    """Cyclic list of (worker, firm) pairs; worker ``i`` moves to firm ``i+1``."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if len(self.pairs) < 2:
            raise InputError("a rotation needs at least two pairs")

    def moves(self) -> list[tuple[int, int, int]]:
        """(worker, old firm, new firm) for every member of the cycle."""
        r = len(self.pairs)
        return [(w, f, self.pairs[(i + 1) % r][1]) for i, (w, f) in enumerate(self.pairs)]

    def canonical(self) -> "Rotation":
        i = min(range(len(self.pairs)), key=lambda j: self.pairs[j])
        return Rotation(self.pairs[i:] + self.pairs[:i])


def bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(elems: Iterable[int]) -> int:
    m = 0
    for e in elems:
        m |= 1 << e
    return m


class Poset:
    """Finite poset with distinguished bottom ``s`` and top ``t``.

    ``order`` lists the elements in a linear extension.  ``below[v]`` is the
    bitmask of strict predecessors, ``above[v]`` of strict successors.
    """

    def __init__(self, size: int, order: Sequence[int], below: Sequence[int], s: int, t: int):
        self.size = size
        self.order = tuple(order)
        self.below = tuple(below)
        self.s = s
        self.t = t
        above = [0] * size
        for v in range(size):
            for u in bits(self.below[v]):
                above[u] |= 1 << v
        self.above = tuple(above)
        self.full = (1 << size) - 1
        hasse = []
        for v in self.order:
            covered = 0
            for u in bits(self.below[v]):
                covered |= self.below[u]
            for u in bits(self.below[v] & ~covered):
                hasse.append((u, v))
        self.hasse = tuple(hasse)

    @property
    def elements(self) -> range:
        return range(self.size)

    def precedes(self, u: int, v: int) -> bool:
        return bool(self.below[v] >> u & 1)

    def comparable(self, u: int, v: int) -> bool:
        return u == v or self.precedes(u, v) or self.precedes(v, u)

    def is_closed_mask(self, mask: int) -> bool:
        return all(self.below[v] & ~mask == 0 for v in bits(mask))

    def is_closed(self, c: Iterable[int]) -> bool:
        return self.is_closed_mask(to_mask(c))

    def is_proper_mask(self, mask: int) -> bool:
        return bool(mask >> self.s & 1) and not mask >> self.t & 1 and self.is_closed_mask(mask)

    def down_closure(self, mask: int) -> int:
        out = mask
        for v in bits(mask):
            out |= self.below[v]
        return out

    def up_closure(self, mask: int) -> int:
        out = mask
        for v in bits(mask):
            out |= self.above[v]
        return out

    def ideal_masks(self, v: int) -> tuple[int, int, int, int]:
        """Bitmasks of (I_v, J_v, I'_v, J'_v): strict/weak down- and up-sets."""
        b = 1 << v
        return self.below[v], self.below[v] | b, self.above[v], self.above[v] | b

    def dual(self) -> "Poset":
        """Same elements with the order reversed and the dummies swapped."""
        return Poset(self.size, tuple(reversed(self.order)), self.above, self.t, self.s)

    def to_dot(self, name: str = "poset", labels: dict[int, str] | None = None) -> str:
        labels = labels or {}
        lines = [f"digraph {name} {{"]
        for v in self.order:
            lab = labels.get(v, "s" if v == self.s else "t" if v == self.t else str(v))
            lines.append(f'  {v} [label="{lab}"];')
        for u, v in self.hasse:
            lines.append(f"  {u} -> {v};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _next_firm(inst: Instance, cur: Sequence[int], inv: Sequence[int], w: int) -> int | None:
    """s_M(w): first firm after w's partner that prefers w to its own partner."""
    wp = inst.worker_prefs[w]
    fr = inst.firm_rank
    for pos in range(inst.worker_rank[w][cur[w]] + 1, inst.n):
        f = wp[pos]
        if fr[f][w] < fr[f][inv[f]]:
            return f
    return None


def _exposed(inst: Instance, cur: Sequence[int]) -> list[Rotation]:
    n = inst.n
    inv = [0] * n
    for w, f in enumerate(cur):
        inv[f] = w
    nxt: list[int | None] = []
    for w in range(n):
        f = _next_firm(inst, cur, inv, w)
        nxt.append(None if f is None else inv[f])
    state = [0] * n  # 0 unseen, 1 on current path, 2 done
    found = []
    for start in range(n):
        path = []
        w: int | None = start
        while w is not None and state[w] == 0:
            state[w] = 1
            path.append(w)
            w = nxt[w]
        if w is not None and state[w] == 1:
            cyc = path[path.index(w):]
            found.append(Rotation(tuple((x, cur[x]) for x in cyc)).canonical())
        for x in path:
            state[x] = 2
    return sorted(found, key=lambda r: r.pairs)


def exposed_rotations(inst: Instance, m: Matching) -> list[Rotation]:
    if not is_stable(inst, m):
        raise ContractViolation("exposed_rotations needs a stable matching")
    return _exposed(inst, m.partner_of_worker)


def eliminate(m: Matching, rho: Rotation, inst: Instance | None = None) -> Matching:
    """Apply ``rho`` to ``m``.  With ``inst`` given, exposure is verified."""
    if inst is not None:
        if not is_stable(inst, m) or rho.canonical() not in _exposed(inst, m.partner_of_worker):
            raise ContractViolation("rotation is not exposed in the matching")
    elif any(m[w] != f for w, f in rho.pairs):
        raise ContractViolation("rotation pairs are not in the matching")
    cur = list(m.partner_of_worker)
    for w, _old, new in rho.moves():
        cur[w] = new
    return Matching(tuple(cur))


class RotationPoset(Poset):
    """Precedence order on the rotations of one instance plus ``s`` and ``t``."""

    def __init__(self, inst: Instance, rotations: Sequence[Rotation], below: Sequence[int], m0: Matching):
        size = len(rotations) + 2
        super().__init__(size, range(size), below, 0, size - 1)
        self.instance = inst
        self.rotations = tuple(rotations)
        self.m0 = m0

    @property
    def s_id(self) -> int:
        return self.s

    @property
    def t_id(self) -> int:
        return self.t

    def rotation(self, v: int) -> Rotation:
        if not 1 <= v <= len(self.rotations):
            raise InputError(f"element {v} is not a proper rotation")
        return self.rotations[v - 1]

    def proper_mask(self) -> int:
        return self.full & ~(1 << self.s) & ~(1 << self.t)

    def matching_of_mask(self, mask: int) -> Matching:
        """Matching generated by the proper rotations in ``mask``.

        Dummies are ignored and ``mask`` is assumed closed; elimination runs
        in id order, which is a linear extension.
        """
        cur = list(self.m0.partner_of_worker)
        for v in bits(mask & self.proper_mask()):
            for w, _old, new in self.rotations[v - 1].moves():
                cur[w] = new
        return Matching(tuple(cur))

    def labels(self) -> dict[int, str]:
        out = {self.s: "s", self.t: "t"}
        for i, rho in enumerate(self.rotations, start=1):
            out[i] = f"{i}: " + " ".join(f"({w + 1},{f + 1})" for w, f in rho.pairs)
        return out

    def to_dot(self, name: str = "rotations", labels: dict[int, str] | None = None) -> str:
        return super().to_dot(name, labels or self.labels())


def build_rotation_poset(inst: Instance) -> RotationPoset:
    m0 = deferred_acceptance(inst, "worker")
    cur = list(m0.partner_of_worker)
    rotations: list[Rotation] = []
    while True:
        exp = _exposed(inst, cur)
        if not exp:
            break
        rho = exp[0]
        rotations.append(rho)
        for w, _old, new in rho.moves():
            cur[w] = new
    R = len(rotations)
    n = inst.n
    direct: list[set[int]] = [set() for _ in range(R + 2)]

    # element id of the rotation that moves worker w to firm f
    moved_to: dict[tuple[int, int], int] = {}
    # per firm: (element id, old worker, new worker) in chain order
    firm_moves: list[list[tuple[int, int, int]]] = [[] for _ in range(n)]
    for k, rho in enumerate(rotations, start=1):
        for w, old, new in rho.moves():
            if (w, new) in moved_to:
                raise InvariantViolation(f"two rotations move worker {w} to firm {new}")
            moved_to[(w, new)] = k
        pr = rho.pairs
        for i, (w, f) in enumerate(pr):
            firm_moves[f].append((k, w, pr[i - 1][0]))

    fr = inst.firm_rank
    m0_firm = m0.firm_partners()
    for k, rho in enumerate(rotations, start=1):
        for w, old, new in rho.moves():
            # the rotation that brought w to its current firm comes first
            j = moved_to.get((w, old))
            if j is not None:
                direct[k].add(j)
            # w drops past every firm strictly between old and new; each of
            # them must already have been moved above w
            wp = inst.worker_prefs[w]
            wr = inst.worker_rank[w]
            for pos in range(wr[old] + 1, wr[new]):
                f = wp[pos]
                if fr[f][m0_firm[f]] < fr[f][w]:
                    continue
                hit = None
                for j2, before, after in firm_moves[f]:
                    if fr[f][after] < fr[f][w] <= fr[f][before]:
                        hit = j2
                        break
                if hit is None:
                    raise InvariantViolation(f"no rotation moves firm {f} above worker {w}")
                direct[k].add(hit)
    below = [0] * (R + 2)
    for k in range(1, R + 1):
        mask = 1  # s precedes everything
        for j in direct[k]:
            if j >= k:
                raise InvariantViolation("precedence contradicts elimination order")
            mask |= below[j] | (1 << j)
        below[k] = mask
    below[R + 1] = (1 << (R + 1)) - 1
    return RotationPoset(inst, rotations, below, m0)


def _ids(p: Poset, c: Iterable[int]) -> int:
    mask = to_mask(c)
    if mask >> p.size:
        raise InputError("closed set mentions unknown elements")
    return mask


def matching_from_closed_set(p: RotationPoset, inst: Instance, c: Iterable[int]) -> Matching:
    if inst != p.instance:
        raise InputError("poset was built for a different instance")
    mask = _ids(p, c)
    if not p.is_closed_mask(mask):
        raise InputError("set is not closed under precedence")
    if not mask >> p.s & 1 or mask >> p.t & 1:
        raise InputError("closed set must contain s and exclude t")
    return p.matching_of_mask(mask)


def principal_ideals(p: Poset, v: int) -> tuple[frozenset[int], ...]:
    """(I_v, J_v, I'_v, J'_v) as frozensets."""
    if not 0 <= v < p.size:
        raise InputError(f"unknown element {v}")
    return tuple(frozenset(bits(m)) for m in p.ideal_masks(v))


def iter_ideals(preds: Sequence[int], fixed_in: int = 0, fixed_out: int = 0,
                on_add: Callable[[int], None] | None = None,
                on_remove: Callable[[int], None] | None = None) -> Iterator[int]:
    """Closed subsets of a DAG whose items ``0..k-1`` are topologically ordered.

    ``preds[i]`` is the bitmask of items that must accompany item ``i``.
    Items in ``fixed_in`` are always included, those in ``fixed_out`` never.
    Yields bitmasks.  Excluding an item is always possible, so every branch of
    the search reaches a leaf and consecutive yields are at most ``2k`` steps
    apart.  ``on_add``/``on_remove`` let callers maintain state incrementally.
    """
    k = len(preds)
    mask = 0
    # explicit stack of (index, phase): phase 0 try include, 1 try exclude, 2 done
    stack = [[0, 0]]
    while stack:
        top = stack[-1]
        i, phase = top
        if i == k:
            yield mask
            stack.pop()
            continue
        bit = 1 << i
        if phase == 0:
            top[1] = 1
            if not fixed_out & bit and preds[i] & ~mask == 0:
                mask |= bit
                if on_add:
                    on_add(i)
                stack.append([i + 1, 0])
                continue
            top[1] = 2
            if fixed_in & bit:
                stack.pop()
                continue
            stack.append([i + 1, 0])
            continue
        if phase == 1:
            top[1] = 2
            if mask & bit:
                mask &= ~bit
                if on_remove:
                    on_remove(i)
            if fixed_in & bit:
                stack.pop()
                continue
            stack.append([i + 1, 0])
            continue
        stack.pop()


def _apply_to(cur: list[int], rho: Rotation, forward: bool) -> None:
    for w, old, new in rho.moves():
        cur[w] = new if forward else old


def enumerate_lattice(p: RotationPoset, inst: Instance) -> Iterator[Matching]:
    """Every stable matching exactly once, maintained incrementally."""
    if inst != p.instance:
        raise InputError("poset was built for a different instance")
    rots = p.rotations
    preds = [p.below[v] >> 1 & ((1 << len(rots)) - 1) for v in range(1, len(rots) + 1)]
    cur = list(p.m0.partner_of_worker)

    def add(i):
        _apply_to(cur, rots[i], True)

    def remove(i):
        _apply_to(cur, rots[i], False)

    for _ in iter_ideals(preds, on_add=add, on_remove=remove):
        yield Matching(tuple(cur))


def enumerate_closed_sets(p: Poset) -> Iterator[frozenset[int]]:
    """Proper closed sets (contain s, exclude t) of any poset in ``p.order``."""
    pos = {v: i for i, v in enumerate(p.order)}
    preds = []
    for v in p.order:
        preds.append(to_mask(pos[u] for u in bits(p.below[v])))
    fin = 1 << pos[p.s]
    fout = 1 << pos[p.t]
    for mask in iter_ideals(preds, fixed_in=fin, fixed_out=fout):
        yield frozenset(p.order[i] for i in bits(mask))
