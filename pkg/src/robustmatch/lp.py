"""Exact-rational stable matching polytope: model, simplex, rounding, integrality.

Variables are ``x[w][f]`` flattened to ``w * n + f``.  For every instance
and every pair (w, f) the model has the blocking row

    sum of x[w][f'] over f' worse than f for w
      - sum of x[w'][f] over w' better than w for f   <= 0

plus the 2n assignment equalities and nonnegativity.  Everything is computed
with ``fractions.Fraction``; no floating point is used anywhere.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import BoundaryThetaError, InputError, InvariantViolation, SizeRefusal
from .instance import Instance, Matching

__all__ = [
    "FractionalMatching",
    "LpModel",
    "build_lp",
    "solve_feasible",
    "theta_round",
    "check_integrality",
    "IntegralityReport",
    "export_lp_text",
    "ExactLP",
]

MAX_N = 8
Row = dict[int, Fraction]


@dataclass(frozen=True)
class FractionalMatching:
    x: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        n = len(self.x)
        one = Fraction(1)
        if any(len(r) != n for r in self.x):
            raise InputError("fractional matching must be square")
        if any(v < 0 for r in self.x for v in r):
            raise InputError("negative entry in fractional matching")
        if any(sum(r) != one for r in self.x) or any(sum(self.x[w][f] for w in range(n)) != one for f in range(n)):
            raise InputError("fractional matching is not doubly stochastic")

    @property
    def n(self) -> int:
        return len(self.x)

    @classmethod
    def from_matching(cls, m: Matching) -> "FractionalMatching":
        n = m.n
        return cls(tuple(tuple(Fraction(int(m[w] == f)) for f in range(n)) for w in range(n)))

    @classmethod
    def average(cls, ms: Sequence[Matching]) -> "FractionalMatching":
        n, k = ms[0].n, len(ms)
        return cls(tuple(tuple(Fraction(sum(m[w] == f for m in ms), k) for f in range(n)) for w in range(n)))

    def is_integral(self) -> bool:
        return all(v.denominator == 1 for r in self.x for v in r)

    def to_matching(self) -> Matching:
        if not self.is_integral():
            raise InputError("fractional matching is not integral")
        return Matching(tuple(r.index(1) for r in self.x))

    def flat(self) -> list[Fraction]:
        return [v for r in self.x for v in r]

    def __str__(self) -> str:
        return "\n".join(" ".join(str(v) for v in r) for r in self.x)


@dataclass
class LpModel:
    n: int
    instances: tuple[Instance, ...]
    equalities: list[tuple[Row, Fraction, str]] = field(default_factory=list)
    inequalities: list[tuple[Row, Fraction, str]] = field(default_factory=list)

    @property
    def num_vars(self) -> int:
        return self.n * self.n

    def var(self, w: int, f: int) -> int:
        return w * self.n + f

    def is_feasible_point(self, x: Sequence[Fraction]) -> bool:
        if any(v < 0 for v in x):
            return False
        for row, rhs, _ in self.equalities:
            if sum(c * x[j] for j, c in row.items()) != rhs:
                return False
        for row, rhs, _ in self.inequalities:
            if sum(c * x[j] for j, c in row.items()) > rhs:
                return False
        return True


def build_lp(instances: Sequence[Instance]) -> LpModel:
    if not instances:
        raise InputError("need at least one instance")
    n = instances[0].n
    if any(x.n != n for x in instances):
        raise InputError("instances have different sizes")
    m = LpModel(n, tuple(instances))
    one = Fraction(1)
    for w in range(n):
        m.equalities.append(({m.var(w, f): one for f in range(n)}, one, f"worker {w + 1}"))
    for f in range(n):
        m.equalities.append(({m.var(w, f): one for w in range(n)}, one, f"firm {f + 1}"))
    for k, inst in enumerate(instances):
        for w in range(n):
            for f in range(n):
                row: Row = {}
                for f2 in inst.worker_prefs[w][inst.worker_rank[w][f] + 1:]:
                    row[m.var(w, f2)] = one
                for w2 in inst.firm_prefs[f][: inst.firm_rank[f][w]]:
                    row[m.var(w2, f)] = -one
                m.inequalities.append((row, Fraction(0), f"instance {k + 1} pair {w + 1},{f + 1}"))
    return m


def export_lp_text(m: LpModel) -> str:
    def term(j: int, c: Fraction) -> str:
        w, f = divmod(j, m.n)
        return f"{c.numerator}/{c.denominator} x_{w + 1}_{f + 1}"

    lines = [f"# n {m.n} instances {len(m.instances)} vars {m.num_vars}"]
    for row, rhs, name in m.equalities:
        lines.append(f"{' + '.join(term(j, c) for j, c in sorted(row.items()))} = {rhs.numerator}/{rhs.denominator}  # {name}")
    for row, rhs, name in m.inequalities:
        body = " + ".join(term(j, c) for j, c in sorted(row.items())) or "0"
        lines.append(f"{body} <= {rhs.numerator}/{rhs.denominator}  # {name}")
    for j in range(m.num_vars):
        lines.append(f"{term(j, Fraction(1))} >= 0/1")
    return "\n".join(lines) + "\n"


def _presolve(m: LpModel) -> set[int]:
    """Variables forced to zero by rows whose negative part is already zero."""
    zero: set[int] = set()
    changed = True
    while changed:
        changed = False
        for row, rhs, _ in m.inequalities:
            if rhs != 0:
                continue
            if any(c < 0 and j not in zero for j, c in row.items()):
                continue
            for j, c in row.items():
                if c > 0 and j not in zero:
                    zero.add(j)
                    changed = True
    return zero


class ExactLP:
    """Dense Fraction tableau over ``x >= 0`` with Bland's rule.

    Built once from a model; after ``phase1`` the tableau stays feasible,
    so successive ``optimize`` calls start from the last basis.
    """

    def __init__(self, m: LpModel):
        self.model = m
        self.zero = _presolve(m)
        self.cols = [j for j in range(m.num_vars) if j not in self.zero]
        pos = {j: i for i, j in enumerate(self.cols)}
        nx = len(self.cols)
        rows: list[tuple[Row, Fraction, bool]] = []
        for row, rhs, _ in m.equalities:
            rows.append(({pos[j]: c for j, c in row.items() if j in pos}, rhs, True))
        for row, rhs, _ in m.inequalities:
            r = {pos[j]: c for j, c in row.items() if j in pos}
            if all(c <= 0 for c in r.values()) and rhs >= 0:
                continue  # holds for every x >= 0
            rows.append((r, rhs, False))
        n_slack = sum(1 for _, _, eq in rows if not eq)
        n_art = sum(1 for _, _, eq in rows if eq)
        self.nx, self.n_slack, self.n_art = nx, n_slack, n_art
        width = nx + n_slack + n_art
        self.width = width
        zero = Fraction(0)
        self.T: list[list[Fraction]] = []
        self.basis: list[int] = []
        si, ai = nx, nx + n_slack
        for r, rhs, eq in rows:
            line = [zero] * (width + 1)
            for j, c in r.items():
                line[j] = c
            if rhs < 0:
                line = [-v for v in line]
                rhs = -rhs
                if not eq:
                    raise InvariantViolation("negative right-hand side on an inequality row")
            line[width] = rhs
            if eq:
                line[ai] = Fraction(1)
                self.basis.append(ai)
                ai += 1
            else:
                line[si] = Fraction(1)
                self.basis.append(si)
                si += 1
            self.T.append(line)
        self.pivots = 0
        self.feasible: bool | None = None

    def _pivot(self, r: int, c: int, obj: list[Fraction] | None) -> None:
        self.pivots += 1
        prow = self.T[r]
        inv = 1 / prow[c]
        prow = [v * inv for v in prow]
        self.T[r] = prow
        nz = [j for j, v in enumerate(prow) if v]
        for i, line in enumerate(self.T):
            if i == r:
                continue
            k = line[c]
            if k:
                for j in nz:
                    line[j] -= k * prow[j]
        if obj is not None:
            k = obj[c]
            if k:
                for j in nz:
                    obj[j] -= k * prow[j]
        self.basis[r] = c

    def _reduced(self, cost: Sequence[Fraction]) -> list[Fraction]:
        obj = list(cost) + [Fraction(0)]
        for i, b in enumerate(self.basis):
            k = cost[b]
            if k:
                line = self.T[i]
                for j, v in enumerate(line):
                    if v:
                        obj[j] -= k * v
        return obj

    def _run(self, cost: Sequence[Fraction], allowed: int) -> bool:
        """Minimize ``cost``; columns ``>= allowed`` may not enter.  False if unbounded."""
        obj = self._reduced(cost)
        while True:
            c = next((j for j in range(allowed) if obj[j] < 0), None)
            if c is None:
                return True
            best = None
            for i, line in enumerate(self.T):
                a = line[c]
                if a > 0:
                    ratio = line[-1] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return False
            self._pivot(best[1], c, obj)

    def phase1(self) -> bool:
        if self.feasible is not None:
            return self.feasible
        a0 = self.nx + self.n_slack
        cost = [Fraction(0)] * a0 + [Fraction(1)] * self.n_art
        self._run(cost, a0)
        if any(self.T[i][-1] != 0 for i, b in enumerate(self.basis) if b >= a0):
            self.feasible = False
            return False
        # drive zero-level artificials out of the basis; drop redundant rows
        i = 0
        while i < len(self.T):
            if self.basis[i] >= a0:
                c = next((j for j in range(a0) if self.T[i][j] != 0), None)
                if c is None:
                    del self.T[i], self.basis[i]
                    continue
                self._pivot(i, c, None)
            i += 1
        for line in self.T:
            del line[a0:-1]
        self.width = a0
        self.n_art = 0
        self.feasible = True
        return True

    def point(self) -> list[Fraction]:
        v = [Fraction(0)] * self.nx
        for i, b in enumerate(self.basis):
            if b < self.nx:
                v[b] = self.T[i][-1]
        full = [Fraction(0)] * self.model.num_vars
        for k, j in enumerate(self.cols):
            full[j] = v[k]
        return full

    def maximize(self, c: Sequence[Fraction]) -> tuple[Fraction, list[Fraction]]:
        """Maximum of ``c . x`` and an optimal vertex; the polytope is bounded."""
        if not self.phase1():
            raise InputError("maximize called on an infeasible model")
        cost = [-Fraction(c[j]) for j in self.cols] + [Fraction(0)] * self.n_slack
        if not self._run(cost, self.width):
            raise InvariantViolation("unbounded direction in a bounded polytope")
        x = self.point()
        return sum((Fraction(c[j]) * x[j] for j in range(len(x))), Fraction(0)), x


def _as_matrix(m: LpModel, x: Sequence[Fraction]) -> FractionalMatching:
    n = m.n
    return FractionalMatching(tuple(tuple(x[w * n + f] for f in range(n)) for w in range(n)))


def solve_feasible(m: LpModel) -> FractionalMatching | None:
    """A vertex of the polytope, or ``None`` when it is empty."""
    lp = ExactLP(m)
    if not lp.phase1():
        return None
    x = lp.point()
    if not m.is_feasible_point(x):
        raise InvariantViolation("phase one returned an infeasible point")
    return _as_matrix(m, x)


def theta_round(x: FractionalMatching, inst: Instance, theta) -> Matching:
    """Interval rounding at threshold ``theta`` in [0, 1).

    Worker intervals run from most to least preferred firm, firm intervals
    from least to most preferred worker; the piece containing ``theta``
    (half-open on the right) names the partner.
    """
    theta = Fraction(theta)
    if not 0 <= theta < 1:
        raise InputError(f"theta must lie in [0, 1), got {theta}")
    if x.n != inst.n:
        raise InputError("size mismatch between fractional matching and instance")

    def pick(order: Iterable[int], weight) -> int:
        acc = Fraction(0)
        chosen = None
        for y in order:
            v = weight(y)
            if not v:
                continue
            if acc == theta and acc > 0:
                raise BoundaryThetaError(f"theta {theta} lies on an interior interval boundary")
            if chosen is None and acc <= theta < acc + v:
                chosen = y
            acc += v
        if chosen is None:
            raise InvariantViolation("interval pieces do not cover [0, 1)")
        return chosen

    n = inst.n
    mu = [pick(inst.worker_prefs[w], lambda f, w=w: x.x[w][f]) for w in range(n)]
    mu_f = [pick(reversed(inst.firm_prefs[f]), lambda w, f=f: x.x[w][f]) for f in range(n)]
    for w, f in enumerate(mu):
        if mu_f[f] != w:
            raise InvariantViolation(f"rounding is not mutual: worker {w} -> firm {f} -> worker {mu_f[f]}")
    return Matching(tuple(mu))


# ------------------------------------------------------------ integrality


@dataclass
class IntegralityReport:
    integral: bool
    witness: FractionalMatching | None = None
    integral_points: int = 0
    facets: int = 0
    lps_solved: int = 0
    reason: str = ""

    @property
    def verdict(self) -> str:
        return "integral" if self.integral else "fractional-witness"


def _integral_points(m: LpModel, forbidden: set[int]) -> list[list[Fraction]]:
    n = m.n
    out = []
    used = [False] * n
    cur = [0] * n

    def rec(w: int) -> None:
        if w == n:
            x = [Fraction(0)] * (n * n)
            for ww, f in enumerate(cur):
                x[ww * n + f] = Fraction(1)
            if m.is_feasible_point(x):
                out.append(x)
            return
        for f in range(n):
            if not used[f] and w * n + f not in forbidden:
                used[f], cur[w] = True, f
                rec(w + 1)
                used[f] = False

    rec(0)
    return out


def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    a = [list(r) for r in rows]
    pivots: list[int] = []
    r = 0
    width = len(a[0]) if a else 0
    for c in range(width):
        p = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [v * inv for v in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                k = a[i][c]
                a[i] = [u - k * v for u, v in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def _null_space(rows: list[list[Fraction]], width: int) -> list[list[Fraction]]:
    if not rows:
        return [[Fraction(int(i == j)) for j in range(width)] for i in range(width)]
    red, piv = _rref(rows)
    free = [c for c in range(width) if c not in piv]
    basis = []
    for fc in free:
        v = [Fraction(0)] * width
        v[fc] = Fraction(1)
        for r, pc in enumerate(piv):
            v[pc] = -red[r][fc]
        basis.append(v)
    return basis


def _affine_equations(pts: list[list[Fraction]]) -> list[tuple[list[Fraction], Fraction]]:
    """Equations ``c . x = d`` cutting out the affine hull of ``pts``."""
    width = len(pts[0])
    rows = [p + [Fraction(-1)] for p in pts]
    return [(v[:width], v[width]) for v in _null_space(rows, width + 1)]


def _facets(pts: list[list[Fraction]]) -> list[tuple[list[Fraction], Fraction]]:
    """Facet inequalities ``a . x <= b`` of conv(pts) relative to its affine hull."""
    base = pts[0]
    diffs = [[u - v for u, v in zip(p, base)] for p in pts[1:]]
    if not diffs:
        return []
    red, piv = _rref(diffs)
    d = len(piv)
    if d == 0:
        return []
    # coordinates ``piv`` project the affine hull injectively
    proj = [[p[c] for c in piv] for p in pts]
    out: list[tuple[tuple[Fraction, ...], Fraction]] = []
    seen = set()
    for combo in itertools.combinations(range(len(pts)), d):
        rows = [proj[i] + [Fraction(-1)] for i in combo]
        ns = _null_space(rows, d + 1)
        if len(ns) != 1:
            continue
        a, b = ns[0][:d], ns[0][d]
        vals = [sum(x * y for x, y in zip(a, q)) for q in proj]
        if all(v <= b for v in vals):
            pass
        elif all(v >= b for v in vals):
            a, b = [-x for x in a], -b
        else:
            continue
        # scale to a canonical form for deduplication
        lead = next(x for x in a if x != 0)
        k = abs(lead)
        key = (tuple(x / k for x in a), b / k)
        if key in seen:
            continue
        seen.add(key)
        out.append(key)
    width = len(base)
    lifted = []
    for a, b in out:
        full = [Fraction(0)] * width
        for c, coef in zip(piv, a):
            full[c] = coef
        lifted.append((full, b))
    return lifted


def check_integrality(instances: Sequence[Instance]) -> IntegralityReport:
    """Decide whether every vertex of the polytope is integral.

    Integral points are 0/1 doubly stochastic, so they are exactly the
    matchings passing every row; call them V.  The polytope is integral iff
    it equals conv(V).  That is certified by optimizing over the polytope each
    equation of aff(V) in both directions and each facet of conv(V); an
    optimum off conv(V) is a vertex outside it, hence fractional.
    """
    m = build_lp(instances)
    if m.n > MAX_N:
        raise SizeRefusal(f"integrality check refuses n={m.n} (limit {MAX_N})")
    lp = ExactLP(m)
    rep = IntegralityReport(integral=True)
    feasible = lp.phase1()
    rep.lps_solved += 1
    pts = _integral_points(m, lp.zero)
    rep.integral_points = len(pts)
    if not pts:
        if feasible:
            rep.integral = False
            rep.witness = _as_matrix(m, lp.point())
            rep.reason = "polytope is nonempty but has no integral point"
        else:
            rep.reason = "polytope is empty"
        return rep
    if not feasible:
        raise InvariantViolation("integral point found in an infeasible model")

    def fail(x: list[Fraction], why: str) -> IntegralityReport:
        fm = _as_matrix(m, x)
        if fm.is_integral():
            raise InvariantViolation(f"integral optimum outside conv of integral points ({why})")
        rep.integral, rep.witness, rep.reason = False, fm, why
        return rep

    for c, d in _affine_equations(pts):
        for sign in (1, -1):
            val, x = lp.maximize([sign * v for v in c])
            rep.lps_solved += 1
            if val != sign * d:
                return fail(x, "vertex leaves the affine hull of the integral points")
    facets = _facets(pts)
    rep.facets = len(facets)
    for a, b in facets:
        val, x = lp.maximize(a)
        rep.lps_solved += 1
        if val > b:
            return fail(x, "vertex violates a facet of the integral hull")
    rep.reason = "polytope equals the convex hull of its integral points"
    return rep
