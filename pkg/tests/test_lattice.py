import pytest
from hypothesis import given, strategies as st

from robustmatch.errors import NoUniqueExtremumError
from robustmatch.instance import MatchingSet, is_stable
from robustmatch.lattice import (
    dominates,
    extremal,
    is_join_semi_sublattice,
    is_meet_semi_sublattice,
    is_sublattice,
    join,
    meet,
    upward_shift_predicate,
)
from robustmatch.oracle import all_stable_bruteforce
from robustmatch.instance import generate_upward_shift
from robustmatch.da import deferred_acceptance

from conftest import instances


@given(instances(), st.data())
def test_join_meet_stay_stable(inst, data):
    s = list(all_stable_bruteforce(inst))
    x, y = data.draw(st.sampled_from(s)), data.draw(st.sampled_from(s))
    j, m = join(inst, x, y), meet(inst, x, y)
    assert is_stable(inst, j) and is_stable(inst, m)
    assert dominates(inst, m, x) and dominates(inst, x, j)


@given(instances())
def test_extremes_are_da(inst):
    s = all_stable_bruteforce(inst)
    assert extremal(s, "worker") == deferred_acceptance(inst, "worker")
    assert extremal(s, "firm") == deferred_acceptance(inst, "firm")
    assert is_sublattice(s)


@given(instances(min_n=2), st.data())
def test_subset_predicates_by_definition(inst, data):
    s = list(all_stable_bruteforce(inst))
    sub = data.draw(st.lists(st.sampled_from(s), unique=True))
    ms = MatchingSet(tuple(sub), inst)
    jc = all(join(inst, x, y) in ms for x in sub for y in sub)
    mc = all(meet(inst, x, y) in ms for x in sub for y in sub)
    assert is_join_semi_sublattice(ms) == jc
    assert is_meet_semi_sublattice(ms) == mc
    assert is_sublattice(ms) == (jc and mc)


def test_extremal_of_antichain_raises():
    from robustmatch.instance import Instance

    w = [[0, 1, 2], [1, 2, 0], [2, 0, 1]]
    f = [[1, 2, 0], [2, 0, 1], [0, 1, 2]]
    inst = Instance.from_lists(w, f)
    s = list(all_stable_bruteforce(inst))
    mid = [m for m in s if m not in (extremal(MatchingSet(tuple(s), inst), "worker"),
                                     extremal(MatchingSet(tuple(s), inst), "firm"))]
    assert len(mid) == 1
    two = MatchingSet((s[0], s[0]), inst)
    assert extremal(two, "worker") == s[0]
    assert extremal(MatchingSet((), inst), "firm") is None


def test_extremal_needs_unique_candidate():
    from robustmatch.instance import Instance, Matching

    inst = Instance.from_lists([[0, 1], [0, 1]], [[0, 1], [0, 1]])
    # the two perfect matchings are incomparable in dominance
    with pytest.raises(NoUniqueExtremumError):
        extremal(MatchingSet((Matching((0, 1)), Matching((1, 0))), inst), "worker")


@given(st.integers(2, 6), st.integers(0, 10**6))
def test_upward_shift_predicate_matches_difference(n, seed):
    a, b, sh = generate_upward_shift(n, seed)
    for m in all_stable_bruteforce(a):
        assert upward_shift_predicate(a, sh.side, sh.agent, sh.target, sh.k, m) == (not is_stable(b, m))
