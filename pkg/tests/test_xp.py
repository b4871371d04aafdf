import pytest
from hypothesis import given

from robustmatch.errors import InputError
from robustmatch.instance import classify_pair, generate_pair, is_stable
from robustmatch.oracle import robust_bruteforce
from robustmatch.xp import (
    PartialAssignment,
    XPStats,
    partial_assignments,
    robust_xp_decide,
    robust_xp_enumerate,
    truncate,
)

from conftest import pairs


def test_partial_assignment_checks():
    with pytest.raises(InputError):
        PartialAssignment(((0, 1), (1, 1)))
    with pytest.raises(InputError):
        PartialAssignment(((0, 1),), (("firm", 0),))
    pa = PartialAssignment(((2, 0), (0, 1)), (("worker", 0),))
    assert pa.pairs == ((0, 1), (2, 0))
    assert pa.partner_of_firm() == {1: 0, 0: 2}


@given(pairs(max_n=5))
def test_guess_count(ab):
    a, b = ab
    prof = classify_pair(a, b)
    guesses = list(partial_assignments(a, b))
    assert len(guesses) == len(set(guesses))
    for pa in guesses:
        for w in prof.changed_workers:
            assert w in pa.workers
        for f in prof.changed_firms:
            assert f in pa.firms


@given(pairs(max_n=7))
def test_enumerate_equals_oracle(ab):
    a, b = ab
    got = list(robust_xp_enumerate(a, b))
    assert len(got) == len(set(got))
    assert set(got) == robust_bruteforce([a, b]).as_set()


@given(pairs(max_n=7))
def test_decide_agrees(ab):
    a, b = ab
    stats = XPStats()
    d = robust_xp_decide(a, b, stats)
    s = robust_bruteforce([a, b]).as_set()
    assert (d is None) == (not s)
    if d is not None:
        assert is_stable(a, d) and is_stable(b, d)
    assert stats.assignments >= stats.rejected_inside + stats.imperfect


@given(pairs(max_n=6))
def test_truncated_lists_are_suffix_free(ab):
    a, b = ab
    for pa in partial_assignments(a, b):
        x = truncate(a, b, pa)
        if x is None:
            continue
        for w, lst in x.worker_lists.items():
            assert not set(lst) & pa.firms
            assert list(lst) == [f for f in a.worker_prefs[w] if f in lst]


def test_unchanged_pair_gives_whole_lattice():
    a, _ = generate_pair(5, 0, 0, 11)
    from robustmatch.oracle import all_stable_bruteforce

    assert set(robust_xp_enumerate(a, a)) == all_stable_bruteforce(a).as_set()
