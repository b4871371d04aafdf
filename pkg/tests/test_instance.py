import pytest
from hypothesis import given, strategies as st

from robustmatch.errors import InputError
from robustmatch.instance import (
    Instance,
    Matching,
    apply_upward_shift,
    blocking_pairs,
    classify_pair,
    generate_pair,
    generate_upward_shift,
    is_blocking_pair,
    is_stable,
)

from conftest import instances


def test_rejects_non_permutation():
    with pytest.raises(InputError):
        Instance.from_lists([[0, 0], [0, 1]], [[0, 1], [1, 0]])
    with pytest.raises(InputError):
        Instance.from_lists([[0, 1]], [[0]])


def test_matching_must_be_perfect():
    with pytest.raises(InputError):
        Matching((0, 0))
    assert Matching.from_pairs([(1, 0), (0, 1)]) == Matching((1, 0))


def test_blocking_pair_by_hand():
    # both workers like firm 0 best, firm 0 likes worker 1 best
    inst = Instance.from_lists([[0, 1], [0, 1]], [[1, 0], [1, 0]])
    m = Matching((0, 1))
    assert is_blocking_pair(inst, m, 1, 0)
    assert blocking_pairs(inst, m) == [(1, 0)]
    assert not is_stable(inst, m)
    assert is_stable(inst, Matching((1, 0)))


@given(instances())
def test_transpose_is_involution(inst):
    assert inst.transposed().transposed() == inst


@given(instances(), st.data())
def test_stability_survives_transpose(inst, data):
    m = Matching(tuple(data.draw(st.permutations(range(inst.n)))))
    assert is_stable(inst, m) == is_stable(inst.transposed(), m.transposed())


@given(st.integers(2, 7), st.integers(0, 7), st.integers(0, 7), st.integers(0, 10**6))
def test_generate_pair_hits_profile(n, p, q, seed):
    p, q = min(p, n), min(q, n)
    a, b = generate_pair(n, p, q, seed)
    prof = classify_pair(a, b)
    assert (prof.p, prof.q) == (p, q)
    assert generate_pair(n, p, q, seed) == (a, b)


@given(st.integers(2, 7), st.integers(0, 10**6))
def test_upward_shift_moves_one_agent(n, seed):
    a, b, sh = generate_upward_shift(n, seed)
    prof = classify_pair(a, b)
    assert prof.p + prof.q == 1
    before = a.prefs(sh.side)[sh.agent].index(sh.target)
    assert b.prefs(sh.side)[sh.agent].index(sh.target) == before - sh.k


def test_upward_shift_bounds():
    inst = Instance.from_lists([[0, 1, 2]] * 3, [[0, 1, 2]] * 3)
    with pytest.raises(InputError):
        apply_upward_shift(inst, "worker", 0, 1, 2)
    assert apply_upward_shift(inst, "worker", 0, 2, 2).worker_prefs[0] == (2, 0, 1)
