import pytest
from hypothesis import given, strategies as st

from robustmatch.errors import InputError
from robustmatch.instance import Matching
from robustmatch.io import format_matching, parse_instance, parse_matching, read_instance, serialize_instance

from conftest import instances

GOOD = """# two by two
n 2
W 1 : 1 2
W 2 : 2 1
F 1 : 2 1   # trailing comment
F 2 : 1 2
"""


def test_parse_small():
    inst = parse_instance(GOOD)
    assert inst.worker_prefs == ((0, 1), (1, 0))
    assert inst.firm_prefs == ((1, 0), (0, 1))


@pytest.mark.parametrize(
    "text, needle",
    [
        ("", "empty"),
        ("m 2\n", "bad header"),
        ("n 2\nW 1 : 1 2\nW 2 : 2 1\nF 1 : 1 2\n", "missing firm"),
        ("n 2\nW 1 : 1 1\n", "duplicate ids"),
        ("n 2\nW 3 : 1 2\n", "out of range"),
        ("n 2\nW 1 : 1\n", "lists 1 ids"),
        ("n 2\nW 1 : 1 2\nW 1 : 2 1\n", "listed twice"),
        ("n 2\nX 1 : 1 2\n", "bad line"),
        ("n 2\nW 1 : a b\n", "expected integers"),
    ],
)
def test_parse_errors(text, needle):
    with pytest.raises(InputError, match=needle):
        parse_instance(text)


def test_error_carries_line_number():
    with pytest.raises(InputError) as e:
        parse_instance("n 2\nW 1 : 1 2\nW 2 : 2 2\n")
    assert e.value.line == 3


def test_read_missing_file(tmp_path):
    with pytest.raises(InputError, match="cannot read"):
        read_instance(tmp_path / "nope.txt")


@given(instances(max_n=8))
def test_instance_round_trip(inst):
    assert parse_instance(serialize_instance(inst)) == inst


@given(st.integers(1, 8).flatmap(lambda n: st.permutations(range(n))))
def test_matching_round_trip(perm):
    m = Matching(tuple(perm))
    assert parse_matching(format_matching(m)) == m
