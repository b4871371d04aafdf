import io
import subprocess
import sys

import pytest

from robustmatch.cli import main
from robustmatch.corpus import CORPUS_DIR
from robustmatch.instance import generate_pair, is_stable
from robustmatch.io import parse_instance, parse_matching, serialize_instance


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def corpus(name, tag):
    return str(CORPUS_DIR / f"{name}_{tag}.txt")


@pytest.fixture
def pair_files(tmp_path):
    a, b = generate_pair(5, 1, 1, 3)
    pa, pb = tmp_path / "a.txt", tmp_path / "b.txt"
    pa.write_text(serialize_instance(a))
    pb.write_text(serialize_instance(b))
    return a, b, str(pa), str(pb)


def test_stable(pair_files):
    a, _, pa, _ = pair_files
    for side in ("worker", "firm"):
        code, text = run("stable", pa, "--side", side)
        assert code == 0 and is_stable(a, parse_matching(text))


def test_enumerate_count(pair_files):
    from robustmatch.oracle import all_stable_bruteforce

    a, _, pa, _ = pair_files
    code, text = run("enumerate", pa)
    assert code == 0
    assert text.strip().endswith(f"# {len(all_stable_bruteforce(a))} stable matchings")


def test_poset_dot(pair_files):
    _, _, pa, _ = pair_files
    code, text = run("poset", pa, "--dot")
    assert code == 0 and text.startswith("digraph")


def test_robust_optimal_and_xp_agree(pair_files):
    a, b, pa, pb = pair_files
    c1, t1 = run("robust-optimal", pa, pb)
    c2, t2 = run("robust-xp", pa, pb, "--enumerate")
    assert c1 == c2
    if c1 == 0:
        assert t1 in t2


def test_robust_optimal_refuses_two_by_two(tmp_path):
    a, b = generate_pair(4, 2, 2, 1)
    (tmp_path / "a").write_text(serialize_instance(a))
    (tmp_path / "b").write_text(serialize_instance(b))
    code, _ = run("robust-optimal", str(tmp_path / "a"), str(tmp_path / "b"))
    assert code == 2


def test_negative_exit():
    code, text = run("robust-xp", corpus("meet_escapes", "a"), corpus("meet_escapes", "b"))
    assert code == 0
    code, text = run("robust-xp", corpus("fractional_lp", "a"), corpus("fractional_lp", "b"), "--count-only")
    assert text.strip().startswith("#")


def test_bouquet_and_poset_commands():
    code, text = run("bouquet", corpus("single_firm_swap", "a"), corpus("single_firm_swap", "b"))
    assert code == 0 and "violation" not in text
    code, text = run("robust-poset", corpus("two_firms_permuted", "a"), corpus("two_firms_permuted", "b"), "--dot")
    assert code in (0, 1) and text.startswith("digraph")


def test_lp_check_and_export():
    code, text = run("lp-check", corpus("fractional_lp", "a"), corpus("fractional_lp", "b"))
    assert code == 0 and text.startswith("fractional-witness")
    code, text = run("lp-check", corpus("fractional_lp", "a"), corpus("fractional_lp", "b"), "--export")
    assert code == 0 and "<=" in text


def test_theta_round_rejects_bad_theta():
    args = ("theta-round", corpus("one_one_permuted", "a"), corpus("one_one_permuted", "b"))
    assert run(*args, "--theta", "1/3")[0] == 0
    assert run(*args, "--theta", "abc")[0] == 2
    assert run(*args, "--theta", "3/2")[0] == 2


def test_bad_input_exit(tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("n 2\nW 1 : 1 1\n")
    assert run("stable", str(bad))[0] == 2
    assert run("stable", str(tmp_path / "missing.txt"))[0] == 2
    assert run("frobnicate")[0] == 2
    assert run()[0] == 2


def test_gen_writes_files(tmp_path):
    prefix = str(tmp_path / "g")
    code, text = run("gen", "--n", "4", "--p", "1", "--q", "2", "--seed", "9", "--prefix", prefix)
    assert code == 0 and "(1,2)" in text
    a = parse_instance((tmp_path / "g_a.txt").read_text())
    assert a.n == 4
    assert run("gen", "--n", "3", "--p", "4")[0] == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "robustmatch", "stable", corpus("meet_escapes", "a")],
                       capture_output=True, text=True)
    assert r.returncode == 0 and len(r.stdout.splitlines()) == 4
