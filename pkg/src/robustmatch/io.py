"""Plain-text instance and matching formats.

Instance file::

    # comment
    n 3
    W 1 : 2 1 3
    ...
    F 3 : 3 2 1

Ids are 1-based and lists run from most to least preferred.  Matchings are
printed as ``w f`` lines sorted by worker.
"""

from __future__ import annotations

from pathlib import Path

from .errors import InputError
from .instance import Instance, Matching

__all__ = ["parse_instance", "serialize_instance", "read_instance", "format_matching", "parse_matching"]


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _ints(tokens: list[str], no: int) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise InputError(f"expected integers, got {' '.join(tokens)!r}", line=no) from None


def parse_instance(text: str) -> Instance:
    it = _lines(text)
    try:
        no, head = next(it)
    except StopIteration:
        raise InputError("empty instance file") from None
    parts = head.split()
    if len(parts) != 2 or parts[0] != "n":
        raise InputError(f"bad header {head!r}, expected 'n <N>'", line=no)
    (n,) = _ints(parts[1:], no)
    if n < 1:
        raise InputError(f"n must be positive, got {n}", line=no)
    lists: dict[str, dict[int, tuple[int, ...]]] = {"W": {}, "F": {}}
    for no, line in it:
        left, sep, right = line.partition(":")
        key = left.split()
        if not sep or len(key) != 2 or key[0] not in lists:
            raise InputError(f"bad line {line!r}, expected 'W <i> : ...' or 'F <j> : ...'", line=no)
        (i,) = _ints(key[1:], no)
        if not 1 <= i <= n:
            raise InputError(f"agent id {i} out of range 1..{n}", line=no)
        if i in lists[key[0]]:
            raise InputError(f"{key[0]} {i} listed twice", line=no)
        prefs = _ints(right.split(), no)
        if len(prefs) != n:
            raise InputError(f"{key[0]} {i} lists {len(prefs)} ids, expected {n}", line=no)
        if sorted(prefs) != list(range(1, n + 1)):
            dup = sorted({x for x in prefs if prefs.count(x) > 1})
            what = f"duplicate ids {dup}" if dup else "ids out of range"
            raise InputError(f"{key[0]} {i}: {what}, list must be a permutation of 1..{n}", line=no)
        lists[key[0]][i] = tuple(x - 1 for x in prefs)
    for side, name in (("W", "worker"), ("F", "firm")):
        missing = [i for i in range(1, n + 1) if i not in lists[side]]
        if missing:
            raise InputError(f"missing {name} lists for {missing}")
    return Instance.from_lists([lists["W"][i] for i in range(1, n + 1)],
                               [lists["F"][i] for i in range(1, n + 1)])


def serialize_instance(inst: Instance) -> str:
    out = [f"n {inst.n}"]
    for w, lst in enumerate(inst.worker_prefs):
        out.append(f"W {w + 1} : " + " ".join(str(f + 1) for f in lst))
    for f, lst in enumerate(inst.firm_prefs):
        out.append(f"F {f + 1} : " + " ".join(str(w + 1) for w in lst))
    return "\n".join(out) + "\n"


def read_instance(path: str | Path) -> Instance:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as e:
        raise InputError(f"cannot read {p}: {e.strerror}") from None
    try:
        return parse_instance(text)
    except InputError as e:
        raise InputError(f"{p}: {e}") from None


def format_matching(m: Matching) -> str:
    return "".join(f"{w + 1} {f + 1}\n" for w, f in enumerate(m.partner_of_worker))


def parse_matching(text: str) -> Matching:
    pairs = []
    for no, line in _lines(text):
        vals = _ints(line.split(), no)
        if len(vals) != 2:
            raise InputError(f"expected 'w f', got {line!r}", line=no)
        pairs.append((vals[0] - 1, vals[1] - 1))
    return Matching.from_pairs(pairs)
