from __future__ import annotations

import os

from hypothesis import HealthCheck, settings, strategies as st

from robustmatch.instance import Instance, generate_pair

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=400,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def instances(draw, min_n: int = 1, max_n: int = 6) -> Instance:
    n = draw(st.integers(min_n, max_n))
    perm = st.permutations(range(n))
    return Instance.from_lists([draw(perm) for _ in range(n)], [draw(perm) for _ in range(n)])


@st.composite
def pairs(draw, p=(0, 2), q=(0, 2), min_n: int = 2, max_n: int = 6):
    """Random ``(A, B)`` with exactly ``p`` changed workers and ``q`` changed firms."""
    n = draw(st.integers(min_n, max_n))
    pp = draw(st.integers(p[0], min(p[1], n)))
    qq = draw(st.integers(q[0], min(q[1], n)))
    seed = draw(st.integers(0, 2**31))
    return generate_pair(n, pp, qq, seed)


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
