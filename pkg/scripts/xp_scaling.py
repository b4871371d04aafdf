"""Time the guess-and-truncate decision procedure against market size."""

from __future__ import annotations

import argparse
import statistics
import time
from dataclasses import dataclass

from robustmatch.instance import generate_pair
from robustmatch.xp import XPStats, robust_xp_decide


@dataclass
class Config:
    sizes: tuple[int, ...] = (10, 20, 30, 40)
    p: int = 1
    q: int = 1
    reps: int = 7
    seed: int = 1000


def run(cfg: Config) -> list[tuple[int, float, float]]:
    rows = []
    for n in cfg.sizes:
        ts, guesses = [], []
        for r in range(cfg.reps):
            a, b = generate_pair(n, cfg.p, cfg.q, cfg.seed + r)
            st = XPStats()
            t = time.perf_counter()
            robust_xp_decide(a, b, st)
            ts.append(time.perf_counter() - t)
            guesses.append(st.assignments)
        rows.append((n, statistics.median(ts), statistics.median(guesses)))
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=list(Config.sizes))
    ap.add_argument("--p", type=int, default=Config.p)
    ap.add_argument("--q", type=int, default=Config.q)
    ap.add_argument("--reps", type=int, default=Config.reps)
    args = ap.parse_args()
    cfg = Config(tuple(args.sizes), args.p, args.q, args.reps)
    k = cfg.p + cfg.q
    prev = None
    print(f"{'n':>4} {'median s':>10} {'guesses':>8} {'ratio':>7} {'n-power ratio':>14}")
    for n, t, g in run(cfg):
        extra = ""
        if prev:
            extra = f"{t / prev[1]:7.1f} {(n / prev[0]) ** (k + 2):14.1f}"
        print(f"{n:4d} {t:10.4f} {g:8.0f} {extra}")
        prev = (n, t)


if __name__ == "__main__":
    main()
