"""Count random pairs where the two-sided hybrid intersection drops robust matchings."""

from __future__ import annotations

import argparse
import random
from collections import Counter
from dataclasses import dataclass

from robustmatch.compression import hybrid_instances_two_side
from robustmatch.instance import blocking_pairs, generate_pair
from robustmatch.io import serialize_instance
from robustmatch.oracle import all_stable_bruteforce, robust_bruteforce


@dataclass
class Config:
    trials: int = 1000
    max_n: int = 6
    max_q: int = 3
    seed: int = 0
    show: int = 1


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=Config.trials)
    ap.add_argument("--max-n", type=int, default=Config.max_n)
    ap.add_argument("--show", type=int, default=Config.show)
    args = ap.parse_args()
    cfg = Config(args.trials, args.max_n, show=args.show)
    bad, tot = Counter(), Counter()
    shown = 0
    for i in range(cfg.trials):
        rng = random.Random(cfg.seed + i)
        n = rng.randint(3, cfg.max_n)
        q = rng.randint(1, min(cfg.max_q, n))
        a, b = generate_pair(n, 1, q, cfg.seed + i)
        want = robust_bruteforce([a, b]).as_set()
        got = all_stable_bruteforce(a).as_set()
        hs = hybrid_instances_two_side(a, b)
        for h in hs:
            got &= all_stable_bruteforce(h).as_set()
        tot[q] += 1
        if got != want:
            bad[q] += 1
            if shown < cfg.show:
                shown += 1
                lost = sorted(want - got)[0]
                print(f"# trial {i}: lost {tuple(f + 1 for f in lost.partner_of_worker)}")
                print("# A\n" + serialize_instance(a) + "# B\n" + serialize_instance(b), end="")
                for j, h in enumerate(hs):
                    bp = [(w + 1, f + 1) for w, f in blocking_pairs(h, lost)]
                    if bp:
                        print(f"# blocked in hybrid {j + 1} by {bp}")
    for q in sorted(tot):
        print(f"q={q}: {bad[q]}/{tot[q]} pairs lose robust matchings")


if __name__ == "__main__":
    main()
