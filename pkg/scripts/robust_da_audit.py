"""Compare the multi-room deferred acceptance runs with brute force."""

from __future__ import annotations

import argparse
import random
from dataclasses import dataclass

from robustmatch.da import RunLog, firm_optimal_robust, worker_optimal_robust
from robustmatch.errors import InvariantViolation
from robustmatch.instance import generate_pair
from robustmatch.lattice import extremal
from robustmatch.oracle import robust_bruteforce


@dataclass
class Config:
    trials: int = 2000
    max_n: int = 7
    force: bool = False
    seed: int = 0


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=Config.trials)
    ap.add_argument("--force", action="store_true", help="also run pairs with p, q >= 2")
    args = ap.parse_args()
    cfg = Config(args.trials, force=args.force)
    wrong = unsafe = diverged = rounds = 0
    for i in range(cfg.trials):
        rng = random.Random(cfg.seed + i)
        n = rng.randint(2, cfg.max_n)
        if cfg.force:
            p, q = rng.randint(0, n), rng.randint(0, n)
        else:
            p, q = rng.randint(0, 1), rng.randint(0, n)
            if rng.random() < 0.5:
                p, q = q, p
        a, b = generate_pair(n, p, q, cfg.seed + i)
        s = robust_bruteforce([a, b])
        used = {pr for m in s for pr in m.pairs()}
        for side, fn in (("worker", worker_optimal_robust), ("firm", firm_optimal_robust)):
            log = RunLog()
            try:
                got = fn(a, b, log=log, force=cfg.force)
            except InvariantViolation:
                diverged += 1
                continue
            rounds = max(rounds, log.rounds)
            wrong += got != extremal(s, side)
            unsafe += bool(used & set(log.rejections))
    print(f"{cfg.trials} pairs: {wrong} wrong, {unsafe} unsafe rejections, "
          f"{diverged} divergent runs, max rounds {rounds}")


if __name__ == "__main__":
    main()
