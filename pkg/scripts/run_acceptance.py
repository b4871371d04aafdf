"""Run the acceptance suite and print only the per-criterion lines."""

from __future__ import annotations

import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]


def main() -> int:
    r = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider",
                        str(ROOT / "tests" / "test_acceptance.py")],
                       capture_output=True, text=True, cwd=ROOT)
    lines = [ln for ln in r.stdout.splitlines() if ln.startswith(("PASS criterion", "FAIL criterion"))]
    seen = []
    for ln in lines:
        if ln not in seen:
            seen.append(ln)
            print(ln)
    return r.returncode


if __name__ == "__main__":
    raise SystemExit(main())
