"""Full-scale suite run at seed 42 plus the eight acceptance lines.

Usage: python scripts/run_acceptance.py [--jobs N]
Writes results/suite_seed42.json (canonical, no timings).
"""

import argparse
import subprocess
import sys
from pathlib import Path

from dvfourfold import cli

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--jobs", default="1")
    args = ap.parse_args()
    out = ROOT / "results" / "suite_seed42.json"
    out.parent.mkdir(exist_ok=True)
    code = cli.main(["suite", "--seed", "42", "--trials", "100", "--jobs", args.jobs, "--out", str(out)])
    print(f"suite exit code {code}, report at {out.relative_to(ROOT)}")
    accept = subprocess.run([sys.executable, str(ROOT / "tests" / "test_acceptance.py")])
    sys.exit(code or accept.returncode)


if __name__ == "__main__":
    main()
