#!/usr/bin/env python3
"""Run the verification suite and write report artifacts.

Thin wrapper over glsreg.verify.run_suite for batch runs; the CLI command
``glsreg verify`` does the same from a JSON config.  Exits with the report
status (0 all good, 1 at least one FAIL or disallowed INCONCLUSIVE).
"""

import argparse
import sys
from pathlib import Path


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--trajectories", type=int, default=20_000)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--out", type=Path, default=Path("out"))
    parser.add_argument("--checks", nargs="*", default=None, help="Subset of check ids (default: all).")
    args = parser.parse_args()

    from glsreg.persist import atomic_write_text, json_safe, write_json
    from glsreg.verify import run_suite

    report = run_suite(
        check_ids=args.checks,
        seed=args.seed,
        trajectories=args.trajectories,
        threads=args.threads,
    )
    args.out.mkdir(parents=True, exist_ok=True)
    write_json(args.out / "report.json", json_safe(report.to_dict()))
    atomic_write_text(args.out / "report.txt", report.to_text())
    print(report.to_text(), end="")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
