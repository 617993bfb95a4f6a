"""Run every inequality suite at full size and print a margin table."""

import argparse
import json

from catvisc.lemmas import run_suites


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--out")
    args = ap.parse_args()

    reports = run_suites("all", args.trials, args.seed)
    for r in reports:
        print(f"{r.name:<22} worst_margin={r.worst_margin:+.3e} tol={r.tolerance:.0e} "
              f"{'PASS' if r.passed else 'FAIL'} ({r.elapsed:.2f}s)")
        for part, info in r.parts.items():
            print(f"    {part:<18} worst_margin={info['worst_margin']:+.3e} tol={info['tolerance']:.0e}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump([r.to_dict() for r in reports], fh, indent=2, sort_keys=True)


if __name__ == "__main__":
    main()
