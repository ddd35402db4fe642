"""Success rates of the exact solver and the pipeline across codegree targets.

    python scripts/run_threshold_scan.py --t 3 --k 2 --n 3 6 9 --grid 0:9 --samples 5
"""

import argparse
import sys

from cliquefactor.pipeline import ScanConfig, scan_to_csv, threshold_scan


def parse_grid(text: str) -> list[int]:
    if ":" in text:
        lo, hi = map(int, text.split(":"))
        return list(range(lo, hi + 1))
    return [int(x) for x in text.split(",")]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t", type=int, default=3)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--n", type=int, nargs="+", default=[3, 6])
    ap.add_argument("--grid", default="0:6", help="'lo:hi' or comma list")
    ap.add_argument("--samples", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--no-pipeline", action="store_true")
    ap.add_argument("--timing", action="store_true")
    args = ap.parse_args()

    cfg = ScanConfig(samples=args.samples, pipeline=not args.no_pipeline,
                     timing=args.timing, workers=args.workers)
    rows = threshold_scan(args.t, args.k, args.n, parse_grid(args.grid), args.seed, cfg)
    sys.stdout.write(scan_to_csv(rows))


if __name__ == "__main__":
    main()
