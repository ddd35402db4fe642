"""Run the full pipeline on random dense 3-partite graphs and report outcomes."""

import argparse
import time
from math import ceil

from cliquefactor.constructions import GeneratorSpec, random_with_min_codegree
from cliquefactor.pipeline import PipelineConfig, PipelineFailure, perfect_factor


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t", type=int, default=3)
    ap.add_argument("--n", type=int, default=60)
    ap.add_argument("--density", type=float, default=0.77,
                    help="codegree target as a fraction of n")
    ap.add_argument("--seeds", type=int, default=10)
    args = ap.parse_args()

    target = ceil(args.density * args.n)
    wins = 0
    for seed in range(args.seeds):
        H, _ = random_with_min_codegree(GeneratorSpec(args.t, 2, args.n, "minCodegreeTarget",
                                                      target=target, seed=1000 + seed))
        start = time.perf_counter()
        try:
            res = perfect_factor(H, PipelineConfig(seed=seed))
            wins += 1
            msg = (f"ok  attempts={res.attempts} family={res.family_size} "
                   f"leftover={res.leftover}")
        except PipelineFailure as exc:
            msg = f"FAIL {exc.diagnostics[-1] if exc.diagnostics else exc}"
        print(f"seed {seed:3d}  {time.perf_counter() - start:6.2f}s  {msg}")
    print(f"{wins}/{args.seeds} perfect factors at codegree >= {target}")


if __name__ == "__main__":
    main()
