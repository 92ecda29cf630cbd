#!/usr/bin/env python3
"""Error versus number of samples on small-world families (K = 4)."""
import argparse

from ggm.experiments import build_config, emit_csv, run_test_case_2, write_manifest


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="tc2.csv")
    ap.add_argument("--realizations", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    cfg = build_config("tc2", {}, n_realizations=args.realizations,
                       base_seed=args.seed, workers=args.workers,
                       max_iters=800, tol_primal=1e-4, tol_dual=1e-4)
    result = run_test_case_2(cfg)
    emit_csv(result.table, args.out)
    write_manifest(result, args.out)
    print("xaxis " + " ".join(f"{m:>8}" for m in ("GL", "GGL", "LVGL", "Joint")))
    for x, row in zip(result.table.xaxis, result.table.errors):
        print(f"{x:>5} " + " ".join(f"{v:8.4f}" for v in row))
    print(f"wrote {args.out} ({result.runtime_seconds:.0f}s)")


if __name__ == "__main__":
    main()
