#!/usr/bin/env python3
"""Bandwidth-detection success rate as n grows (sparse benchmark field)."""

import argparse
from pathlib import Path

from unkloc.experiments import ExperimentConfig, FieldSource, RenewalFamily, run, write_rows_csv
from unkloc.noise import NoiseSpec

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--delta", type=float, default=0.1, help="coefficient magnitude floor")
ap.add_argument("--n", default="5000,10000,20000,50000")
ap.add_argument("--trials", type=int, default=100)
ap.add_argument("--seed", type=int, default=20260822)
ap.add_argument("--out", default="results/bandwidth")
args = ap.parse_args()

config = ExperimentConfig(
    mode="BandwidthCurve",
    field_source=FieldSource(kind="paper2"),
    renewal=RenewalFamily(kind="uniform"),
    noise=NoiseSpec.uniform_sym(1.0),
    n_grid=tuple(int(tok) for tok in args.n.split(",")),
    trials=args.trials,
    master_seed=args.seed,
    delta=args.delta,
)
result = run(config)

out = Path(args.out)
out.mkdir(parents=True, exist_ok=True)
write_rows_csv(result, out / "rows.csv")

for metric in ("success", "stop_check", "coeff_check"):
    by_n = result.summary_for(metric)
    line = "  ".join(f"{n}:{row.mean:.2f}" for n, row in sorted(by_n.items()))
    print(f"{metric:>12s}  {line}")
print(f"wrote {out}/rows.csv")
