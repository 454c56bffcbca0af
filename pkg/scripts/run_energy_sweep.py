#!/usr/bin/env python3
"""Squared error of the energy estimate vs n; expects ~1/n decay."""

import argparse
from pathlib import Path

from unkloc.experiments import (
    ExperimentConfig,
    FieldSource,
    RenewalFamily,
    run,
    write_slope_json,
    write_summary_csv,
)
from unkloc.noise import NoiseSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--field", default="paper1", choices=("paper1", "paper2"))
    ap.add_argument("--n", default="1000,10000,100000")
    ap.add_argument("--trials", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=20260822)
    ap.add_argument("--out", default="results/energy")
    args = ap.parse_args()

    config = ExperimentConfig(
        mode="EnergyMSE",
        field_source=FieldSource(kind=args.field),
        renewal=RenewalFamily(kind="uniform"),
        noise=NoiseSpec.uniform_sym(1.0),
        n_grid=tuple(int(tok) for tok in args.n.split(",")),
        trials=args.trials,
        master_seed=args.seed,
    )
    result = run(config)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_summary_csv(result, out / "summary.csv")
    write_slope_json(result, out / "slope.json")

    for row in result.summary:
        print(f"n={row.n:>7d}  mean sq error={row.mean:.6g}  count={row.count}")
    if result.slope:
        print(f"log-log slope {result.slope.slope:.4f}")


if __name__ == "__main__":
    main()
