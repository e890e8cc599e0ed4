"""Projection sweeps on seeded random tables.

Zero-one tables must give ratio 1; metric tables are reported alongside so
the two regimes can be compared.
"""
import argparse
import json
import random
from collections import Counter

from transduct.experiments import compactness_sweep, random_metric_instance, random_zero_one_table


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--tables", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out")
    args = parser.parse_args()
    rng = random.Random(args.seed)
    reports = {"zero-one": [], "metric": []}
    for _ in range(args.tables):
        table = random_zero_one_table(rng, rng.randint(1, 3), 2, 5)
        reports["zero-one"].append(compactness_sweep(table))
        table = random_metric_instance(rng, max_n=3, max_labels=4, max_rows=4)
        reports["metric"].append(compactness_sweep(table))
    ok = True
    for kind, reps in reports.items():
        ratios = Counter(r["ratio"] for r in reps)
        proper = Counter(r["proper_ratio"] for r in reps)
        monotone = sum(r["holds"] for r in reps)
        print(f"{kind:>8}: ratio {dict(ratios)}  proper-ratio {dict(proper)}  "
              f"row-deletion monotone {monotone}/{len(reps)}")
        ok &= monotone == len(reps)
    ok &= all(r["ratio"] == "1" for r in reports["zero-one"])
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(reports, fh, indent=2)
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
