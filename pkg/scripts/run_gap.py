"""Counterexample gap for m = 2..5 with the factor-2 tightness check."""
import argparse
import json
from fractions import Fraction

from transduct.experiments import gap_report


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--delta", default="1/100")
    parser.add_argument("--out")
    args = parser.parse_args()
    report = gap_report(range(2, 6), delta=Fraction(args.delta))
    print(f"{'m':>2} {'labels':>7} {'xi(cover)':>10} {'xi(bare)':>9} {'ratio':>6} {'2-factor':>9}")
    for e in report["entries"]:
        print(f"{e['m']:>2} {e['labels_with_cover']:>7} {e['xi_with_cover']:>10} "
              f"{e['xi_without_cover']:>9} {e['ratio']:>6} {e['factor_two_realized']:>9}")
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(report, fh, indent=2)
    return 0 if report["holds"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
