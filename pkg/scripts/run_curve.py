"""Transductive sample complexity over a scanned range of n for each family."""
import argparse
import json
from fractions import Fraction

from transduct.experiments import FAMILIES, counterexample_family, sample_complexity_curve


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-max", type=int, default=5)
    parser.add_argument("--eps", nargs="+", default=["1/2", "1/3", "1/4"])
    parser.add_argument("--out")
    args = parser.parse_args()
    families = dict(FAMILIES)
    families["counterexample-m3"] = counterexample_family(3, False)
    families["counterexample-m3-cover"] = counterexample_family(3, True)
    epsilons = [Fraction(e) for e in args.eps]
    out = {}
    for name, family in families.items():
        curve = sample_complexity_curve(family, epsilons, (1, args.n_max))
        out[name] = curve.to_dict()
        print(f"{name}:")
        print("  xi(n):  " + ", ".join(f"{n}:{v}" for n, v in out[name]["xi_by_n"].items()))
        print("  m(eps): " + ", ".join(f"{e['epsilon']}->{e['m']}" for e in out[name]["entries"]))
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(out, fh, indent=2)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
