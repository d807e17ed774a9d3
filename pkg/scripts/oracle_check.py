"""Compare the closed-form evolution with path enumeration on seeded random scenarios."""

import argparse

import numpy as np

from anyon_interferometry.models import BUILTIN_NAMES, builtin_model
from anyon_interferometry.oracle import closed_form_vs_oracle, random_scenario


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--scenarios", type=int, default=200)
    parser.add_argument("--max-N", dest="max_n", type=int, default=10)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    for name in BUILTIN_NAMES:
        m = builtin_model(name)
        reports = [closed_form_vs_oracle(random_scenario(m, rng, args.max_n)) for _ in range(args.scenarios)]
        worst = max(reports, key=lambda r: r.max_deviation)
        print(f"{name:>10}: {sum(r.passed for r in reports)}/{len(reports)} passed, "
              f"worst {worst.max_deviation:.2e} ({worst.scenario})")


if __name__ == "__main__":
    main()
