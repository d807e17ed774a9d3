"""Fit the decay rate of every channel in a sweep and compare with log|r1^2 + t1^2 M_be|.

Runs the CLI sweep in-process, so the numbers are the ones the CSV output reports.
"""

import argparse
import csv
import io
import math

import numpy as np

from anyon_interferometry.algebra import monodromy
from anyon_interferometry.cli import run
from anyon_interferometry.models import builtin_model


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--model", default="fibonacci")
    parser.add_argument("--target", default="1:0.6,eps:0.8")
    parser.add_argument("--probe", default="eps")
    parser.add_argument("--t1", type=float, default=0.8)
    parser.add_argument("--N-max", dest="n_max", type=int, default=50)
    args = parser.parse_args()

    r1 = math.sqrt(1 - args.t1**2)
    code, out = run(["sweep", "--model", args.model, "--target", args.target, "--probe", args.probe,
                     "--t1", repr(args.t1), "--r1", repr(r1), "--N-max", str(args.n_max)])
    if code:
        raise SystemExit(code)
    model = builtin_model(args.model)
    series = {}
    for row in csv.DictReader(io.StringIO(out)):
        series.setdefault((row["a"], row["a_prime"], row["e"]), []).append((int(row["N"]), float(row["factor_abs"])))

    print(f"{'a':>6} {'a_prime':>8} {'e':>6} {'fitted slope':>14} {'predicted':>12}")
    for (a, ap, e), pts in sorted(series.items()):
        n = np.array([p[0] for p in pts], dtype=float)
        y = np.array([p[1] for p in pts])
        keep = y > 0
        slope = np.polyfit(n[keep], np.log(y[keep]), 1)[0] if keep.sum() > 1 else float("-inf")
        bracket = abs(r1**2 + args.t1**2 * monodromy(model, args.probe, e))
        predicted = math.log(bracket) if bracket > 0 else float("-inf")
        print(f"{a:>6} {ap:>8} {e:>6} {slope:14.10f} {predicted:12.10f}")


if __name__ == "__main__":
    main()
