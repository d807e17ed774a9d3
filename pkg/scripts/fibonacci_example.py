"""Fibonacci target 0.6|1> + 0.8|eps> probed by eps anyons.

Shows how the eps-eps block approaches weights 0.64/phi^2 and 0.64/phi
as the number of probes grows.
"""

import argparse

from anyon_interferometry import BeamSplitter, InterferometerConfig, ProbeSpec, TargetState, asymptotic, builtin_model, evolve
from anyon_interferometry.algebra import golden_ratio


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--t1", type=float, default=0.8)
    parser.add_argument("--N-max", dest="n_max", type=int, default=40)
    args = parser.parse_args()

    model = builtin_model("fibonacci")
    target = TargetState.from_mapping(model, {"1": 0.6, "eps": 0.8})
    config = InterferometerConfig(BeamSplitter.from_transmission(args.t1))
    probe = ProbeSpec.definite("eps")
    phi = golden_ratio()

    print(f"{'N':>4} {'rho(eps;1)':>12} {'rho(eps;eps)':>13} {'|1-eps coh|':>12}")
    for n in range(0, args.n_max + 1, 5):
        rho = evolve(target, probe, config, n)
        print(f"{n:>4} {rho.entry('eps', '1', 'eps').real:12.8f} {rho.entry('eps', 'eps', 'eps').real:13.8f}"
              f" {abs(rho.entry('1', '1', 'eps')):12.3e}")
    rho, _ = asymptotic(target, probe, config)
    print(f" inf {rho.entry('eps', '1', 'eps').real:12.8f} {rho.entry('eps', 'eps', 'eps').real:13.8f}")
    print(f"expected 0.64/phi^2 = {0.64 / phi**2:.8f}, 0.64/phi = {0.64 / phi:.8f}")


if __name__ == "__main__":
    main()
