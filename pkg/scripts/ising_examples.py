"""Ising target (A_1, A_psi, A_sigma) probed by sigma or psi anyons.

Prints the density matrix after N probes and its asymptotic limit.
"""

import argparse
import math

import numpy as np

from anyon_interferometry import BeamSplitter, InterferometerConfig, ProbeSpec, TargetState, asymptotic, builtin_model, evolve


def show(rho, title):
    m = rho.model
    print(title)
    for a, f, mu, ap, nu, v in rho.entries(tol=1e-14):
        print(f"  |{m.names[a]}; {m.names[f]}><{m.names[ap]}; {m.names[f]}|  {v.real:+.6f}{v.imag:+.6f}i")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--N", type=int, default=200)
    parser.add_argument("--t1", type=float, default=1 / math.sqrt(2))
    args = parser.parse_args()

    model = builtin_model("ising")
    target = TargetState(model, np.ones(3, dtype=complex) / math.sqrt(3))
    config = InterferometerConfig(BeamSplitter.from_transmission(args.t1))
    for probe in ("sigma", "psi"):
        p = ProbeSpec.definite(probe)
        show(evolve(target, p, config, args.N), f"{probe} probes, N = {args.N}")
        rho, report = asymptotic(target, p, config)
        show(rho, f"{probe} probes, N -> infinity (converged: {report.converged})")
        print()


if __name__ == "__main__":
    main()
