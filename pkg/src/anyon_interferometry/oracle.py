"""Brute-force cross-checks for the closed-form interferometry results.

The channel factors are recomputed term by term: as an explicit binomial sum
for identical probes, and by enumerating every assignment of probes to the
"between" or "around" paths (and to charge components) for arbitrary probe
sequences. Path weights come from applying the beam-splitter matrix to each
probe's amplitude vector, not from the product formula being checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .algebra import DEFAULT_TOL, AnyonModel, ChargeLike, monodromy
from .interferometry import (
    ABOVE,
    BELOW,
    PLACEMENTS,
    BeamSplitter,
    InterferometerConfig,
    PairBasisMatrix,
    ProbeSpec,
    TargetState,
    all_channel_factors,
    decompose_initial,
    evolve,
    probe_sequence,
    recompose,
)

BINOMIAL_MAX_N = 30
ENUMERATION_MAX_N = 12
ENUMERATION_MAX_TERMS = 1 << 21
ORACLE_THRESHOLD = 1e-10


def binomial_channel_factor(model: AnyonModel, e: ChargeLike, b: ChargeLike, t1r1: BeamSplitter, N: int) -> complex:
    """``sum_n C(N, n) |r|^(2(N-n)) |t|^(2n) M_be^n`` summed term by term."""
    if not 0 <= N <= BINOMIAL_MAX_N:
        raise ValueError(f"N must be in [0, {BINOMIAL_MAX_N}], got {N}")
    M = monodromy(model, b, e)
    pt, pr = abs(t1r1.t) ** 2, abs(t1r1.r) ** 2
    total = 0j
    for n in range(N + 1):
        total += math.comb(N, n) * pr ** (N - n) * pt**n * M**n
    return total


def _path_options(model: AnyonModel, e: int, probe: ProbeSpec, splitter: BeamSplitter, placement: str):
    """(weight, monodromy) for every (charge component, path) of one probe."""
    T = splitter.matrix if placement == BELOW else splitter.swapped().matrix
    weights, values = [], []
    for b, amps in enumerate(probe.charge_amplitudes(model)):
        if not np.any(amps):
            continue
        out = T @ amps
        M = monodromy(model, b, e)
        if placement == ABOVE:
            M = M.conjugate()
        # out[0] leaves T1 on the leg that runs between A and Abar
        weights += [abs(out[0]) ** 2, abs(out[1]) ** 2]
        values += [M, 1.0]
    return np.array(weights, dtype=float), np.array(values, dtype=complex)


def path_enumeration_factor(
    model: AnyonModel,
    e: ChargeLike,
    probes: ProbeSpec | Sequence[ProbeSpec],
    t1r1: BeamSplitter,
    N: int | None = None,
    placement: str = BELOW,
) -> complex:
    """Sum over every between/around path assignment of the probes.

    Each term is the product of the per-probe path probabilities times
    ``M_be`` for each probe of charge ``b`` routed between the target pair.
    """
    if placement not in PLACEMENTS:
        raise ValueError(f"unknown placement {placement!r}")
    seq = probe_sequence(probes, N)
    if len(seq) > ENUMERATION_MAX_N:
        raise ValueError(f"path enumeration supports at most {ENUMERATION_MAX_N} probes, got {len(seq)}")
    ei = model.index(e)
    W = np.ones(1)
    V = np.ones(1, dtype=complex)
    for p in seq:
        w, v = _path_options(model, ei, p, t1r1, placement)
        if W.size * w.size > ENUMERATION_MAX_TERMS:
            raise ValueError("too many path terms to enumerate; reduce N or the probe superpositions")
        W = np.multiply.outer(W, w).ravel()
        V = np.multiply.outer(V, v).ravel()
    return complex(np.sum(W * V))


@dataclass
class DensityMatrixReport:
    hermiticity_deviation: float
    trace_deviation: float
    min_eigenvalue: float
    block_weight_deviation: float | None
    tol: float = DEFAULT_TOL

    @property
    def passed(self) -> bool:
        ok = (
            self.hermiticity_deviation <= self.tol
            and self.trace_deviation <= self.tol
            and self.min_eigenvalue >= -self.tol
        )
        if self.block_weight_deviation is not None:
            ok = ok and self.block_weight_deviation <= self.tol
        return bool(ok)

    def to_dict(self) -> dict:
        return {
            "hermiticity_deviation": self.hermiticity_deviation,
            "trace_deviation": self.trace_deviation,
            "min_eigenvalue": self.min_eigenvalue,
            "block_weight_deviation": self.block_weight_deviation,
            "tol": self.tol,
            "passed": self.passed,
        }


def check_density_matrix(rho: PairBasisMatrix, target: TargetState | None = None, tol: float = DEFAULT_TOL) -> DensityMatrixReport:
    """Hermiticity, unit trace, positivity and, given the initial target, per-charge weight conservation."""
    R = rho.matrix
    herm = float(np.max(np.abs(R - R.conj().T), initial=0.0))
    trace_dev = float(abs(complex(np.trace(R)) - 1.0))
    min_ev = float(np.min(np.linalg.eigvalsh(0.5 * (R + R.conj().T)), initial=0.0))
    block = None
    if target is not None:
        block = max(
            (float(abs(rho.block_weight(a) - abs(target.amplitudes[a]) ** 2)) for a in range(rho.model.rank)),
            default=0.0,
        )
    return DensityMatrixReport(herm, trace_dev, min_ev, block, tol)


@dataclass
class Scenario:
    target: TargetState
    probes: list[ProbeSpec]
    config: InterferometerConfig
    N: int

    def describe(self) -> str:
        m = self.target.model
        return f"{m.name}: N={self.N}, t1={self.config.t1.t:.4g}, r1={self.config.t1.r:.4g}, placement={self.config.placement}"


@dataclass
class ComparisonReport:
    scenario: str
    max_deviation: float
    threshold: float = ORACLE_THRESHOLD
    channel_deviations: dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.max_deviation < self.threshold)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "max_deviation": self.max_deviation,
            "threshold": self.threshold,
            "passed": self.passed,
            "channel_deviations": self.channel_deviations,
        }


def oracle_evolve(scenario: Scenario) -> tuple[PairBasisMatrix, dict[int, complex]]:
    """Density matrix rebuilt from path-enumerated channel factors."""
    if scenario.N > ENUMERATION_MAX_N:
        raise ValueError(f"oracle supports N <= {ENUMERATION_MAX_N}")
    channels = decompose_initial(scenario.target)
    model = scenario.target.model
    seq = probe_sequence(scenario.probes, scenario.N)
    factors = {
        e: path_enumeration_factor(model, e, seq, scenario.config.t1, placement=scenario.config.placement)
        for e in channels.channels()
    }
    return recompose(channels, factors), factors


def closed_form_vs_oracle(scenario: Scenario, threshold: float = ORACLE_THRESHOLD) -> ComparisonReport:
    """Max elementwise gap between :func:`evolve` and the path-enumeration rebuild."""
    closed = evolve(scenario.target, scenario.probes, scenario.config, scenario.N)
    brute, factors = oracle_evolve(scenario)
    model = scenario.target.model
    seq = probe_sequence(scenario.probes, scenario.N)
    closed_factors = all_channel_factors(model, seq, scenario.config)
    per_channel = {model.names[e]: float(abs(closed_factors[e] - f)) for e, f in factors.items()}
    dev = float(np.max(np.abs(closed.matrix - brute.matrix), initial=0.0))
    return ComparisonReport(scenario.describe(), dev, threshold, per_channel)


def random_splitter(rng: np.random.Generator) -> BeamSplitter:
    z = rng.normal(size=4)
    t, r = complex(z[0], z[1]), complex(z[2], z[3])
    n = math.sqrt(abs(t) ** 2 + abs(r) ** 2)
    return BeamSplitter(t / n, r / n)


def random_target(model: AnyonModel, rng: np.random.Generator) -> TargetState:
    amps = rng.normal(size=model.rank) + 1j * rng.normal(size=model.rank)
    return TargetState(model, amps / np.linalg.norm(amps))


def random_probe(model: AnyonModel, rng: np.random.Generator, max_components: int = 3) -> ProbeSpec:
    """Probe in a random superposition over a few (charge, direction) components."""
    slots = [(b, s) for b in model.names for s in ("horizontal", "vertical")]
    k = int(rng.integers(1, min(max_components, len(slots)) + 1))
    chosen = rng.choice(len(slots), size=k, replace=False)
    amps = rng.normal(size=k) + 1j * rng.normal(size=k)
    amps /= np.linalg.norm(amps)
    return ProbeSpec({slots[i]: a for i, a in zip(chosen, amps)})


def random_scenario(model: AnyonModel, rng: np.random.Generator, max_N: int = 8) -> Scenario:
    N = int(rng.integers(0, max_N + 1))
    probes = [random_probe(model, rng) for _ in range(N)]
    placement = PLACEMENTS[int(rng.integers(0, 2))]
    config = InterferometerConfig(random_splitter(rng), placement=placement)
    return Scenario(random_target(model, rng), probes, config, N)
