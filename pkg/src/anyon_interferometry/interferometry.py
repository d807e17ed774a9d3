"""Charge decoherence of a target anyon pair probed by a Mach-Zehnder interferometer.

The reduced density matrix of the target pair ``A``-``Abar`` is handled in two
bases:

* the difference-channel basis, where a coherence ``|a><a'|`` is expanded over
  charges ``e`` that fuse with ``a'`` to give ``a``. Each probe multiplies the
  ``e`` component by a scalar that depends only on the probe's monodromy
  with ``e``;
* the pair basis ``|a, abar; f, mu><a', abar'; f, nu|``, normalized for the
  ordinary trace.

The change of basis between the two is ``pair_channel_matrix``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

from .algebra import DEFAULT_TOL, AnyonModel, ChargeLike, ModelError, monodromy_matrix

HORIZONTAL = "horizontal"
VERTICAL = "vertical"
DIRECTIONS = (HORIZONTAL, VERTICAL)
_DIRECTION_ALIASES = {"h": HORIZONTAL, "horizontal": HORIZONTAL, "->": HORIZONTAL, "v": VERTICAL, "vertical": VERTICAL, "^": VERTICAL}

BELOW = "below"
ABOVE = "above"
PLACEMENTS = (BELOW, ABOVE)


class MissingFSymbolError(ModelError):
    """The model lacks F-symbol data needed to decompose a coherence."""


@dataclass(frozen=True)
class BeamSplitter:
    """Lossless beam splitter ``[[t, r*], [r, -t*]]``."""

    t: complex
    r: complex
    tol: float = field(default=DEFAULT_TOL, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "t", complex(self.t))
        object.__setattr__(self, "r", complex(self.r))
        loss = abs(abs(self.t) ** 2 + abs(self.r) ** 2 - 1.0)
        if loss > self.tol:
            raise ValueError(f"beam splitter is not lossless: |t|^2 + |r|^2 - 1 = {loss:.3e}")

    @classmethod
    def balanced(cls) -> "BeamSplitter":
        return cls(1 / math.sqrt(2), 1 / math.sqrt(2))

    @classmethod
    def from_transmission(cls, t: complex) -> "BeamSplitter":
        return cls(t, math.sqrt(max(0.0, 1.0 - abs(t) ** 2)))

    @property
    def matrix(self) -> np.ndarray:
        t, r = self.t, self.r
        return np.array([[t, r.conjugate()], [r, -t.conjugate()]])

    def swapped(self) -> "BeamSplitter":
        return BeamSplitter(self.r, self.t, tol=self.tol)


@dataclass(frozen=True)
class InterferometerConfig:
    """Interferometer settings.

    ``t2``, ``theta_I`` and ``theta_II`` are part of the apparatus but drop out
    of the target's reduced density matrix once detector outcomes are
    averaged over; no computation here reads them.
    """

    t1: BeamSplitter
    t2: BeamSplitter = field(default_factory=BeamSplitter.balanced)
    theta_I: float = 0.0
    theta_II: float = 0.0
    placement: str = BELOW

    def __post_init__(self) -> None:
        if self.placement not in PLACEMENTS:
            raise ValueError(f"placement must be one of {PLACEMENTS}, got {self.placement!r}")


def _direction(s: str) -> str:
    try:
        return _DIRECTION_ALIASES[s]
    except KeyError:
        raise ValueError(f"unknown probe direction {s!r}") from None


@dataclass(frozen=True)
class ProbeSpec:
    """Amplitudes ``B_{b,s}`` of one probe over charge ``b`` and entry direction ``s``.

    Charges are stored by name and resolved against a model when used.
    """

    amplitudes: Mapping[tuple[str, str], complex]
    tol: float = field(default=DEFAULT_TOL, compare=False, repr=False)

    def __post_init__(self) -> None:
        amps: dict[tuple[str, str], complex] = {}
        for (b, s), v in dict(self.amplitudes).items():
            key = (str(b), _direction(s))
            amps[key] = amps.get(key, 0j) + complex(v)
        norm = sum(abs(v) ** 2 for v in amps.values())
        if abs(norm - 1.0) > self.tol:
            raise ValueError(f"probe amplitudes are not normalized: sum |B|^2 = {norm!r}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def definite(cls, charge: str, direction: str = HORIZONTAL) -> "ProbeSpec":
        """A probe of definite charge entering along one leg."""
        return cls({(charge, direction): 1.0})

    def between_weights(self, model: AnyonModel, splitter: BeamSplitter) -> np.ndarray:
        """Per-charge probability ``|B_{b,h} t + B_{b,v} r*|^2`` of passing between ``A`` and ``Abar``."""
        h = np.zeros(model.rank, dtype=complex)
        v = np.zeros(model.rank, dtype=complex)
        for (b, s), amp in self.amplitudes.items():
            i = model.index(b)
            if s == HORIZONTAL:
                h[i] += amp
            else:
                v[i] += amp
        return np.abs(h * splitter.t + v * splitter.r.conjugate()) ** 2

    def charge_amplitudes(self, model: AnyonModel) -> np.ndarray:
        """Array of shape ``(rank, 2)`` holding ``B_{b,s}`` with ``s`` ordered (horizontal, vertical)."""
        out = np.zeros((model.rank, 2), dtype=complex)
        for (b, s), amp in self.amplitudes.items():
            out[model.index(b), DIRECTIONS.index(s)] += amp
        return out


@dataclass(frozen=True, eq=False)
class TargetState:
    """Target pair state ``sum_a A_a |a, abar; 1>``."""

    model: AnyonModel
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.model.rank,):
            raise ValueError(f"expected {self.model.rank} amplitudes, got shape {amps.shape}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_mapping(
        cls,
        model: AnyonModel,
        amplitudes: Mapping[ChargeLike, complex],
        normalize: bool = False,
        tol: float = DEFAULT_TOL,
    ) -> "TargetState":
        amps = np.zeros(model.rank, dtype=complex)
        for charge, value in amplitudes.items():
            amps[model.index(charge)] += complex(value)
        norm = float(np.sum(np.abs(amps) ** 2))
        if normalize:
            if norm == 0:
                raise ValueError("cannot normalize an all-zero target")
            amps /= math.sqrt(norm)
        elif abs(norm - 1.0) > tol:
            raise ValueError(f"target amplitudes are not normalized: sum |A|^2 = {norm!r}")
        return cls(model, amps)

    def amplitude(self, charge: ChargeLike) -> complex:
        return complex(self.amplitudes[self.model.index(charge)])

    @property
    def support(self) -> list[int]:
        return [int(i) for i in np.flatnonzero(self.amplitudes)]


Channel = tuple[int, int, int]  # (e, alpha, beta)
PairIndex = tuple[int, int, int]  # (f, mu, nu)


def pair_channel_matrix(model: AnyonModel, a: ChargeLike, a_prime: ChargeLike) -> tuple[list[Channel], list[PairIndex], np.ndarray]:
    """Change of basis from difference channels to pair channels for the ``(a, a')`` block.

    Row ``(e, alpha, beta)``: ``a'`` absorbs ``e`` to become ``a`` (vertex
    ``alpha``) while ``abar'`` emits it and becomes ``abar`` (vertex ``beta``).
    Column ``(f, mu, nu)``: ``a' x abar' -> f`` (``nu``) followed by
    ``f -> a x abar`` (``mu``). In terms of standard F-symbols

        G[(e,al,be),(f,mu,nu)] = sqrt(d_e d_f / (d_a d_a')) * conj([F^{a' e abar}_f]_{(a,al,mu),(abar',be,nu)})
    """
    a, ap = model.index(a), model.index(a_prime)
    ab, apb = model.dual[a], model.dual[ap]
    N, d = model.fusion, model.qdim
    rows = [
        (e, al, be)
        for e in range(model.rank)
        for al in range(N[ap, e, a])
        for be in range(N[e, ab, apb])
    ]
    cols = [
        (f, mu, nu)
        for f in range(model.rank)
        for mu in range(N[a, ab, f])
        for nu in range(N[ap, apb, f])
    ]
    G = np.zeros((len(rows), len(cols)), dtype=complex)
    for i, (e, al, be) in enumerate(rows):
        for j, (f, mu, nu) in enumerate(cols):
            F = model.f_symbols.get((ap, e, ab, f, a, al, mu, apb, be, nu), 0j)
            G[i, j] = math.sqrt(d[e] * d[f] / (d[a] * d[ap])) * F.conjugate()
    return rows, cols, G


@dataclass(frozen=True, eq=False)
class DifferenceChannelMatrix:
    """Density matrix coefficients keyed by ``(a, a', e, alpha, beta)`` (charge indices)."""

    model: AnyonModel
    entries: Mapping[tuple[int, int, int, int, int], complex]

    def coefficient(self, a: ChargeLike, a_prime: ChargeLike, e: ChargeLike, alpha: int = 0, beta: int = 0) -> complex:
        m = self.model
        return self.entries.get((m.index(a), m.index(a_prime), m.index(e), alpha, beta), 0j)

    def blocks(self) -> list[tuple[int, int]]:
        return sorted({(a, ap) for a, ap, *_ in self.entries})

    def channels(self, a: ChargeLike | None = None, a_prime: ChargeLike | None = None) -> list[int]:
        """Difference charges present, optionally restricted to one ``(a, a')`` block."""
        m = self.model
        out = set()
        for ka, kap, e, *_ in self.entries:
            if a is not None and ka != m.index(a):
                continue
            if a_prime is not None and kap != m.index(a_prime):
                continue
            out.add(e)
        return sorted(out)


@dataclass(frozen=True, eq=False)
class PairBasisMatrix:
    """Density matrix over the pair basis ``(a, f, mu)``, ordinary-trace normalized."""

    model: AnyonModel
    basis: tuple[tuple[int, int, int], ...]
    matrix: np.ndarray

    def position(self, a: ChargeLike, f: ChargeLike, mu: int = 0) -> int:
        m = self.model
        return self.basis.index((m.index(a), m.index(f), mu))

    def entry(self, a: ChargeLike, f: ChargeLike, a_prime: ChargeLike, mu: int = 0, nu: int = 0) -> complex:
        """Coefficient of ``|a, abar; f, mu><a', abar'; f, nu|``."""
        return complex(self.matrix[self.position(a, f, mu), self.position(a_prime, f, nu)])

    def entries(self, tol: float = 0.0) -> list[tuple[int, int, int, int, int, complex]]:
        """Nonzero entries as ``(a, f, mu, a', nu, value)``."""
        out = []
        for i, (a, f, mu) in enumerate(self.basis):
            for j, (ap, fp, nu) in enumerate(self.basis):
                if f != fp:
                    continue
                v = complex(self.matrix[i, j])
                if abs(v) > tol:
                    out.append((a, f, mu, ap, nu, v))
        return out

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def block_weight(self, a: ChargeLike) -> float:
        ai = self.model.index(a)
        idx = [i for i, (b, _, _) in enumerate(self.basis) if b == ai]
        return float(np.real(np.sum(self.matrix[idx, idx])))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T))


def pair_basis(model: AnyonModel) -> tuple[tuple[int, int, int], ...]:
    N = model.fusion
    return tuple(
        (a, f, mu)
        for a in range(model.rank)
        for f in range(model.rank)
        for mu in range(N[a, model.dual[a], f])
    )


def decompose_initial(target: TargetState, tol: float = DEFAULT_TOL) -> DifferenceChannelMatrix:
    """Expand ``|Psi_0><Psi_0|`` over difference channels.

    Entry ``(a, a', e, alpha, beta)`` is ``A_a A*_a' / sqrt(d_a d_a') * [G^-1]_{1,(e,alpha,beta)}``
    with ``G`` from :func:`pair_channel_matrix`.
    """
    model = target.model
    d, vac = model.qdim, model.vacuum
    entries: dict[tuple[int, int, int, int, int], complex] = {}
    support = target.support
    for a in support:
        for ap in support:
            rows, cols, G = pair_channel_matrix(model, a, ap)
            try:
                j = cols.index((vac, 0, 0))
            except ValueError:
                raise MissingFSymbolError(
                    f"fusion data has no vacuum channel for ({model.names[a]}, {model.names[ap]})"
                ) from None
            if not rows or np.max(np.abs(G @ G.conj().T - np.eye(len(rows)))) > tol:
                raise MissingFSymbolError(
                    f"F-symbol block for ({model.names[a]}, {model.names[ap]}) is missing or not unitary"
                )
            weight = target.amplitudes[a] * target.amplitudes[ap].conjugate() / math.sqrt(d[a] * d[ap])
            for i, (e, al, be) in enumerate(rows):
                g = G[i, j]
                if g == 0:
                    continue
                entries[(a, ap, e, al, be)] = complex(weight * g.conjugate())
    return DifferenceChannelMatrix(model, entries)


ProbeInput = Union[ProbeSpec, Sequence[ProbeSpec]]


def probe_sequence(probes: ProbeInput, N: int | None = None) -> list[ProbeSpec]:
    if N is not None and N < 0:
        raise ValueError("number of probes must be non-negative")
    if isinstance(probes, ProbeSpec):
        if N is None:
            raise ValueError("N is required when a single ProbeSpec is given")
        return [probes] * N
    probes = list(probes)
    if N is None:
        return probes
    if len(probes) < N:
        raise ValueError(f"{N} probes requested but only {len(probes)} given")
    return probes[:N]


def step_factors(model: AnyonModel, probe: ProbeSpec, config: InterferometerConfig) -> np.ndarray:
    """Per-channel multiplier of one probe, indexed by difference charge ``e``.

    Below placement: ``1 - sum_b |B_{b,h} t1 + B_{b,v} r1*|^2 (1 - M_be)``.
    Above placement exchanges ``t1`` and ``r1`` and conjugates ``M_be``.
    """
    M = monodromy_matrix(model)
    if config.placement == BELOW:
        w = probe.between_weights(model, config.t1)
    else:
        w = probe.between_weights(model, config.t1.swapped())
        M = M.conj()
    return 1.0 - w @ (1.0 - M)


def channel_factor(
    model: AnyonModel,
    e: ChargeLike,
    probes: ProbeInput,
    config: InterferometerConfig,
    N: int | None = None,
) -> complex:
    """Suppression factor of difference channel ``e`` after the given probes."""
    ei = model.index(e)
    seq = probe_sequence(probes, N)
    out = 1.0 + 0j
    cache: dict[int, complex] = {}
    for p in seq:
        key = id(p)
        if key not in cache:
            cache[key] = complex(step_factors(model, p, config)[ei])
        out *= cache[key]
    return out


def all_channel_factors(model: AnyonModel, probes: ProbeInput, config: InterferometerConfig, N: int | None = None) -> np.ndarray:
    """``channel_factor`` for every charge ``e`` at once."""
    seq = probe_sequence(probes, N)
    out = np.ones(model.rank, dtype=complex)
    cache: dict[int, np.ndarray] = {}
    for p in seq:
        key = id(p)
        if key not in cache:
            cache[key] = step_factors(model, p, config)
        out = out * cache[key]
    return out


def recompose(channels: DifferenceChannelMatrix, factors: Mapping[int, complex] | np.ndarray) -> PairBasisMatrix:
    """Scale each difference channel ``e`` by ``factors[e]`` and convert to the pair basis."""
    model = channels.model
    d = model.qdim
    basis = pair_basis(model)
    pos = {b: i for i, b in enumerate(basis)}
    rho = np.zeros((len(basis), len(basis)), dtype=complex)
    for a, ap in channels.blocks():
        rows, cols, G = pair_channel_matrix(model, a, ap)
        x = np.array([channels.entries.get((a, ap, e, al, be), 0j) * factors[e] for e, al, be in rows])
        coeff = x @ G
        for j, (f, mu, nu) in enumerate(cols):
            rho[pos[(a, f, mu)], pos[(ap, f, nu)]] = math.sqrt(d[a] * d[ap] * d[f]) * coeff[j]
    return PairBasisMatrix(model, basis, rho)


def evolve(
    target: TargetState,
    probes: ProbeInput,
    config: InterferometerConfig,
    N: int | None = None,
) -> PairBasisMatrix:
    """Reduced density matrix of the target pair after ``N`` probes, detectors traced out."""
    channels = decompose_initial(target)
    factors = all_channel_factors(target.model, probes, config, N)
    return recompose(channels, factors)


KEPT = "kept"
DECAYS = "decays"
NON_CONVERGENT = "non-convergent"


@dataclass
class ChannelConvergence:
    a: str
    a_prime: str
    e: str
    factor: complex
    status: str

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "a_prime": self.a_prime,
            "e": self.e,
            "factor": [self.factor.real, self.factor.imag],
            "abs": abs(self.factor),
            "status": self.status,
        }


@dataclass
class ConvergenceReport:
    channels: list[ChannelConvergence]

    @property
    def converged(self) -> bool:
        return all(c.status != NON_CONVERGENT for c in self.channels)

    def non_convergent(self) -> list[ChannelConvergence]:
        return [c for c in self.channels if c.status == NON_CONVERGENT]


def classify_step_factor(value: complex, tol: float = DEFAULT_TOL) -> str:
    if abs(value - 1.0) <= tol:
        return KEPT
    if abs(value) < 1.0 - tol:
        return DECAYS
    return NON_CONVERGENT


def asymptotic(
    target: TargetState,
    probe: ProbeSpec,
    config: InterferometerConfig,
    tol: float = DEFAULT_TOL,
) -> tuple[PairBasisMatrix, ConvergenceReport]:
    """Limit of :func:`evolve` as the number of identical probes goes to infinity.

    Channels with per-probe factor 1 are kept and channels with modulus below
    1 vanish. A channel whose factor is a unimodular phase other than 1 has no
    limit: it is flagged non-convergent and contributes its long-run average,
    which is zero.
    """
    model = target.model
    channels = decompose_initial(target)
    step = step_factors(model, probe, config)
    status = {e: classify_step_factor(step[e], tol) for e in range(model.rank)}
    limit = np.array([1.0 if status[e] == KEPT else 0.0 for e in range(model.rank)], dtype=complex)
    names = model.names
    report = ConvergenceReport(
        [
            ChannelConvergence(names[a], names[ap], names[e], complex(step[e]), status[e])
            for a, ap in channels.blocks()
            for e in channels.channels(a, ap)
        ]
    )
    return recompose(channels, limit), report


def stray_anyon_pass(target: TargetState, probe: ProbeSpec, passes: int) -> PairBasisMatrix:
    """Charges crossing between ``A`` and ``Abar`` with certainty (``t1 = 1``, ``r1 = 0``)."""
    config = InterferometerConfig(t1=BeamSplitter(1.0, 0.0), placement=BELOW)
    return evolve(target, probe, config, passes)


def channel_table(channels: DifferenceChannelMatrix) -> list[tuple[int, int, int]]:
    """Distinct ``(a, a', e)`` triples present in a decomposition."""
    return sorted({(a, ap, e) for a, ap, e, _, _ in channels.entries})

