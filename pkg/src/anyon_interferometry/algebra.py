"""Anyon model data and the derived quantities used by the interferometry code.

An :class:`AnyonModel` stores the algebraic data of a unitary braided tensor
category: charges and their duals, fusion multiplicities ``N[a, b, c]``,
quantum dimensions, F-symbols, R-symbols and the S-matrix.

F-symbols use the standard associator convention

    ((a b)_e c)_d = sum_f [F^{abc}_d]_{(e, alpha, beta), (f, mu, nu)} (a (b c)_f)_d

where ``alpha`` labels the ``a x b -> e`` vertex, ``beta`` the ``e x c -> d``
vertex, ``mu`` the ``b x c -> f`` vertex and ``nu`` the ``a x f -> d`` vertex.
R-symbols ``[R^{ab}_c]_{mu, nu}`` are the braiding eigenvalues for exchanging
``a`` and ``b`` in fusion channel ``c``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Sequence, Union

import numpy as np

DEFAULT_TOL = 1e-9

VACUUM = "1"

FKey = tuple[int, int, int, int, int, int, int, int, int, int]
RKey = tuple[int, int, int, int, int]


class ModelError(ValueError):
    """Raised for structurally invalid model data."""


@dataclass(frozen=True)
class ChargeLabel:
    name: str
    index: int

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class FusionVertex:
    """A basis vertex of the splitting space ``V^{ab}_c``."""

    a: ChargeLabel
    b: ChargeLabel
    c: ChargeLabel
    mu: int = 0


ChargeLike = Union[str, int, ChargeLabel]


@dataclass(frozen=True, eq=False)
class AnyonModel:
    """Immutable container for the data of an anyon model.

    Construct via :func:`make_model` (which validates shapes and fusion
    admissibility), :func:`anyon_interferometry.models.builtin_model` or
    :func:`anyon_interferometry.models.load_model`.
    """

    name: str
    names: tuple[str, ...]
    dual: tuple[int, ...]
    fusion: np.ndarray
    qdim: np.ndarray
    f_symbols: Mapping[FKey, complex]
    r_symbols: Mapping[RKey, complex]
    s_matrix: np.ndarray
    aliases: Mapping[str, str] = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return len(self.names)

    @property
    def total_qdim(self) -> float:
        return float(np.sqrt(np.sum(self.qdim**2)))

    @property
    def charges(self) -> tuple[ChargeLabel, ...]:
        return tuple(ChargeLabel(n, i) for i, n in enumerate(self.names))

    @property
    def vacuum(self) -> int:
        return self.names.index(VACUUM)

    @property
    def multiplicity_free(self) -> bool:
        return bool(np.all(self.fusion <= 1))

    def index(self, charge: ChargeLike) -> int:
        """Resolve a charge given by name, alias, index or label to its index."""
        if isinstance(charge, ChargeLabel):
            if charge.index >= self.rank or self.names[charge.index] != charge.name:
                raise KeyError(f"charge {charge.name!r} does not belong to model {self.name!r}")
            return charge.index
        if isinstance(charge, (int, np.integer)) and not isinstance(charge, bool):
            if not 0 <= charge < self.rank:
                raise KeyError(f"charge index {charge} out of range for model {self.name!r}")
            return int(charge)
        if isinstance(charge, str):
            key = self.aliases.get(charge, charge)
            try:
                return self.names.index(key)
            except ValueError:
                raise KeyError(f"unknown charge {charge!r} in model {self.name!r}") from None
        raise TypeError(f"cannot interpret {charge!r} as a charge")

    def label(self, charge: ChargeLike) -> ChargeLabel:
        i = self.index(charge)
        return ChargeLabel(self.names[i], i)

    def N(self, a: ChargeLike, b: ChargeLike, c: ChargeLike) -> int:
        return int(self.fusion[self.index(a), self.index(b), self.index(c)])

    def fuse(self, a: ChargeLike, b: ChargeLike) -> list[ChargeLabel]:
        """Charges ``c`` with ``N_ab^c >= 1``."""
        i, j = self.index(a), self.index(b)
        return [self.label(c) for c in range(self.rank) if self.fusion[i, j, c] > 0]

    def vertex(self, a: ChargeLike, b: ChargeLike, c: ChargeLike, mu: int = 0) -> FusionVertex:
        """Basis vertex of ``V^{ab}_c``; raises if ``N_ab^c <= mu``."""
        la, lb, lc = self.label(a), self.label(b), self.label(c)
        n = int(self.fusion[la.index, lb.index, lc.index])
        if not 0 <= mu < n:
            raise ValueError(f"no vertex {la}x{lb}->{lc} with multiplicity index {mu} (N = {n})")
        return FusionVertex(la, lb, lc, mu)

    def d(self, a: ChargeLike) -> float:
        return float(self.qdim[self.index(a)])

    def bar(self, a: ChargeLike) -> ChargeLabel:
        return self.label(self.dual[self.index(a)])

    def F(
        self,
        a: ChargeLike,
        b: ChargeLike,
        c: ChargeLike,
        d: ChargeLike,
        e: ChargeLike,
        f: ChargeLike,
        alpha: int = 0,
        beta: int = 0,
        mu: int = 0,
        nu: int = 0,
    ) -> complex:
        key = (
            self.index(a), self.index(b), self.index(c), self.index(d), self.index(e),
            alpha, beta, self.index(f), mu, nu,
        )
        return self.f_symbols.get(key, 0j)

    def R(self, a: ChargeLike, b: ChargeLike, c: ChargeLike, mu: int = 0, nu: int = 0) -> complex:
        return self.r_symbols.get((self.index(a), self.index(b), self.index(c), mu, nu), 0j)

    def f_indices(self, a: int, b: int, c: int, d: int) -> tuple[list[tuple[int, int, int]], list[tuple[int, int, int]]]:
        """Admissible row ``(e, alpha, beta)`` and column ``(f, mu, nu)`` labels of ``F^{abc}_d``."""
        N = self.fusion
        rows = [
            (e, al, be)
            for e in range(self.rank)
            for al in range(N[a, b, e])
            for be in range(N[e, c, d])
        ]
        cols = [
            (f, mu, nu)
            for f in range(self.rank)
            for mu in range(N[b, c, f])
            for nu in range(N[a, f, d])
        ]
        return rows, cols

    def f_matrix(self, a: ChargeLike, b: ChargeLike, c: ChargeLike, d: ChargeLike) -> np.ndarray:
        """The F-move ``F^{abc}_d`` as a dense matrix over admissible labels."""
        a, b, c, d = (self.index(x) for x in (a, b, c, d))
        rows, cols = self.f_indices(a, b, c, d)
        out = np.zeros((len(rows), len(cols)), dtype=complex)
        for i, (e, al, be) in enumerate(rows):
            for j, (f, mu, nu) in enumerate(cols):
                out[i, j] = self.f_symbols.get((a, b, c, d, e, al, be, f, mu, nu), 0j)
        return out

    def r_matrix(self, a: int, b: int, c: int) -> np.ndarray:
        n = int(self.fusion[a, b, c])
        out = np.zeros((n, n), dtype=complex)
        for mu in range(n):
            for nu in range(n):
                out[mu, nu] = self.r_symbols.get((a, b, c, mu, nu), 0j)
        return out

    def replace(self, **changes) -> "AnyonModel":
        """Copy of this model with some data replaced (used for fault injection)."""
        fields = dict(
            name=self.name, names=self.names, dual=self.dual, fusion=self.fusion,
            qdim=self.qdim, f_symbols=self.f_symbols, r_symbols=self.r_symbols,
            s_matrix=self.s_matrix, aliases=self.aliases,
        )
        fields.update(changes)
        return make_model(**fields)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AnyonModel):
            return NotImplemented
        return (
            self.name == other.name
            and self.names == other.names
            and self.dual == other.dual
            and np.array_equal(self.fusion, other.fusion)
            and np.array_equal(self.qdim, other.qdim)
            and dict(self.f_symbols) == dict(other.f_symbols)
            and dict(self.r_symbols) == dict(other.r_symbols)
            and np.array_equal(self.s_matrix, other.s_matrix)
            and dict(self.aliases) == dict(other.aliases)
        )

    __hash__ = object.__hash__

    def __repr__(self) -> str:
        return f"AnyonModel({self.name!r}, charges={list(self.names)})"


def _frozen_array(x, dtype) -> np.ndarray:
    arr = np.array(x, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def make_model(
    name: str,
    names: Sequence[str],
    dual: Sequence[int],
    fusion,
    qdim,
    f_symbols: Mapping[FKey, complex],
    r_symbols: Mapping[RKey, complex],
    s_matrix,
    aliases: Mapping[str, str] | None = None,
) -> AnyonModel:
    """Build an :class:`AnyonModel`, checking shapes and vertex admissibility.

    This does not run the consistency checks of :func:`verify_model`.
    """
    names = tuple(names)
    n = len(names)
    if len(set(names)) != n:
        raise ModelError("charge names must be unique")
    if VACUUM not in names:
        raise ModelError("no vacuum charge")
    dual = tuple(int(x) for x in dual)
    if len(dual) != n or any(not 0 <= x < n for x in dual):
        raise ModelError("dual must map every charge to a charge of the model")
    fusion = _frozen_array(fusion, np.int64)
    if fusion.shape != (n, n, n) or np.any(fusion < 0):
        raise ModelError(f"fusion tensor must be a non-negative integer array of shape {(n, n, n)}")
    qdim = _frozen_array(qdim, float)
    if qdim.shape != (n,):
        raise ModelError("one quantum dimension per charge is required")
    s_matrix = _frozen_array(s_matrix, complex)
    if s_matrix.shape != (n, n):
        raise ModelError(f"S-matrix must have shape {(n, n)}")

    fdict: dict[FKey, complex] = {}
    for key, value in f_symbols.items():
        a, b, c, d, e, al, be, f, mu, nu = (int(k) for k in key)
        if not all(0 <= x < n for x in (a, b, c, d, e, f)):
            raise ModelError(f"F-symbol {key} refers to an unknown charge")
        if not (
            0 <= al < fusion[a, b, e]
            and 0 <= be < fusion[e, c, d]
            and 0 <= mu < fusion[b, c, f]
            and 0 <= nu < fusion[a, f, d]
        ):
            raise ModelError(
                f"F-symbol F^{{{names[a]},{names[b]},{names[c]}}}_{names[d]}"
                f"[({names[e]},{al},{be}),({names[f]},{mu},{nu})] violates fusion admissibility"
            )
        fdict[(a, b, c, d, e, al, be, f, mu, nu)] = complex(value)

    rdict: dict[RKey, complex] = {}
    for key, value in r_symbols.items():
        a, b, c, mu, nu = (int(k) for k in key)
        if not all(0 <= x < n for x in (a, b, c)):
            raise ModelError(f"R-symbol {key} refers to an unknown charge")
        if not (0 <= mu < fusion[a, b, c] and 0 <= nu < fusion[a, b, c]):
            raise ModelError(
                f"R-symbol R^{{{names[a]},{names[b]}}}_{names[c]} violates fusion admissibility"
            )
        rdict[(a, b, c, mu, nu)] = complex(value)

    aliases = dict(aliases or {})
    for alias, target in aliases.items():
        if target not in names:
            raise ModelError(f"alias {alias!r} points to unknown charge {target!r}")

    return AnyonModel(
        name=name,
        names=names,
        dual=dual,
        fusion=fusion,
        qdim=qdim,
        f_symbols=MappingProxyType(fdict),
        r_symbols=MappingProxyType(rdict),
        s_matrix=s_matrix,
        aliases=MappingProxyType(aliases),
    )


def monodromy(model: AnyonModel, a: ChargeLike, b: ChargeLike) -> complex:
    """Monodromy scalar ``M_ab = S_ab S_11 / (S_1a S_1b)``."""
    S = model.s_matrix
    i, j, v = model.index(a), model.index(b), model.vacuum
    return complex(S[i, j] * S[v, v] / (S[v, i] * S[v, j]))


def monodromy_matrix(model: AnyonModel) -> np.ndarray:
    S = model.s_matrix
    v = model.vacuum
    return S * S[v, v] / np.outer(S[v], S[v])


def difference_channels(model: AnyonModel, a: ChargeLike, a_prime: ChargeLike) -> list[tuple[ChargeLabel, int]]:
    """Charges ``e`` that fuse with ``a_prime`` to give ``a``, with their multiplicity."""
    i, j = model.index(a), model.index(a_prime)
    return [
        (model.label(e), int(model.fusion[e, j, i]))
        for e in range(model.rank)
        if model.fusion[e, j, i] > 0
    ]


# -- verification -----------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    max_deviation: float
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "check": self.name,
            "passed": self.passed,
            "max_deviation": self.max_deviation,
            "detail": self.detail,
        }


@dataclass
class VerificationReport:
    model: str
    tol: float
    checks: list[CheckResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def max_deviation(self) -> float:
        return max((c.max_deviation for c in self.checks), default=0.0)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "tol": self.tol,
            "passed": self.passed,
            "max_deviation": self.max_deviation,
            "checks": [c.to_dict() for c in self.checks],
        }

    def format(self) -> str:
        lines = [f"model: {self.model}  (tol {self.tol:g})"]
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            line = f"  {status}  {c.name:<22} max deviation {c.max_deviation:.3e}"
            if c.detail:
                line += f"  [{c.detail}]"
            lines.append(line)
        lines.append("result: " + ("all checks passed" if self.passed else "FAILED: " + ", ".join(self.failed())))
        return "\n".join(lines)


class _Tracker:
    """Accumulates the worst deviation and a description of where it occurred."""

    def __init__(self) -> None:
        self.dev = 0.0
        self.where = ""

    def add(self, value: float, where: str = "") -> None:
        value = float(value)
        if value > self.dev:
            self.dev = value
            self.where = where

    def result(self, name: str, tol: float) -> CheckResult:
        passed = self.dev <= tol
        return CheckResult(name, passed, self.dev, "" if passed else self.where)


def _check_fusion(m: AnyonModel) -> _Tracker:
    tr = _Tracker()
    N, n, v = m.fusion, m.rank, m.vacuum
    for a in range(n):
        if m.dual[m.dual[a]] != a:
            tr.add(1, f"dual is not an involution at {m.names[a]}")
    if m.dual[v] != v:
        tr.add(1, "dual(1) != 1")
    for a, b in itertools.product(range(n), repeat=2):
        tr.add(abs(N[v, a, b] - (a == b)), f"N_1{m.names[a]}^{m.names[b]}")
        tr.add(abs(N[a, v, b] - (a == b)), f"N_{m.names[a]}1^{m.names[b]}")
        tr.add(abs(N[a, b, v] - (b == m.dual[a])), f"N_{m.names[a]}{m.names[b]}^1")
        for c in range(n):
            tr.add(abs(N[a, b, c] - N[b, a, c]), "fusion not commutative")
    # associativity of the fusion algebra
    lhs = np.einsum("abe,ecd->abcd", N, N)
    rhs = np.einsum("bcf,afd->abcd", N, N)
    tr.add(np.max(np.abs(lhs - rhs)), "fusion not associative")
    return tr


def _check_dimensions(m: AnyonModel) -> _Tracker:
    tr = _Tracker()
    d, N = m.qdim, m.fusion
    tr.add(abs(d[m.vacuum] - 1.0), "d_1 != 1")
    for a in range(m.rank):
        tr.add(abs(d[a] - d[m.dual[a]]), f"d_{m.names[a]} != d of its dual")
        tr.add(max(0.0, 1.0 - d[a]), f"d_{m.names[a]} < 1")
        for b in range(m.rank):
            tr.add(abs(d[a] * d[b] - N[a, b] @ d), f"d_{m.names[a]} d_{m.names[b]} != sum_c N d_c")
    return tr


def _check_s_unitary(m: AnyonModel) -> _Tracker:
    tr = _Tracker()
    S = m.s_matrix
    tr.add(np.max(np.abs(S @ S.conj().T - np.eye(m.rank))), "S not unitary")
    tr.add(np.max(np.abs(S - S.T)), "S not symmetric")
    return tr


def _check_s_dimensions(m: AnyonModel) -> _Tracker:
    tr = _Tracker()
    D, S, v = m.total_qdim, m.s_matrix, m.vacuum
    for a in range(m.rank):
        tr.add(abs(m.qdim[a] - D * S[v, a]), f"d_{m.names[a]} != D S_1{m.names[a]}")
    return tr


def _check_f_unitary(m: AnyonModel) -> _Tracker:
    tr = _Tracker()
    for a, b, c, d in itertools.product(range(m.rank), repeat=4):
        rows, cols = m.f_indices(a, b, c, d)
        if not rows and not cols:
            continue
        where = f"F^{{{m.names[a]},{m.names[b]},{m.names[c]}}}_{m.names[d]}"
        if len(rows) != len(cols):
            tr.add(1.0, where + " is not square")
            continue
        F = m.f_matrix(a, b, c, d)
        tr.add(np.max(np.abs(F @ F.conj().T - np.eye(len(rows)))), where + " not unitary")
    return tr


def _check_pentagon(m: AnyonModel) -> _Tracker:
    """Compare the two ways of re-bracketing (((ab)_f c)_g d)_t into (a(b(cd)_l)_k)_t."""
    tr = _Tracker()
    n, N = m.rank, m.fusion
    Fs = m.f_symbols

    def F(*key):
        return Fs.get(key, 0j)

    for a, b, c, d, t in itertools.product(range(n), repeat=5):
        for f, g, k, l in itertools.product(range(n), repeat=4):
            if not (N[a, b, f] and N[f, c, g] and N[g, d, t] and N[c, d, l] and N[b, l, k] and N[a, k, t]):
                continue
            for al, be, ga, de, la, mu in itertools.product(
                range(N[a, b, f]), range(N[f, c, g]), range(N[g, d, t]),
                range(N[c, d, l]), range(N[b, l, k]), range(N[a, k, t]),
            ):
                lhs = sum(
                    F(f, c, d, t, g, be, ga, l, de, nu) * F(a, b, l, t, f, al, nu, k, la, mu)
                    for nu in range(N[f, l, t])
                )
                rhs = 0j
                for h in range(n):
                    for si, ps, rh in itertools.product(range(N[b, c, h]), range(N[a, h, g]), range(N[h, d, k])):
                        rhs += (
                            F(a, b, c, g, f, al, be, h, si, ps)
                            * F(a, h, d, t, g, ps, ga, k, rh, mu)
                            * F(b, c, d, k, h, si, rh, l, de, la)
                        )
                tr.add(
                    abs(lhs - rhs),
                    f"pentagon at (a,b,c,d;t)=({','.join(m.names[x] for x in (a, b, c, d, t))})",
                )
    return tr


def _check_hexagons(m: AnyonModel) -> _Tracker:
    tr = _Tracker()
    n, N = m.rank, m.fusion
    Rm = {(a, b, c): m.r_matrix(a, b, c) for a, b, c in itertools.product(range(n), repeat=3) if N[a, b, c]}
    Rinv = {}
    for key, mat in Rm.items():
        if abs(np.linalg.det(mat)) < 1e-14:
            tr.add(1.0, f"R^{{{m.names[key[0]]},{m.names[key[1]]}}}_{m.names[key[2]]} is singular")
            return tr
        Rinv[key] = np.linalg.inv(mat)
    Fs = m.f_symbols

    def F(*key):
        return Fs.get(key, 0j)

    for a, b, c, d in itertools.product(range(n), repeat=4):
        for e, g in itertools.product(range(n), repeat=2):
            if not (N[c, a, e] and N[e, b, d] and N[c, b, g] and N[a, g, d]):
                continue
            for al, be, mu, nu in itertools.product(
                range(N[c, a, e]), range(N[e, b, d]), range(N[c, b, g]), range(N[a, g, d])
            ):
                for sign, R in ((+1, Rm), (-1, None)):
                    if sign > 0:
                        r1, r2 = R[(c, a, e)], R[(c, b, g)]
                    else:
                        r1, r2 = Rinv[(a, c, e)], Rinv[(b, c, g)]
                    lhs = 0j
                    for la, gm in itertools.product(range(N[a, c, e]), range(N[b, c, g])):
                        lhs += r1[al, la] * F(a, c, b, d, e, la, be, g, gm, nu) * r2[gm, mu]
                    rhs = 0j
                    for f in range(n):
                        for de, si, ps in itertools.product(range(N[a, b, f]), range(N[c, f, d]), range(N[f, c, d])):
                            rf = Rm[(c, f, d)][si, ps] if sign > 0 else Rinv[(f, c, d)][si, ps]
                            rhs += F(c, a, b, d, e, al, be, f, de, si) * rf * F(a, b, c, d, f, de, ps, g, mu, nu)
                    label = "hexagon" if sign > 0 else "inverse hexagon"
                    tr.add(abs(lhs - rhs), f"{label} at (a,b,c;d)=({','.join(m.names[x] for x in (a, b, c, d))})")
    return tr


def _check_monodromy_bound(m: AnyonModel) -> _Tracker:
    tr = _Tracker()
    M = monodromy_matrix(m)
    for a, b in itertools.product(range(m.rank), repeat=2):
        tr.add(max(0.0, abs(M[a, b]) - 1.0), f"|M_{m.names[a]}{m.names[b]}| > 1")
    return tr


_CHECKS = (
    ("fusion_rules", _check_fusion),
    ("dimensions", _check_dimensions),
    ("s_unitary_symmetric", _check_s_unitary),
    ("d_equals_D_S1", _check_s_dimensions),
    ("f_unitary", _check_f_unitary),
    ("pentagon", _check_pentagon),
    ("hexagon", _check_hexagons),
    ("monodromy_bound", _check_monodromy_bound),
)

CHECK_NAMES = tuple(name for name, _ in _CHECKS)


def verify_model(model: AnyonModel, tol: float = DEFAULT_TOL) -> VerificationReport:
    """Run every consistency check on ``model``; failures are report entries."""
    checks = [fn(model).result(name, tol) for name, fn in _CHECKS]
    return VerificationReport(model.name, tol, checks)


def fill_admissible_f(fusion: np.ndarray, value: complex = 1.0) -> dict[FKey, complex]:
    """F-symbol table with every admissible multiplicity-free entry set to ``value``."""
    fusion = np.asarray(fusion)
    n = fusion.shape[0]
    out: dict[FKey, complex] = {}
    for a, b, c, d, e, f in itertools.product(range(n), repeat=6):
        if fusion[a, b, e] and fusion[e, c, d] and fusion[b, c, f] and fusion[a, f, d]:
            out[(a, b, c, d, e, 0, 0, f, 0, 0)] = complex(value)
    return out


def golden_ratio() -> float:
    return (1.0 + math.sqrt(5.0)) / 2.0
