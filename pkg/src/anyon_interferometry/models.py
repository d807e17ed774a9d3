"""Built-in anyon models and the JSON model-file format."""

from __future__ import annotations

import cmath
import json
import math
from importlib import resources
from typing import Any

import numpy as np

from .algebra import AnyonModel, ModelError, fill_admissible_f, golden_ratio, make_model

BUILTIN_NAMES = ("trivial", "semion", "ising", "fibonacci")

SECTIONS = ("charges", "fusion", "f_symbols", "r_symbols", "s_matrix")


class ModelFormatError(ModelError):
    """Model file could not be parsed."""


class ModelReferenceError(ModelFormatError):
    """Model file refers to a charge it does not declare."""


def _fusion_tensor(n: int, rules: dict[tuple[int, int], list[int]]) -> np.ndarray:
    N = np.zeros((n, n, n), dtype=np.int64)
    for a in range(n):
        N[0, a, a] = N[a, 0, a] = 1
    for (a, b), cs in rules.items():
        for c in cs:
            N[a, b, c] = N[b, a, c] = 1
    return N


def _trivial() -> AnyonModel:
    return make_model(
        name="trivial",
        names=("1",),
        dual=(0,),
        fusion=np.ones((1, 1, 1), dtype=np.int64),
        qdim=[1.0],
        f_symbols={(0,) * 10: 1.0},
        r_symbols={(0, 0, 0, 0, 0): 1.0},
        s_matrix=[[1.0]],
    )


def _semion() -> AnyonModel:
    N = _fusion_tensor(2, {(1, 1): [0]})
    F = fill_admissible_f(N)
    F[(1, 1, 1, 1, 0, 0, 0, 0, 0, 0)] = -1.0
    R = {(0, 0, 0, 0, 0): 1.0, (0, 1, 1, 0, 0): 1.0, (1, 0, 1, 0, 0): 1.0, (1, 1, 0, 0, 0): 1j}
    s = 1 / math.sqrt(2)
    return make_model(
        name="semion",
        names=("1", "s"),
        dual=(0, 1),
        fusion=N,
        qdim=[1.0, 1.0],
        f_symbols=F,
        r_symbols=R,
        s_matrix=[[s, s], [s, -s]],
    )


def _ising() -> AnyonModel:
    # charge order: 1, sigma, psi
    N = _fusion_tensor(3, {(1, 1): [0, 2], (1, 2): [1], (2, 2): [0]})
    F = fill_admissible_f(N)
    h = 1 / math.sqrt(2)
    for (e, f), v in {(0, 0): h, (0, 2): h, (2, 0): h, (2, 2): -h}.items():
        F[(1, 1, 1, 1, e, 0, 0, f, 0, 0)] = v
    F[(1, 2, 1, 2, 1, 0, 0, 1, 0, 0)] = -1.0
    F[(2, 1, 2, 1, 1, 0, 0, 1, 0, 0)] = -1.0
    R = {}
    for a in range(3):
        R[(0, a, a, 0, 0)] = R[(a, 0, a, 0, 0)] = 1.0
    R[(1, 1, 0, 0, 0)] = cmath.exp(-1j * math.pi / 8)
    R[(1, 1, 2, 0, 0)] = cmath.exp(3j * math.pi / 8)
    R[(1, 2, 1, 0, 0)] = R[(2, 1, 1, 0, 0)] = -1j
    R[(2, 2, 0, 0, 0)] = -1.0
    r2 = math.sqrt(2)
    S = 0.5 * np.array([[1, r2, 1], [r2, 0, -r2], [1, -r2, 1]])
    return make_model(
        name="ising",
        names=("1", "sigma", "psi"),
        dual=(0, 1, 2),
        fusion=N,
        qdim=[1.0, r2, 1.0],
        f_symbols=F,
        r_symbols=R,
        s_matrix=S,
        aliases={"σ": "sigma", "ψ": "psi"},
    )


def _fibonacci() -> AnyonModel:
    phi = golden_ratio()
    N = _fusion_tensor(2, {(1, 1): [0, 1]})
    F = fill_admissible_f(N)
    block = {(0, 0): 1 / phi, (0, 1): phi**-0.5, (1, 0): phi**-0.5, (1, 1): -1 / phi}
    for (e, f), v in block.items():
        F[(1, 1, 1, 1, e, 0, 0, f, 0, 0)] = v
    R = {(0, 0, 0, 0, 0): 1.0, (0, 1, 1, 0, 0): 1.0, (1, 0, 1, 0, 0): 1.0}
    R[(1, 1, 0, 0, 0)] = cmath.exp(-4j * math.pi / 5)
    R[(1, 1, 1, 0, 0)] = cmath.exp(3j * math.pi / 5)
    norm = 1 / math.sqrt(2 + phi)
    S = norm * np.array([[1, phi], [phi, -1]])
    return make_model(
        name="fibonacci",
        names=("1", "eps"),
        dual=(0, 1),
        fusion=N,
        qdim=[1.0, phi],
        f_symbols=F,
        r_symbols=R,
        s_matrix=S,
        aliases={"ε": "eps", "epsilon": "eps", "tau": "eps", "τ": "eps"},
    )


_BUILDERS = {"trivial": _trivial, "semion": _semion, "ising": _ising, "fibonacci": _fibonacci}


def builtin_model(name: str) -> AnyonModel:
    """Return one of the shipped models: trivial, semion, ising or fibonacci."""
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise ModelError(f"unknown built-in model {name!r}; choose from {', '.join(BUILTIN_NAMES)}") from None


def builtin_model_text(name: str) -> str:
    """Contents of the shipped model file for a built-in model."""
    if name not in BUILTIN_NAMES:
        raise ModelError(f"unknown built-in model {name!r}")
    return resources.files(__package__).joinpath("data", f"{name}.json").read_text(encoding="utf-8")


# -- serialization ------------------------------------------------------------


def _c(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def to_dict(model: AnyonModel) -> dict[str, Any]:
    names = model.names
    out: dict[str, Any] = {"name": model.name}
    out["charges"] = [
        {"name": names[i], "dual": names[model.dual[i]], "qdim": float(model.qdim[i])}
        for i in range(model.rank)
    ]
    if model.aliases:
        out["aliases"] = dict(sorted(model.aliases.items()))
    out["fusion"] = [
        {"a": names[a], "b": names[b], "c": names[c], "n": int(model.fusion[a, b, c])}
        for a, b, c in zip(*np.nonzero(model.fusion))
    ]
    out["f_symbols"] = [
        {
            "a": names[a], "b": names[b], "c": names[c], "d": names[d],
            "e": names[e], "alpha": al, "beta": be,
            "f": names[f], "mu": mu, "nu": nu,
            "re": v.real, "im": v.imag,
        }
        for (a, b, c, d, e, al, be, f, mu, nu), v in sorted(model.f_symbols.items())
    ]
    out["r_symbols"] = [
        {"a": names[a], "b": names[b], "c": names[c], "mu": mu, "nu": nu, "re": v.real, "im": v.imag}
        for (a, b, c, mu, nu), v in sorted(model.r_symbols.items())
    ]
    out["s_matrix"] = [[_c(z) for z in row] for row in model.s_matrix]
    return out


def serialize(model: AnyonModel) -> str:
    """Model-file text for ``model``; ``load_model(serialize(m)) == m``.

    One record per line so the files diff cleanly.
    """
    doc = to_dict(model)
    parts = []
    for key, value in doc.items():
        if isinstance(value, list):
            body = ",\n".join("  " + json.dumps(v, ensure_ascii=False) for v in value)
            parts.append(f' "{key}": [\n{body}\n ]' if value else f' "{key}": []')
        else:
            parts.append(f" {json.dumps(key)}: {json.dumps(value, ensure_ascii=False)}")
    return "{\n" + ",\n".join(parts) + "\n}\n"


class _Reader:
    """Field access with path-qualified diagnostics."""

    def __init__(self, index: dict[str, int]) -> None:
        self.index = index

    def field(self, entry: Any, key: str, where: str):
        if not isinstance(entry, dict):
            raise ModelFormatError(f"{where}: expected an object, got {type(entry).__name__}")
        if key not in entry:
            raise ModelFormatError(f"{where}: missing field {key!r}")
        return entry[key]

    def charge(self, entry: Any, key: str, where: str) -> int:
        name = self.field(entry, key, where)
        if not isinstance(name, str):
            raise ModelFormatError(f"{where}.{key}: charge names must be strings")
        if name not in self.index:
            raise ModelReferenceError(f"{where}.{key}: unknown charge {name!r}")
        return self.index[name]

    def integer(self, entry: Any, key: str, where: str, default: int | None = None) -> int:
        if default is not None and isinstance(entry, dict) and key not in entry:
            return default
        value = self.field(entry, key, where)
        if not isinstance(value, int) or isinstance(value, bool):
            raise ModelFormatError(f"{where}.{key}: expected an integer, got {value!r}")
        return value

    def number(self, entry: Any, key: str, where: str, default: float | None = None) -> float:
        if default is not None and isinstance(entry, dict) and key not in entry:
            return default
        value = self.field(entry, key, where)
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ModelFormatError(f"{where}.{key}: expected a number, got {value!r}")
        return float(value)


def _pair(value: Any, where: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (
        isinstance(value, list)
        and len(value) == 2
        and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in value)
    ):
        return complex(value[0], value[1])
    raise ModelFormatError(f"{where}: expected an [re, im] pair, got {value!r}")


def load_model(text: str, name: str | None = None) -> AnyonModel:
    """Parse model-file text. The result is not verified; call ``verify_model``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ModelFormatError("top level must be an object")
    for section in SECTIONS:
        if section not in doc:
            raise ModelFormatError(f"missing mandatory section {section!r}")

    charges = doc["charges"]
    if not isinstance(charges, list) or not charges:
        raise ModelFormatError("charges: expected a non-empty list")
    names = []
    for i, entry in enumerate(charges):
        nm = _Reader({}).field(entry, "name", f"charges[{i}]")
        if not isinstance(nm, str) or not nm:
            raise ModelFormatError(f"charges[{i}].name: expected a non-empty string")
        if nm in names:
            raise ModelFormatError(f"charges[{i}].name: duplicate charge {nm!r}")
        names.append(nm)
    if "1" not in names:
        raise ModelFormatError("no vacuum charge (a charge named '1' is required)")
    rd = _Reader({nm: i for i, nm in enumerate(names)})
    n = len(names)

    dual = [rd.charge(entry, "dual", f"charges[{i}]") for i, entry in enumerate(charges)]
    qdim = [rd.number(entry, "qdim", f"charges[{i}]") for i, entry in enumerate(charges)]

    def entries(section: str) -> list:
        value = doc[section]
        if not isinstance(value, list):
            raise ModelFormatError(f"{section}: expected a list")
        return value

    fusion = np.zeros((n, n, n), dtype=np.int64)
    for i, entry in enumerate(entries("fusion")):
        where = f"fusion[{i}]"
        a, b, c = (rd.charge(entry, k, where) for k in "abc")
        mult = rd.integer(entry, "n", where)
        if mult < 0:
            raise ModelFormatError(f"{where}.n: multiplicity must be non-negative")
        fusion[a, b, c] = mult

    f_symbols = {}
    for i, entry in enumerate(entries("f_symbols")):
        where = f"f_symbols[{i}]"
        a, b, c, d, e, f = (rd.charge(entry, k, where) for k in "abcdef")
        al, be, mu, nu = (rd.integer(entry, k, where, default=0) for k in ("alpha", "beta", "mu", "nu"))
        key = (a, b, c, d, e, al, be, f, mu, nu)
        if key in f_symbols:
            raise ModelFormatError(f"{where}: duplicate F-symbol entry")
        f_symbols[key] = complex(rd.number(entry, "re", where), rd.number(entry, "im", where, default=0.0))

    r_symbols = {}
    for i, entry in enumerate(entries("r_symbols")):
        where = f"r_symbols[{i}]"
        a, b, c = (rd.charge(entry, k, where) for k in "abc")
        mu, nu = (rd.integer(entry, k, where, default=0) for k in ("mu", "nu"))
        key = (a, b, c, mu, nu)
        if key in r_symbols:
            raise ModelFormatError(f"{where}: duplicate R-symbol entry")
        r_symbols[key] = complex(rd.number(entry, "re", where), rd.number(entry, "im", where, default=0.0))

    s_raw = doc["s_matrix"]
    if not isinstance(s_raw, list):
        raise ModelFormatError("s_matrix: expected a list")
    if len(s_raw) == n and all(isinstance(row, list) and len(row) == n and isinstance(row[0], list) for row in s_raw):
        flat = [(f"s_matrix[{i}][{j}]", s_raw[i][j]) for i in range(n) for j in range(n)]
    elif len(s_raw) == n * n:
        flat = [(f"s_matrix[{k}]", v) for k, v in enumerate(s_raw)]
    else:
        raise ModelFormatError(f"s_matrix: expected {n}x{n} complex entries")
    S = np.array([_pair(v, where) for where, v in flat], dtype=complex).reshape(n, n)

    aliases = doc.get("aliases", {})
    if not isinstance(aliases, dict) or not all(isinstance(k, str) and isinstance(v, str) for k, v in aliases.items()):
        raise ModelFormatError("aliases: expected an object mapping strings to charge names")
    for alias, target in aliases.items():
        if target not in rd.index:
            raise ModelReferenceError(f"aliases.{alias}: unknown charge {target!r}")

    model_name = doc.get("name", name or "custom")
    if not isinstance(model_name, str):
        raise ModelFormatError("name: expected a string")
    try:
        return make_model(
            name=model_name,
            names=names,
            dual=dual,
            fusion=fusion,
            qdim=qdim,
            f_symbols=f_symbols,
            r_symbols=r_symbols,
            s_matrix=S,
            aliases=aliases,
        )
    except ModelFormatError:
        raise
    except ModelError as exc:
        raise ModelFormatError(str(exc)) from None


def resolve_model(source: str) -> AnyonModel:
    """A built-in name or a path to a model file."""
    if source in BUILTIN_NAMES:
        return builtin_model(source)
    try:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ModelFormatError(
            f"{source!r} is neither a built-in model ({', '.join(BUILTIN_NAMES)}) nor a readable file: {exc.strerror}"
        ) from None
    return load_model(text)
