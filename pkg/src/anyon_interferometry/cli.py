"""Command line interface: ``anyon-interf {verify,run,sweep,export}``.

Exit codes: 0 success, 1 a check failed, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Sequence

import numpy as np

from .algebra import DEFAULT_TOL, AnyonModel, ModelError, verify_model
from .interferometry import (
    BELOW,
    PLACEMENTS,
    BeamSplitter,
    InterferometerConfig,
    PairBasisMatrix,
    ProbeSpec,
    TargetState,
    all_channel_factors,
    asymptotic,
    channel_table,
    decompose_initial,
    evolve,
    step_factors,
)
from .models import BUILTIN_NAMES, resolve_model, serialize
from .oracle import ENUMERATION_MAX_N, Scenario, check_density_matrix, closed_form_vs_oracle

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

# Amplitudes typed with three significant digits (e.g. 0.577) miss unit norm by ~1e-3.
DEFAULT_INPUT_TOL = 5e-3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits with 2 already; keep the message format
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def tolerance() -> float:
    raw = os.environ.get("ANYON_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        tol = float(raw)
    except ValueError:
        raise UsageError(f"ANYON_TOL must be a number, got {raw!r}") from None
    if not tol > 0:
        raise UsageError("ANYON_TOL must be positive")
    return tol


def parse_complex(text: str) -> complex:
    """``re``, ``re+imi`` or ``re-imi`` without spaces (``j`` is accepted for ``i``)."""
    s = text.strip()
    if not s or " " in s:
        raise UsageError(f"bad complex number {text!r}")
    try:
        z = complex(s.replace("i", "j"))
    except ValueError:
        raise UsageError(f"bad complex number {text!r}") from None
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise UsageError(f"complex number must be finite: {text!r}")
    return z


def _rescale(amps: dict, what: str, normalize: bool, input_tol: float) -> dict:
    norm = sum(abs(v) ** 2 for v in amps.values())
    if norm == 0:
        raise UsageError(f"{what} amplitudes are all zero")
    if not normalize and abs(norm - 1.0) > input_tol:
        raise UsageError(f"{what} is not normalized (sum of |amplitude|^2 = {norm:.6g}); pass --normalize to rescale")
    scale = 1.0 / math.sqrt(norm)
    return {k: v * scale for k, v in amps.items()}


def parse_target(model: AnyonModel, text: str, normalize: bool = False, input_tol: float = DEFAULT_INPUT_TOL) -> TargetState:
    amps: dict[int, complex] = {}
    for item in text.split(","):
        if ":" not in item:
            raise UsageError(f"target entries must look like charge:amplitude, got {item!r}")
        name, value = item.split(":", 1)
        try:
            idx = model.index(name.strip())
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from None
        amps[idx] = amps.get(idx, 0j) + parse_complex(value)
    amps = _rescale(amps, "target", normalize, input_tol)
    vec = np.zeros(model.rank, dtype=complex)
    for i, v in amps.items():
        vec[i] = v
    return TargetState(model, vec)


def parse_probe(model: AnyonModel, text: str, normalize: bool = False, input_tol: float = DEFAULT_INPUT_TOL) -> ProbeSpec:
    """``sigma`` or ``sigma:h`` or ``sigma:h:0.6,psi:v:0.8i``."""
    amps: dict[tuple[str, str], complex] = {}
    for item in text.split(","):
        parts = item.split(":")
        if len(parts) == 1:
            parts = [parts[0], "h", "1"]
        elif len(parts) == 2:
            parts = [parts[0], parts[1], "1"]
        elif len(parts) != 3:
            raise UsageError(f"probe entries must look like charge[:dir[:amplitude]], got {item!r}")
        name, direction, value = parts
        try:
            name = model.names[model.index(name.strip())]
        except KeyError as exc:
            raise UsageError(str(exc.args[0])) from None
        if direction not in ("h", "v", "horizontal", "vertical"):
            raise UsageError(f"probe direction must be h or v, got {direction!r}")
        key = (name, direction)
        amps[key] = amps.get(key, 0j) + parse_complex(value)
    amps = _rescale(amps, "probe", normalize, input_tol)
    return ProbeSpec(amps)


def parse_splitter(t_text: str | None, r_text: str | None, name: str, input_tol: float) -> BeamSplitter:
    if t_text is None and r_text is None:
        return BeamSplitter.balanced()
    if t_text is None:
        r = parse_complex(r_text)
        t = complex(math.sqrt(max(0.0, 1.0 - abs(r) ** 2)))
    elif r_text is None:
        t = parse_complex(t_text)
        r = complex(math.sqrt(max(0.0, 1.0 - abs(t) ** 2)))
    else:
        t, r = parse_complex(t_text), parse_complex(r_text)
    norm = abs(t) ** 2 + abs(r) ** 2
    if abs(norm - 1.0) > input_tol:
        raise UsageError(f"{name} is not lossless: |t|^2 + |r|^2 = {norm:.6g}")
    s = 1.0 / math.sqrt(norm)
    return BeamSplitter(t * s, r * s)


def _fmt(x: float) -> str:
    return repr(float(x) + 0.0)  # + 0.0 folds -0.0 into 0.0


def _rho_records(rho: PairBasisMatrix) -> list[dict]:
    names = rho.model.names
    out = []
    for i, (a, f, mu) in enumerate(rho.basis):
        for j, (ap, fp, nu) in enumerate(rho.basis):
            if f != fp:
                continue
            v = complex(rho.matrix[i, j])
            out.append(
                {"a": names[a], "f": names[f], "mu": mu, "a_prime": names[ap], "nu": nu, "re": v.real, "im": v.imag}
            )
    return out


def _add_model_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", required=True, help=f"built-in name ({', '.join(BUILTIN_NAMES)}) or model file path")


def _add_run_args(p: argparse.ArgumentParser) -> None:
    _add_model_arg(p)
    p.add_argument("--target", required=True, help='comma separated charge:amplitude, e.g. "1:0.6,eps:0.8"')
    p.add_argument(
        "--probe", action="append", required=True,
        help="charge name, or charge:dir:amplitude list; repeat for a heterogeneous sequence (cycled)",
    )
    p.add_argument("--t1", help="transmission amplitude of the first beam splitter")
    p.add_argument("--r1", help="reflection amplitude of the first beam splitter")
    p.add_argument("--t2", help="second beam splitter transmission (has no effect on the result)")
    p.add_argument("--r2", help="second beam splitter reflection (has no effect on the result)")
    p.add_argument("--theta1", type=float, default=0.0, help="bottom path phase (has no effect on the result)")
    p.add_argument("--theta2", type=float, default=0.0, help="top path phase (has no effect on the result)")
    p.add_argument("--placement", choices=PLACEMENTS, default=BELOW, help="position of the target's antiparticle")
    p.add_argument("--normalize", action="store_true", help="rescale target and probe amplitudes to unit norm")
    p.add_argument(
        "--input-tol", type=float, default=DEFAULT_INPUT_TOL,
        help="allowed deviation from unit norm of typed amplitudes before they are rejected",
    )


def _setup(args) -> tuple[AnyonModel, TargetState, list[ProbeSpec], InterferometerConfig, float]:
    tol = tolerance()
    model = resolve_model(args.model)
    target = parse_target(model, args.target, args.normalize, args.input_tol)
    probes = [parse_probe(model, p, args.normalize, args.input_tol) for p in args.probe]
    t1 = parse_splitter(args.t1, args.r1, "first beam splitter", args.input_tol)
    t2 = parse_splitter(args.t2, args.r2, "second beam splitter", args.input_tol)
    config = InterferometerConfig(t1=t1, t2=t2, theta_I=args.theta1, theta_II=args.theta2, placement=args.placement)
    return model, target, probes, config, tol


def _cycled(probes: list[ProbeSpec], n: int) -> list[ProbeSpec]:
    return [probes[k % len(probes)] for k in range(n)]


def cmd_verify(args, out) -> int:
    tol = tolerance()
    model = resolve_model(args.model)
    report = verify_model(model, tol=tol)
    if args.json:
        out.write(json.dumps(report.to_dict(), indent=1) + "\n")
    else:
        out.write(report.format() + "\n")
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_run(args, out) -> int:
    model, target, probes, config, tol = _setup(args)
    modes = sum([args.N is not None and not args.stray, args.asymptotic, args.stray])
    if args.asymptotic and args.N is not None:
        raise UsageError("--asymptotic cannot be combined with --N")
    if args.stray and args.N is None:
        raise UsageError("--stray needs --N (number of passes)")
    if modes != 1:
        raise UsageError("choose exactly one of --N, --asymptotic, --stray")
    if args.N is not None and args.N < 0:
        raise UsageError("--N must be non-negative")

    names = model.names
    result: dict = {"model": model.name}
    convergence = []
    if args.asymptotic:
        if len(probes) != 1:
            raise UsageError("--asymptotic needs a single --probe")
        rho, report = asymptotic(target, probes[0], config, tol=tol)
        result["mode"] = "asymptotic"
        result["N"] = None
        channels = [
            {"a": c.a, "a_prime": c.a_prime, "e": c.e, "step_factor": [c.factor.real, c.factor.imag], "abs": abs(c.factor)}
            for c in report.channels
        ]
        convergence = [c.to_dict() for c in report.channels]
    else:
        if args.stray:
            config = InterferometerConfig(t1=BeamSplitter(1.0, 0.0), t2=config.t2, theta_I=config.theta_I,
                                          theta_II=config.theta_II, placement=BELOW)
        seq = _cycled(probes, args.N)
        rho = evolve(target, seq, config)
        fac = all_channel_factors(model, seq, config)
        result["mode"] = "stray" if args.stray else "finite"
        result["N"] = args.N
        channels = [
            {"a": names[a], "a_prime": names[ap], "e": names[e], "factor": [fac[e].real, fac[e].imag], "abs": abs(fac[e])}
            for a, ap, e in channel_table(decompose_initial(target))
        ]
    result["config"] = {
        "t1": [config.t1.t.real, config.t1.t.imag],
        "r1": [config.t1.r.real, config.t1.r.imag],
        "placement": config.placement,
    }
    result["channels"] = channels
    result["rho"] = _rho_records(rho)
    result["convergence"] = convergence

    status = EXIT_OK
    if args.check:
        dm = check_density_matrix(rho, target, tol=tol)
        result["density_check"] = dm.to_dict()
        if not dm.passed:
            status = EXIT_CHECK_FAILED
        if not args.asymptotic and args.N <= ENUMERATION_MAX_N:
            cmp = closed_form_vs_oracle(Scenario(target, _cycled(probes, args.N), config, args.N))
            result["oracle"] = cmp.to_dict()
            if not cmp.passed:
                status = EXIT_CHECK_FAILED

    if args.out == "json":
        out.write(json.dumps(result, indent=1, ensure_ascii=False) + "\n")
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["a", "f", "mu", "a_prime", "nu", "re", "im"])
        for r in result["rho"]:
            w.writerow([r["a"], r["f"], r["mu"], r["a_prime"], r["nu"], _fmt(r["re"]), _fmt(r["im"])])
    return status


SWEEP_HEADER = ["N", "a", "a_prime", "e", "factor_re", "factor_im", "factor_abs"]


def sweep_rows(model, target, probes, config, n_max: int) -> list[list[str]]:
    table = channel_table(decompose_initial(target))
    steps = [step_factors(model, p, config) for p in probes]
    factors = np.ones(model.rank, dtype=complex)
    rows = []
    for n in range(n_max + 1):
        if n > 0:
            factors = factors * steps[(n - 1) % len(steps)]
        for a, ap, e in table:
            z = complex(factors[e])
            rows.append([str(n), model.names[a], model.names[ap], model.names[e], _fmt(z.real), _fmt(z.imag), _fmt(abs(z))])
    return rows


def cmd_sweep(args, out) -> int:
    model, target, probes, config, _ = _setup(args)
    if args.N_max < 0:
        raise UsageError("--N-max must be non-negative")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    w.writerows(sweep_rows(model, target, probes, config, args.N_max))
    return EXIT_OK


def cmd_export(args, out) -> int:
    out.write(serialize(resolve_model(args.model)))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="anyon-interf", description="Anyonic charge decoherence in interferometry")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="run consistency checks on a model")
    _add_model_arg(p)
    p.add_argument("--json", action="store_true", help="emit the report as JSON")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("run", help="density matrix of the target pair after probing")
    _add_run_args(p)
    p.add_argument("--N", type=int, help="number of probes")
    p.add_argument("--asymptotic", action="store_true", help="limit of infinitely many identical probes")
    p.add_argument("--stray", action="store_true", help="stray anyons: every probe passes between (t1=1); --N passes")
    p.add_argument("--out", choices=("json", "csv"), default="json")
    p.add_argument("--check", action="store_true", help="also check the density matrix and, for N <= 12, the path oracle")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="CSV of channel factors for N = 0..N-max")
    _add_run_args(p)
    p.add_argument("--N-max", dest="N_max", type=int, required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("export", help="print a model in the model-file format")
    _add_model_arg(p)
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args, out)
    except (UsageError, ModelError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        sys.stderr.write(f"anyon-interf: error: {msg}\n")
        return EXIT_USAGE


def run(argv: Sequence[str] | None = None) -> tuple[int, str]:
    """Invoke the CLI in-process, returning (exit code, stdout text)."""
    buf = io.StringIO()
    code = main(argv, out=buf)
    return code, buf.getvalue()


if __name__ == "__main__":
    sys.exit(main())
