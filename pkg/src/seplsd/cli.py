"""``seplsd`` command-line front end.

Every command writes its artifact (CSV or JSON) plus ``<artifact>.manifest.json``
holding the full configuration, library version, RNG name and wall time.
Exit codes: 0 success, 1 usage error, 2 validation failure, 3 numerical error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, _io
from .analysis import density_cdf, esd_cdf, ks_distance, ks_report, shrinkage_experiment
from .errors import DomainError, SeplsdError
from .lsd import GridSpec, InversionConfig, lsd_density, toeplitz_lsd_density
from .montecarlo import (
    RNG_NAME,
    EsdSample,
    SimSpec,
    sample_ar1,
    sample_covariance,
    sample_spiked,
    sample_toeplitz_esd,
    sample_wigner,
)
from .spiked import (
    SpikeSpec,
    critical_theta,
    forward_map,
    shrink,
    wigner_spike_map,
    wigner_spike_shrink,
)
from .transforms import (
    ExponentialToeplitz,
    MarchenkoPastur,
    ModelParams,
    ShiftedSemicircle,
    cauchy,
    m_transform,
    n_composed,
    n_transform,
)

OUTPUT_ENV = "SEPLSD_OUTPUT_DIR"

EXAMPLES = {
    None: "seplsd lsd --c 0.5 --alpha 1 --beta 0.5 --r 0.5 --out lsd.csv",
    "transform": "seplsd transform --model mp --c 0.5 --kind G --z 4 --z 1+1j",
    "lsd": "seplsd lsd --c 0.5 --alpha 1 --beta 0.5 --r 0.5 --out lsd.csv",
    "toeplitz-lsd": "seplsd toeplitz-lsd --r 0.5 --out toeplitz.csv",
    "simulate": "seplsd simulate --ensemble separable --n 1000 --t 2000 --seed 42 --out esd.csv",
    "spike-forward": "seplsd spike-forward --theta 2 --sigma 1 --wigner",
    "shrink": "seplsd shrink --lambda 2.5 --sigma 1 --wigner",
    "experiment": "seplsd experiment --kind shrinkage --trials 100 --out errors.csv",
    "validate": "seplsd validate --suite quick",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common(p: argparse.ArgumentParser, *, model: bool = True, sim: bool = False) -> None:
    if model:
        p.add_argument("--c", type=float, default=None, help="aspect ratio N/T (default 0.5, or n/t when given)")
        p.add_argument("--alpha", type=float, default=1.0)
        p.add_argument("--beta", type=float, default=0.5)
        p.add_argument("--r", type=float, default=0.5)
    if sim:
        p.add_argument("--n", type=int, default=1000)
        p.add_argument("--t", type=int, default=2000)
        p.add_argument("--seed", type=int, default=42)
    p.add_argument("--out", default=None, help="artifact path (relative paths land in $%s)" % OUTPUT_ENV)
    p.add_argument("--format", choices=("csv", "json"), default=None, help="defaults to the --out extension")
    p.add_argument("--threads", type=int, default=None, help="worker cap (default: available cores)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="seplsd", description="Spectra of separable sample covariance matrices.")
    parser.add_argument("--version", action="version", version=f"seplsd {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("transform", help="evaluate G, M or N of a base model or the composed N")
    p.add_argument("--model", choices=("mp", "semicircle", "toeplitz", "composed"), required=True)
    p.add_argument("--kind", choices=("G", "M", "N"), default="G")
    p.add_argument("--z", action="append", type=complex, required=True, help="evaluation point, repeatable")
    _common(p)

    p = sub.add_parser("lsd", help="density of the separable-model LSD")
    _common(p)
    p.add_argument("--lo", type=float, default=None)
    p.add_argument("--hi", type=float, default=None)
    p.add_argument("--count", type=int, default=2001)
    p.add_argument("--eps", type=float, nargs="+", default=[1e-3, 1e-4, 1e-5], help="imaginary offsets, decreasing")

    p = sub.add_parser("toeplitz-lsd", help="analytic LSD of the exponential Toeplitz matrix")
    p.add_argument("--r", type=float, default=0.5)
    p.add_argument("--count", type=int, default=2001)
    _common(p, model=False)

    p = sub.add_parser("simulate", help="eigenvalues of a simulated ensemble")
    p.add_argument(
        "--ensemble",
        choices=("separable", "spiked", "ar1-heterogeneous", "ar1-homogeneous", "wigner", "toeplitz"),
        default="separable",
    )
    p.add_argument("--theta", type=float, action="append", default=None, help="spike level (spiked), repeatable")
    p.add_argument("--trial", type=int, default=0)
    _common(p, sim=True)

    p = sub.add_parser("spike-forward", help="predicted outlier location for spike levels")
    p.add_argument("--theta", type=float, action="append", required=True)
    p.add_argument("--wigner", action="store_true", help="use the Wigner closed form with scale --sigma")
    p.add_argument("--sigma", type=float, default=1.0)
    _common(p)

    p = sub.add_parser("shrink", help="shrinkage estimate 1/G(lambda) for observed outliers")
    p.add_argument("--lambda", dest="lambdas", type=float, action="append", required=True)
    p.add_argument("--wigner", action="store_true")
    p.add_argument("--sigma", type=float, default=1.0)
    _common(p)

    p = sub.add_parser("experiment", help="shrinkage error table or KS report")
    p.add_argument("--kind", choices=("shrinkage", "ks", "mean-field"), default="shrinkage")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--theta", type=float, action="append", default=None, help="spike levels (default 2..11 x critical)")
    _common(p, sim=True)

    p = sub.add_parser("validate", help="run the acceptance suite")
    p.add_argument("--suite", choices=("quick", "full"), default="quick")
    p.add_argument("--only", nargs="+", default=None, help="restrict to these check keys, e.g. AC01 AC08")
    p.add_argument("--out", default=None)
    return parser


def _params(args, *, sim: bool = False) -> ModelParams:
    c = args.c
    if sim:
        ratio = args.n / args.t
        if c is None:
            c = ratio
        elif abs(c - ratio) > 1e-9:
            raise UsageError(f"--c {c} disagrees with --n/--t = {ratio}")
    elif c is None:
        c = 0.5
    return ModelParams(c, args.alpha, args.beta, args.r)


def _out_path(args, default_name: str) -> Path:
    base = Path(os.environ.get(OUTPUT_ENV, "."))
    path = Path(args.out) if getattr(args, "out", None) else Path(default_name)
    return path if path.is_absolute() else base / path


def _fmt(args, path: Path) -> str:
    if getattr(args, "format", None):
        return args.format
    return "json" if path.suffix.lower() == ".json" else "csv"


def _manifest(path: Path, args, started: float, extra: dict | None = None) -> None:
    config = {k: v for k, v in vars(args).items() if not k.startswith("_")}
    payload = {
        "command": args.command,
        "config": config,
        "version": __version__,
        "rng": RNG_NAME,
        "wall_time_s": time.perf_counter() - started,
        "artifact": path.name,
    }
    if extra:
        payload.update(extra)
    _io.write_json(path.with_name(path.name + ".manifest.json"), payload)


def _emit(text: str) -> None:
    print(text, flush=True)


def cmd_transform(args) -> int:
    params = _params(args)
    match args.model:
        case "mp":
            model = MarchenkoPastur(params.c)
        case "semicircle":
            model = ShiftedSemicircle(params.alpha, params.beta)
        case "toeplitz":
            model = ExponentialToeplitz(params.r)
        case _:
            model = None
    zs = np.array(args.z, dtype=complex)
    if model is None:
        if args.kind != "N":
            raise UsageError("--model composed supports only --kind N")
        values = np.atleast_1d(n_composed(params, zs))
    else:
        fn = {"G": cauchy, "M": m_transform, "N": n_transform}[args.kind]
        values = np.atleast_1d(fn(model, zs))
    for z, v in zip(zs, values):
        _emit(f"{args.kind}({z}) = {v}")
    if args.out:
        path = _out_path(args, "transform.csv")
        rows = [(z.real, z.imag, v.real, v.imag) for z, v in zip(zs, values)]
        if _fmt(args, path) == "json":
            _io.write_json(path, {"kind": args.kind, "model": args.model, "values": [dict(zip(("z_re", "z_im", "re", "im"), r)) for r in rows]})
        else:
            _io.write_csv(path, ["z_re", "z_im", "re", "im"], rows)
        _manifest(path, args, args._started)
    return 0


def cmd_lsd(args) -> int:
    params = _params(args)
    if (args.lo is None) != (args.hi is None):
        raise UsageError("--lo and --hi must be given together")
    grid = None if args.lo is None else GridSpec(args.lo, args.hi, args.count)
    cfg = InversionConfig(epsilon_schedule=tuple(args.eps), grid=grid, threads=args.threads)
    curve = lsd_density(params, cfg)
    path = _out_path(args, "lsd.csv")
    if _fmt(args, path) == "json":
        curve.to_json(path)
    else:
        curve.to_csv(path)
    _emit(f"support [{curve.support.lo:.6g}, {curve.support.hi:.6g}], mass {curve.mass:.6f} -> {path}")
    _manifest(path, args, args._started, {"support": [curve.support.lo, curve.support.hi], "mass": curve.mass})
    return 0


def cmd_toeplitz_lsd(args) -> int:
    curve = toeplitz_lsd_density(args.r)
    if args.count != 2001:
        curve = toeplitz_lsd_density(args.r, GridSpec(curve.support.lo, curve.support.hi, args.count, "chebyshev"))
    path = _out_path(args, "toeplitz_lsd.csv")
    if _fmt(args, path) == "json":
        curve.to_json(path)
    else:
        curve.to_csv(path)
    _emit(f"support [{curve.support.lo:.6g}, {curve.support.hi:.6g}], mass {curve.mass:.6f} -> {path}")
    _manifest(path, args, args._started)
    return 0


def _simulate(args) -> EsdSample:
    match args.ensemble:
        case "separable":
            return sample_covariance(SimSpec(args.n, args.t, _params(args, sim=True), args.seed), trial=args.trial)
        case "spiked":
            if not args.theta:
                raise UsageError("--ensemble spiked requires at least one --theta")
            spike = SpikeSpec(tuple(sorted(args.theta, reverse=True)))
            return sample_spiked(SimSpec(args.n, args.t, _params(args, sim=True), args.seed), spike, trial=args.trial)
        case "ar1-heterogeneous" | "ar1-homogeneous":
            return sample_ar1(args.n, args.t, args.ensemble.split("-", 1)[1], args.seed, trial=args.trial)
        case "wigner":
            v = sample_wigner(args.n, args.seed, trial=args.trial)
            return EsdSample(np.linalg.eigvalsh(v), args.n, None, args.seed, "wigner")
        case _:
            return sample_toeplitz_esd(args.t, args.r)


def cmd_simulate(args) -> int:
    sample = _simulate(args)
    path = _out_path(args, f"{sample.ensemble}_eigenvalues.csv")
    if _fmt(args, path) == "json":
        _io.write_json(path, {**sample.manifest(), "eigenvalues": sample.eigenvalues})
    else:
        sample.to_csv(path)
    _emit(f"{sample.ensemble}: {sample.eigenvalues.size} eigenvalues in [{sample.eigenvalues[0]:.6g}, {sample.eigenvalues[-1]:.6g}] -> {path}")
    _manifest(path, args, args._started, {"sample": sample.manifest()})
    return 0


def cmd_spike_forward(args) -> int:
    thetas = sorted(args.theta, reverse=True)
    if args.wigner:
        etas = [wigner_spike_map(th, args.sigma) for th in thetas]
        rows = [(th, eta, th > args.sigma) for th, eta in zip(thetas, etas)]
        for eta in etas:
            _emit(repr(eta))
        extra = {"sigma": args.sigma}
    else:
        params = _params(args)
        results = forward_map(params, SpikeSpec(tuple(thetas)))
        rows = [(r.theta, r.eta, r.detectable) for r in results]
        for r in results:
            _emit(f"theta={r.theta!r} eta={r.eta!r} detectable={r.detectable}")
        extra = {"critical_theta": results[0].critical_theta, "support_edge": results[0].support_edge}
    if args.out:
        path = _out_path(args, "spike_forward.csv")
        if _fmt(args, path) == "json":
            _io.write_json(path, {"rows": [dict(zip(("theta", "eta", "detectable"), r)) for r in rows], **extra})
        else:
            _io.write_csv(path, ["theta", "eta", "detectable"], rows)
        _manifest(path, args, args._started, extra)
    return 0


def cmd_shrink(args) -> int:
    lambdas = sorted(args.lambdas, reverse=True)
    if args.wigner:
        hats = [wigner_spike_shrink(lam, args.sigma) for lam in lambdas]
        rows = [(lam, hat, hat is not None) for lam, hat in zip(lambdas, hats)]
        extra = {"sigma": args.sigma}
    else:
        params = _params(args)
        results = shrink(params, lambdas)
        rows = [(r.eta, r.theta_hat, r.detectable) for r in results]
        extra = {"critical_theta": results[0].critical_theta, "support_edge": results[0].support_edge}
    for lam, hat, ok in rows:
        _emit(f"lambda={lam!r} theta_hat={hat!r}" if ok else f"lambda={lam!r} not recoverable")
    if args.out:
        path = _out_path(args, "shrink.csv")
        if _fmt(args, path) == "json":
            _io.write_json(path, {"rows": [dict(zip(("lambda", "theta_hat", "recoverable"), r)) for r in rows], **extra})
        else:
            _io.write_csv(path, ["lambda", "theta_hat", "recoverable"], rows)
        _manifest(path, args, args._started, extra)
    return 0


def cmd_experiment(args) -> int:
    params = _params(args, sim=True)
    spec = SimSpec(args.n, args.t, params, args.seed)
    if args.kind == "shrinkage":
        from .validation import SHRINKAGE_MULTIPLIERS

        thetas = args.theta or [k * critical_theta(params) for k in SHRINKAGE_MULTIPLIERS]
        table = shrinkage_experiment(spec, SpikeSpec(tuple(sorted(thetas, reverse=True))), args.trials, threads=args.threads)
        path = _out_path(args, "shrinkage_errors.csv")
        table.to_csv(path)
        table.to_json(path.with_suffix(".summary.json"))
        for row in table.summary():
            _emit(f"theta={row['theta']:.6g} median={row['median']:.4g} median_abs={row['median_abs']:.4g}")
        _manifest(path, args, args._started, {"summary": table.summary()})
        return 0
    if args.kind == "ks":
        sample = sample_covariance(spec)
        ks = ks_distance(esd_cdf(sample), density_cdf(lsd_density(params)))
        report = ks_report(sample, ks)
    else:
        het = sample_ar1(args.n, args.t, "heterogeneous", args.seed)
        hom = sample_ar1(args.n, args.t, "homogeneous", args.seed)
        report = ks_report(het, ks_distance(esd_cdf(het), esd_cdf(hom)))
        report["ensemble"] = "ar1-heterogeneous-vs-homogeneous"
    path = _out_path(args, "ks_report.json")
    _io.write_json(path, report)
    _emit(json.dumps(report))
    _manifest(path, args, args._started)
    return 0


def cmd_validate(args) -> int:
    from .validation import run_suite

    results = run_suite(args.suite, only=args.only, on_result=lambda r: _emit(r.line()))
    failed = [r.key for r in results if not r.passed]
    _emit(f"{len(results) - len(failed)}/{len(results)} checks passed" + (f"; failed: {', '.join(failed)}" if failed else ""))
    if args.out:
        path = _out_path(args, "validation.json")
        _io.write_json(path, {"suite": args.suite, "results": [r.as_dict() for r in results]})
        _manifest(path, args, args._started)
    return 2 if failed else 0


COMMANDS = {
    "transform": cmd_transform,
    "lsd": cmd_lsd,
    "toeplitz-lsd": cmd_toeplitz_lsd,
    "simulate": cmd_simulate,
    "spike-forward": cmd_spike_forward,
    "shrink": cmd_shrink,
    "experiment": cmd_experiment,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    command = next((a for a in argv if a in COMMANDS), None)
    try:
        args = parser.parse_args(argv)
        command = args.command
        if command is None:
            raise UsageError("a command is required")
        args._started = time.perf_counter()
        return COMMANDS[command](args)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(f"example: {EXAMPLES.get(command, EXAMPLES[None])}", file=sys.stderr)
        return 1
    except SeplsdError as exc:
        payload = {"error": type(exc).__name__, "message": str(exc), "payload": exc.payload}
        print(json.dumps(_io.to_jsonable(payload)), file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
