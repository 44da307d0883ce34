"""Command-line entry point.

Subcommands wire the generators, averagers and the evaluation harness
into reproducible runs: gen, average, classify, posterior, denoise,
spectra, plus rerun.  Every run writes a JSON manifest (resolved config,
seed, tool version, output list) next to its first output; `rerun
MANIFEST` re-executes it and reproduces every output byte for byte,
whatever --jobs says.

Exit codes: 0 success, 1 input or usage error, 2 numeric error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .automata import posterior, write_posterior_csv, write_posterior_pgm
from .averaging import (
    METHODS,
    AveragingConfig,
    compute_centroid,
    teka_centroid,
    write_centroid_csv,
    write_trace_json,
)
from .core import LabeledDataset, parse_multivariate_csv, write_dataset
from .datagen import CbfSpec, RosetteSpec, gen_cbf, gen_rosette
from .elastic import KdtwParams
from .errors import InputError, NumericError
from .evaluation import (
    DEFAULT_NU_GRID,
    build_prototypes,
    classify_1nc,
    default_measure,
    denoise_rosette,
    loo_select_nu,
    power_spectrum,
    report_to_dict,
    spectrum_frequencies,
)


def _require_file(path: str) -> None:
    if not os.path.isfile(path):
        raise InputError(f"input file not found: {path}")


def _write_json(path: str, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_manifest(command: str, cfg: dict, outputs: list[str],
                    explicit: str | None) -> None:
    path = explicit or outputs[0] + ".manifest.json"
    _write_json(path, {
        "command": command,
        "config": cfg,
        "outputs": outputs,
        "version": __version__,
    })


# ---------------------------------------------------------------------------
# Workers: pure config-dict -> output-files functions, shared with rerun


def run_gen_cbf(cfg: dict, jobs: int | None = None) -> list[str]:
    spec = CbfSpec(per_class=cfg["per_class"], length=cfg["length"],
                   seed=cfg["seed"], noiseless=cfg["noiseless"])
    write_dataset(cfg["out"], gen_cbf(spec))
    return [cfg["out"]]


def run_gen_rosette(cfg: dict, jobs: int | None = None) -> list[str]:
    spec = RosetteSpec(
        n_instances=cfg["instances"], f0=cfg["f0"], A0=cfg["a0"],
        sample_rate=cfg["sample_rate"], duration=cfg["duration"],
        snr_db=cfg["snr"], seed=cfg["seed"],
        no_perturbation=cfg["no_perturbation"], no_comb=cfg["no_comb"],
    )
    clean, noisy = gen_rosette(spec)
    zeros = [0] * len(clean)
    write_dataset(cfg["out_clean"], LabeledDataset(clean, zeros, "rosette"))
    write_dataset(cfg["out_noisy"], LabeledDataset(noisy, zeros, "rosette"))
    return [cfg["out_clean"], cfg["out_noisy"]]


def run_average(cfg: dict, jobs: int | None = None) -> list[str]:
    _require_file(cfg["in"])
    ds = parse_multivariate_csv(cfg["in"], cfg["d"])
    if cfg["label"] is None:
        group = list(ds.series)
    else:
        group = ds.class_series(cfg["label"])
        if not group:
            raise InputError(f"no series with label {cfg['label']}")
    acfg = AveragingConfig(nu=cfg["nu"], max_iter=cfg["max_iter"],
                           method=cfg["method"])
    if cfg["method"] == "teka":
        cent, trace = teka_centroid(group, acfg, jobs)
        write_centroid_csv(cfg["out"], cent)
    else:
        series, trace = compute_centroid(group, acfg, jobs)
        write_centroid_csv(cfg["out"], series)
    outputs = [cfg["out"]]
    if cfg["trace"]:
        write_trace_json(cfg["trace"], cfg["method"], trace)
        outputs.append(cfg["trace"])
    return outputs


def run_classify(cfg: dict, jobs: int | None = None) -> list[str]:
    _require_file(cfg["train"])
    _require_file(cfg["test"])
    train = parse_multivariate_csv(cfg["train"], cfg["d"])
    test = parse_multivariate_csv(cfg["test"], cfg["d"])
    measure = cfg["measure"] or default_measure(cfg["method"])
    warnings: tuple[str, ...] = ()
    loo_error = None
    if cfg["grid"] is not None:
        sel = loo_select_nu(train, cfg["method"], cfg["grid"], measure,
                            cfg["max_iter"], cfg["fast_loo"], jobs)
        nu, loo_error, warnings = sel.nu, sel.loo_error, sel.warnings
    else:
        nu = cfg["nu"]
    acfg = AveragingConfig(nu=nu, max_iter=cfg["max_iter"],
                           method=cfg["method"])
    protos = build_prototypes(train, acfg, jobs)
    p = KdtwParams(nu) if measure == "kdtw" else None
    report = classify_1nc(protos, test, measure, p,
                          method=f"{cfg['method']}+{measure}",
                          seed=cfg["seed"], warnings=warnings, jobs=jobs)
    doc = report_to_dict(report)
    doc["nu_selected"] = nu
    doc["loo_error"] = loo_error
    _write_json(cfg["report"], doc)
    return [cfg["report"]]


def run_posterior(cfg: dict, jobs: int | None = None) -> list[str]:
    _require_file(cfg["in"])
    ds = parse_multivariate_csv(cfg["in"], cfg["d"])
    for key in ("i", "j"):
        if not 0 <= cfg[key] < len(ds):
            raise InputError(
                f"--{key} {cfg[key]} out of range for {len(ds)} series"
            )
    m = posterior(ds.series[cfg["i"]], ds.series[cfg["j"]],
                  KdtwParams(cfg["nu"]))
    write_posterior_csv(m, cfg["out_csv"])
    outputs = [cfg["out_csv"]]
    if cfg["out_pgm"]:
        write_posterior_pgm(m, cfg["out_pgm"])
        outputs.append(cfg["out_pgm"])
    return outputs


def run_denoise(cfg: dict, jobs: int | None = None) -> list[str]:
    spec = RosetteSpec(n_instances=cfg["instances"], snr_db=cfg["snr"],
                       seed=cfg["seed"])
    gains = denoise_rosette(spec, cfg["methods"], cfg["nu"],
                            cfg["max_iter"], jobs)
    _write_json(cfg["report"], {
        "gains_db": gains,
        "instances": cfg["instances"],
        "nu": cfg["nu"],
        "seed": cfg["seed"],
        "snr_db": cfg["snr"],
    })
    return [cfg["report"]]


def run_spectra(cfg: dict, jobs: int | None = None) -> list[str]:
    _require_file(cfg["in"])
    ds = parse_multivariate_csv(cfg["in"], cfg["d"])
    if not 0 <= cfg["row"] < len(ds):
        raise InputError(f"--row {cfg['row']} out of range for {len(ds)} series")
    s = ds.series[cfg["row"]]
    if not 0 <= cfg["channel"] < s.d:
        raise InputError(f"--channel {cfg['channel']} out of range for d={s.d}")
    db = power_spectrum(s.values[:, cfg["channel"]])
    freqs = spectrum_frequencies(s.n, cfg["rate"])
    with open(cfg["out"], "w", encoding="utf-8") as fh:
        for f, v in zip(freqs, db):
            fh.write(f"{f:.17g},{v:.17g}\n")
    return [cfg["out"]]


_WORKERS = {
    "gen-cbf": run_gen_cbf,
    "gen-rosette": run_gen_rosette,
    "average": run_average,
    "classify": run_classify,
    "posterior": run_posterior,
    "denoise": run_denoise,
    "spectra": run_spectra,
}


# ---------------------------------------------------------------------------
# Argument parsing


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _parse_grid(text: str) -> list[float]:
    if text == "default":
        return list(DEFAULT_NU_GRID)
    try:
        grid = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise InputError(f"cannot parse nu grid {text!r}")
    if not grid:
        raise InputError("nu grid is empty")
    return grid


def _add_jobs(sp) -> None:
    sp.add_argument("--jobs", type=int, default=None,
                    help="worker threads (default: $TEKA_JOBS or cpu count)")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="teka",
                  description="Time-elastic kernel averaging toolkit")
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="generate synthetic datasets")
    gsub = gen.add_subparsers(dest="generator", required=True,
                              parser_class=_Parser)

    cbf = gsub.add_parser("cbf", help="cylinder/bell/funnel classes")
    cbf.add_argument("--per-class", type=int, required=True)
    cbf.add_argument("--length", type=int, default=128)
    cbf.add_argument("--seed", type=int, default=0)
    cbf.add_argument("--noiseless", action="store_true")
    cbf.add_argument("--out", required=True)
    cbf.add_argument("--manifest", default=None)

    ros = gsub.add_parser("rosette", help="two-channel periodic instances")
    ros.add_argument("--instances", type=int, default=8)
    ros.add_argument("--f0", type=float, default=20.0)
    ros.add_argument("--a0", type=float, default=1.0)
    ros.add_argument("--sample-rate", type=float, default=1200.0)
    ros.add_argument("--duration", type=float, default=None)
    ros.add_argument("--snr", type=float, default=0.0)
    ros.add_argument("--seed", type=int, default=0)
    ros.add_argument("--no-perturbation", action="store_true")
    ros.add_argument("--no-comb", action="store_true")
    ros.add_argument("--out-clean", required=True)
    ros.add_argument("--out-noisy", required=True)
    ros.add_argument("--manifest", default=None)

    avg = sub.add_parser("average", help="compute one centroid")
    avg.add_argument("--in", dest="infile", required=True)
    avg.add_argument("--d", type=int, default=1)
    avg.add_argument("--label", type=int, default=None)
    avg.add_argument("--method", choices=METHODS, required=True)
    avg.add_argument("--nu", type=float, default=1.0)
    avg.add_argument("--max-iter", type=int, default=10)
    avg.add_argument("--out", required=True)
    avg.add_argument("--trace", default=None)
    avg.add_argument("--manifest", default=None)
    _add_jobs(avg)

    cls = sub.add_parser("classify", help="nearest-prototype evaluation")
    cls.add_argument("--train", required=True)
    cls.add_argument("--test", required=True)
    cls.add_argument("--d", type=int, default=1)
    cls.add_argument("--method", choices=METHODS, required=True)
    cls.add_argument("--measure", choices=("dtw", "kdtw"), default=None)
    group = cls.add_mutually_exclusive_group(required=True)
    group.add_argument("--nu", type=float, default=None)
    group.add_argument("--grid", default=None,
                       help="'default' for the built-in grid or comma-separated nu values")
    cls.add_argument("--fast-loo", action="store_true",
                     help="reuse full-train prototypes in LOO (approximate)")
    cls.add_argument("--max-iter", type=int, default=10)
    cls.add_argument("--seed", type=int, default=0)
    cls.add_argument("--report", required=True)
    cls.add_argument("--manifest", default=None)
    _add_jobs(cls)

    pos = sub.add_parser("posterior", help="alignment matrix for one pair")
    pos.add_argument("--in", dest="infile", required=True)
    pos.add_argument("--d", type=int, default=1)
    pos.add_argument("--i", type=int, required=True)
    pos.add_argument("--j", type=int, required=True)
    pos.add_argument("--nu", type=float, required=True)
    pos.add_argument("--out-csv", required=True)
    pos.add_argument("--out-pgm", default=None)
    pos.add_argument("--manifest", default=None)

    den = sub.add_parser("denoise", help="rosette averaging SNR study")
    den.add_argument("--instances", type=int, default=8)
    den.add_argument("--snr", type=float, default=0.0)
    den.add_argument("--seed", type=int, default=0)
    den.add_argument("--nu", type=float, default=0.1)
    den.add_argument("--methods", default="teka,euclidean,dba")
    den.add_argument("--max-iter", type=int, default=10)
    den.add_argument("--report", required=True)
    den.add_argument("--manifest", default=None)
    _add_jobs(den)

    spe = sub.add_parser("spectra", help="log power spectrum of one series")
    spe.add_argument("--in", dest="infile", required=True)
    spe.add_argument("--d", type=int, default=1)
    spe.add_argument("--row", type=int, required=True)
    spe.add_argument("--channel", type=int, default=0)
    spe.add_argument("--rate", type=float, default=1.0)
    spe.add_argument("--out", required=True)
    spe.add_argument("--manifest", default=None)

    rer = sub.add_parser("rerun", help="re-execute a run from its manifest")
    rer.add_argument("manifest")
    _add_jobs(rer)

    return top


def _config_from_args(args) -> tuple[str, dict]:
    if args.command == "gen" and args.generator == "cbf":
        return "gen-cbf", {
            "per_class": args.per_class, "length": args.length,
            "seed": args.seed, "noiseless": args.noiseless, "out": args.out,
        }
    if args.command == "gen" and args.generator == "rosette":
        return "gen-rosette", {
            "instances": args.instances, "f0": args.f0, "a0": args.a0,
            "sample_rate": args.sample_rate, "duration": args.duration,
            "snr": args.snr, "seed": args.seed,
            "no_perturbation": args.no_perturbation, "no_comb": args.no_comb,
            "out_clean": args.out_clean, "out_noisy": args.out_noisy,
        }
    if args.command == "average":
        return "average", {
            "in": args.infile, "d": args.d, "label": args.label,
            "method": args.method, "nu": args.nu, "max_iter": args.max_iter,
            "out": args.out, "trace": args.trace,
        }
    if args.command == "classify":
        return "classify", {
            "train": args.train, "test": args.test, "d": args.d,
            "method": args.method, "measure": args.measure,
            "nu": args.nu,
            "grid": _parse_grid(args.grid) if args.grid else None,
            "fast_loo": args.fast_loo, "max_iter": args.max_iter,
            "seed": args.seed, "report": args.report,
        }
    if args.command == "posterior":
        return "posterior", {
            "in": args.infile, "d": args.d, "i": args.i, "j": args.j,
            "nu": args.nu, "out_csv": args.out_csv, "out_pgm": args.out_pgm,
        }
    if args.command == "denoise":
        methods = [m for m in args.methods.split(",") if m]
        return "denoise", {
            "instances": args.instances, "snr": args.snr, "seed": args.seed,
            "nu": args.nu, "methods": methods, "max_iter": args.max_iter,
            "report": args.report,
        }
    if args.command == "spectra":
        return "spectra", {
            "in": args.infile, "d": args.d, "row": args.row,
            "channel": args.channel, "rate": args.rate, "out": args.out,
        }
    raise InputError(f"unknown command {args.command!r}")


def _dispatch(args) -> int:
    jobs = getattr(args, "jobs", None)
    if args.command == "rerun":
        _require_file(args.manifest)
        with open(args.manifest, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        command = doc.get("command")
        if command not in _WORKERS:
            raise InputError(f"manifest names unknown command {command!r}")
        outputs = _WORKERS[command](doc["config"], jobs)
        _write_manifest(command, doc["config"], outputs, args.manifest)
        return 0
    command, cfg = _config_from_args(args)
    outputs = _WORKERS[command](cfg, jobs)
    _write_manifest(command, cfg, outputs, getattr(args, "manifest", None))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _dispatch(args)
    except InputError as exc:
        print(f"teka: error: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"teka: numeric error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
