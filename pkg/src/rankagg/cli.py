"""Command-line entry point: ``rankagg <subcommand> [options]``.

Exit codes: 0 success, 1 usage error, 2 data or validation error,
3 numerical failure.  Settings may also come from ``--config FILE`` holding
``key = value`` lines; flags given on the command line take precedence.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis
from .core import Dataset, empirical_pairwise
from .errors import CapacityError, DataError, IntervalError, NumericalError, ParseError
from .heatmap import heatmap_emit
from .io import load_dataset, load_params, read_config, save_params, write_csv, write_soc
from .normal_rum import MCEMConfig
from .synth import SynthConfig, read_level_dir, synth_generate, write_synth

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

DEFAULTS = {
    "model": None, "data": None, "format": None, "seed": 0, "draws": 5000,
    "tol": 1e-9, "out": ".", "params": None, "count": 1000, "kind": "empirical",
    "reference": None, "style": "puzzle", "levels": 4, "sets_per_level": 40,
    "rankings_per_set": 20, "m": 4, "generator": "normal", "noise_scales": None,
    "gibbs_samples": None, "burn_in": None, "max_em_iters": None, "rel_tol": None,
    "growth": None, "max_gibbs_samples": None,
}
_INT = {"seed", "draws", "count", "levels", "sets_per_level", "rankings_per_set", "m",
        "gibbs_samples", "burn_in", "max_em_iters", "max_gibbs_samples"}
_FLOAT = {"tol", "rel_tol", "growth"}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Resolved settings for one CLI invocation."""

    model: str | None
    seed: int
    tol: float
    draws: int
    out: Path
    mcem: MCEMConfig = field(default_factory=MCEMConfig)
    reference: str | None = None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--model", choices=["mallows", "pl", "normal", "all"])
    common.add_argument("--data", help="ranking file (or level directory for sweep)")
    common.add_argument("--format", choices=["soc", "csv"])
    common.add_argument("--seed", type=int)
    common.add_argument("--draws", type=int, help="Monte Carlo draws for the Normal RUM NLL")
    common.add_argument("--tol", type=float, help="Plackett-Luce MM tolerance")
    common.add_argument("--out", help="output directory")
    common.add_argument("--config", help="file of 'key = value' settings")
    common.add_argument("--reference", help="alternative pinned to N(0,1) in Normal RUM fits")
    for name in ("gibbs-samples", "burn-in", "max-em-iters", "max-gibbs-samples"):
        common.add_argument(f"--{name}", type=int)
    common.add_argument("--rel-tol", type=float)
    common.add_argument("--growth", type=float)

    parser = _Parser(prog="rankagg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.add_parser("fit", parents=[common], help="fit one model and write its params")
    sub.add_parser("compare", parents=[common], help="fit models and write reports and heatmaps")
    p = sub.add_parser("sample", parents=[common], help="sample rankings from a params file")
    p.add_argument("--params")
    p.add_argument("--count", type=int)
    p = sub.add_parser("matrix", parents=[common], help="write a pairwise heatmap")
    p.add_argument("--params")
    p.add_argument("--kind", choices=["empirical", "model", "deviation"])
    sub.add_parser("sweep", parents=[common], help="fit a model per difficulty level")
    p = sub.add_parser("synth", parents=[common], help="generate difficulty-graded data")
    p.add_argument("--style", choices=["puzzle", "dots"])
    p.add_argument("--levels", type=int)
    p.add_argument("--sets-per-level", type=int)
    p.add_argument("--rankings-per-set", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--generator", choices=["normal", "pl"])
    p.add_argument("--noise-scales", help="comma-separated noise scale per level")
    return parser


def _resolve(args) -> dict:
    given = {k: v for k, v in vars(args).items() if v is not None}
    settings = dict(DEFAULTS)
    if args.config:
        for key, value in read_config(args.config).items():
            if key not in DEFAULTS:
                raise UsageError(f"unknown config key {key!r}")
            try:
                settings[key] = int(value) if key in _INT else float(value) if key in _FLOAT else value
            except ValueError:
                raise UsageError(f"bad value for {key}: {value!r}") from None
    settings.update(given)
    return settings


def _run_config(s: dict, data: Dataset | None = None) -> RunConfig:
    mcem_kw = {k: s[k] for k in ("gibbs_samples", "burn_in", "max_em_iters", "rel_tol",
                                 "growth", "max_gibbs_samples") if s.get(k) is not None}
    mcem_kw["seed"] = s["seed"]
    if s.get("gibbs_samples") is not None and "max_gibbs_samples" not in mcem_kw:
        mcem_kw["max_gibbs_samples"] = max(MCEMConfig.max_gibbs_samples, s["gibbs_samples"])
    if s.get("reference") is not None and data is not None:
        ref = s["reference"]
        mcem_kw["reference"] = data.index_of(ref) if ref in data.labels else int(ref)
    return RunConfig(model=s["model"], seed=s["seed"], tol=s["tol"], draws=s["draws"],
                     out=Path(s["out"]), mcem=MCEMConfig(**mcem_kw), reference=s.get("reference"))


def _need(s, key):
    if s.get(key) is None:
        raise UsageError(f"--{key.replace('_', '-')} is required")
    return s[key]


def _load(s) -> Dataset:
    return load_dataset(_need(s, "data"), s.get("format"))


def _models(rc: RunConfig, default="all"):
    name = rc.model or default
    return analysis.MODELS if name == "all" else (name,)


def _write_report(report, data: Dataset, out: Path, formats=("csv", "svg")):
    name = report.model_name
    with open(out / f"report_{name}.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report.to_dict(), fh, indent=2)
        fh.write("\n")
    order = report.display_ordering
    for what, mat, kind in (("pairwise", report.pairwise, "probability"),
                            ("empirical", report.empirical, "probability"),
                            ("deviation", report.deviation, "deviation")):
        for fmt in formats:
            heatmap_emit(mat, order, data.labels, out / f"{name}_{what}.{fmt}", fmt, kind,
                         title=f"{name} {what}")


def cmd_fit(s):
    data = _load(s)
    rc = _run_config(s, data)
    model = rc.model or "normal"
    if model == "all":
        raise UsageError("fit takes a single --model")
    rc.out.mkdir(parents=True, exist_ok=True)
    params = analysis.fit_model(data, model, seed=rc.seed, mcem=rc.mcem, tol=rc.tol,
                                reference=rc.mcem.reference)
    path = save_params(rc.out / f"params_{model}.json", params, data.labels, rc.seed,
                       {"tol": rc.tol, "mcem": rc.mcem.__dict__})
    print(path)


def cmd_compare(s):
    data = _load(s)
    rc = _run_config(s, data)
    rc.out.mkdir(parents=True, exist_ok=True)
    summary = []
    for name in _models(rc):
        params = analysis.fit_model(data, name, seed=rc.seed, mcem=rc.mcem, tol=rc.tol,
                                    reference=rc.mcem.reference)
        report = analysis.build_report(data, params, draws=rc.draws, seed=rc.seed)
        _write_report(report, data, rc.out)
        save_params(rc.out / f"params_{name}.json", params, data.labels, rc.seed)
        summary.append({"model": name, "nll": report.nll, "nll_se": report.nll_se,
                        "mean_abs_deviation": report.mean_abs_deviation,
                        "max_abs_deviation": report.max_abs_deviation})
        se = f" +/- {report.nll_se:.1f}" if report.nll_se is not None else ""
        print(f"{name:8s} NLL {report.nll:.1f}{se}  mean|dev| {report.mean_abs_deviation:.4f}")
    with open(rc.out / "summary.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")


def cmd_sample(s):
    from .mallows import MallowsParams, sample_mallows
    from .normal_rum import NormalRUMParams, sample_normal_rum
    from .plackett_luce import PLParams, sample_pl
    params, labels, _ = load_params(_need(s, "params"))
    sampler = {MallowsParams: sample_mallows, PLParams: sample_pl,
               NormalRUMParams: sample_normal_rum}[type(params)]
    if s["count"] < 1:
        raise UsageError("--count must be positive")
    data = Dataset(sampler(params, s["count"], s["seed"]), tuple(labels or ()))
    out = Path(s["out"])
    out.mkdir(parents=True, exist_ok=True)
    fmt = s.get("format") or "csv"
    path = out / f"samples.{fmt}"
    (write_csv if fmt == "csv" else write_soc)(data, path)
    print(path)


def cmd_matrix(s):
    data = _load(s) if s.get("data") else None
    out = Path(s["out"])
    out.mkdir(parents=True, exist_ok=True)
    kind = s["kind"]
    if kind == "empirical":
        if data is None:
            raise UsageError("--data is required for an empirical matrix")
        mat, labels, order, hk = empirical_pairwise(data), data.labels, None, "probability"
    else:
        params, labels, _ = load_params(_need(s, "params"))
        mat, hk = analysis.model_pairwise(params), "probability"
        order = analysis.modal_ordering(params)
        if kind == "deviation":
            if data is None:
                raise UsageError("--data is required for a deviation matrix")
            mat, hk = analysis.deviation_matrix(mat, empirical_pairwise(data)), "deviation"
    if order is None:
        counts = data.beats.sum(axis=1)
        order = tuple(int(j) for j in np.lexsort((np.arange(data.m), -counts)))
    for fmt in ("csv", "svg"):
        print(heatmap_emit(mat, order, labels, out / f"matrix_{kind}.{fmt}", fmt, hk))


def cmd_sweep(s):
    groups = read_level_dir(_need(s, "data"))
    if not groups:
        raise DataError(f"no level files found in {s['data']}")
    truth = groups[0][2]
    rc = _run_config(s)
    model = rc.model or "normal"
    if model == "all":
        raise UsageError("sweep takes a single --model")
    rc.out.mkdir(parents=True, exist_ok=True)
    sweep = analysis.difficulty_sweep([(lab, d) for lab, d, _ in groups], model,
                                      seed=rc.seed, truth=truth, draws=rc.draws,
                                      mcem=rc.mcem, tol=rc.tol)
    lines = []
    for k, lvl in enumerate(sweep.levels):
        with open(rc.out / f"sweep_{k + 1:02d}_{lvl.label}.json", "w",
                  encoding="utf-8", newline="\n") as fh:
            json.dump(lvl.report.to_dict(), fh, indent=2)
            fh.write("\n")
        lines.append([lvl.label] + [f"{x:.6f}" for x in lvl.report.adjacent_probs])
    with open(rc.out / "adjacent_probs.csv", "w", encoding="utf-8", newline="\n") as fh:
        m = sweep.levels[0].data.m
        fh.write(",".join(["level"] + [f"pair{t + 1}" for t in range(m - 1)]) + "\n")
        for row in lines:
            fh.write(",".join(row) + "\n")
    for row in lines:
        print(" ".join(row))


def cmd_synth(s):
    noise = s.get("noise_scales")
    kwargs = dict(domain_style=s["style"], levels=s["levels"], sets_per_level=s["sets_per_level"],
                  rankings_per_set=s["rankings_per_set"], m=s["m"], generator=s["generator"],
                  seed=s["seed"])
    if noise:
        try:
            kwargs["noise_scales"] = tuple(float(x) for x in str(noise).split(","))
        except ValueError:
            raise UsageError(f"bad --noise-scales {noise!r}") from None
    elif s["levels"] != len(SynthConfig.noise_scales):
        kwargs["noise_scales"] = tuple(np.geomspace(0.5, 4.0, s["levels"])) if s["levels"] > 1 else (1.0,)
    cfg = SynthConfig(**kwargs)
    levels = synth_generate(cfg)
    out = write_synth(levels, s["out"], cfg)
    print(f"{sum(l.data.n for l in levels)} rankings in {len(levels)} levels -> {out}")


COMMANDS = {"fit": cmd_fit, "compare": cmd_compare, "sample": cmd_sample,
            "matrix": cmd_matrix, "sweep": cmd_sweep, "synth": cmd_synth}


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("a subcommand is required: " + ", ".join(COMMANDS))
        COMMANDS[args.command](_resolve(args))
    except UsageError as exc:
        print(f"rankagg: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"rankagg: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataError, CapacityError, IntervalError, OSError, json.JSONDecodeError) as exc:
        print(f"rankagg: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
