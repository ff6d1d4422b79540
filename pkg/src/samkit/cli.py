"""Command-line front end.

Thin adapter over the library: parses flags, resolves the configuration,
logs it to stderr, runs the library call, prints results. No numerical
logic lives here. Exit codes: 0 success, 2 usage errors (argparse), 1
validation or runtime failures. SAMKIT_THREADS caps worker parallelism
for the sam and simulate subcommands (0 means all cores; unset means 1).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .bounds import BoundRequest, evaluate_bound
from .dataio import (
    SynthConfig,
    load_dataset,
    load_parcellation,
    synth_generate,
    write_dataset,
    write_report,
)
from .errors import ParameterError, SamkitError
from .pipeline import PipelineConfig, bound_curve, build_sam, coverage_experiment

_logger = logging.getLogger("samkit.cli")

_BOUND_CHOICES = ("massart", "vc", "cover")


class _StderrHandler(logging.Handler):
    """Writes to the current sys.stderr (late-bound, test friendly)."""

    def emit(self, record: logging.LogRecord) -> None:
        print(self.format(record), file=sys.stderr)


def _ensure_logging() -> None:
    if not any(isinstance(h, _StderrHandler) for h in _logger.handlers):
        handler = _StderrHandler()
        handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
        _logger.addHandler(handler)
        _logger.setLevel(logging.INFO)
        _logger.propagate = False


def _log_config(cfg: dict) -> None:
    _logger.info("resolved config %s", json.dumps(cfg, sort_keys=True))


def _workers_from_env() -> int:
    raw = os.environ.get("SAMKIT_THREADS")
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ParameterError(f"SAMKIT_THREADS must be an integer, got {raw!r}") from None
    if value < 0:
        raise ParameterError(f"SAMKIT_THREADS must be >= 0, got {value}")
    if value == 0:
        return os.cpu_count() or 1
    return value


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}"
        ) from None


def _method_list(text: str) -> list[str]:
    methods = [tok.strip() for tok in text.split(",") if tok.strip()]
    bad = [m for m in methods if m not in _BOUND_CHOICES]
    if bad or not methods:
        raise argparse.ArgumentTypeError(
            f"methods must come from {_BOUND_CHOICES}, got {text!r}"
        )
    return methods


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="samkit",
        description="Worst-case accuracy maps for linear classifiers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_bound = sub.add_parser("bound", help="evaluate one deviation bound")
    p_bound.add_argument("--method", choices=_BOUND_CHOICES, required=True)
    p_bound.add_argument("--n", type=int, required=True)
    p_bound.add_argument("--dim", type=int, required=True)
    p_bound.add_argument("--delta", type=float, default=0.05)
    p_bound.add_argument("--json", action="store_true")

    p_sam = sub.add_parser("sam", help="build a significance map from files")
    p_sam.add_argument("--data", required=True, help="dataset manifest JSON")
    p_sam.add_argument("--atlas", required=True, help="parcellation CSV")
    p_sam.add_argument("--components", type=int, default=1)
    p_sam.add_argument("--bound", choices=_BOUND_CHOICES, default="cover")
    p_sam.add_argument("--delta", type=float, default=0.05)
    p_sam.add_argument("--alpha", type=float, default=0.05)
    p_sam.add_argument("--c-reg", type=float, default=1.0)
    p_sam.add_argument(
        "--statistic", choices=("worst_case", "empirical"), default="worst_case"
    )
    p_sam.add_argument("--denominator", choices=("rois", "samples"), default="rois")
    p_sam.add_argument(
        "--bound-dim",
        choices=("components", "components-plus-bias"),
        default="components",
        help="dimension fed to the bound: k, or k + 1 for the bias direction",
    )
    p_sam.add_argument("--out", required=True)
    p_sam.add_argument("--format", choices=("json", "csv"), default="json")
    p_sam.add_argument("--json", action="store_true")

    p_synth = sub.add_parser("synth", help="generate a synthetic dataset")
    p_synth.add_argument("--n", type=int, required=True)
    p_synth.add_argument("--rois", type=int, required=True)
    p_synth.add_argument("--voxels-per-roi", type=int, required=True)
    p_synth.add_argument("--effect-rois", type=_int_list, default=[])
    p_synth.add_argument("--effect-size", type=float, default=0.0)
    p_synth.add_argument("--noise-sd", type=float, default=1.0)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--out", required=True, help="output directory")
    p_synth.add_argument("--json", action="store_true")

    p_sim = sub.add_parser("simulate", help="Monte Carlo validation runs")
    sim_sub = p_sim.add_subparsers(dest="mode", required=True)
    p_cov = sim_sub.add_parser("coverage", help="bound coverage experiment")
    p_cov.add_argument("--method", choices=_BOUND_CHOICES, default="cover")
    p_cov.add_argument("--n", type=int, default=200)
    p_cov.add_argument("--dim", type=int, default=1)
    p_cov.add_argument("--delta", type=float, default=0.05)
    p_cov.add_argument("--trials", type=int, default=2000)
    p_cov.add_argument("--seed", type=int, default=0)
    p_cov.add_argument("--json", action="store_true")

    p_curve = sub.add_parser("curve", help="tabulate bounds over a grid")
    p_curve.add_argument("--methods", type=_method_list, default=["cover"])
    p_curve.add_argument("--n-grid", type=_int_list, required=True)
    p_curve.add_argument("--dim-grid", type=_int_list, default=[1])
    p_curve.add_argument("--delta", type=float, default=0.05)
    p_curve.add_argument("--out", default=None)
    p_curve.add_argument("--json", action="store_true")

    return parser


def _cmd_bound(args: argparse.Namespace) -> int:
    _log_config(
        {
            "command": "bound",
            "method": args.method,
            "n": args.n,
            "dim": args.dim,
            "delta": args.delta,
        }
    )
    result = evaluate_bound(BoundRequest(args.method, args.n, args.dim, args.delta))
    if args.json:
        print(json.dumps(result.as_dict(), sort_keys=True))
    else:
        suffix = " vacuous" if result.vacuous else ""
        print(f"{result.delta_n:.4f}{suffix}")
    return 0


def _cmd_sam(args: argparse.Namespace) -> int:
    workers = _workers_from_env()
    config = PipelineConfig(
        k=args.components,
        bound_method=args.bound,
        delta=args.delta,
        alpha=args.alpha,
        c_reg=args.c_reg,
        statistic=args.statistic,
        denominator=args.denominator,
        dim_includes_bias=(args.bound_dim == "components-plus-bias"),
    )
    cfg = {
        "command": "sam",
        "data": args.data,
        "atlas": args.atlas,
        "out": args.out,
        "format": args.format,
        "workers": workers,
        **config.as_dict(),
    }
    _log_config(cfg)

    dataset = load_dataset(args.data)
    parcellation = load_parcellation(args.atlas)
    report = build_sam(dataset, parcellation, config, workers=workers)
    out_path = write_report(report, args.out, args.format)
    if args.json:
        print(json.dumps(report.as_dict(), sort_keys=True))
    else:
        ids = ",".join(str(i) for i in report.significant_rois) or "(none)"
        print(f"significant_rois {ids}")
        print(f"report {out_path}")
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    config = SynthConfig(
        n=args.n,
        rois=args.rois,
        voxels_per_roi=args.voxels_per_roi,
        effect_rois=tuple(args.effect_rois),
        effect_size=args.effect_size,
        noise_sd=args.noise_sd,
        seed=args.seed,
    )
    cfg = {
        "command": "synth",
        "n": config.n,
        "rois": config.rois,
        "voxels_per_roi": config.voxels_per_roi,
        "effect_rois": list(config.effect_rois),
        "effect_size": config.effect_size,
        "noise_sd": config.noise_sd,
        "seed": config.seed,
        "out": args.out,
    }
    _log_config(cfg)

    dataset, parcellation, truth = synth_generate(config)
    manifest_path = write_dataset(dataset, parcellation, args.out)
    truth_path = Path(args.out) / "truth.json"
    # generation parameters only: the file must not depend on where it lands
    generation = {k: v for k, v in cfg.items() if k not in ("command", "out")}
    truth_payload = {"config": generation, "effect_rois": sorted(truth)}
    truth_path.write_text(json.dumps(truth_payload, sort_keys=True, indent=2) + "\n")
    if args.json:
        print(
            json.dumps(
                {
                    "manifest": str(manifest_path),
                    "atlas": str(Path(args.out) / "atlas.csv"),
                    "truth": str(truth_path),
                    "effect_rois": sorted(truth),
                },
                sort_keys=True,
            )
        )
    else:
        print(str(manifest_path))
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    workers = _workers_from_env()
    cfg = {
        "command": "simulate coverage",
        "method": args.method,
        "n": args.n,
        "dim": args.dim,
        "delta": args.delta,
        "trials": args.trials,
        "seed": args.seed,
        "workers": workers,
    }
    _log_config(cfg)
    result = coverage_experiment(
        n=args.n,
        dim=args.dim,
        method=args.method,
        delta=args.delta,
        trials=args.trials,
        seed=args.seed,
        workers=workers,
    )
    if args.json:
        print(json.dumps(result.as_dict(), sort_keys=True))
    else:
        print(
            f"violations {result.violations}/{result.trials} "
            f"rate {result.violation_rate:.6f}"
        )
    return 0


def _cmd_curve(args: argparse.Namespace) -> int:
    cfg = {
        "command": "curve",
        "methods": args.methods,
        "n_grid": args.n_grid,
        "dim_grid": args.dim_grid,
        "delta": args.delta,
        "out": args.out,
    }
    _log_config(cfg)
    lines = ["# config: " + json.dumps(cfg, sort_keys=True)]
    lines.append("method,n,dim,delta,delta_n")
    records = []
    for method in args.methods:
        for n, dim, delta_n in bound_curve(args.n_grid, args.dim_grid, method, args.delta):
            lines.append(
                f"{method},{n},{dim},{format(args.delta, '.17g')},{format(delta_n, '.17g')}"
            )
            records.append(
                {"method": method, "n": n, "dim": dim, "delta": args.delta, "delta_n": delta_n}
            )
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    if args.json:
        print(json.dumps({"rows": records}, sort_keys=True))
    elif args.out:
        print(str(Path(args.out)))
    else:
        sys.stdout.write(text)
    return 0


_HANDLERS = {
    "bound": _cmd_bound,
    "sam": _cmd_sam,
    "synth": _cmd_synth,
    "simulate": _cmd_simulate,
    "curve": _cmd_curve,
}


def run(argv: list[str] | None = None) -> int:
    """Parse argv and execute one subcommand; returns the exit code."""
    _ensure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        return _HANDLERS[args.command](args)
    except (SamkitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":  # pragma: no cover
    main()
