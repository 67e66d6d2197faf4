"""Command-line interface: synth, measure, evaluate, sweep.

Exit codes: 0 success, 1 usage error, 2 data error (e.g. every case failed).
"""
from __future__ import annotations

import argparse
import csv
import sys

from .biometry import measure_case
from .errors import HcBoundsError
from .pipeline import (
    format_summary,
    load_sample_set,
    run_evaluation,
    run_sweep,
)
from .synth import SynthConfig, gen_dataset
from .uncertainty import SCORE_NAMES, variance_scores


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hcbounds", description="Head circumference with confidence bounds")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_synth = sub.add_parser("synth", help="generate a synthetic cohort on disk")
    p_synth.add_argument("--out", required=True, help="output directory")
    p_synth.add_argument("--cases", type=int, default=20, help="number of cases")
    p_synth.add_argument("--n-samples", type=int, default=8, help="samples per case")
    p_synth.add_argument("--seed", type=int, default=0, help="cohort seed")
    p_synth.add_argument("--width", type=int, default=320)
    p_synth.add_argument("--height", type=int, default=384)
    p_synth.add_argument("--sigma-center", type=float, default=1.5, help="center noise, px")
    p_synth.add_argument("--sigma-axes", type=float, default=1.5, help="axis noise, px")
    p_synth.add_argument("--sigma-theta", type=float, default=0.05, help="angle noise, rad")
    p_synth.add_argument(
        "--case-sigma-range",
        type=float,
        nargs=2,
        default=(0.25, 4.0),
        metavar=("LO", "HI"),
        help="log-uniform per-case noise multiplier range",
    )
    p_synth.add_argument(
        "--pixel-size-range",
        type=float,
        nargs=2,
        default=(0.052, 0.326),
        metavar=("LO", "HI"),
        help="pixel size range, mm/px",
    )
    p_synth.add_argument("--tau", type=float, default=None, help="soft-map sharpness (enables soft maps)")
    p_synth.add_argument("--sector-dropout", type=float, default=None, help="contour gap, degrees")
    p_synth.set_defaults(func=_cmd_synth)

    p_measure = sub.add_parser("measure", help="measure a single case from a mask directory")
    p_measure.add_argument("--masks-dir", required=True, help="directory of mask PGMs")
    p_measure.add_argument("--pixel-size-mm", type=float, required=True)
    p_measure.add_argument("--soft-dir", default=None, help="directory of soft-map PGMs")
    p_measure.add_argument("--aggregate", choices=("mean", "median"), default="median")
    p_measure.add_argument("--out", default=None, help="optional CSV output path")
    p_measure.set_defaults(func=_cmd_measure)

    p_eval = sub.add_parser("evaluate", help="evaluate a manifest against its ground truth")
    p_eval.add_argument("--manifest", required=True)
    p_eval.add_argument("--out", required=True, help="evaluation CSV path")
    p_eval.add_argument("--aggregate", choices=("mean", "median"), default="median")
    p_eval.add_argument("--hausdorff-k", type=int, default=360)
    p_eval.set_defaults(func=_cmd_evaluate)

    p_sweep = sub.add_parser("sweep", help="threshold sweep over an evaluation CSV")
    p_sweep.add_argument("--evaluation", required=True, help="evaluation CSV path")
    p_sweep.add_argument("--score", choices=SCORE_NAMES, required=True)
    p_sweep.add_argument("--steps", type=int, default=101)
    p_sweep.add_argument("--out", required=True, help="sweep CSV path")
    p_sweep.set_defaults(func=_cmd_sweep)

    return parser


def _cmd_synth(args) -> int:
    cfg = SynthConfig(
        width=args.width,
        height=args.height,
        pixel_size_range=tuple(args.pixel_size_range),
        sigma_center_px=args.sigma_center,
        sigma_axes_px=args.sigma_axes,
        sigma_theta_rad=args.sigma_theta,
        case_sigma_range=tuple(args.case_sigma_range),
        sector_dropout_deg=args.sector_dropout,
        tau=args.tau,
        seed=args.seed,
    )
    manifest = gen_dataset(cfg, args.cases, args.n_samples, args.out)
    print(f"wrote {args.cases} cases x {args.n_samples} samples -> {manifest}")
    return 0


def _fmt_opt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    return f"{value:.6f}"


def _cmd_measure(args) -> int:
    if args.pixel_size_mm <= 0:
        print("error: --pixel-size-mm must be positive", file=sys.stderr)
        return 1
    ss = load_sample_set(args.masks_dir, args.soft_dir)
    measurement = measure_case(ss, args.pixel_size_mm)
    scores = variance_scores(ss, measurement.bounds, args.pixel_size_mm)
    hc = measurement.hc_median_mm if args.aggregate == "median" else measurement.hc_mean_mm
    print(f"samples:    {ss.n} (fit failures: {measurement.n_failed})")
    print(f"HC ({args.aggregate}): {hc:.6f} mm")
    print(f"HC mean:    {measurement.hc_mean_mm:.6f} mm")
    print(f"HC median:  {measurement.hc_median_mm:.6f} mm")
    bounds = measurement.bounds
    if bounds is not None:
        tag = " (fallback)" if bounds.fallback_used else ""
        print(f"bounds:     [{bounds.lb_mm:.6f}, {bounds.ub_mm:.6f}] mm{tag}")
    else:
        print("bounds:     n/a (single sample)")
    print(
        "scores:     h1={} h2={} h3={} h4={}".format(
            *(_fmt_opt(v) or "n/a" for v in scores.as_dict().values())
        )
    )
    if args.out:
        columns = (
            "n_samples",
            "hc_mean_mm",
            "hc_median_mm",
            "lb_mm",
            "ub_mm",
            "fallback_used",
            "h1",
            "h2",
            "h3",
            "h4",
        )
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(columns)
            writer.writerow(
                [
                    str(measurement.n_samples),
                    f"{measurement.hc_mean_mm:.6f}",
                    f"{measurement.hc_median_mm:.6f}",
                    _fmt_opt(bounds.lb_mm if bounds else None),
                    _fmt_opt(bounds.ub_mm if bounds else None),
                    _fmt_opt(bounds.fallback_used if bounds else None),
                    _fmt_opt(scores.param_variance),
                    _fmt_opt(scores.ring_area_mm2),
                    _fmt_opt(scores.mask_entropy),
                    _fmt_opt(scores.confidence_entropy),
                ]
            )
    return 0


def _cmd_evaluate(args) -> int:
    outcomes, summary = run_evaluation(
        args.manifest, args.out, aggregate=args.aggregate, hausdorff_k=args.hausdorff_k
    )
    print(format_summary(summary))
    if summary.n_failed == summary.n_cases:
        print("error: every case failed", file=sys.stderr)
        return 2
    return 0


def _cmd_sweep(args) -> int:
    rows = run_sweep(args.evaluation, args.score, args.steps, args.out)
    print(f"wrote {len(rows)} thresholds for score {args.score} -> {args.out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except HcBoundsError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
