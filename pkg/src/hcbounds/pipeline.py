"""Manifest-driven evaluation and sweep runs with canonical CSV output.

Column order and formatting are part of the contract: floats carry six
fractional digits with '.' as decimal separator, booleans serialize as
true/false, absent values as empty cells, and rows are emitted in manifest
order, so identical inputs produce byte-identical CSVs.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .biometry import SampleSet, measure_case
from .errors import HcBoundsError
from .manifest import ManifestRow, parse_manifest
from .masks import BinaryMask, SoftMask
from .metrics import EvaluationRow, GroundTruth, SweepRow, evaluate_case, sweep
from .pgm import read_pgm
from .uncertainty import variance_scores

EVALUATION_COLUMNS = (
    "case_id",
    "n_samples",
    "hc_pred_mm",
    "abs_diff_mm",
    "dice",
    "hausdorff_mm",
    "lb_mm",
    "ub_mm",
    "in_range",
    "h1",
    "h2",
    "h3",
    "h4",
    "fallback_used",
    "error",
)

SWEEP_COLUMNS = (
    "score",
    "threshold",
    "n_rejected",
    "n_accepted",
    "mean_abs_diff_mm",
    "mean_dice",
    "mean_hausdorff_mm",
    "pct_in_range",
)


@dataclass(frozen=True)
class CaseOutcome:
    """Evaluation result or the error that prevented one."""

    case_id: str
    row: EvaluationRow | None
    error: str | None = None


@dataclass(frozen=True)
class EvaluationSummary:
    """Cohort statistics in the mean +/- std shape of the per-case metrics."""

    n_cases: int
    n_failed: int
    mean_abs_diff_mm: float | None
    std_abs_diff_mm: float | None
    mean_dice: float | None
    std_dice: float | None
    mean_hausdorff_mm: float | None
    std_hausdorff_mm: float | None
    pct_in_range: float | None


def _numeric_key(path: Path):
    stem = path.stem
    return (0, int(stem), "") if stem.isdigit() else (1, 0, path.name)


def load_sample_set(masks_dir, soft_dir=None) -> SampleSet:
    """Read a case's mask (and soft map) PGMs into a SampleSet."""
    masks_dir = Path(masks_dir)
    files = sorted(masks_dir.glob("*.pgm"), key=_numeric_key)
    if not files:
        raise FileNotFoundError(f"no PGM masks in {masks_dir}")
    masks = []
    for f in files:
        grid = read_pgm(f)
        if not isinstance(grid, BinaryMask):
            raise ValueError(f"{f} is a soft map, expected a binary mask")
        masks.append(grid)
    soft = None
    if soft_dir is not None:
        soft_files = sorted(Path(soft_dir).glob("*.pgm"), key=_numeric_key)
        if len(soft_files) != len(files):
            raise ValueError(
                f"{soft_dir} holds {len(soft_files)} soft maps for {len(files)} masks"
            )
        soft = []
        for f in soft_files:
            grid = read_pgm(f)
            if not isinstance(grid, SoftMask):
                raise ValueError(f"{f} is a binary mask, expected a soft map")
            soft.append(grid)
    return SampleSet(masks, soft=soft)


def evaluate_one(
    case_id: str,
    gt: GroundTruth,
    ss: SampleSet,
    *,
    aggregate: str = "median",
    hausdorff_k: int = 360,
) -> CaseOutcome:
    """Measure and score a single loaded case; failures become error outcomes."""
    try:
        measurement = measure_case(ss, gt.pixel_size_mm)
        scores = variance_scores(ss, measurement.bounds, gt.pixel_size_mm)
        row = evaluate_case(
            case_id,
            measurement,
            gt,
            scores,
            ss.width,
            ss.height,
            aggregate=aggregate,
            hausdorff_k=hausdorff_k,
        )
        return CaseOutcome(case_id, row, None)
    except HcBoundsError as exc:
        return CaseOutcome(case_id, None, f"{type(exc).__name__}: {exc}")


def evaluate_manifest(
    rows, *, aggregate: str = "median", hausdorff_k: int = 360
) -> tuple[list[CaseOutcome], EvaluationSummary]:
    """Evaluate every manifest row; one bad case never aborts the run."""
    outcomes = []
    for row in rows:
        try:
            ss = load_sample_set(row.masks_dir, row.soft_dir)
        except (HcBoundsError, OSError, ValueError) as exc:
            outcomes.append(CaseOutcome(row.case_id, None, f"{type(exc).__name__}: {exc}"))
            continue
        outcomes.append(
            evaluate_one(
                row.case_id, row.ground_truth(), ss, aggregate=aggregate, hausdorff_k=hausdorff_k
            )
        )
    return outcomes, summarize(outcomes)


def evaluate_records(
    records, *, aggregate: str = "median", hausdorff_k: int = 360
) -> tuple[list[CaseOutcome], EvaluationSummary]:
    """Evaluate in-memory synthetic cases (CaseRecord instances)."""
    outcomes = [
        evaluate_one(
            rec.case_id, rec.gt, rec.samples, aggregate=aggregate, hausdorff_k=hausdorff_k
        )
        for rec in records
    ]
    return outcomes, summarize(outcomes)


def summarize(outcomes) -> EvaluationSummary:
    rows = [o.row for o in outcomes if o.row is not None]
    n_failed = sum(1 for o in outcomes if o.row is None)
    if not rows:
        return EvaluationSummary(len(outcomes), n_failed, None, None, None, None, None, None, None)
    abs_diff = np.array([r.abs_diff_mm for r in rows])
    dice_vals = np.array([r.dice for r in rows])
    hd = np.array([r.hausdorff_mm for r in rows])
    pct = 100.0 * sum(1 for r in rows if r.in_range is True) / len(rows)
    return EvaluationSummary(
        n_cases=len(outcomes),
        n_failed=n_failed,
        mean_abs_diff_mm=float(abs_diff.mean()),
        std_abs_diff_mm=float(abs_diff.std()),
        mean_dice=float(dice_vals.mean()),
        std_dice=float(dice_vals.std()),
        mean_hausdorff_mm=float(hd.mean()),
        std_hausdorff_mm=float(hd.std()),
        pct_in_range=pct,
    )


def format_summary(summary: EvaluationSummary) -> str:
    lines = [f"cases: {summary.n_cases} (failed: {summary.n_failed})"]
    if summary.mean_abs_diff_mm is None:
        lines.append("no successful cases")
        return "\n".join(lines)
    lines.append(
        f"abs diff (mm):  {summary.mean_abs_diff_mm:.6f} +/- {summary.std_abs_diff_mm:.6f}"
    )
    lines.append(f"dice:           {summary.mean_dice:.6f} +/- {summary.std_dice:.6f}")
    lines.append(
        f"hausdorff (mm): {summary.mean_hausdorff_mm:.6f} +/- {summary.std_hausdorff_mm:.6f}"
    )
    lines.append(f"in range:       {summary.pct_in_range:.6f}%")
    return "\n".join(lines)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def write_evaluation_csv(outcomes, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(EVALUATION_COLUMNS)
        for outcome in outcomes:
            row = outcome.row
            if row is None:
                record = [outcome.case_id] + [""] * (len(EVALUATION_COLUMNS) - 2)
                record.append(outcome.error or "unknown error")
            else:
                record = [
                    row.case_id,
                    str(row.n_samples),
                    _fmt(row.hc_pred_mm),
                    _fmt(row.abs_diff_mm),
                    _fmt(row.dice),
                    _fmt(row.hausdorff_mm),
                    _fmt(row.lb_mm),
                    _fmt(row.ub_mm),
                    _fmt(row.in_range),
                    _fmt(row.param_variance),
                    _fmt(row.ring_area_mm2),
                    _fmt(row.mask_entropy),
                    _fmt(row.confidence_entropy),
                    _fmt(row.fallback_used),
                    "",
                ]
            writer.writerow(record)


def _parse_optional_float(text: str) -> float | None:
    return float(text) if text else None


def _parse_optional_bool(text: str) -> bool | None:
    if not text:
        return None
    return text == "true"


def read_evaluation_csv(path) -> list[CaseOutcome]:
    """Read an evaluation CSV back into outcomes (inverse of the writer)."""
    outcomes = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for record in reader:
            error = record.get("error") or None
            if error:
                outcomes.append(CaseOutcome(record["case_id"], None, error))
                continue
            row = EvaluationRow(
                case_id=record["case_id"],
                hc_pred_mm=float(record["hc_pred_mm"]),
                abs_diff_mm=float(record["abs_diff_mm"]),
                dice=float(record["dice"]),
                hausdorff_mm=float(record["hausdorff_mm"]),
                lb_mm=_parse_optional_float(record["lb_mm"]),
                ub_mm=_parse_optional_float(record["ub_mm"]),
                in_range=_parse_optional_bool(record["in_range"]),
                param_variance=_parse_optional_float(record["h1"]),
                ring_area_mm2=_parse_optional_float(record["h2"]),
                mask_entropy=_parse_optional_float(record["h3"]),
                confidence_entropy=_parse_optional_float(record["h4"]),
                n_samples=int(record["n_samples"]),
                fallback_used=_parse_optional_bool(record["fallback_used"]),
            )
            outcomes.append(CaseOutcome(record["case_id"], row, None))
    return outcomes


def write_sweep_csv(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SWEEP_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    row.score_name,
                    _fmt(row.threshold),
                    str(row.n_rejected),
                    str(row.n_accepted),
                    _fmt(row.mean_abs_diff_mm),
                    _fmt(row.mean_dice),
                    _fmt(row.mean_hausdorff_mm),
                    _fmt(row.pct_in_range),
                ]
            )


def run_evaluation(
    manifest_path, out_csv, *, aggregate: str = "median", hausdorff_k: int = 360
) -> tuple[list[CaseOutcome], EvaluationSummary]:
    """Parse a manifest, evaluate every case, write the evaluation CSV."""
    rows = parse_manifest(manifest_path)
    outcomes, summary = evaluate_manifest(rows, aggregate=aggregate, hausdorff_k=hausdorff_k)
    write_evaluation_csv(outcomes, out_csv)
    return outcomes, summary


def run_sweep(evaluation_csv, score_name: str, steps: int, out_csv) -> list[SweepRow]:
    """Sweep rejection thresholds over an evaluation CSV and write the result.

    Rows that carry an error have no scores and are excluded from the cohort.
    """
    outcomes = read_evaluation_csv(evaluation_csv)
    rows = [o.row for o in outcomes if o.row is not None]
    sweep_rows = sweep(rows, score_name, steps)
    write_sweep_csv(sweep_rows, out_csv)
    return sweep_rows
