"""Cohort manifest CSV: one row per case pointing at its mask files."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

from .ellipse import Ellipse
from .errors import BadNumber, EmptyManifest, MissingColumn
from .metrics import GroundTruth

REQUIRED_COLUMNS = (
    "case_id",
    "pixel_size_mm",
    "gt_cx",
    "gt_cy",
    "gt_a",
    "gt_b",
    "gt_theta",
    "masks_dir",
)
MANIFEST_COLUMNS = REQUIRED_COLUMNS + ("soft_dir",)


@dataclass(frozen=True)
class ManifestRow:
    """One case: ground-truth ellipse parameters plus mask directories.

    Geometric fields are stored canonicalized (a >= b, theta wrapped into
    [0, pi)); directory paths are resolved against the manifest location.
    """

    case_id: str
    pixel_size_mm: float
    gt_cx: float
    gt_cy: float
    gt_a: float
    gt_b: float
    gt_theta: float
    masks_dir: Path
    soft_dir: Path | None = None

    def ground_truth(self) -> GroundTruth:
        ellipse = Ellipse(self.gt_cx, self.gt_cy, self.gt_a, self.gt_b, self.gt_theta)
        return GroundTruth(ellipse=ellipse, pixel_size_mm=self.pixel_size_mm)


def _parse_float(record: dict, column: str, line: int) -> float:
    text = record[column]
    try:
        value = float(text)
    except (TypeError, ValueError) as exc:
        raise BadNumber(f"line {line}: column {column}={text!r} is not a number") from exc
    if not math.isfinite(value):
        raise BadNumber(f"line {line}: column {column}={text!r} is not finite")
    return value


def parse_manifest(path) -> list[ManifestRow]:
    """Parse and validate a manifest CSV.

    Unknown columns are ignored; a missing or empty soft_dir is allowed.
    gt_theta is accepted in any range and canonicalized modulo pi; gt_a and
    gt_b are swapped into a >= b when needed.
    """
    path = Path(path)
    base = path.resolve().parent
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise EmptyManifest(f"{path} has no header row")
        missing = [c for c in REQUIRED_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise MissingColumn(f"{path} lacks required columns: {missing}")
        rows = []
        for line, record in enumerate(reader, start=2):
            pixel_size = _parse_float(record, "pixel_size_mm", line)
            if pixel_size <= 0:
                raise BadNumber(f"line {line}: pixel_size_mm must be positive, got {pixel_size}")
            cx = _parse_float(record, "gt_cx", line)
            cy = _parse_float(record, "gt_cy", line)
            a = _parse_float(record, "gt_a", line)
            b = _parse_float(record, "gt_b", line)
            theta = _parse_float(record, "gt_theta", line)
            if a <= 0 or b <= 0:
                raise BadNumber(f"line {line}: axes must be positive, got a={a} b={b}")
            ellipse = Ellipse.canonical(cx, cy, a, b, theta)
            masks_dir = Path(record["masks_dir"])
            if not masks_dir.is_absolute():
                masks_dir = base / masks_dir
            soft_text = (record.get("soft_dir") or "").strip()
            soft_dir = None
            if soft_text:
                soft_dir = Path(soft_text)
                if not soft_dir.is_absolute():
                    soft_dir = base / soft_dir
            rows.append(
                ManifestRow(
                    case_id=record["case_id"],
                    pixel_size_mm=pixel_size,
                    gt_cx=ellipse.cx,
                    gt_cy=ellipse.cy,
                    gt_a=ellipse.a,
                    gt_b=ellipse.b,
                    gt_theta=ellipse.theta,
                    masks_dir=masks_dir,
                    soft_dir=soft_dir,
                )
            )
    if not rows:
        raise EmptyManifest(f"{path} has no data rows")
    return rows


def write_manifest(rows, path) -> None:
    """Write manifest rows (mappings keyed by MANIFEST_COLUMNS) as CSV.

    Uses '\\n' line endings so outputs are byte-identical across platforms.
    """
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MANIFEST_COLUMNS)
        for row in rows:
            writer.writerow([row.get(col, "") for col in MANIFEST_COLUMNS])
