"""Head-circumference measurement with confidence bounds from mask ensembles."""

from .biometry import (
    Bounds,
    HcMeasurement,
    SampleSet,
    aggregate_ellipses,
    bounds_from_samples,
    hc_ramanujan,
    measure_case,
    perimeter_quadrature,
)
from .ellipse import (
    Conic,
    Ellipse,
    conic_from_ellipse,
    conic_to_geometric,
    ellipse_area,
    ellipse_boundary_points,
    fit_ellipse,
    quadratic_form,
)
from .manifest import ManifestRow, parse_manifest, write_manifest
from .masks import (
    BinaryMask,
    SoftMask,
    extract_contour,
    intersect_mask,
    rasterize_ellipse,
    union_mask,
)
from .metrics import (
    EvaluationRow,
    GroundTruth,
    SweepRow,
    dice,
    evaluate_case,
    hausdorff_distance,
    sweep,
)
from .pgm import read_pgm, write_pgm
from .pipeline import (
    CaseOutcome,
    EvaluationSummary,
    evaluate_manifest,
    evaluate_records,
    load_sample_set,
    run_evaluation,
    run_sweep,
    summarize,
)
from .synth import (
    CaseRecord,
    SynthConfig,
    gen_case,
    gen_dataset,
    generate_records,
    make_case,
    sample_predictions,
    soft_map,
)
from .uncertainty import (
    SCORE_NAMES,
    NormalizationRecord,
    VarianceScores,
    confidence_entropy_score,
    ellipse_parameter_variance,
    mask_entropy_score,
    normalize_scores,
    ring_area_score,
    variance_scores,
)

__version__ = "0.1.0"

__all__ = [
    "BinaryMask",
    "Bounds",
    "CaseOutcome",
    "CaseRecord",
    "Conic",
    "Ellipse",
    "EvaluationRow",
    "EvaluationSummary",
    "GroundTruth",
    "HcMeasurement",
    "ManifestRow",
    "NormalizationRecord",
    "SCORE_NAMES",
    "SampleSet",
    "SoftMask",
    "SweepRow",
    "SynthConfig",
    "VarianceScores",
    "aggregate_ellipses",
    "bounds_from_samples",
    "conic_from_ellipse",
    "conic_to_geometric",
    "confidence_entropy_score",
    "dice",
    "ellipse_area",
    "ellipse_boundary_points",
    "ellipse_parameter_variance",
    "evaluate_case",
    "evaluate_manifest",
    "evaluate_records",
    "extract_contour",
    "fit_ellipse",
    "gen_case",
    "gen_dataset",
    "generate_records",
    "hausdorff_distance",
    "hc_ramanujan",
    "intersect_mask",
    "load_sample_set",
    "make_case",
    "mask_entropy_score",
    "measure_case",
    "normalize_scores",
    "parse_manifest",
    "perimeter_quadrature",
    "quadratic_form",
    "rasterize_ellipse",
    "read_pgm",
    "ring_area_score",
    "run_evaluation",
    "run_sweep",
    "sample_predictions",
    "soft_map",
    "summarize",
    "sweep",
    "union_mask",
    "variance_scores",
    "write_manifest",
    "write_pgm",
]
