"""Function point counting, fuzzy complexity weighting, and weight calibration.

The package implements the full pipeline: crisp IFPUG counting, a
Mamdani fuzzy complexity measurement, power-law effort regression,
constrained gradient-descent calibration of the 15 complexity weights,
and MMRE/PRED accuracy evaluation.  ``fpcalib.service`` exposes it over
HTTP; the ``fpcalib`` CLI is a thin client of that service.
"""

__version__ = "0.1.0"

from .fp import (
    CELLS,
    ORIGINAL_WEIGHTS,
    ComplexityClass,
    ComponentCounts,
    ComponentKind,
    FileCounts,
    GscRatings,
    WeightMatrix,
    classify_complexity,
    enhancement_fp,
    function_points,
    unadjusted_fp,
    value_adjustment_factor,
)
from .fuzzy import FuzzySystemConfig, default_config, fuzzy_ufp, fuzzy_weight, retune
from .effort import (
    CountingMethod,
    DevelopmentType,
    FilterCriteria,
    ProjectRecord,
    QualityRating,
    RegressionFit,
    filter_projects,
    fit_effort_equation,
    predict_effort,
    residual_diagnostics,
)
from .calibration import (
    CalibrationReport,
    NetworkState,
    TrainingConfig,
    calibrate,
    detect_outliers,
    forward,
    gradient,
    loss,
    project_monotone,
)
from .evaluation import (
    AccuracyReport,
    ExperimentConfig,
    ExperimentSummary,
    accuracy,
    mmre,
    pred,
    run_experiments,
)
from .dataio import GeneratorSpec, generate, load_csv, save_csv

__all__ = [
    "__version__",
    "CELLS",
    "ORIGINAL_WEIGHTS",
    "ComplexityClass",
    "ComponentCounts",
    "ComponentKind",
    "FileCounts",
    "GscRatings",
    "WeightMatrix",
    "classify_complexity",
    "enhancement_fp",
    "function_points",
    "unadjusted_fp",
    "value_adjustment_factor",
    "FuzzySystemConfig",
    "default_config",
    "fuzzy_ufp",
    "fuzzy_weight",
    "retune",
    "CountingMethod",
    "DevelopmentType",
    "FilterCriteria",
    "ProjectRecord",
    "QualityRating",
    "RegressionFit",
    "filter_projects",
    "fit_effort_equation",
    "predict_effort",
    "residual_diagnostics",
    "CalibrationReport",
    "NetworkState",
    "TrainingConfig",
    "calibrate",
    "detect_outliers",
    "forward",
    "gradient",
    "loss",
    "project_monotone",
    "AccuracyReport",
    "ExperimentConfig",
    "ExperimentSummary",
    "accuracy",
    "mmre",
    "pred",
    "run_experiments",
    "GeneratorSpec",
    "generate",
    "load_csv",
    "save_csv",
]
