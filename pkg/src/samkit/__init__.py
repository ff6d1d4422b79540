"""Worst-case accuracy maps for linear classifiers.

Analytic deviation bounds certify, per feature region, how far a fitted
classifier's in-sample accuracy can overstate its actual accuracy; regions
whose certified worst case still beats chance make it into the map.
"""

from .bounds import (
    BoundRequest,
    BoundResult,
    DegeneracyWarning,
    GrowthFunction,
    RademacherEstimate,
    cover_bound,
    enumerate_dichotomies,
    evaluate_bound,
    hoeffding_term,
    log_growth_cover,
    massart_bound,
    rademacher_monte_carlo,
    vc_bound,
)
from .classify import (
    LinearClassifier,
    RiskEstimate,
    empirical_risk,
    predict,
    svm_fit,
)
from .dataio import (
    LabeledDataset,
    Parcellation,
    SynthConfig,
    load_dataset,
    load_parcellation,
    load_report,
    synth_generate,
    write_dataset,
    write_report,
)
from .errors import (
    DataError,
    DegenerateDirectionError,
    ParameterError,
    SamkitError,
    ShapeError,
    SizeError,
)
from .inference import (
    ProportionTest,
    RoiAnalysis,
    SamReport,
    p_value_one_sided,
    proportion_z,
    select_significant,
    worst_case_accuracy,
)
from .pipeline import (
    CoverageResult,
    PipelineConfig,
    analyze_roi,
    bound_curve,
    build_sam,
    coverage_experiment,
)
from .pls import PlsModel, deflate, pls_fit, pls_transform

__version__ = "0.1.0"

__all__ = [
    "BoundRequest",
    "BoundResult",
    "CoverageResult",
    "DataError",
    "DegeneracyWarning",
    "DegenerateDirectionError",
    "GrowthFunction",
    "LabeledDataset",
    "LinearClassifier",
    "Parcellation",
    "ParameterError",
    "PipelineConfig",
    "PlsModel",
    "ProportionTest",
    "RademacherEstimate",
    "RiskEstimate",
    "RoiAnalysis",
    "SamkitError",
    "SamReport",
    "ShapeError",
    "SizeError",
    "SynthConfig",
    "analyze_roi",
    "bound_curve",
    "build_sam",
    "cover_bound",
    "coverage_experiment",
    "deflate",
    "empirical_risk",
    "enumerate_dichotomies",
    "evaluate_bound",
    "hoeffding_term",
    "load_dataset",
    "load_parcellation",
    "load_report",
    "log_growth_cover",
    "massart_bound",
    "p_value_one_sided",
    "pls_fit",
    "pls_transform",
    "predict",
    "proportion_z",
    "rademacher_monte_carlo",
    "select_significant",
    "svm_fit",
    "synth_generate",
    "vc_bound",
    "worst_case_accuracy",
    "write_dataset",
    "write_report",
]
