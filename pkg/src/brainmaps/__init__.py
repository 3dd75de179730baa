"""Interpretability-aware model selection for linear brain decoders."""

from .datasets import (
    Dataset,
    GroundTruth,
    generate_erf,
    generate_toy,
    load_binary,
    load_csv,
    save_binary,
    save_csv,
    standardize,
)
from .decoders import LambdaGrid, LinearModel, fit_lasso, fit_least_squares, fit_path, predict
from .geometry import cosine_similarity, normalize, null_similarity_stats
from .metrics import (
    MetricsReport,
    beta_envelope,
    cerf_brain_map,
    eta_envelope,
    full_report,
    haufe_pattern,
    interpretability,
    main_map,
    representativeness,
    reproducibility,
)
from .performance import PerformanceReport, bias_variance, main_prediction
from .resampling import PerturbationPlan, ReplicateEnsemble, fit_ensemble, make_plan
from .selection import SelectionConfig, SelectionResult, pareto_front, select, zeta

__version__ = "0.1.0"
