"""Directed causality testing from the asymmetry of transfer entropy
across positive and negative prediction lags.

The test computes transfer entropy at lags -eta_max..eta_max, sums the
forward minus the backward half, normalizes by the mean spectrum value,
and calls a direction causal when the normalized statistic exceeds its
threshold. The package bundles exact Gaussian oracles, two nonparametric
estimators, synthetic system generators, detection benchmarks, and
resampling-based uncertainty quantification behind one CLI.
"""

from .asymmetry import (
    AsymmetryCurve,
    PredictiveAsymmetryTest,
    asymmetry_curve,
    detect,
    normalized_asymmetry,
    predictive_asymmetry,
)
from .embedding import Embedding, EmbeddingSpec, acf_first_zero_crossing, build_embedding, valid_range
from .estimators import (
    PartitionSpec,
    TESpectrum,
    binning_heuristic,
    mi_kraskov,
    te_binned_averaged,
    te_nearest_neighbor,
    te_spectrum,
    te_visitation_frequency,
)
from .exact import (
    BidirDistinctEigen,
    BidirJordan,
    LagCovariance,
    UnidirAR1,
    ar1_unidir_covariance,
    bidir_covariance,
    exact_asymmetry,
    exact_cmi,
    exact_spectrum,
    exact_te,
    gaussian_entropy,
    model_covariance,
)
from .exceptions import (
    DegenerateDistances,
    Diverged,
    EmptyEmbedding,
    EmptyMatrix,
    EmptyRange,
    InvalidKind,
    InvalidParams,
    LagOutOfRange,
    LengthMismatch,
    NonFinite,
    NotStationary,
    NumericalError,
    ParseError,
    PredasymError,
    RejectionLimit,
    SingularCovariance,
    TooFewPoints,
    TooShort,
    ValidationError,
)
from .resampling import (
    EnsembleCurve,
    ResampleReport,
    SegmentSpec,
    ensemble_asymmetry,
    ensemble_to_csv_text,
    random_segments,
    resample_uncertain,
)
from .rng import derive_seed, make_rng
from .robustness import (
    ConfusionMatrix,
    SweepCell,
    SweepResult,
    classify_pair,
    confusion,
    mcc,
    rates,
    sweep,
)
from .series import (
    MultiSeries,
    TimeSeries,
    UncertainSeries,
    add_observational_noise,
    load_series,
    load_uncertain_series,
    save_series,
    save_uncertain_series,
)
from .systems import (
    FAMILIES,
    SystemSpec,
    default_params,
    default_transient,
    generate,
    integrate_ode,
    labels_for,
    make_spec,
    max_lag,
    n_variables,
    observational_noise_default,
    random_system,
    truth_graph,
    var_is_stable,
)

__version__ = "0.1.0"

__all__ = [
    "AsymmetryCurve",
    "BidirDistinctEigen",
    "BidirJordan",
    "ConfusionMatrix",
    "DegenerateDistances",
    "Diverged",
    "Embedding",
    "EmbeddingSpec",
    "EmptyEmbedding",
    "EmptyMatrix",
    "EmptyRange",
    "EnsembleCurve",
    "FAMILIES",
    "InvalidKind",
    "InvalidParams",
    "LagCovariance",
    "LagOutOfRange",
    "LengthMismatch",
    "MultiSeries",
    "NonFinite",
    "NotStationary",
    "NumericalError",
    "ParseError",
    "PartitionSpec",
    "PredasymError",
    "PredictiveAsymmetryTest",
    "RejectionLimit",
    "ResampleReport",
    "SegmentSpec",
    "SingularCovariance",
    "SweepCell",
    "SweepResult",
    "SystemSpec",
    "TESpectrum",
    "TimeSeries",
    "TooFewPoints",
    "TooShort",
    "UncertainSeries",
    "UnidirAR1",
    "ValidationError",
    "acf_first_zero_crossing",
    "add_observational_noise",
    "ar1_unidir_covariance",
    "asymmetry_curve",
    "bidir_covariance",
    "binning_heuristic",
    "build_embedding",
    "classify_pair",
    "confusion",
    "default_params",
    "default_transient",
    "derive_seed",
    "detect",
    "ensemble_asymmetry",
    "ensemble_to_csv_text",
    "exact_asymmetry",
    "exact_cmi",
    "exact_spectrum",
    "exact_te",
    "gaussian_entropy",
    "generate",
    "integrate_ode",
    "labels_for",
    "load_series",
    "load_uncertain_series",
    "make_rng",
    "make_spec",
    "max_lag",
    "mcc",
    "mi_kraskov",
    "model_covariance",
    "n_variables",
    "normalized_asymmetry",
    "observational_noise_default",
    "predictive_asymmetry",
    "random_segments",
    "random_system",
    "rates",
    "resample_uncertain",
    "save_series",
    "save_uncertain_series",
    "sweep",
    "te_binned_averaged",
    "te_nearest_neighbor",
    "te_spectrum",
    "te_visitation_frequency",
    "truth_graph",
    "valid_range",
    "var_is_stable",
]
