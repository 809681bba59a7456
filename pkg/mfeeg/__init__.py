__description__ = "Multifractal detrended fluctuation analysis and spectrum-based EEG seizure classification"


from .classifiers import CLASSIFIERS, KNN, SVM, predict_knn, predict_svm, rbf_kernel, train_knn, train_svm
from .crossval import ConfusionMatrix, EvaluationReport, compute_metrics, grid_search, k_fold_cv
from .dataset import PROBLEMS, SETS, assemble_problem, load_bonn_signal, write_bonn_signal
from .errors import ConfigError, DataError, MfeegError, NumericalError
from .features import FEATURE_NAMES, FeatureVector, extract_feature_matrix, extract_features
from .mfdfa import (FluctuationSurface, HurstCurve, MfdfaConfig, MfdfaResult, TimeSeries,
                    build_profile, fit_hurst, fluctuation_function, make_q_grid, make_scale_grid,
                    mfdfa, segment_variances)
from .spectrum import SingularitySpectrum, singularity_spectrum, spectrum_descriptors
from .stats import rank_features, sequential_forward_select, two_sample_t_test
from .synth import (CascadeSpec, analytic_binomial_hurst, gen_binomial_cascade, gen_fgn,
                    gen_white_noise)
from .utils import MFEEG_DIR, __version__

__all__ = [
    "MFEEG_DIR",
    "TimeSeries",
    "MfdfaConfig",
    "MfdfaResult",
    "FluctuationSurface",
    "HurstCurve",
    "make_q_grid",
    "make_scale_grid",
    "build_profile",
    "segment_variances",
    "fluctuation_function",
    "fit_hurst",
    "mfdfa",
    "SingularitySpectrum",
    "singularity_spectrum",
    "spectrum_descriptors",
    "FEATURE_NAMES",
    "FeatureVector",
    "extract_features",
    "extract_feature_matrix",
    "two_sample_t_test",
    "rank_features",
    "sequential_forward_select",
    "CLASSIFIERS",
    "SVM",
    "KNN",
    "rbf_kernel",
    "train_svm",
    "predict_svm",
    "train_knn",
    "predict_knn",
    "ConfusionMatrix",
    "EvaluationReport",
    "compute_metrics",
    "k_fold_cv",
    "grid_search",
    "CascadeSpec",
    "gen_white_noise",
    "gen_fgn",
    "gen_binomial_cascade",
    "analytic_binomial_hurst",
    "SETS",
    "PROBLEMS",
    "load_bonn_signal",
    "write_bonn_signal",
    "assemble_problem",
    "MfeegError",
    "ConfigError",
    "DataError",
    "NumericalError",
    "__version__",
]
