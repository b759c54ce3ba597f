"""Ghost imaging and ghost cytometry as seeded Bernoulli random projections.

Single-pixel measurements under random binary illumination behave like a
sparse random projection of the object image: pairwise Frobenius
distances, and hence RBF kernel values, survive the projection within
quantifiable error.  This package provides the mask generators, feature
extraction for both regimes, correlation reconstruction, closed-form
failure bounds with exact enumeration oracles, Monte Carlo verification
experiments, and scikit-learn estimator wrappers.
"""

from .bounds import (
    BoundReport,
    DegeneratePairError,
    bound_report,
    delta_gc,
    delta_gi,
    gamma_q,
    lambda_q,
    optimal_proxy_variance,
    phi_q,
    psi_q,
)
from .core import (
    FeatureVector,
    Mode,
    frobenius_norm_sq,
    l2_norm_sq,
    make_feature_vector,
    matrix_sum,
)
from .estimators import GhostCytometryProjector, GhostImagingProjector, KernelKNNClassifier
from .experiments import (
    ExperimentConfig,
    ExperimentReport,
    classify_demo,
    kernel_gap_experiment,
    kernel_knn_classify,
    knn_predict,
    matched_beta,
    rbf_gram,
    rbf_kernel,
    synth_cells,
    verify_jl_gc,
    verify_jl_gi,
)
from .features import center_features, gc_feature_matrix, gc_features, gi_feature_matrix, gi_features
from .masks import CytometryMask, MaskSet, generate_gc_mask, generate_gi_masks
from .oracle import (
    BernoulliMoments,
    bernoulli_product_moments,
    exact_gc_statistics,
    exact_gi_statistics,
)
from .reconstruct import reconstruct_image, rescale_reconstruction

__version__ = "0.1.0"

__all__ = [
    "BernoulliMoments",
    "BoundReport",
    "CytometryMask",
    "DegeneratePairError",
    "ExperimentConfig",
    "ExperimentReport",
    "FeatureVector",
    "GhostCytometryProjector",
    "GhostImagingProjector",
    "KernelKNNClassifier",
    "MaskSet",
    "Mode",
    "bernoulli_product_moments",
    "bound_report",
    "center_features",
    "classify_demo",
    "delta_gc",
    "delta_gi",
    "exact_gc_statistics",
    "exact_gi_statistics",
    "frobenius_norm_sq",
    "gamma_q",
    "gc_feature_matrix",
    "gc_features",
    "generate_gc_mask",
    "generate_gi_masks",
    "gi_feature_matrix",
    "gi_features",
    "kernel_gap_experiment",
    "kernel_knn_classify",
    "knn_predict",
    "l2_norm_sq",
    "lambda_q",
    "make_feature_vector",
    "matched_beta",
    "matrix_sum",
    "optimal_proxy_variance",
    "phi_q",
    "psi_q",
    "rbf_gram",
    "rbf_kernel",
    "reconstruct_image",
    "rescale_reconstruction",
    "synth_cells",
    "verify_jl_gc",
    "verify_jl_gi",
]
