"""Distance-based classifiers for high-dimension, low-sample-size data."""

from ._core import (
    HdnnError,
    distance_matrix,
    energy_distance,
    evaluate,
    features,
    loocv_error,
    predict,
    robustness,
    sample,
    select_r,
    sweep,
    verify,
    within_class_means,
)

__all__ = [
    "HdnnError",
    "distance_matrix",
    "energy_distance",
    "evaluate",
    "features",
    "loocv_error",
    "predict",
    "robustness",
    "sample",
    "select_r",
    "sweep",
    "verify",
    "within_class_means",
]
