"""Matrix reductions and the feature-vector container shared by all modules."""

import enum
from dataclasses import dataclass

import numpy as np

from .validation import as_image, as_vector


class Mode(str, enum.Enum):
    """Measurement regime a feature vector or mask belongs to."""

    GI = "gi"  # ghost imaging: one independent mask per feature
    GC = "gc"  # ghost cytometry: one mask, object slides across it

    def __str__(self) -> str:  # argparse/json friendliness
        return self.value


def frobenius_norm_sq(image) -> float:
    """Squared Frobenius norm: sum of squared entries.

    Shares the accumulation path of ``l2_norm_sq`` so it equals the
    squared norm of the flattened matrix bit-for-bit.
    """
    flat = as_image(image).ravel()
    return float(np.dot(flat, flat))


def matrix_sum(image) -> float:
    """Plain sum of all matrix entries."""
    return float(np.sum(as_image(image)))


def l2_norm_sq(vector) -> float:
    """Squared Euclidean norm of a vector; 0 for the empty vector."""
    arr = as_vector(vector)
    return float(np.dot(arr, arr))


@dataclass(frozen=True)
class FeatureVector:
    """Raw ghost features G, their mean <G>, and centered features g = G - <G>.

    Length is the mask count M in ghost imaging and M + W - 1 in
    cytometry.  The centered values sum to zero by construction.
    """

    raw: np.ndarray
    mean: float
    centered: np.ndarray
    mode: Mode

    def __post_init__(self):
        self.raw.setflags(write=False)
        self.centered.setflags(write=False)

    def __len__(self) -> int:
        return self.raw.shape[0]


def make_feature_vector(raw, mode: Mode) -> FeatureVector:
    """Build a FeatureVector from raw values, populating mean and centered."""
    raw = as_vector(raw, "raw features")
    if raw.size == 0:
        raise ValueError("feature vector must not be empty")
    mean = float(raw.mean())
    return FeatureVector(raw=raw, mean=mean, centered=raw - mean, mode=Mode(mode))
