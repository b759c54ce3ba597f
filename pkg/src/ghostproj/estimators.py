"""Scikit-learn estimator wrappers around the ghost-feature core.

These make the projections compose with pipelines, grid search and model
selection: ``fit`` draws the seeded masks, ``transform`` maps flattened
images to ghost features.  Distances are preserved up to the documented
scale factors, so any downstream kernel or neighbor model sees
approximately the same geometry as on raw pixels.
"""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.exceptions import NotFittedError

from .experiments import knn_predict, rbf_gram
from .features import gc_feature_matrix, gi_feature_matrix
from .masks import generate_gc_mask, generate_gi_masks
from .validation import check_positive_int, check_probability


def _check_2d(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D array of flattened images, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("input contains non-finite values")
    return X


class GhostImagingProjector(BaseEstimator, TransformerMixin):
    """Project flattened images to ghost features with independent masks.

    Parameters
    ----------
    n_masks : int
        Number of illumination patterns (output dimension).
    q : float
        Occurrence probability of a one in each mask, strictly in (0, 1).
    image_shape : tuple[int, int] or None
        (height, width) of the input images; None treats each sample as a
        single row, which gives the same feature values.
    centered : bool
        Emit centered features g = G - <G> (per sample) instead of raw G.
    scaled : bool
        Additionally scale by 1/sqrt((n_masks - 1) q (1 - q)) so squared
        feature distances match squared pixel distances in expectation.
    seed : int
        Mask seed; equal parameters reproduce the masks bit-exactly.
    """

    def __init__(self, n_masks=1024, q=0.1, image_shape=None, centered=True,
                 scaled=False, seed=0):
        self.n_masks = n_masks
        self.q = q
        self.image_shape = image_shape
        self.centered = centered
        self.scaled = scaled
        self.seed = seed

    def fit(self, X, y=None):
        X = _check_2d(X)
        check_positive_int(self.n_masks, "n_masks")
        check_probability(self.q)
        height, width = self.image_shape or (1, X.shape[1])
        if height * width != X.shape[1]:
            raise ValueError(
                f"image_shape {self.image_shape} does not match {X.shape[1]} features"
            )
        self.n_features_in_ = X.shape[1]
        self.mask_set_ = generate_gi_masks(height, width, self.n_masks, self.q, self.seed)
        return self

    def transform(self, X):
        if not hasattr(self, "mask_set_"):
            raise NotFittedError("GhostImagingProjector is not fitted")
        X = _check_2d(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"expected {self.n_features_in_} features, got {X.shape[1]}"
            )
        out = gi_feature_matrix(X, self.mask_set_, centered=self.centered)
        if self.scaled:
            if self.n_masks < 2:
                raise ValueError("scaled output needs n_masks >= 2")
            out /= np.sqrt((self.n_masks - 1) * self.q * (1.0 - self.q))
        return out


class GhostCytometryProjector(BaseEstimator, TransformerMixin):
    """Project flattened images to sliding-mask (cytometry) ghost features.

    Each sample sweeps across one fixed height x mask_width pattern,
    producing mask_width + width - 1 features.  ``image_shape`` is
    (height, width); None treats samples as single rows.  ``centered``
    defaults to False because the sliding regime classifies on raw
    signals.
    """

    def __init__(self, mask_width=1024, q=0.1, image_shape=None, centered=False, seed=0):
        self.mask_width = mask_width
        self.q = q
        self.image_shape = image_shape
        self.centered = centered
        self.seed = seed

    def fit(self, X, y=None):
        X = _check_2d(X)
        check_positive_int(self.mask_width, "mask_width")
        check_probability(self.q)
        height, width = self.image_shape or (1, X.shape[1])
        if height * width != X.shape[1]:
            raise ValueError(
                f"image_shape {self.image_shape} does not match {X.shape[1]} features"
            )
        if self.mask_width < width:
            raise ValueError(
                f"mask_width {self.mask_width} must be >= image width {width}"
            )
        self.n_features_in_ = X.shape[1]
        self._height, self._width = height, width
        self.mask_ = generate_gc_mask(height, self.mask_width, self.q, self.seed)
        return self

    def transform(self, X):
        if not hasattr(self, "mask_"):
            raise NotFittedError("GhostCytometryProjector is not fitted")
        X = _check_2d(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"expected {self.n_features_in_} features, got {X.shape[1]}"
            )
        return gc_feature_matrix(X, self.mask_, self._height, self._width,
                                 centered=self.centered)


class KernelKNNClassifier(BaseEstimator, ClassifierMixin):
    """k-nearest-neighbor classifier in RBF-kernel-induced distance.

    ``scale`` is the RBF exponent coefficient (None means 1/n_features);
    ties go to the smallest training index, so predictions are
    deterministic.  Works on raw pixels and on ghost features alike.
    """

    def __init__(self, scale=None, k=1):
        self.scale = scale
        self.k = k

    def fit(self, X, y):
        X = _check_2d(X)
        y = np.asarray(y)
        if len(y) != X.shape[0]:
            raise ValueError("label count does not match sample count")
        self.X_ = X
        self.y_ = y
        self.classes_ = np.unique(y)
        self.scale_ = self.scale if self.scale is not None else 1.0 / X.shape[1]
        return self

    def predict(self, X):
        if not hasattr(self, "X_"):
            raise NotFittedError("KernelKNNClassifier is not fitted")
        X = _check_2d(X)
        return knn_predict(self.X_, self.y_, X,
                           kernel=lambda a, b: rbf_gram(a, b, self.scale_), k=self.k)
