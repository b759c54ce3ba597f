"""Ghost-feature extraction for both measurement regimes.

A ghost feature is the total intensity a single-pixel detector sees: the
elementwise product of the object with one illumination pattern, summed
over all pixels.  Ghost imaging evaluates one independent mask per
feature; ghost cytometry slides the object across one fixed mask, one
feature per shift, giving M + W - 1 features for an H x W object and an
H x M mask.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .core import FeatureVector, Mode, make_feature_vector
from .masks import CytometryMask, MaskSet
from .validation import as_image, as_vector


def center_features(raw) -> tuple[float, np.ndarray]:
    """Mean <G> of the raw features and the centered values g = G - <G>."""
    raw = as_vector(raw, "raw features")
    if raw.size == 0:
        raise ValueError("cannot center an empty feature vector")
    mean = float(raw.mean())
    return mean, raw - mean


def gi_features(image, masks: MaskSet) -> FeatureVector:
    """Ghost-imaging features of one object: raw[m] = sum_ij B_m(i,j) X(i,j)."""
    arr = as_image(image)
    _check_gi_dims(arr, masks)
    raw = masks.flat_planes().astype(np.float64) @ arr.ravel()
    return make_feature_vector(raw, Mode.GI)


def gi_feature_matrix(images: np.ndarray, masks: MaskSet, centered: bool = False) -> np.ndarray:
    """Ghost-imaging features for a stack of flattened objects.

    ``images`` is (n_samples, height * width); returns (n_samples, n_masks).
    Centering, when requested, is per sample across its features.
    """
    images = np.asarray(images, dtype=np.float64)
    if images.ndim != 2 or images.shape[1] != masks.height * masks.width:
        raise ValueError(
            f"expected (n_samples, {masks.height * masks.width}) flattened images, "
            f"got shape {images.shape}"
        )
    raw = images @ masks.flat_planes().astype(np.float64).T
    if centered:
        raw -= raw.mean(axis=1, keepdims=True)
    return raw


def _check_gi_dims(arr: np.ndarray, masks: MaskSet) -> None:
    if arr.shape != (masks.height, masks.width):
        raise ValueError(
            f"image shape {arr.shape} does not match mask shape "
            f"({masks.height}, {masks.width})"
        )


def _sliding_raw(arr: np.ndarray, mask: CytometryMask) -> np.ndarray:
    height, width = arr.shape
    n_features = mask.mask_width + width - 1
    # pad W-1 zero columns on both sides: shift m reads mask column
    # j + m - (W-1), and out-of-range columns contribute zero
    padded = np.zeros((height, mask.mask_width + 2 * (width - 1)), dtype=np.float64)
    padded[:, width - 1 : width - 1 + mask.mask_width] = mask.unpacked()
    windows = sliding_window_view(padded, width, axis=1)  # (H, n_features, W)
    return np.einsum("imj,ij->m", windows, arr)


def gc_features(image, mask: CytometryMask) -> FeatureVector:
    """Cytometry features of one object sliding across the strip mask.

    raw[m] = sum_i sum_j B(i, j + m - (W-1)) X(i, j) for m = 0..M+W-2
    (0-based), columns outside the mask reading as zero.  Requires
    mask_width >= W so every pixel column overlaps the mask at some shift.
    """
    arr = as_image(image)
    _check_gc_dims(arr, mask)
    return make_feature_vector(_sliding_raw(arr, mask), Mode.GC)


def gc_feature_matrix(images: np.ndarray, mask: CytometryMask, height: int, width: int,
                      centered: bool = False) -> np.ndarray:
    """Cytometry features for a stack of flattened H x W objects."""
    images = np.asarray(images, dtype=np.float64)
    if images.ndim != 2 or images.shape[1] != height * width:
        raise ValueError(
            f"expected (n_samples, {height * width}) flattened images, got {images.shape}"
        )
    out = np.empty((images.shape[0], mask.mask_width + width - 1), dtype=np.float64)
    for k, flat in enumerate(images):
        arr = flat.reshape(height, width)
        _check_gc_dims(arr, mask)
        out[k] = _sliding_raw(arr, mask)
    if centered:
        out -= out.mean(axis=1, keepdims=True)
    return out


def _check_gc_dims(arr: np.ndarray, mask: CytometryMask) -> None:
    if arr.shape[0] != mask.height:
        raise ValueError(
            f"image height {arr.shape[0]} does not match mask height {mask.height}"
        )
    if mask.mask_width < arr.shape[1]:
        raise ValueError(
            f"mask_width {mask.mask_width} must be >= image width {arr.shape[1]} "
            "(full-coverage convention)"
        )
