"""Correlation-based image reconstruction from ghost-imaging features.

Provided for validation and for off-line inspection of representative
objects; the point of ghost features is that classification does not need
this step.
"""

import numpy as np

from .core import FeatureVector, Mode
from .masks import MaskSet
from .validation import check_probability


def reconstruct_image(fv: FeatureVector, masks: MaskSet) -> np.ndarray:
    """Correlate centered features with their masks:

    recon(i,j) = (1/M) * sum_m (G_m - <G>) * B_m(i,j)

    The output is a biased estimate of the object, left unscaled so its
    statistical properties stay exact; see ``rescale_reconstruction``.
    """
    if fv.mode is not Mode.GI:
        raise ValueError("reconstruction needs ghost-imaging features")
    if len(fv) != masks.n_masks:
        raise ValueError(
            f"feature count {len(fv)} does not match mask count {masks.n_masks}"
        )
    flat = masks.flat_planes().astype(np.float64).T @ fv.centered
    return (flat / masks.n_masks).reshape(masks.height, masks.width)


def rescale_reconstruction(recon, q: float, n_masks: int) -> np.ndarray:
    """Divide by (1 - 1/M) * q * (1-q), the expectation factor of the raw
    correlation output, giving an unbiased estimate of the object."""
    q = check_probability(q)
    n_masks = int(n_masks)
    if n_masks < 2:
        raise ValueError("rescaling needs n_masks >= 2 (single-mask output is identically 0)")
    factor = (1.0 - 1.0 / n_masks) * q * (1.0 - q)
    return np.asarray(recon, dtype=np.float64) / factor
