"""Exact brute-force moments by enumerating every mask realization.

These enumerators are the ground truth the fast paths are tested against:
on tiny instances (at most 20 bits, ~10^6 realizations) every expectation
is computed exactly by weighting all 2^n bit patterns, with no shortcut
shared with the code under test.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .core import frobenius_norm_sq, matrix_sum
from .validation import as_image, check_positive_int, check_probability

MAX_ENUM_BITS = 20
_CHUNK = 1 << 16


@dataclass(frozen=True)
class BernoulliMoments:
    """Exact moments of centered Bernoulli products (b, b' independent)."""

    q: float
    mean_square: float      # E[(b-q)^2]
    var_square: float       # V[(b-q)^2]
    mean_pair: float        # E[(b-q)(b'-q)]
    var_pair: float         # V[(b-q)(b'-q)]


def bernoulli_product_moments(q: float) -> BernoulliMoments:
    """Enumerate {0,1} and {0,1}^2 outcomes with their weights.

    Closed forms these must reproduce: mean_square = q(1-q),
    var_square = q(1-q)(1-2q)^2, mean_pair = 0, var_pair = q^2 (1-q)^2.
    """
    q = check_probability(q)
    values = (0.0, 1.0)
    weights = (1.0 - q, q)

    mean_sq = sum(w * (b - q) ** 2 for b, w in zip(values, weights))
    mean_4 = sum(w * (b - q) ** 4 for b, w in zip(values, weights))

    mean_pair = 0.0
    mean_pair_sq = 0.0
    for b, wb in zip(values, weights):
        for c, wc in zip(values, weights):
            prod = (b - q) * (c - q)
            mean_pair += wb * wc * prod
            mean_pair_sq += wb * wc * prod * prod

    return BernoulliMoments(
        q=q,
        mean_square=mean_sq,
        var_square=mean_4 - mean_sq**2,
        mean_pair=mean_pair,
        var_pair=mean_pair_sq - mean_pair**2,
    )


def _check_budget(n_bits: int) -> None:
    if n_bits > MAX_ENUM_BITS:
        raise ValueError(
            f"enumeration over {n_bits} bits exceeds the 2^{MAX_ENUM_BITS} budget; "
            "use Monte Carlo for larger instances"
        )


def _bit_block(start: int, stop: int, n_bits: int) -> np.ndarray:
    """Realizations start..stop-1 as a (stop-start, n_bits) 0/1 block."""
    idx = np.arange(start, stop, dtype=np.uint32)[:, None]
    shifts = np.arange(n_bits, dtype=np.uint32)[None, :]
    return ((idx >> shifts) & 1).astype(np.float64)


def _log_weights(bits: np.ndarray, q: float) -> np.ndarray:
    """Realization weights q^k (1-q)^(n-k), computed in log space."""
    k = bits.sum(axis=1)
    n = bits.shape[1]
    return np.exp(k * math.log(q) + (n - k) * math.log1p(-q))


@dataclass(frozen=True)
class GiEnumeration:
    """Exact ghost-imaging feature moments for one small object."""

    q: float
    n_masks: int
    mean_raw: np.ndarray          # E[G_m] per mask, all equal q * sum(X)
    mean_scaled_sq_norm: float    # E[ ||g||^2 / (M q (1-q)) ]
    mean_reconstruction: np.ndarray  # E[recon(i,j)], shape of the object
    fro_sq: float
    entry_sum: float

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "n_masks": self.n_masks,
            "mean_raw": self.mean_raw.tolist(),
            "mean_scaled_sq_norm": self.mean_scaled_sq_norm,
            "mean_reconstruction": self.mean_reconstruction.tolist(),
            "fro_sq": self.fro_sq,
            "entry_sum": self.entry_sum,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def exact_gi_statistics(image, n_masks: int, q: float) -> GiEnumeration:
    """Enumerate all mask-set realizations for an H x W object and M masks.

    Identities the results satisfy exactly:
      E[G_m] = q * sum(X)
      E[||g||^2 / (M q (1-q))] = (1 - 1/M) * ||X||_F^2
      E[recon] = (1 - 1/M) * q * (1-q) * X
    """
    arr = as_image(image)
    n_masks = check_positive_int(n_masks, "n_masks")
    q = check_probability(q)
    n_pixels = arr.size
    n_bits = n_masks * n_pixels
    _check_budget(n_bits)

    x = arr.ravel()
    scale = 1.0 / (n_masks * q * (1.0 - q))
    mean_raw = np.zeros(n_masks)
    mean_scaled = 0.0
    mean_recon = np.zeros(n_pixels)

    total = 1 << n_bits
    for start in range(0, total, _CHUNK):
        bits = _bit_block(start, min(start + _CHUNK, total), n_bits)
        w = _log_weights(bits, q)
        planes = bits.reshape(-1, n_masks, n_pixels)  # bit order: mask-major
        g_raw = planes @ x                            # (chunk, n_masks)
        mean_raw += w @ g_raw
        g_cent = g_raw - g_raw.mean(axis=1, keepdims=True)
        mean_scaled += float(w @ ((g_cent * g_cent).sum(axis=1) * scale))
        recon = np.einsum("rm,rmp->rp", g_cent, planes) / n_masks
        mean_recon += w @ recon

    return GiEnumeration(
        q=q,
        n_masks=n_masks,
        mean_raw=mean_raw,
        mean_scaled_sq_norm=mean_scaled,
        mean_reconstruction=mean_recon.reshape(arr.shape),
        fro_sq=frobenius_norm_sq(arr),
        entry_sum=matrix_sum(arr),
    )


@dataclass(frozen=True)
class GcEnumeration:
    """Exact cytometry feature moments for one small object."""

    q: float
    mask_width: int
    n_features: int
    mean_scaled_sq_norm: float  # E[ ||G||^2 / (q (1-q) (M+W-1)) ]
    fro_sq: float
    s_correction: float         # (q / (1-q)) * sum(X)^2, the band shift term

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "mask_width": self.mask_width,
            "n_features": self.n_features,
            "mean_scaled_sq_norm": self.mean_scaled_sq_norm,
            "fro_sq": self.fro_sq,
            "s_correction": self.s_correction,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def exact_gc_statistics(image, mask_width: int, q: float) -> GcEnumeration:
    """Enumerate all strip-mask realizations for an H x W object.

    Reports the exact mean of the scaled squared feature norm next to the
    squared Frobenius norm and the entry-sum correction term, so the
    sliding-regime distance band can be checked exactly in expectation.
    """
    arr = as_image(image)
    mask_width = check_positive_int(mask_width, "mask_width")
    q = check_probability(q)
    height, width = arr.shape
    if mask_width < width:
        raise ValueError(f"mask_width {mask_width} must be >= image width {width}")
    n_bits = height * mask_width
    _check_budget(n_bits)

    n_features = mask_width + width - 1
    scale = 1.0 / (q * (1.0 - q) * n_features)
    # window index matrix: feature m reads mask column j + m - (W-1)
    padded_width = mask_width + 2 * (width - 1)
    mean_scaled = 0.0

    total = 1 << n_bits
    for start in range(0, total, _CHUNK):
        bits = _bit_block(start, min(start + _CHUNK, total), n_bits)
        chunk = bits.shape[0]
        masks = bits.reshape(chunk, height, mask_width)  # bit order: row-major
        padded = np.zeros((chunk, height, padded_width))
        padded[:, :, width - 1 : width - 1 + mask_width] = masks
        windows = np.lib.stride_tricks.sliding_window_view(padded, width, axis=2)
        raw = np.einsum("rimj,ij->rm", windows, arr)     # (chunk, n_features)
        w = _log_weights(bits, q)
        mean_scaled += float(w @ ((raw * raw).sum(axis=1) * scale))

    return GcEnumeration(
        q=q,
        mask_width=mask_width,
        n_features=n_features,
        mean_scaled_sq_norm=mean_scaled,
        fro_sq=frobenius_norm_sq(arr),
        s_correction=q / (1.0 - q) * matrix_sum(arr) ** 2,
    )
