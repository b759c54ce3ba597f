"""Seeded generation of Bernoulli {0,1} illumination patterns.

Ghost imaging uses M independent H x W masks (one per feature); ghost
cytometry uses a single H x M mask the object slides across.  Bits are
stored packed (most significant bit first within each byte, rows padded
to byte boundaries) and regenerate bit-identically from
``(dimensions, q, seed)`` on any platform: mask ``m`` draws its bits
row-major from substream ``rng.derive_seed(seed, m)``.
"""

from dataclasses import dataclass

import numpy as np

from . import rng
from .validation import check_positive_int, check_probability


def _pack_rows(bits: np.ndarray) -> np.ndarray:
    packed = np.packbits(bits, axis=-1)
    packed.setflags(write=False)
    return packed


@dataclass(frozen=True)
class MaskSet:
    """M independent H x W binary illumination patterns (ghost imaging)."""

    n_masks: int
    height: int
    width: int
    q: float
    seed: int
    packed: np.ndarray  # uint8, shape (n_masks, height, ceil(width / 8))

    def __post_init__(self):
        self.packed.setflags(write=False)

    @property
    def row_bytes(self) -> int:
        return (self.width + 7) // 8

    def plane(self, m: int) -> np.ndarray:
        """Mask ``m`` unpacked to an H x W uint8 array (0-based m)."""
        if not 0 <= m < self.n_masks:
            raise IndexError(f"mask index {m} outside [0, {self.n_masks})")
        return np.unpackbits(self.packed[m], axis=-1, count=self.width)

    def planes(self) -> np.ndarray:
        """All masks unpacked, shape (n_masks, height, width) uint8."""
        flat = self.packed.reshape(self.n_masks * self.height, self.row_bytes)
        bits = np.unpackbits(flat, axis=-1, count=self.width)
        return bits.reshape(self.n_masks, self.height, self.width)

    def flat_planes(self) -> np.ndarray:
        """Masks as rows of pixels, shape (n_masks, height * width) uint8."""
        return self.planes().reshape(self.n_masks, self.height * self.width)

    def one_density(self) -> float:
        """Fraction of ones over all masks."""
        total = self.n_masks * self.height * self.width
        return float(self.planes().sum()) / total


@dataclass(frozen=True)
class CytometryMask:
    """One H x mask_width binary pattern for the sliding (cytometry) regime.

    Column reads outside [0, mask_width) return zeros: the object only
    overlaps the illuminated strip while passing across it.
    """

    height: int
    mask_width: int
    q: float
    seed: int
    packed: np.ndarray  # uint8, shape (height, ceil(mask_width / 8))

    def __post_init__(self):
        self.packed.setflags(write=False)

    @property
    def row_bytes(self) -> int:
        return (self.mask_width + 7) // 8

    def unpacked(self) -> np.ndarray:
        """Full mask as an (height, mask_width) uint8 array."""
        return np.unpackbits(self.packed, axis=-1, count=self.mask_width)

    def column(self, j: int) -> np.ndarray:
        """Column ``j`` (0-based); zeros when j is outside the mask."""
        if 0 <= j < self.mask_width:
            return self.unpacked()[:, j].copy()
        return np.zeros(self.height, dtype=np.uint8)

    def one_density(self) -> float:
        return float(self.unpacked().sum()) / (self.height * self.mask_width)


def generate_gi_masks(height: int, width: int, n_masks: int, q: float, seed: int) -> MaskSet:
    """Draw M independent H x W Bernoulli(q) masks from the seeded stream.

    Bit order is frozen: substream ``derive_seed(seed, m)`` supplies mask
    ``m``, whose height * width bits are laid out row-major.
    """
    height = check_positive_int(height, "height")
    width = check_positive_int(width, "width")
    n_masks = check_positive_int(n_masks, "n_masks")
    q = check_probability(q)
    seed = int(seed)
    subs = rng.derive_seeds(seed, n_masks)
    bits = rng.bernoulli_bit_matrix(subs, height * width, q)
    packed = _pack_rows(bits.reshape(n_masks, height, width))
    return MaskSet(n_masks=n_masks, height=height, width=width, q=q, seed=seed, packed=packed)


def generate_gc_mask(height: int, mask_width: int, q: float, seed: int) -> CytometryMask:
    """Draw the single H x M Bernoulli(q) strip mask for cytometry.

    Bits come row-major from substream ``derive_seed(seed, 0)``.
    """
    height = check_positive_int(height, "height")
    mask_width = check_positive_int(mask_width, "mask_width")
    q = check_probability(q)
    seed = int(seed)
    bits = rng.bernoulli_bits(rng.derive_seed(seed, 0), height * mask_width, q)
    packed = _pack_rows(bits.reshape(height, mask_width))
    return CytometryMask(height=height, mask_width=mask_width, q=q, seed=seed, packed=packed)
