"""Input validation helpers shared by the public API surfaces."""

import numpy as np


def as_image(x, name: str = "image") -> np.ndarray:
    """Validate and return an object image as a fresh 2-D float64 array.

    Images are H x W matrices of finite real intensities, row-major,
    0-based indices.  Empty matrices are rejected so downstream code never
    sees H == 0 or W == 0.
    """
    arr = np.array(x, dtype=np.float64, order="C")
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must have at least one row and one column")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def as_vector(v, name: str = "vector") -> np.ndarray:
    """Validate a 1-D float64 vector (may be empty)."""
    arr = np.array(v, dtype=np.float64).ravel()
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_probability(q: float, name: str = "q") -> float:
    """Occurrence probability of a one; the open interval (0, 1) only.

    The endpoints make q*(1-q) = 0 and every bound denominator degenerate,
    so they are rejected even though such masks are formally definable.
    """
    q = float(q)
    if not 0.0 < q < 1.0:
        raise ValueError(f"{name} must lie strictly inside (0, 1), got {q}")
    return q


def check_positive_int(value, name: str) -> int:
    value = int(value)
    if value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value}")
    return value


def check_positive(value, name: str) -> float:
    value = float(value)
    if not value > 0.0 or not np.isfinite(value):
        raise ValueError(f"{name} must be a positive finite number, got {value}")
    return value


def check_same_shape(a: np.ndarray, b: np.ndarray, what: str = "images") -> None:
    if a.shape != b.shape:
        raise ValueError(f"{what} must have equal shapes, got {a.shape} and {b.shape}")
