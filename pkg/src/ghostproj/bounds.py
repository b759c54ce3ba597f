"""Closed-form evaluation of the distance-preservation failure bounds.

For a difference image D = X - Y the scaled squared feature distance
concentrates around the squared Frobenius distance.  The failure
probability of a relative-error band of half-width ``eps`` is controlled
by two object-dependent constants per regime:

* a variance-like term (``gamma_q`` for independent masks, ``psi_q`` for
  the sliding mask) built from fourth powers and squared pixel/row
  correlations, and
* a range-like term (``lambda_q`` / ``phi_q``), the largest magnitude any
  single mask-bit product can contribute.

Both grow as q decreases: sparser illumination needs more masks.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .core import Mode, frobenius_norm_sq, matrix_sum
from .validation import as_image, check_positive, check_probability


class DegeneratePairError(ValueError):
    """The two objects are identical; the relative-error bound is vacuous."""


def _intensity_coeff(q: float) -> float:
    return (1.0 - 2.0 * q) ** 2 / (q * (1.0 - q))


def gamma_q(image, q: float) -> float:
    """Variance-like bound constant for independent-mask features.

    ((1-2q)^2 / (q(1-q))) * sum x^4  +  4 * sum over unordered pixel pairs
    of (x_k * x_k')^2, pixels taken in a flat order.
    """
    q = check_probability(q)
    x = as_image(image).ravel()
    sq = x * x
    s2 = float(sq.sum())
    s4 = float((sq * sq).sum())
    # 4 * sum_{k<k'} (x_k x_k')^2 == 2 * ((sum x^2)^2 - sum x^4)
    return _intensity_coeff(q) * s4 + 2.0 * (s2 * s2 - s4)


def lambda_q(image, q: float) -> float:
    """Range-like bound constant for independent-mask features.

    max of 2((1-q)/q)|x_k x_k'| over distinct pixel pairs and
    (|1-2q|/q) x_k^2 over pixels; an empty pair set contributes 0.
    """
    q = check_probability(q)
    x = np.abs(as_image(image).ravel())
    pixel_term = abs(1.0 - 2.0 * q) / q * float(x.max()) ** 2
    if x.size < 2:
        return pixel_term
    top_two = np.partition(x, x.size - 2)[-2:]
    pair_term = 2.0 * (1.0 - q) / q * float(top_two[0]) * float(top_two[1])
    return max(pair_term, pixel_term)


def _lag_correlations(arr: np.ndarray, lag: int) -> np.ndarray:
    """C[i, i'] = sum_j arr(i, j) * arr(i', j + lag) for one column lag >= 0."""
    width = arr.shape[1]
    return arr[:, : width - lag] @ arr[:, lag:].T


def psi_q(image, q: float) -> float:
    """Variance-like bound constant for sliding-mask features.

    ((1-2q)^2 / (q(1-q))) * sum_i (row i sum of squares)^2 plus 4 times the
    squared row cross-correlations over column lags 0..W-1 (lag 0 pairing
    distinct rows only, positive lags pairing all row pairs including a
    row with itself).
    """
    q = check_probability(q)
    arr = as_image(image)
    height, width = arr.shape
    row_sq = (arr * arr).sum(axis=1)
    total = _intensity_coeff(q) * float((row_sq * row_sq).sum())
    corr_sq = 0.0
    for lag in range(width):
        c = _lag_correlations(arr, lag)
        if lag == 0:
            iu = np.triu_indices(height, k=1)
            corr_sq += float((c[iu] ** 2).sum())
        else:
            corr_sq += float((c * c).sum())
    return total + 4.0 * corr_sq


def phi_q(image, q: float) -> float:
    """Range-like bound constant for sliding-mask features.

    max of 2((1-q)/q)|row cross-correlation| over distinct (row, lag)
    pairs and (|1-2q|/q) * (row sum of squares) over rows; an empty pair
    set contributes 0.
    """
    q = check_probability(q)
    arr = as_image(image)
    height, width = arr.shape
    best = 0.0
    for lag in range(width):
        c = np.abs(_lag_correlations(arr, lag))
        if lag == 0:
            if height < 2:
                continue
            np.fill_diagonal(c, 0.0)
        best = max(best, float(c.max()))
    row_sq = (arr * arr).sum(axis=1)
    pair_term = 2.0 * (1.0 - q) / q * best
    row_term = abs(1.0 - 2.0 * q) / q * float(row_sq.max())
    return max(pair_term, row_term)


def _check_delta_args(diff: np.ndarray, q: float, n_masks: int, eps: float) -> float:
    check_probability(q)
    if int(n_masks) < 2:
        raise ValueError(f"n_masks must be >= 2, got {n_masks}")
    check_positive(eps, "eps")
    fro_sq = frobenius_norm_sq(diff)
    if fro_sq == 0.0:
        raise DegeneratePairError("difference image is identically zero")
    return fro_sq


def delta_gi(diff, q: float, n_masks: int, eps: float) -> float:
    """Failure probability bound for the independent-mask distance band.

    2 * exp(-eps^2 M / (2 ((1 + 2/M^2) gamma/fro^4 + lambda eps/fro^2)))
    evaluated on the difference image; always in (0, 2], decreasing in M.
    """
    diff = as_image(diff, "difference image")
    fro_sq = _check_delta_args(diff, q, n_masks, eps)
    m = float(n_masks)
    denom = (1.0 + 2.0 / m**2) * gamma_q(diff, q) / fro_sq**2 \
        + lambda_q(diff, q) * eps / fro_sq
    return 2.0 * math.exp(-(eps * eps * m) / (2.0 * denom))


def delta_gc(diff, q: float, n_masks: int, eps: float) -> float:
    """Failure probability bound for the sliding-mask distance band.

    2 * exp(-eps^2 M / (2 (psi/fro^4 + phi eps / fro^2))).
    """
    diff = as_image(diff, "difference image")
    fro_sq = _check_delta_args(diff, q, n_masks, eps)
    m = float(n_masks)
    denom = psi_q(diff, q) / fro_sq**2 + phi_q(diff, q) * eps / fro_sq
    return 2.0 * math.exp(-(eps * eps * m) / (2.0 * denom))


def optimal_proxy_variance(q: float) -> float:
    """Smallest subGaussian proxy variance of a Bernoulli(q) variable.

    (1/2 - q) / log(1/q - 1), extended by continuity to 1/4 at q = 1/2.
    Always >= the variance q(1-q), with equality only at q = 1/2.
    """
    q = check_probability(q)
    if q == 0.5:
        return 0.25
    return (0.5 - q) / math.log(1.0 / q - 1.0)


@dataclass(frozen=True)
class BoundReport:
    """All bound quantities for one object pair plus a delta(eps) table."""

    mode: Mode
    gamma: float      # variance-like constant (gamma_q or psi_q)
    lam: float        # range-like constant (lambda_q or phi_q)
    fro_sq: float
    s_sq: float | None  # squared entry sum of the difference, cytometry only
    eps_grid: tuple[float, ...]
    deltas: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "gamma": self.gamma,
            "lambda": self.lam,
            "fro_sq": self.fro_sq,
            "s_sq": self.s_sq,
            "delta_table": [
                {"eps": e, "delta": d} for e, d in zip(self.eps_grid, self.deltas)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def bound_report(diff, q: float, n_masks: int, eps_grid, mode: Mode) -> BoundReport:
    """Evaluate every bound quantity for a difference image on an eps grid."""
    diff = as_image(diff, "difference image")
    mode = Mode(mode)
    eps_grid = tuple(float(e) for e in eps_grid)
    if mode is Mode.GI:
        g, l = gamma_q(diff, q), lambda_q(diff, q)
        deltas = tuple(delta_gi(diff, q, n_masks, e) for e in eps_grid)
        s_sq = None
    else:
        g, l = psi_q(diff, q), phi_q(diff, q)
        deltas = tuple(delta_gc(diff, q, n_masks, e) for e in eps_grid)
        s_sq = matrix_sum(diff) ** 2
    return BoundReport(
        mode=mode, gamma=g, lam=l, fro_sq=frobenius_norm_sq(diff),
        s_sq=s_sq, eps_grid=eps_grid, deltas=deltas,
    )
