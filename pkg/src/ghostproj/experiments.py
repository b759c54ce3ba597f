"""Monte Carlo verification of the distance bounds, kernel-approximation
measurements, and a synthetic classification-parity demo.

Every experiment is a pure function of its configuration: trial ``t``
uses masks seeded with ``derive_seed(base_seed, t)``, results are reduced
in trial order, and reports serialize to the same bytes on every rerun.
"""

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import rng
from .bounds import DegeneratePairError, delta_gc, delta_gi
from .core import Mode, frobenius_norm_sq, matrix_sum
from .features import gc_feature_matrix, gc_features, gi_feature_matrix, gi_features
from .masks import generate_gc_mask, generate_gi_masks
from .validation import (
    as_image,
    check_positive,
    check_positive_int,
    check_probability,
    check_same_shape,
)


def worker_count() -> int:
    """Worker cap from GHOSTPROJ_THREADS: unset/1 = serial, 0 = all cores."""
    raw = os.environ.get("GHOSTPROJ_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    if n == 0:
        return os.cpu_count() or 1
    return max(1, n)


def _parallel_map(fn, count: int) -> list:
    """Map over range(count) preserving order; results do not depend on
    the worker count because each item derives its own seed."""
    workers = worker_count()
    if workers == 1 or count < 2:
        return [fn(i) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, range(count)))


@dataclass(frozen=True)
class ExperimentConfig:
    """Parameters of one verification or kernel experiment."""

    mode: Mode
    height: int
    width: int
    n_masks: int          # mask count (gi) or mask width (gc)
    q: float
    eps_grid: tuple[float, ...] = (0.1, 0.2, 0.3)
    trials: int = 1000
    base_seed: int = 0
    gamma: float | None = None  # image-kernel scale; None = 1/(height*width)

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        check_positive_int(self.height, "height")
        check_positive_int(self.width, "width")
        check_positive_int(self.n_masks, "n_masks")
        check_probability(self.q)
        check_positive_int(self.trials, "trials")
        object.__setattr__(self, "eps_grid", tuple(float(e) for e in self.eps_grid))
        for e in self.eps_grid:
            check_positive(e, "eps")
        if self.gamma is not None:
            check_positive(self.gamma, "gamma")

    @property
    def effective_gamma(self) -> float:
        return self.gamma if self.gamma is not None else 1.0 / (self.height * self.width)

    def trial_seed(self, trial: int) -> int:
        return rng.derive_seed(self.base_seed, trial)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "height": self.height,
            "width": self.width,
            "n_masks": self.n_masks,
            "q": self.q,
            "eps_grid": list(self.eps_grid),
            "trials": self.trials,
            "base_seed": self.base_seed,
            "gamma": self.gamma,
        }


@dataclass(frozen=True)
class EpsRow:
    """Empirical band coverage vs the theoretical bound for one eps."""

    eps: float
    delta: float
    violation_rate: float
    wide_violation_rate: float | None  # gi only: band widened to 1 + 1/M + eps above
    vacuous: bool                      # delta >= 1: nothing to test

    @property
    def holds(self) -> bool:
        return self.vacuous or self.violation_rate <= self.delta

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "delta": self.delta,
            "violation_rate": self.violation_rate,
            "wide_violation_rate": self.wide_violation_rate,
            "vacuous": self.vacuous,
            "holds": self.holds,
        }


@dataclass(frozen=True)
class ExperimentReport:
    """Reproducible result record; content depends on the experiment kind."""

    kind: str
    config: dict
    eps_rows: tuple[EpsRow, ...] = ()
    scaled_mean: float | None = None
    scaled_var: float | None = None
    gap_rows: tuple[dict, ...] = ()     # kernel gap: one row per mask count
    accuracies: dict = field(default_factory=dict)

    @property
    def all_bounds_hold(self) -> bool:
        return all(row.holds for row in self.eps_rows)

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "config": self.config}
        if self.eps_rows:
            out["eps_rows"] = [r.to_dict() for r in self.eps_rows]
            out["all_bounds_hold"] = self.all_bounds_hold
        if self.scaled_mean is not None:
            out["scaled_mean"] = self.scaled_mean
            out["scaled_var"] = self.scaled_var
        if self.gap_rows:
            out["gap_rows"] = list(self.gap_rows)
        if self.accuracies:
            out["accuracies"] = dict(self.accuracies)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _check_pair(x_image, y_image, config: ExperimentConfig):
    x = as_image(x_image, "x")
    y = as_image(y_image, "y")
    check_same_shape(x, y)
    if x.shape != (config.height, config.width):
        raise ValueError(
            f"objects of shape {x.shape} do not match configured "
            f"({config.height}, {config.width})"
        )
    diff = x - y
    fro_sq = frobenius_norm_sq(diff)
    if fro_sq == 0.0:
        raise DegeneratePairError("x and y are identical; distance band is undefined")
    return x, y, diff, fro_sq


def verify_jl_gi(x_image, y_image, config: ExperimentConfig) -> ExperimentReport:
    """Empirical coverage of the independent-mask distance band.

    Per trial, fresh masks give the scaled squared feature distance
    r = ||g(X) - g(Y)||^2 / (M q (1-q) ||X-Y||_F^2), which concentrates at
    1 - 1/M.  For each eps the symmetric band (1 - 1/M +- eps) is checked
    and its violation rate compared with ``delta_gi``; the rate for the
    wider band with upper edge 1 + 1/M + eps is reported alongside.
    """
    x, y, diff, fro_sq = _check_pair(x_image, y_image, config)
    m, q = config.n_masks, config.q
    scale = 1.0 / (m * q * (1.0 - q) * fro_sq)

    def one_trial(t: int) -> float:
        masks = generate_gi_masks(config.height, config.width, m, q, config.trial_seed(t))
        d = gi_features(x, masks).centered - gi_features(y, masks).centered
        return float(np.dot(d, d)) * scale

    r = np.array(_parallel_map(one_trial, config.trials))
    center = 1.0 - 1.0 / m
    rows = []
    for eps in config.eps_grid:
        delta = delta_gi(diff, q, m, eps)
        rows.append(EpsRow(
            eps=eps,
            delta=delta,
            violation_rate=float(np.mean(np.abs(r - center) > eps)),
            wide_violation_rate=float(np.mean((r < center - eps) | (r > 1.0 + 1.0 / m + eps))),
            vacuous=delta >= 1.0,
        ))
    return ExperimentReport(
        kind="jl-gi",
        config=config.to_dict(),
        eps_rows=tuple(rows),
        scaled_mean=float(r.mean()),
        scaled_var=float(r.var()),
    )


def verify_jl_gc(x_image, y_image, config: ExperimentConfig) -> ExperimentReport:
    """Empirical coverage of the sliding-mask distance band.

    Uses raw (uncentered) features: r = ||G(X) - G(Y)||^2 / (q(1-q)(M+W-1))
    is checked against the band
    [(1-eps) fro^2 - (q/(1-q)) S^2, (1+eps) fro^2 + (q/(1-q)) S^2]
    where S is the entry sum of the difference image.
    """
    x, y, diff, fro_sq = _check_pair(x_image, y_image, config)
    m, q, w = config.n_masks, config.q, config.width
    if m < w:
        raise ValueError(f"mask width {m} must be >= image width {w}")
    n_features = m + w - 1
    scale = 1.0 / (q * (1.0 - q) * n_features)
    s_corr = q / (1.0 - q) * matrix_sum(diff) ** 2

    def one_trial(t: int) -> float:
        mask = generate_gc_mask(config.height, m, q, config.trial_seed(t))
        d = gc_features(x, mask).raw - gc_features(y, mask).raw
        return float(np.dot(d, d)) * scale

    r = np.array(_parallel_map(one_trial, config.trials))
    rows = []
    for eps in config.eps_grid:
        delta = delta_gc(diff, q, m, eps)
        lower = (1.0 - eps) * fro_sq - s_corr
        upper = (1.0 + eps) * fro_sq + s_corr
        rows.append(EpsRow(
            eps=eps,
            delta=delta,
            violation_rate=float(np.mean((r < lower) | (r > upper))),
            wide_violation_rate=None,
            vacuous=delta >= 1.0,
        ))
    return ExperimentReport(
        kind="jl-gc",
        config=config.to_dict(),
        eps_rows=tuple(rows),
        scaled_mean=float(r.mean()),
        scaled_var=float(r.var()),
    )


def rbf_kernel(d_sq, scale: float):
    """exp(-scale * d_sq) for a squared distance (scalar or array)."""
    check_positive(scale, "scale")
    d_sq = np.asarray(d_sq, dtype=np.float64)
    if np.any(d_sq < 0):
        raise ValueError("squared distance must be nonnegative")
    out = np.exp(-scale * d_sq)
    return float(out) if out.ndim == 0 else out


def matched_beta(gamma: float, q: float, n_masks: int, mode: Mode, width: int | None = None) -> float:
    """Feature-side kernel scale matching the image-side scale in expectation.

    Ghost imaging: beta = gamma / ((M-1) q (1-q)), so that
    E[beta ||g(X)-g(Y)||^2] = gamma ||X-Y||_F^2 exactly.  Cytometry:
    beta = gamma / (q (1-q) (M+W-1)).
    """
    check_positive(gamma, "gamma")
    q = check_probability(q)
    mode = Mode(mode)
    if mode is Mode.GI:
        if int(n_masks) < 2:
            raise ValueError("matched beta needs n_masks >= 2 in ghost-imaging mode")
        return gamma / ((n_masks - 1) * q * (1.0 - q))
    width = check_positive_int(width, "width")
    return gamma / (q * (1.0 - q) * (n_masks + width - 1))


def _sq_dists(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances between rows, clipped at 0."""
    aa = (a * a).sum(axis=1)[:, None]
    bb = (b * b).sum(axis=1)[None, :]
    return np.maximum(aa + bb - 2.0 * (a @ b.T), 0.0)


def rbf_gram(a: np.ndarray, b: np.ndarray, scale: float) -> np.ndarray:
    """RBF kernel matrix between two row stacks of flat vectors."""
    return rbf_kernel(_sq_dists(np.asarray(a, float), np.asarray(b, float)), scale)


def kernel_gap_experiment(objects, config: ExperimentConfig, m_list) -> ExperimentReport:
    """Gap between the image-side and feature-side RBF kernels per mask count.

    Objects are paired off disjointly (0-1, 2-3, ...).  For each mask
    count and each of ``config.trials`` mask seeds, one mask draw produces
    features for every object; the per-seed statistic is the median over
    pairs of |k_gamma(X, Y) - k_beta(g(X), g(Y))|, and the reported value
    per mask count is the median over seeds.
    """
    imgs = [as_image(o) for o in objects]
    if len(imgs) < 2:
        raise ValueError("need at least two objects")
    for o in imgs[1:]:
        check_same_shape(imgs[0], o)
    if imgs[0].shape != (config.height, config.width):
        raise ValueError("objects do not match the configured shape")
    flat = np.stack([o.ravel() for o in imgs])
    n_pairs = len(imgs) // 2
    ia = np.arange(n_pairs) * 2
    ib = ia + 1
    gamma = config.effective_gamma
    image_d_sq = ((flat[ia] - flat[ib]) ** 2).sum(axis=1)
    image_kernel = rbf_kernel(image_d_sq, gamma)

    rows = []
    for m_index, m in enumerate(m_list):
        m = check_positive_int(m, "mask count")
        beta = matched_beta(gamma, config.q, m, config.mode, config.width)
        m_seed = rng.derive_seed(config.base_seed, m_index)

        def one_seed(s: int, m=m, beta=beta, m_seed=m_seed) -> float:
            seed = rng.derive_seed(m_seed, s)
            if config.mode is Mode.GI:
                masks = generate_gi_masks(config.height, config.width, m, config.q, seed)
                feats = gi_feature_matrix(flat, masks, centered=True)
            else:
                mask = generate_gc_mask(config.height, m, config.q, seed)
                feats = gc_feature_matrix(flat, mask, config.height, config.width,
                                          centered=True)
            feat_d_sq = ((feats[ia] - feats[ib]) ** 2).sum(axis=1)
            gaps = np.abs(image_kernel - rbf_kernel(feat_d_sq, beta))
            return float(np.median(gaps))

        per_seed = _parallel_map(one_seed, config.trials)
        rows.append({
            "n_masks": m,
            "beta": beta,
            "median_gap": float(np.median(per_seed)),
            "max_seed_median": float(np.max(per_seed)),
        })
    return ExperimentReport(kind="kernel-gap", config=config.to_dict(), gap_rows=tuple(rows))


def synth_cells(n: int, kind: str, height: int, width: int, seed: int, *,
                radius: float | None = None, ring_width: float | None = None,
                radius_jitter: float = 0.15, intensity_jitter: float = 0.2,
                noise: float = 0.05) -> list[np.ndarray]:
    """Synthetic centered cell images: filled disks or rings.

    Per-object jitter (relative radius and intensity perturbations plus
    uniform additive pixel noise) is drawn from substream ``i`` of
    ``seed``; images are clipped to [0, 1].  With all jitter parameters
    zero the n images of a class are identical.
    """
    n = check_positive_int(n, "n")
    if kind not in ("disk", "ring"):
        raise ValueError(f"kind must be 'disk' or 'ring', got {kind!r}")
    height = check_positive_int(height, "height")
    width = check_positive_int(width, "width")
    if radius is None:
        radius = 0.3 * min(height, width)
    if ring_width is None:
        ring_width = 0.45 * radius
    max_radius = radius * (1.0 + radius_jitter)
    if max_radius > min(height, width) / 2.0 - 0.5:
        raise ValueError(
            f"radius {radius} with jitter {radius_jitter} does not fit in "
            f"{height}x{width}"
        )

    yy, xx = np.indices((height, width))
    dist = np.hypot(yy - (height - 1) / 2.0, xx - (width - 1) / 2.0)

    images = []
    for i in range(n):
        u = rng.uniforms(rng.derive_seed(seed, i), 2 + height * width)
        r = radius * (1.0 + radius_jitter * (2.0 * u[0] - 1.0))
        a = 0.8 * (1.0 + intensity_jitter * (2.0 * u[1] - 1.0))
        if kind == "disk":
            img = np.where(dist <= r, a, 0.0)
        else:
            img = np.where((dist <= r) & (dist > r - ring_width), a, 0.0)
        img = img + noise * (2.0 * u[2:].reshape(height, width) - 1.0)
        images.append(np.clip(img, 0.0, 1.0))
    return images


def _as_flat_stack(objects, name: str) -> np.ndarray:
    flat = [np.asarray(o, dtype=np.float64).ravel() for o in objects]
    if not flat:
        raise ValueError(f"{name} set must be nonempty")
    return np.stack(flat)


def knn_predict(train, train_labels, test, kernel, k: int = 1) -> np.ndarray:
    """Predicted labels of kernel k-NN with deterministic tie handling.

    d^2(a, b) = k(a,a) + k(b,b) - 2 k(a,b).  ``kernel`` maps two row
    stacks of flat vectors to their kernel matrix.  Distance ties resolve
    to the smallest training index; vote ties go to the class of the tied
    neighbor with the smallest index among the k.
    """
    k = int(k)
    if k < 1 or k % 2 == 0:
        raise ValueError(f"k must be a positive odd integer, got {k}")
    train = _as_flat_stack(train, "train")
    test = _as_flat_stack(test, "test")
    train_labels = np.asarray(train_labels)
    if len(train_labels) != train.shape[0]:
        raise ValueError("label count does not match train object count")
    k = min(k, train.shape[0])

    cross = kernel(test, train)
    self_test = np.diag(kernel(test, test))
    self_train = np.diag(kernel(train, train))
    d_sq = self_test[:, None] + self_train[None, :] - 2.0 * cross

    preds = np.empty(test.shape[0], dtype=train_labels.dtype)
    for i, row in enumerate(d_sq):
        order = np.argsort(row, kind="stable")[:k]
        votes = {}
        for idx in order:
            votes[train_labels[idx]] = votes.get(train_labels[idx], 0) + 1
        best = max(votes.values())
        tied = {label for label, v in votes.items() if v == best}
        for idx in order:
            if train_labels[idx] in tied:
                preds[i] = train_labels[idx]
                break
    return preds


def kernel_knn_classify(train_objects, train_labels, test_objects, test_labels,
                        kernel, k: int = 1) -> float:
    """k-nearest-neighbor test accuracy in the kernel-induced distance."""
    test_labels = np.asarray(test_labels)
    preds = knn_predict(train_objects, train_labels, test_objects, kernel, k=k)
    if len(test_labels) != len(preds):
        raise ValueError("label count does not match test object count")
    return float(np.mean(preds == test_labels))


def classify_demo(height: int, width: int, n_masks: int, q: float,
                  n_train: int, n_test: int, seed: int,
                  gamma: float | None = None, k: int = 1) -> ExperimentReport:
    """Disk-vs-ring accuracy with the image kernel and the ghost-feature kernel.

    Builds a seeded synthetic corpus, extracts features for every object
    under one shared mask set, and runs kernel k-NN with the image-side
    RBF (scale gamma, default 1/(H*W)) and the feature-side RBF (matched
    beta).  Distance preservation should make the two accuracies agree.
    """
    if n_train < 2 or n_test < 2:
        raise ValueError("need at least one train and test object per class")
    g = gamma if gamma is not None else 1.0 / (height * width)

    half_tr, half_te = n_train // 2, n_test // 2
    train = (synth_cells(half_tr, "disk", height, width, rng.derive_seed(seed, 0))
             + synth_cells(n_train - half_tr, "ring", height, width, rng.derive_seed(seed, 1)))
    test = (synth_cells(half_te, "disk", height, width, rng.derive_seed(seed, 2))
            + synth_cells(n_test - half_te, "ring", height, width, rng.derive_seed(seed, 3)))
    train_labels = np.array([0] * half_tr + [1] * (n_train - half_tr))
    test_labels = np.array([0] * half_te + [1] * (n_test - half_te))

    image_acc = kernel_knn_classify(
        train, train_labels, test, test_labels,
        kernel=lambda a, b: rbf_gram(a, b, g), k=k,
    )

    masks = generate_gi_masks(height, width, n_masks, q, rng.derive_seed(seed, 4))
    beta = matched_beta(g, q, n_masks, Mode.GI)
    train_feats = gi_feature_matrix(np.stack([o.ravel() for o in train]), masks, centered=True)
    test_feats = gi_feature_matrix(np.stack([o.ravel() for o in test]), masks, centered=True)
    ghost_acc = kernel_knn_classify(
        train_feats, train_labels, test_feats, test_labels,
        kernel=lambda a, b: rbf_gram(a, b, beta), k=k,
    )

    config = {
        "height": height, "width": width, "n_masks": n_masks, "q": q,
        "n_train": n_train, "n_test": n_test, "seed": seed,
        "gamma": g, "beta": beta, "k": k,
    }
    return ExperimentReport(
        kind="classify",
        config=config,
        accuracies={"image_kernel": image_acc, "ghost_kernel": ghost_acc},
    )
