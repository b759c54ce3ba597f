import numpy as np
import pytest

import ghostproj as gp
from ghostproj import rng
from ghostproj.features import gi_features
from ghostproj.masks import generate_gi_masks
from ghostproj.reconstruct import reconstruct_image, rescale_reconstruction


def test_single_mask_reconstruction_is_zero():
    masks = generate_gi_masks(3, 3, 1, 0.4, seed=1)
    fv = gi_features(np.arange(9, dtype=float).reshape(3, 3), masks)
    assert np.all(reconstruct_image(fv, masks) == 0.0)


def test_zero_object_reconstructs_to_zero():
    masks = generate_gi_masks(3, 3, 10, 0.4, seed=2)
    fv = gi_features(np.zeros((3, 3)), masks)
    assert np.all(reconstruct_image(fv, masks) == 0.0)


def test_expected_reconstruction_matches_enumeration():
    x = np.array([[0.8, 0.3], [0.5, 0.9]])
    st = gp.exact_gi_statistics(x, 2, 0.25)
    expected = (1 - 1 / 2) * 0.25 * 0.75 * x
    assert np.allclose(st.mean_reconstruction, expected, rtol=1e-10)


def test_rescale_examples():
    assert np.all(rescale_reconstruction(np.zeros((2, 2)), 0.5, 2) == 0.0)
    out = rescale_reconstruction(np.full((1, 1), 0.125), 0.5, 2)
    assert out[0, 0] == pytest.approx(1.0, rel=1e-12)  # divisor (1-1/2)*0.25 = 0.125
    with pytest.raises(ValueError):
        rescale_reconstruction(np.zeros((2, 2)), 0.5, 1)


def test_rescaled_average_approaches_object():
    x = rng.uniform_image(3, 3, 99)
    m, q, trials = 24, 0.5, 1000
    acc = np.zeros_like(x)
    for t in range(trials):
        masks = generate_gi_masks(3, 3, m, q, seed=rng.derive_seed(4, t))
        recon = reconstruct_image(gi_features(x, masks), masks)
        acc += rescale_reconstruction(recon, q, m)
    avg = acc / trials
    # entrywise Monte Carlo convergence; generous 5-sigma-ish slack
    assert np.abs(avg - x).max() < 0.25


def test_reconstruction_linear_in_features():
    masks = generate_gi_masks(4, 4, 20, 0.3, seed=8)
    r = np.random.default_rng(12)
    x, y = r.normal(size=(4, 4)), r.normal(size=(4, 4))
    rx = reconstruct_image(gi_features(x, masks), masks)
    ry = reconstruct_image(gi_features(y, masks), masks)
    rd = reconstruct_image(gi_features(x - y, masks), masks)
    assert np.allclose(rd, rx - ry, rtol=1e-9, atol=1e-12)


def test_quality_grows_with_mask_count():
    disk = gp.synth_cells(1, "disk", 16, 16, seed=0, radius=5.0,
                          radius_jitter=0.0, intensity_jitter=0.0, noise=0.0)[0]
    medians = []
    for m in (256, 1280, 5120):
        corrs = []
        for s in range(5):
            masks = generate_gi_masks(16, 16, m, 0.5, seed=rng.derive_seed(21, s))
            recon = rescale_reconstruction(
                reconstruct_image(gi_features(disk, masks), masks), 0.5, m)
            corrs.append(np.corrcoef(disk.ravel(), recon.ravel())[0, 1])
        medians.append(np.median(corrs))
    assert medians[0] <= medians[1] <= medians[2]


def test_reconstruct_rejects_mismatched_inputs():
    masks = generate_gi_masks(3, 3, 4, 0.4, seed=1)
    fv = gi_features(np.ones((3, 3)), masks)
    other = generate_gi_masks(3, 3, 5, 0.4, seed=1)
    with pytest.raises(ValueError):
        reconstruct_image(fv, other)
    gc_fv = gp.gc_features(np.ones((2, 2)), gp.generate_gc_mask(2, 4, 0.4, 0))
    with pytest.raises(ValueError):
        reconstruct_image(gc_fv, masks)
