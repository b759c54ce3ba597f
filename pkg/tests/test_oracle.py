import numpy as np
import pytest

from ghostproj import (
    bernoulli_product_moments,
    exact_gc_statistics,
    exact_gi_statistics,
    frobenius_norm_sq,
)


@pytest.mark.parametrize("q", [0.05, 0.1, 0.3, 0.5, 0.9])
def test_moment_table_matches_closed_forms(q):
    mom = bernoulli_product_moments(q)
    assert mom.mean_square == pytest.approx(q * (1 - q), rel=1e-12)
    assert mom.var_square == pytest.approx(q * (1 - q) * (1 - 2 * q) ** 2,
                                           rel=1e-12, abs=1e-15)
    assert mom.mean_pair == pytest.approx(0.0, abs=1e-15)
    assert mom.var_pair == pytest.approx(q * q * (1 - q) ** 2, rel=1e-12)


def test_moment_examples():
    assert bernoulli_product_moments(0.5).var_square == pytest.approx(0.0, abs=1e-15)
    assert bernoulli_product_moments(0.1).mean_square == pytest.approx(0.09, rel=1e-12)
    assert bernoulli_product_moments(0.3).var_pair == pytest.approx(0.0441, rel=1e-12)


def test_gi_enumeration_identities_2x2():
    rng = np.random.default_rng(6)
    for q in (0.1, 0.3):
        for _ in range(5):
            x = rng.uniform(0.2, 1.0, size=(2, 2))
            st = exact_gi_statistics(x, 2, q)
            assert np.allclose(st.mean_raw, q * x.sum(), rtol=1e-10)
            assert st.mean_scaled_sq_norm == pytest.approx(
                0.5 * frobenius_norm_sq(x), rel=1e-10)
            assert np.allclose(st.mean_reconstruction,
                               0.5 * q * (1 - q) * x, rtol=1e-10)


def test_gi_enumeration_budget():
    with pytest.raises(ValueError):
        exact_gi_statistics(np.ones((3, 3)), 3, 0.5)  # 27 bits > budget


def test_gc_enumeration_zero_object():
    st = exact_gc_statistics(np.zeros((2, 2)), 4, 0.3)
    assert st.mean_scaled_sq_norm == 0.0
    assert st.fro_sq == 0.0
    assert st.s_correction == 0.0


def test_gc_enumeration_matches_hand_expansion():
    # H=1, W=2, M=3: features (b1 x2, b1 x1 + b2 x2, b2 x1 + b3 x2, b3 x1)
    x1, x2, q = 2.0, 5.0, 0.3
    expected = 0.0
    for r in range(8):
        b1, b2, b3 = (r >> 0) & 1, (r >> 1) & 1, (r >> 2) & 1
        w = (q if b1 else 1 - q) * (q if b2 else 1 - q) * (q if b3 else 1 - q)
        feats = [b1 * x2, b1 * x1 + b2 * x2, b2 * x1 + b3 * x2, b3 * x1]
        expected += w * sum(f * f for f in feats)
    expected /= q * (1 - q) * 4
    st = exact_gc_statistics(np.array([[x1, x2]]), 3, q)
    assert st.mean_scaled_sq_norm == pytest.approx(expected, rel=1e-12)
    assert st.n_features == 4


def test_gc_enumeration_quadratic_homogeneity():
    x = np.array([[0.3, 0.8], [0.5, 0.1]])
    a = exact_gc_statistics(x, 4, 0.2)
    b = exact_gc_statistics(2 * x, 4, 0.2)
    assert b.mean_scaled_sq_norm == pytest.approx(4 * a.mean_scaled_sq_norm, rel=1e-10)


def test_gc_enumeration_budget_and_width():
    with pytest.raises(ValueError):
        exact_gc_statistics(np.ones((3, 3)), 7, 0.5)  # 21 bits > budget
    with pytest.raises(ValueError):
        exact_gc_statistics(np.ones((2, 5)), 4, 0.5)  # mask narrower than object


def test_gc_monte_carlo_converges_to_enumeration():
    from ghostproj import rng as grng
    from ghostproj.features import gc_features
    from ghostproj.masks import generate_gc_mask

    x = np.array([[0.7, 0.2], [0.1, 0.8]])
    m, q, trials = 3, 0.25, 20000
    target = exact_gc_statistics(x, m, q).mean_scaled_sq_norm
    scale = 1.0 / (q * (1 - q) * (m + x.shape[1] - 1))
    vals = np.empty(trials)
    for t in range(trials):
        mask = generate_gc_mask(2, m, q, seed=grng.derive_seed(55, t))
        raw = gc_features(x, mask).raw
        vals[t] = raw @ raw * scale
    se = vals.std() / np.sqrt(trials)
    assert abs(vals.mean() - target) < 3 * se
