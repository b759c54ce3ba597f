import numpy as np
import pytest

from ghostproj import (
    FeatureVector,
    Mode,
    frobenius_norm_sq,
    l2_norm_sq,
    make_feature_vector,
    matrix_sum,
)


def test_frobenius_examples():
    assert frobenius_norm_sq([[1, 2], [3, 4]]) == 30
    assert frobenius_norm_sq(np.zeros((4, 4))) == 0
    assert frobenius_norm_sq([[-1, 1], [1, -1]]) == 4


def test_matrix_sum_examples():
    assert matrix_sum([[1, 2], [3, 4]]) == 10
    assert matrix_sum([[-1, 1], [1, -1]]) == 0
    assert matrix_sum([[5]]) == 5


def test_l2_examples():
    assert l2_norm_sq([3, 4]) == 25
    assert l2_norm_sq([]) == 0
    assert l2_norm_sq([-2, 0, 2]) == 8


def test_frobenius_equals_flattened_l2():
    rng = np.random.default_rng(1)
    for _ in range(20):
        x = rng.normal(size=(rng.integers(1, 6), rng.integers(1, 6)))
        assert frobenius_norm_sq(x) == l2_norm_sq(x.ravel())


def test_matrix_sum_additive_under_subtraction():
    rng = np.random.default_rng(2)
    for _ in range(20):
        x = rng.normal(size=(4, 3))
        y = rng.normal(size=(4, 3))
        lhs = matrix_sum(x - y)
        rhs = matrix_sum(x) - matrix_sum(y)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("bad", [[], [[]], [[1, np.nan]], [[1, np.inf]], [1, 2, 3]])
def test_image_validation_rejects(bad):
    with pytest.raises(ValueError):
        frobenius_norm_sq(bad)


def test_feature_vector_construction():
    fv = make_feature_vector([2.0, 4.0, 6.0], Mode.GI)
    assert fv.mean == 4.0
    assert np.array_equal(fv.centered, [-2.0, 0.0, 2.0])
    assert len(fv) == 3
    assert fv.mode is Mode.GI


def test_feature_vector_single_value():
    fv = make_feature_vector([7.0], Mode.GI)
    assert fv.mean == 7.0
    assert fv.centered[0] == 0.0


def test_feature_vector_centering_sums_to_zero():
    rng = np.random.default_rng(3)
    for _ in range(20):
        raw = rng.normal(scale=50.0, size=rng.integers(1, 40))
        fv = make_feature_vector(raw, Mode.GC)
        assert abs(fv.centered.sum()) <= 1e-9 * max(np.abs(raw).sum(), 1.0)


def test_feature_vector_rejects_empty():
    with pytest.raises(ValueError):
        make_feature_vector([], Mode.GI)


def test_feature_vector_is_read_only():
    fv = make_feature_vector([1.0, 2.0], Mode.GI)
    with pytest.raises(ValueError):
        fv.raw[0] = 9.0
    assert isinstance(fv, FeatureVector)
