import numpy as np
import pytest

from fixedrank import SyntheticSpec, generate, inject_outliers


def test_shapes_and_labels():
    data = generate(SyntheticSpec(k=3, p=4, d_h=10, d_l=2, seed=0))
    assert data.X.shape == (10, 12)
    np.testing.assert_array_equal(data.truth, np.repeat([0, 1, 2], 4))
    assert len(data.bases) == 3
    for U in data.bases:
        assert U.shape == (10, 2)
        np.testing.assert_allclose(U.T @ U, np.eye(2), atol=1e-10)


def test_single_subspace_rank():
    data = generate(SyntheticSpec(k=1, p=5, d_h=4, d_l=2, seed=0))
    assert data.X.shape == (4, 5)
    assert np.linalg.matrix_rank(data.X) <= 2


def test_rank_with_sufficient_sampling():
    # p >= d_l and k*d_l <= d_h: every subspace contributes its full dimension
    data = generate(SyntheticSpec(k=4, p=6, d_h=30, d_l=3, seed=1))
    assert np.linalg.matrix_rank(data.X) == 12


def test_rank_under_insufficient_sampling():
    # p < d_l: each block contributes only p directions
    with pytest.warns(UserWarning):
        data = generate(SyntheticSpec(k=10, p=10, d_h=100, d_l=50, seed=2))
    assert np.linalg.matrix_rank(data.X) == 100


def test_determinism_and_seed_sensitivity():
    spec = SyntheticSpec(k=2, p=5, d_h=8, d_l=2, seed=3)
    a = generate(spec)
    b = generate(SyntheticSpec(k=2, p=5, d_h=8, d_l=2, seed=3))
    np.testing.assert_array_equal(a.X, b.X)
    c = generate(SyntheticSpec(k=2, p=5, d_h=8, d_l=2, seed=4))
    assert not np.array_equal(a.X, c.X)


def test_consecutive_bases_related_by_fixed_rotation():
    data = generate(SyntheticSpec(k=3, p=4, d_h=9, d_l=2, seed=5))
    U0, U1, U2 = data.bases
    # one global rotation T maps U_i to U_{i+1}, so the cross-Gram matrices
    # of consecutive pairs are identical: U1^T U2 = (T U0)^T (T U1) = U0^T U1
    np.testing.assert_allclose(U1.T @ U2, U0.T @ U1, atol=1e-9)
    # and a rotation preserves orthonormality
    np.testing.assert_allclose(U2.T @ U2, np.eye(2), atol=1e-10)


def test_spec_validation():
    with pytest.raises(ValueError):
        SyntheticSpec(k=0, p=3, d_h=5, d_l=1, seed=0).validate()
    with pytest.raises(ValueError):
        SyntheticSpec(k=2, p=0, d_h=5, d_l=1, seed=0).validate()
    with pytest.raises(ValueError):
        SyntheticSpec(k=2, p=3, d_h=5, d_l=6, seed=0).validate()  # d_l > d_h
    with pytest.warns(UserWarning):
        SyntheticSpec(k=3, p=3, d_h=5, d_l=2, seed=0).validate()  # k*d_l > d_h


def test_inject_outliers_count_zero():
    X = np.ones((4, 6))
    Y, mask = inject_outliers(X, 0, 5.0, seed=0)
    np.testing.assert_array_equal(Y, X)
    assert mask.dtype == bool and not mask.any()


def test_inject_outliers_shapes_and_mask():
    X = np.ones((5, 10))
    Y, mask = inject_outliers(X, 3, 5.0, seed=0)
    assert Y.shape == (5, 13)
    np.testing.assert_array_equal(mask, np.array([False] * 10 + [True] * 3))
    np.testing.assert_array_equal(Y[:, :10], X)
    appended = Y[:, 10:]
    assert (appended >= 0).all() and (appended <= 5.0).all()


def test_inject_outliers_energy_dominates():
    rng = np.random.default_rng(6)
    X = rng.standard_normal((8, 12))
    magnitude = 10 * np.linalg.norm(X, axis=0).max()
    Y, mask = inject_outliers(X, 4, magnitude, seed=1)
    norms = np.linalg.norm(Y, axis=0)
    assert norms[mask].min() > norms[~mask].max()


def test_inject_outliers_validation():
    X = np.ones((3, 4))
    with pytest.raises(ValueError):
        inject_outliers(X, -1, 1.0, seed=0)
    with pytest.raises(ValueError):
        inject_outliers(X, 5, 1.0, seed=0)
