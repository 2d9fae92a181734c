import numpy as np
import pytest

from dislex.datasets import sweep_spread_thin, sweep_top_component
from dislex.semspace import PCA, default_dims, fit_pca, loocv_lda, pca_sweep_lda


def test_points_on_a_line(rng):
    t = rng.normal(size=50)
    direction = np.array([1.0, 2.0, -2.0]) / 3.0
    X = t[:, None] * direction + [4.0, -1.0, 0.5]
    model = fit_pca(X)
    assert model.explained_variance_ratio[0] == pytest.approx(1.0, abs=1e-12)
    assert abs(model.components[:, 0] @ direction) == pytest.approx(1.0, abs=1e-12)


def test_isotropic_cumulative_curve_is_linear(rng):
    X = rng.normal(size=(20000, 10))
    cum = np.cumsum(fit_pca(X).explained_variance_ratio)
    k = np.arange(1, 11)
    assert np.all(np.abs(cum - k / 10) <= 0.1 * k / 10)


def test_matches_svd_oracle(rng):
    X = rng.normal(size=(30, 6)) @ rng.normal(size=(6, 6))
    model = fit_pca(X)
    Xc = X - X.mean(axis=0)
    s = np.linalg.svd(Xc, compute_uv=False)
    np.testing.assert_allclose(model.explained_variance, s ** 2 / 29, rtol=1e-10)
    assert model.explained_variance.sum() == pytest.approx(X.var(axis=0, ddof=1).sum(), rel=1e-12)


def test_components_orthonormal_and_signed(rng):
    X = rng.normal(size=(40, 5)) * [5, 4, 3, 2, 1]
    V = fit_pca(X).components
    np.testing.assert_allclose(V.T @ V, np.eye(5), atol=1e-12)
    pivots = V[np.argmax(np.abs(V), axis=0), np.arange(5)]
    assert np.all(pivots > 0)


def test_full_reconstruction(rng):
    X = rng.normal(size=(25, 7))
    model = fit_pca(X)
    np.testing.assert_allclose(model.inverse_transform(model.transform(X)), X, atol=1e-10)


def test_fewer_rows_than_columns(rng):
    X = rng.normal(size=(5, 12))
    ev = fit_pca(X).explained_variance
    assert np.all(ev[4:] < 1e-10)
    assert ev.sum() == pytest.approx(X.var(axis=0, ddof=1).sum())


def test_estimator_wrapper(rng):
    X = rng.normal(size=(30, 4))
    est = PCA(n_components=2).fit(X)
    assert est.transform(X).shape == (30, 2)
    assert est.components_.shape == (2, 4)
    assert est.get_params() == {"n_components": 2}


def test_default_dims():
    assert default_dims(50) == [2, 5, 10, 50]
    assert default_dims(300) == [2, 5, 10, 50, 100, 150, 200, 250, 300]
    assert default_dims(7) == [2, 5, 7]


def test_sweep_full_dimension_equals_raw(rng):
    X = rng.normal(size=(120, 8))
    y = np.arange(120) % 3
    X += y[:, None] * 0.4
    sweep = dict(pca_sweep_lda(X, y, dims=[2, 8]))
    assert sweep[8] == pytest.approx(loocv_lda(X, y, 0.01).accuracy)


def test_sweep_rejects_too_many_dims(rng):
    with pytest.raises(ValueError):
        pca_sweep_lda(rng.normal(size=(20, 3)), np.arange(20) % 2, dims=[2, 5])


def test_sweep_top_component_flat():
    X, y = sweep_top_component(seed=0)
    sweep = dict(pca_sweep_lda(X, y, dims=[2, 40]))
    assert sweep[2] >= 0.95
    assert abs(sweep[2] - sweep[40]) <= 0.02


def test_sweep_spread_thin_rises():
    X, y = sweep_spread_thin(seed=0)
    sweep = dict(pca_sweep_lda(X, y, dims=[2, 5, 10, 40]))
    assert sweep[2] <= 0.6
    assert sweep[40] - sweep[2] >= 0.2
