"""Principal components and the PCA-dimension sweep of LDA accuracy."""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .._validation import check_matrix
from .lda import loocv_lda

SWEEP_DIMS = (2, 5, 10, 50, 100, 150, 200, 250, 300)


@dataclass(frozen=True)
class PCAModel:
    mean: np.ndarray
    components: np.ndarray  # p x p, one unit-norm component per column
    explained_variance: np.ndarray

    @property
    def explained_variance_ratio(self):
        total = self.explained_variance.sum()
        return self.explained_variance / total if total > 0 else np.zeros_like(self.explained_variance)

    def transform(self, X, n_components=None):
        V = self.components if n_components is None else self.components[:, :n_components]
        return (np.asarray(X, dtype=np.float64) - self.mean) @ V

    def inverse_transform(self, scores):
        k = scores.shape[1]
        return scores @ self.components[:, :k].T + self.mean


def fit_pca(X):
    """Eigendecomposition of the sample covariance, largest variance first.

    Each component is signed so that its largest-magnitude loading is positive.
    """
    X = check_matrix(X)
    n, p = X.shape
    if n < 2:
        raise ValueError("PCA needs at least two observations")
    mean = X.mean(axis=0)
    Xc = X - mean
    cov = Xc.T @ Xc / (n - 1)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1]
    evals = np.clip(evals[order], 0.0, None)
    evecs = evecs[:, order]
    pivot = np.argmax(np.abs(evecs), axis=0)
    signs = np.sign(evecs[pivot, np.arange(p)])
    signs[signs == 0] = 1.0
    return PCAModel(mean=mean, components=evecs * signs, explained_variance=evals)


def pca_sweep_lda(X, labels, dims=SWEEP_DIMS, shrinkage=0.01, model=None):
    """LOOCV LDA accuracy on the first ``d`` principal components for each ``d``."""
    X = check_matrix(X)
    p = X.shape[1]
    dims = list(dims)
    if max(dims) > p:
        raise ValueError(f"requested {max(dims)} components but data has {p} dimensions")
    model = model or fit_pca(X)
    scores = model.transform(X)
    return [(d, loocv_lda(scores[:, :d], labels, shrinkage).accuracy) for d in dims]


def default_dims(p):
    """The standard sweep grid restricted to ``p`` (``p`` itself always included)."""
    dims = [d for d in SWEEP_DIMS if d < p]
    return dims + [p]


class PCA(TransformerMixin, BaseEstimator):
    """Full-rank PCA as a transformer.

    ``loadings_`` holds the components as columns (p x p); ``components_``
    follows the scikit-learn row convention and is truncated to
    ``n_components``.
    """

    def __init__(self, n_components=None):
        self.n_components = n_components

    def fit(self, X, y=None):
        self.model_ = fit_pca(X)
        k = self.n_components or self.model_.components.shape[1]
        self.mean_ = self.model_.mean
        self.loadings_ = self.model_.components
        self.components_ = self.loadings_[:, :k].T
        self.explained_variance_ = self.model_.explained_variance[:k]
        self.explained_variance_ratio_ = self.model_.explained_variance_ratio[:k]
        self.n_features_in_ = self.mean_.shape[0]
        return self

    def transform(self, X):
        check_is_fitted(self, "model_")
        return self.model_.transform(check_matrix(X), self.components_.shape[0])

    def inverse_transform(self, X):
        check_is_fitted(self, "model_")
        return self.model_.inverse_transform(np.asarray(X, dtype=np.float64))
