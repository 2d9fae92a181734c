"""Linear discriminant analysis with covariance shrinkage and leave-one-out CV.

The pooled within-class covariance is shrunk towards a scaled identity::

    cov = (1 - shrinkage) * pooled + shrinkage * trace(pooled) / p * I

and classes are scored with the usual linear Gaussian discriminant plus the
log prior. Priors default to class frequencies.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import softmax
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted

from .._validation import check_labels, check_matrix, check_vector
from ..exceptions import ClassTooSmall, ShapeMismatch, SingularCovariance
from .report import MIN_CLASS_SIZE, ClassificationReport

EIG_RTOL = 1e-10
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class LDAModel:
    classes: np.ndarray
    class_means: np.ndarray
    pooled_cov: np.ndarray
    priors: np.ndarray
    shrinkage: float
    coef: np.ndarray
    intercept: np.ndarray

    def decision_function(self, X):
        X = np.atleast_2d(X)
        if X.shape[1] != self.coef.shape[1]:
            raise ShapeMismatch(f"X has {X.shape[1]} features, model expects {self.coef.shape[1]}")
        return X @ self.coef.T + self.intercept


def _shrink(pooled, shrinkage):
    p = pooled.shape[0]
    return (1.0 - shrinkage) * pooled + shrinkage * (np.trace(pooled) / p) * np.eye(p)


def _class_stats(X, codes, k):
    counts = np.bincount(codes, minlength=k)
    means = np.zeros((k, X.shape[1]))
    np.add.at(means, codes, X)
    means /= counts[:, None]
    return counts, means


def fit_lda(X, labels, shrinkage=0.01):
    """Fit a shrinkage LDA; ``labels`` may be any sortable labels."""
    if not 0.0 <= shrinkage <= 1.0:
        raise ValueError(f"shrinkage must lie in [0, 1], got {shrinkage}")
    X = check_matrix(X)
    classes, codes = check_labels(labels, X.shape[0])
    n, p = X.shape
    k = classes.shape[0]
    if k < 2:
        raise ClassTooSmall("LDA needs at least two classes")
    if n <= k:
        raise ClassTooSmall(f"need more samples ({n}) than classes ({k})")
    counts, means = _class_stats(X, codes, k)
    centered = X - means[codes]
    pooled = centered.T @ centered / (n - k)
    cov = _shrink(pooled, shrinkage)
    evals, evecs = np.linalg.eigh(cov)
    if evals[-1] <= 0 or evals[0] <= EIG_RTOL * evals[-1]:
        raise SingularCovariance(
            f"covariance is singular (min eigenvalue {evals[0]:.3g}, max {evals[-1]:.3g}); "
            "increase shrinkage"
        )
    precision_means = evecs @ ((evecs.T @ means.T) / evals[:, None])
    coef = precision_means.T
    priors = counts / n
    intercept = -0.5 * np.einsum("kp,kp->k", means, coef) + np.log(priors)
    return LDAModel(classes=classes, class_means=means, pooled_cov=cov, priors=priors,
                    shrinkage=shrinkage, coef=coef, intercept=intercept)


def _argmax_lowest(scores):
    """Row-wise argmax; near-ties (relative 1e-12) resolve to the lowest class id."""
    scores = np.atleast_2d(scores)
    top = scores.max(axis=1, keepdims=True)
    tied = scores >= top - TIE_RTOL * np.maximum(1.0, np.abs(top))
    return np.argmax(tied, axis=1)


def predict_lda(model, x):
    """Class id and posterior vector for a single observation."""
    x = check_vector(x, "x")
    scores = model.decision_function(x[None, :])[0]
    return int(_argmax_lowest(scores)[0]), softmax(scores)


def _loocv_refit(X, codes, k, shrinkage):
    n = X.shape[0]
    pred = np.empty(n, dtype=np.intp)
    post = np.empty((n, k))
    mask = np.ones(n, dtype=bool)
    for i in range(n):
        mask[i] = False
        model = fit_lda(X[mask], codes[mask], shrinkage)
        scores = model.decision_function(X[i:i + 1])[0]
        pred[i] = _argmax_lowest(scores)[0]
        post[i] = softmax(scores)
        mask[i] = True
    return pred, post


def _loocv_fast(X, codes, k, shrinkage, chunk=256):
    """Exact leave-one-out via downdating the within-class scatter.

    Removing row i of class c changes that class mean and lowers the scatter
    by ``n_c / (n_c - 1) * u u^T`` with ``u = x_i - mean_c``. In the
    eigenbasis of the full scatter the shrunk covariance of every fold is
    diagonal plus that rank-one term, so each fold costs O(k p).
    """
    n, p = X.shape
    counts, means = _class_stats(X, codes, k)
    U = X - means[codes]
    W = U.T @ U
    D, V = np.linalg.eigh(W)
    dof = n - 1 - k
    a = (1.0 - shrinkage) / dof
    Z = X @ V
    M = means @ V
    Wu = U @ V
    trW = D.sum()
    log_counts = np.log(np.maximum(counts, 1))

    pred = np.empty(n, dtype=np.intp)
    post = np.empty((n, k))
    for start in range(0, n, chunk):
        sl = slice(start, min(start + chunk, n))
        c = codes[sl]
        nc = counts[c].astype(np.float64)
        w = Wu[sl]
        ratio = nc / (nc - 1.0)
        b = shrinkage * (trW - ratio * np.einsum("ij,ij->i", w, w)) / (dof * p)
        alpha = a * D[None, :] + b[:, None]
        top = alpha.max(axis=1)
        if np.any(alpha.min(axis=1) <= EIG_RTOL * top):
            raise SingularCovariance("a leave-one-out fold has a singular covariance")
        inv_alpha = 1.0 / alpha
        gamma = a * ratio
        denom = 1.0 - gamma * np.einsum("ij,ij,ij->i", w, w, inv_alpha)
        if np.any(denom <= EIG_RTOL):
            raise SingularCovariance("a leave-one-out fold has a singular covariance")

        E = Z[sl, None, :] - M[None, :, :]
        rows = np.arange(E.shape[0])
        # held-out class: x_i - mean_c' = u * n_c / (n_c - 1)
        E[rows, c, :] = w * ratio[:, None]
        quad = np.einsum("ikj,ij->ik", E * E, inv_alpha)
        cross = np.einsum("ikj,ij->ik", E, w * inv_alpha)
        dist = quad + (gamma / denom)[:, None] * cross * cross

        cnt = np.broadcast_to(log_counts, (E.shape[0], k)).copy()
        cnt[rows, c] = np.log(counts[c] - 1.0)
        scores = -0.5 * dist + cnt
        pred[sl] = _argmax_lowest(scores)
        post[sl] = softmax(scores, axis=1)
    return pred, post


def loocv_lda(X, labels, shrinkage=0.01, method="fast", min_class_size=MIN_CLASS_SIZE):
    """Leave-one-out predictions for every row, summarized as a report.

    ``method="fast"`` downdates one shared factorization; ``method="refit"``
    literally refits :func:`fit_lda` n times.
    """
    X = check_matrix(X)
    classes, codes = check_labels(labels, X.shape[0])
    k = classes.shape[0]
    counts = np.bincount(codes, minlength=k)
    if k < 2:
        raise ClassTooSmall("need at least two classes")
    if counts.min() < 2:
        small = [str(c) for c, m in zip(classes, counts) if m < 2]
        raise ClassTooSmall(f"classes with fewer than two samples: {small}")
    if X.shape[0] - 1 <= k:
        raise ClassTooSmall("too few samples for leave-one-out")
    if method == "fast":
        pred, post = _loocv_fast(X, codes, k, shrinkage)
    elif method == "refit":
        pred, post = _loocv_refit(X, codes, k, shrinkage)
    else:
        raise ValueError(f"unknown method {method!r}")
    return ClassificationReport.from_predictions(classes, codes, pred, min_class_size, posteriors=post)


class ShrinkageLDA(ClassifierMixin, BaseEstimator):
    """scikit-learn style wrapper over :func:`fit_lda`.

    Parameters
    ----------
    shrinkage : float in [0, 1], default=0.01
        Weight of the scaled identity in the covariance estimate.
    """

    def __init__(self, shrinkage=0.01):
        self.shrinkage = shrinkage

    def fit(self, X, y):
        self.model_ = fit_lda(X, y, self.shrinkage)
        self.classes_ = self.model_.classes
        self.means_ = self.model_.class_means
        self.covariance_ = self.model_.pooled_cov
        self.priors_ = self.model_.priors
        self.coef_ = self.model_.coef
        self.intercept_ = self.model_.intercept
        self.n_features_in_ = self.coef_.shape[1]
        return self

    def decision_function(self, X):
        check_is_fitted(self, "model_")
        return self.model_.decision_function(check_matrix(X))

    def predict(self, X):
        return self.classes_[_argmax_lowest(self.decision_function(X))]

    def predict_proba(self, X):
        return softmax(self.decision_function(X), axis=1)
