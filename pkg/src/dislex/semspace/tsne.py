"""Exact (O(n^2)) t-SNE."""

import numpy as np
from sklearn.base import BaseEstimator

from .. import _diagnostics
from .._validation import check_matrix
from ..exceptions import PerplexityTooLarge

ENTROPY_TOL = 1e-5
BISECTION_STEPS = 50
EXAGGERATION = 12.0
EXAGGERATION_ITERS = 250
LEARNING_RATE = 200.0
MIN_GAIN = 0.01


def _squared_distances(X):
    sq = np.einsum("ij,ij->i", X, X)
    D = sq[:, None] + sq[None, :] - 2.0 * X @ X.T
    np.maximum(D, 0.0, out=D)
    np.fill_diagonal(D, 0.0)
    return D


def conditional_probabilities(D, perplexity, tol=ENTROPY_TOL, max_steps=BISECTION_STEPS):
    """Row-normalized Gaussian affinities whose entropy matches ``log(perplexity)``.

    The precision of every row is found by bisection, all rows in parallel.
    Returns the conditional matrix and the per-row precisions.
    """
    n = D.shape[0]
    target = np.log(perplexity)
    off = ~np.eye(n, dtype=bool)
    Dr = D[off].reshape(n, n - 1)
    Dr = Dr - Dr.min(axis=1, keepdims=True)
    beta = np.ones(n)
    lo = np.full(n, -np.inf)
    hi = np.full(n, np.inf)

    def entropy(beta):
        P = np.exp(-Dr * beta[:, None])
        sumP = P.sum(axis=1)
        H = np.log(sumP) + beta * np.einsum("ij,ij->i", Dr, P) / sumP
        return H, P / sumP[:, None]

    H, P = entropy(beta)
    for _ in range(max_steps):
        diff = H - target
        active = np.abs(diff) > tol
        if not active.any():
            break
        up = active & (diff > 0)
        down = active & (diff < 0)
        lo[up] = beta[up]
        beta[up] = np.where(np.isinf(hi[up]), beta[up] * 2.0, (beta[up] + hi[up]) / 2.0)
        hi[down] = beta[down]
        beta[down] = np.where(np.isinf(lo[down]), beta[down] / 2.0, (beta[down] + lo[down]) / 2.0)
        H, P = entropy(beta)
    out = np.zeros((n, n))
    out[off] = P.ravel()
    return out, beta


def joint_probabilities(X, perplexity):
    D = _squared_distances(X)
    cond, _ = conditional_probabilities(D, perplexity)
    P = (cond + cond.T) / (2.0 * X.shape[0])
    return np.maximum(P, 1e-12)


def _kl(P, Q):
    return float(np.sum(P * np.log(P / Q)))


def _check_perplexity(n, perplexity):
    if perplexity <= 1:
        raise ValueError(f"perplexity must exceed 1, got {perplexity}")
    if perplexity >= n - 1:
        raise PerplexityTooLarge(f"perplexity {perplexity} is unreachable with {n} points")
    if perplexity >= (n - 1) / 3:
        _diagnostics.emit("perplexity_large", perplexity=perplexity, n=n, advised_max=(n - 1) / 3)


def tsne(X, perplexity=30.0, iterations=1000, seed=0, learning_rate=LEARNING_RATE, return_history=False):
    """Embed the rows of ``X`` in two dimensions.

    Early exaggeration (x12) and momentum 0.5 for the first 250 iterations,
    momentum 0.8 afterwards (with momentum and gains reset at the switch),
    per-coordinate adaptive gains, Gaussian
    initialisation with standard deviation 1e-4. With ``return_history`` the
    KL divergence (against the unexaggerated affinities) is returned for the
    configuration at the start of every iteration, plus the final one.
    """
    X = check_matrix(X)
    n = X.shape[0]
    _check_perplexity(n, perplexity)
    P = joint_probabilities(X, perplexity)
    rng = np.random.default_rng(seed)
    Y = rng.normal(0.0, 1e-4, size=(n, 2))
    update = np.zeros_like(Y)
    gains = np.ones_like(Y)
    history = []
    for it in range(iterations):
        if it == EXAGGERATION_ITERS:
            # optimizer state restarts with the second phase
            update = np.zeros_like(Y)
            gains = np.ones_like(Y)
        exaggeration = EXAGGERATION if it < EXAGGERATION_ITERS else 1.0
        momentum = 0.5 if it < EXAGGERATION_ITERS else 0.8
        num = 1.0 / (1.0 + _squared_distances(Y))
        np.fill_diagonal(num, 0.0)
        Q = np.maximum(num / num.sum(), 1e-12)
        if return_history:
            history.append(_kl(P, Q))
        W = (exaggeration * P - Q) * num
        grad = 4.0 * (W.sum(axis=1)[:, None] * Y - W @ Y)
        same_sign = (grad > 0) == (update > 0)
        gains = np.where(same_sign, gains * 0.8, gains + 0.2)
        np.maximum(gains, MIN_GAIN, out=gains)
        update = momentum * update - learning_rate * gains * grad
        Y = Y + update
        Y -= Y.mean(axis=0)
    if return_history:
        num = 1.0 / (1.0 + _squared_distances(Y))
        np.fill_diagonal(num, 0.0)
        history.append(_kl(P, np.maximum(num / num.sum(), 1e-12)))
        return Y, np.array(history)
    return Y


class ExactTSNE(BaseEstimator):
    def __init__(self, perplexity=30.0, n_iter=1000, random_state=0, learning_rate=LEARNING_RATE):
        self.perplexity = perplexity
        self.n_iter = n_iter
        self.random_state = random_state
        self.learning_rate = learning_rate

    def fit(self, X, y=None):
        self.embedding_, self.kl_history_ = tsne(
            X, self.perplexity, self.n_iter, self.random_state, self.learning_rate, return_history=True
        )
        self.kl_divergence_ = float(self.kl_history_[-1])
        return self

    def fit_transform(self, X, y=None):
        return self.fit(X).embedding_
