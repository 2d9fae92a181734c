import numpy as np
import pytest

from dislex.datasets import two_blobs
from dislex.exceptions import PerplexityTooLarge
from dislex.semspace import ExactTSNE, loocv_lda, tsne
from dislex.semspace.tsne import _squared_distances, conditional_probabilities


def pairwise(Y):
    return np.sqrt(((Y[:, None, :] - Y[None, :, :]) ** 2).sum(-1))


def test_blobs_stay_separable():
    X, y = two_blobs(n_per=60, p=10, seed=0)
    Y = tsne(X, perplexity=20, iterations=500, seed=0)
    assert loocv_lda(Y, y, 0.01).accuracy == 1.0


def test_three_equidistant_points(diag):
    X = np.eye(3)
    Y = tsne(X, perplexity=1.5, iterations=1000, seed=0)
    d = pairwise(Y)[np.triu_indices(3, 1)]
    assert d.max() / d.min() - 1 < 0.05
    assert any(e["event"] == "perplexity_large" for e in diag())


def test_perplexity_limits(rng):
    X = rng.normal(size=(10, 3))
    with pytest.raises(PerplexityTooLarge):
        tsne(X, perplexity=9)
    with pytest.raises(ValueError):
        tsne(X, perplexity=1.0)


def test_conditional_entropy_matches_perplexity(rng):
    X = rng.normal(size=(40, 5))
    P, _ = conditional_probabilities(_squared_distances(X), 10.0)
    np.testing.assert_allclose(P.sum(axis=1), 1.0)
    assert np.all(np.diag(P) == 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        H = -np.nansum(np.where(P > 0, P * np.log(P), 0.0), axis=1)
    np.testing.assert_allclose(np.exp(H), 10.0, rtol=1e-3)


def test_deterministic_under_seed(rng):
    X = rng.normal(size=(30, 4))
    a = tsne(X, perplexity=5, iterations=200, seed=7)
    b = tsne(X, perplexity=5, iterations=200, seed=7)
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, tsne(X, perplexity=5, iterations=200, seed=8))


def test_output_centred_and_finite(rng):
    Y = tsne(rng.normal(size=(25, 3)), perplexity=5, iterations=300, seed=0)
    assert Y.shape == (25, 2)
    assert np.all(np.isfinite(Y))
    np.testing.assert_allclose(Y.mean(axis=0), 0.0, atol=1e-9)


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("perplexity", [10, 20])
def test_kl_after_exaggeration_does_not_end_higher(seed, perplexity):
    X, _ = two_blobs(n_per=50, p=10, seed=seed)
    _, kl = tsne(X, perplexity=perplexity, iterations=1000, seed=seed, return_history=True)
    assert len(kl) == 1001
    assert kl[1000] <= kl[300] + 1e-3


def test_estimator_wrapper(rng):
    X = rng.normal(size=(20, 3))
    est = ExactTSNE(perplexity=4, n_iter=100, random_state=1)
    Y = est.fit_transform(X)
    np.testing.assert_array_equal(Y, tsne(X, 4, 100, seed=1))
    assert est.get_params()["perplexity"] == 4
