"""End-state linear mappings between form (cue) space and semantic space.

Comprehension maps cue rows to semantic vectors (``C @ F ~ S``); production
maps semantic vectors back to cue support (``S @ G ~ C``). Both mappings are
the closed-form least-squares solutions, optionally ridge-regularized.
"""

import json
import struct
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_matrix, check_same_rows, check_vector
from .cues import CueMatrix
from .exceptions import ShapeMismatch, ZeroNorm, ZeroVariance

METRICS = ("pearson", "cosine")
RCOND = 1e-10


def solve_mapping(X, Y, ridge=0.0, rcond=RCOND):
    """Minimize ``||X W - Y||^2 + ridge * ||W||^2`` over ``W``.

    Uses a thin SVD of ``X``. Singular values below ``rcond * s_max`` are
    treated as zero, so ``ridge=0`` on a rank-deficient ``X`` returns the
    minimum-norm least-squares solution.
    """
    if ridge < 0:
        raise ValueError(f"ridge must be non-negative, got {ridge}")
    X = check_matrix(X, "X")
    Y = check_matrix(Y if not sp.issparse(Y) else Y.toarray(), "Y")
    check_same_rows(X, Y)
    if X.shape[0] < 1:
        raise ShapeMismatch("X has no rows")
    U, s, Vt = np.linalg.svd(X, full_matrices=False)
    keep = s > rcond * (s[0] if s.size else 0.0)
    s, U, Vt = s[keep], U[:, keep], Vt[keep]
    factor = s / (s * s + ridge)
    return Vt.T @ (factor[:, None] * (U.T @ Y))


@dataclass
class MappingPair:
    F: np.ndarray
    G: np.ndarray
    ridge: float = 0.0

    def __post_init__(self):
        if self.F.shape[::-1] != self.G.shape:
            raise ShapeMismatch(f"F {self.F.shape} and G {self.G.shape} do not compose")


def train_endstate(C, S, ridge=0.0):
    """Solve ``C F = S`` and ``S G = C``."""
    cells = C.cells if isinstance(C, CueMatrix) else C
    cells = cells.toarray() if sp.issparse(cells) else np.asarray(cells, dtype=np.float64)
    S = check_matrix(S, "S")
    check_same_rows(cells, S, "C", "S")
    return MappingPair(F=solve_mapping(cells, S, ridge), G=solve_mapping(S, cells, ridge), ridge=ridge)


def predict_semantics(rows, F):
    if sp.issparse(rows):
        if rows.shape[1] != F.shape[0]:
            raise ShapeMismatch(f"rows have {rows.shape[1]} columns, F has {F.shape[0]} rows")
        return np.asarray(rows @ F)
    rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    if rows.shape[1] != F.shape[0]:
        raise ShapeMismatch(f"rows have {rows.shape[1]} columns, F has {F.shape[0]} rows")
    return rows @ F


def similarity(u, v, metric="pearson"):
    u = check_vector(u, "u")
    v = check_vector(v, "v")
    if u.shape != v.shape:
        raise ShapeMismatch(f"vectors differ in length: {u.shape[0]} vs {v.shape[0]}")
    if metric == "pearson":
        if u.shape[0] < 2:
            raise ShapeMismatch("pearson correlation needs at least two components")
        u = u - u.mean()
        v = v - v.mean()
        nu, nv = np.linalg.norm(u), np.linalg.norm(v)
        if nu == 0 or nv == 0:
            raise ZeroVariance("pearson correlation of a constant vector")
    elif metric == "cosine":
        nu, nv = np.linalg.norm(u), np.linalg.norm(v)
        if nu == 0 or nv == 0:
            raise ZeroNorm("cosine similarity of a zero vector")
    else:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def _normalized_rows(M, metric):
    M = np.asarray(M, dtype=np.float64)
    if metric == "pearson":
        M = M - M.mean(axis=1, keepdims=True)
    elif metric != "cosine":
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
    norms = np.linalg.norm(M, axis=1)
    if np.any(norms == 0):
        raise (ZeroVariance if metric == "pearson" else ZeroNorm)(
            f"{int(np.sum(norms == 0))} row(s) have zero {'variance' if metric == 'pearson' else 'norm'}"
        )
    return M / norms[:, None]


def similarity_matrix(A, B, metric="pearson"):
    """Pairwise similarities between the rows of ``A`` and of ``B``."""
    return _normalized_rows(A, metric) @ _normalized_rows(B, metric).T


@dataclass
class ComprehensionReport:
    accuracy: float
    per_word: list = field(repr=False)
    metric: str = "pearson"

    def to_tsv(self, stream):
        stream.write("target\tnearest\tsimilarity\tcorrect\n")
        for target, nearest, score, ok in self.per_word:
            stream.write(f"{target}\t{nearest}\t{score:.6f}\t{int(ok)}\n")


def evaluate_comprehension(predicted, gold, target_ids, metric="pearson", names=None, chunk=2048):
    """Nearest-gold-neighbour accuracy of predicted semantic vectors.

    A prediction counts as correct only if its target row is the unique
    maximum of similarity over all gold rows.
    """
    predicted = check_matrix(predicted, "predicted")
    gold = check_matrix(gold, "gold")
    target_ids = np.asarray(target_ids, dtype=np.intp)
    if predicted.shape[0] != target_ids.shape[0]:
        raise ShapeMismatch("one target id per predicted row is required")
    if predicted.shape[1] != gold.shape[1]:
        raise ShapeMismatch(f"predicted dim {predicted.shape[1]} != gold dim {gold.shape[1]}")
    if names is None:
        names = [str(i) for i in range(gold.shape[0])]
    gold_n = _normalized_rows(gold, metric)
    per_word = []
    for start in range(0, predicted.shape[0], chunk):
        block = _normalized_rows(predicted[start:start + chunk], metric) @ gold_n.T
        for r, sims in enumerate(block):
            t = target_ids[start + r]
            best = int(np.argmax(sims))
            target_score = sims[t]
            others = np.delete(sims, t)
            correct = bool(others.size == 0 or target_score > others.max())
            per_word.append((names[t], names[best], float(sims[best]), correct))
    accuracy = float(np.mean([p[3] for p in per_word])) if per_word else float("nan")
    return ComprehensionReport(accuracy=accuracy, per_word=per_word, metric=metric)


# -- persistence ---------------------------------------------------------------

MAGIC = b"DLXMAT\x00\x01"


def write_matrix(stream, M):
    """Write ``M`` as magic bytes, two little-endian uint64 dims and row-major float64 data."""
    M = np.ascontiguousarray(M, dtype="<f8")
    stream.write(MAGIC)
    stream.write(struct.pack("<QQ", *M.shape))
    stream.write(M.tobytes(order="C"))


def save_matrix(path, M):
    with open(path, "wb") as fh:
        write_matrix(fh, M)


def load_matrix(path):
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise ValueError(f"{path}: not a matrix container")
        rows, cols = struct.unpack("<QQ", fh.read(16))
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != rows * cols:
        raise ValueError(f"{path}: expected {rows * cols} values, found {data.size}")
    return data.reshape(rows, cols).astype(np.float64)


def mapping_metadata(pair, metric, index):
    return {"ridge": pair.ridge, "metric": metric, "gram_index_sha256": index.digest(),
            "n_grams": len(index), "dim": int(pair.F.shape[1])}


def write_metadata(path, meta):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


class EndStateMapping(BaseEstimator):
    """Estimator wrapper around :func:`train_endstate`.

    ``fit(C, S)`` learns ``comprehension_`` (F) and ``production_`` (G);
    ``predict`` maps cue rows to semantic vectors and ``score`` reports
    comprehension accuracy against the training semantics.
    """

    def __init__(self, ridge=0.0, metric="pearson"):
        self.ridge = ridge
        self.metric = metric

    def fit(self, C, S):
        pair = train_endstate(C, S, self.ridge)
        self.comprehension_ = pair.F
        self.production_ = pair.G
        self.S_ = np.asarray(S, dtype=np.float64)
        return self

    @property
    def pair_(self):
        check_is_fitted(self, "comprehension_")
        return MappingPair(self.comprehension_, self.production_, self.ridge)

    def predict(self, C):
        check_is_fitted(self, "comprehension_")
        return predict_semantics(C, self.comprehension_)

    def predict_support(self, S):
        check_is_fitted(self, "production_")
        S = np.atleast_2d(np.asarray(S, dtype=np.float64))
        if S.shape[1] != self.production_.shape[0]:
            raise ShapeMismatch(f"S has {S.shape[1]} columns, G has {self.production_.shape[0]} rows")
        return S @ self.production_

    def score(self, C, S=None):
        check_is_fitted(self, "comprehension_")
        gold = self.S_ if S is None else np.asarray(S, dtype=np.float64)
        pred = self.predict(C)
        return evaluate_comprehension(pred, gold, np.arange(pred.shape[0]), self.metric).accuracy
