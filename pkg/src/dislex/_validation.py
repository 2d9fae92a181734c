"""Input validation helpers shared by the estimators."""

import numpy as np
import scipy.sparse as sp

from .exceptions import NonFiniteInput, ShapeMismatch


def check_matrix(X, name="X", allow_sparse=False, ensure_2d=True):
    """Return ``X`` as a float64 array (or CSR matrix), rejecting NaN/inf."""
    if sp.issparse(X):
        if not allow_sparse:
            X = X.toarray()
        else:
            X = sp.csr_matrix(X, dtype=np.float64)
            if not np.all(np.isfinite(X.data)):
                raise NonFiniteInput(f"{name} contains NaN or infinite values")
            return X
    X = np.asarray(X, dtype=np.float64)
    if ensure_2d:
        if X.ndim == 1:
            raise ShapeMismatch(f"{name} must be 2-D, got a 1-D array of length {X.shape[0]}")
        if X.ndim != 2:
            raise ShapeMismatch(f"{name} must be 2-D, got {X.ndim}-D")
    if not np.all(np.isfinite(X)):
        raise NonFiniteInput(f"{name} contains NaN or infinite values")
    return X


def check_vector(v, name="v"):
    v = np.asarray(v, dtype=np.float64)
    if v.ndim != 1:
        raise ShapeMismatch(f"{name} must be 1-D, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NonFiniteInput(f"{name} contains NaN or infinite values")
    return v


def check_labels(y, n_samples=None):
    """Encode arbitrary hashable labels as integer ids in sorted label order."""
    y = np.asarray(y)
    if y.ndim != 1:
        raise ShapeMismatch(f"labels must be 1-D, got shape {y.shape}")
    if n_samples is not None and y.shape[0] != n_samples:
        raise ShapeMismatch(f"got {y.shape[0]} labels for {n_samples} samples")
    classes, codes = np.unique(y, return_inverse=True)
    return classes, codes.astype(np.intp)


def check_same_rows(A, B, a="X", b="Y"):
    if A.shape[0] != B.shape[0]:
        raise ShapeMismatch(f"{a} has {A.shape[0]} rows but {b} has {B.shape[0]}")
