"""Semantic-space analyses: LDA with LOOCV, baselines, PCA sweeps, shift vectors, t-SNE."""

from .lda import LDAModel, ShrinkageLDA, fit_lda, loocv_lda, predict_lda
from .pca import PCA, PCAModel, SWEEP_DIMS, default_dims, fit_pca, pca_sweep_lda
from .report import ClassificationReport
from .shifts import ShiftVectorSet, shift_vectors
from .stats import majority_baseline, proportions_test, proportions_z
from .tsne import ExactTSNE, tsne

__all__ = [
    "ClassificationReport", "ExactTSNE", "LDAModel", "PCA", "PCAModel", "SWEEP_DIMS",
    "ShiftVectorSet", "ShrinkageLDA", "default_dims", "fit_lda", "fit_pca", "loocv_lda",
    "majority_baseline", "pca_sweep_lda", "predict_lda", "proportions_test", "proportions_z",
    "shift_vectors", "tsne",
]
