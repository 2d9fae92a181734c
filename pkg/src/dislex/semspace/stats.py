"""Majority baselines and the two-sample proportions test."""

import math
import warnings
from collections import Counter

from scipy.special import ndtr

from ..exceptions import DegenerateCountsWarning, EmptyLabels


def majority_baseline(labels):
    """Accuracy of always predicting the most frequent label."""
    labels = list(labels)
    if not labels:
        raise EmptyLabels("majority baseline of an empty label list")
    return max(Counter(labels).values()) / len(labels)


def proportions_z(successes1, n1, successes2, n2):
    """Pooled-variance z statistic for p1 - p2; ``None`` when the pooled proportion is 0 or 1."""
    for s, n in ((successes1, n1), (successes2, n2)):
        if n <= 0 or not 0 <= s <= n:
            raise ValueError(f"invalid counts: {s} successes out of {n}")
    pooled = (successes1 + successes2) / (n1 + n2)
    if pooled in (0.0, 1.0):
        return None
    se = math.sqrt(pooled * (1 - pooled) * (1 / n1 + 1 / n2))
    return (successes1 / n1 - successes2 / n2) / se


def proportions_test(successes1, n1, successes2, n2):
    """Two-sided p-value of the pooled two-sample z-test (no continuity correction).

    A degenerate pooled proportion yields p = 1 and a
    :class:`DegenerateCountsWarning`.
    """
    z = proportions_z(successes1, n1, successes2, n2)
    if z is None:
        warnings.warn("pooled proportion is 0 or 1; reporting p = 1", DegenerateCountsWarning, stacklevel=2)
        return 1.0
    return float(2.0 * ndtr(-abs(z)))
