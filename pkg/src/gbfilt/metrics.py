"""Error metrics shared by training, evaluation, and the CLI."""

from __future__ import annotations

import numpy as np

from .errors import DataError
from .signals import as_samples

__all__ = ["mse", "nmse"]


def mse(prediction, target) -> float:
    """Mean squared error between two equal-length signals."""
    p = as_samples(prediction)
    t = as_samples(target)
    if len(p) != len(t):
        raise DataError(
            f"prediction and target lengths differ: {len(p)} vs {len(t)}"
        )
    d = p - t
    return float(d @ d / len(d))


def nmse(prediction, target) -> float:
    """MSE normalized by the target mean square.

    A score of 1.0 matches predicting all zeros; lower is better. When the
    target is identically zero the normalizer vanishes, and the score is 0
    for a perfect prediction and infinity otherwise.
    """
    t = as_samples(target)
    num = mse(prediction, t)
    den = float(t @ t / len(t))
    if den == 0.0:
        return 0.0 if num == 0.0 else float("inf")
    return num / den
