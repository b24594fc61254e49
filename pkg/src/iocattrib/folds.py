"""Fold assignment shared by cross-validation and stacking."""

from __future__ import annotations

import numpy as np


def stratified_assignment(y: np.ndarray, k: int, stream: np.random.Generator) -> np.ndarray:
    """Assign each index to one of k folds, class by class.

    Each class's indices are shuffled and dealt to consecutive folds,
    continuing from where the previous class stopped.  Global fold sizes
    therefore differ by at most one, and a class with m <= k members
    lands in exactly m distinct folds.
    """
    fold = np.empty(len(y), dtype=np.int64)
    offset = 0
    for c in np.unique(y):
        idx = np.flatnonzero(y == c)
        idx = idx[stream.permutation(len(idx))]
        for j, i in enumerate(idx):
            fold[i] = (offset + j) % k
        offset += len(idx)
    return fold


def plain_assignment(n: int, k: int, stream: np.random.Generator) -> np.ndarray:
    """Unstratified balanced assignment after one seeded shuffle."""
    fold = np.empty(n, dtype=np.int64)
    perm = stream.permutation(n)
    for j, i in enumerate(perm):
        fold[i] = j % k
    return fold
