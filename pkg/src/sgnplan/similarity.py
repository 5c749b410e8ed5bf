"""Task similarity machinery for the similarity-guided solver.

Attribute weights come from reciprocal-variance weighting: per attribute
column, the dispersion coefficient y = sample_std / mean, normalized to sum 1.
Task similarity s = 1 / (1 + weighted Euclidean distance); similarity between
two permutations is the positionwise mean of task similarities. The
per-generation selection threshold decays from ave toward ave - std/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import Task

# Fixed, documented attribute order; column 2 is always duration.
ATTRIBUTES = ("est", "let", "duration", "profit")


class DegenerateAttributeError(ValueError):
    """An attribute column has zero mean but nonzero dispersion."""


@dataclass(frozen=True)
class TaskSimilarityMatrix:
    """Pairwise task similarities plus the attribute list they were built from."""

    values: np.ndarray             # (n, n) symmetric, diagonal 1, entries in (0, 1]
    attributes: tuple[str, ...] = ATTRIBUTES

    @property
    def n(self) -> int:
        return self.values.shape[0]


def attribute_matrix(tasks: Sequence[Task]) -> np.ndarray:
    """Tasks as an (n, 4) float array with columns (est, let, duration, profit)."""
    if len(tasks) < 1:
        raise ValueError("attribute_matrix needs at least one task")
    return np.array([[t.est, t.let, t.duration, t.profit] for t in tasks], dtype=np.float64)


def rvw_weights(mat: np.ndarray) -> np.ndarray:
    """Reciprocal-variance attribute weights for an (n, m) attribute matrix.

    Per column: mean, sample std (n-1 divisor), dispersion coefficient
    y = std/|mean| (0 for constant columns), weights = y / sum(y). All-constant
    input falls back to uniform weights.
    """
    mat = np.asarray(mat, dtype=np.float64)
    if mat.ndim != 2 or mat.shape[0] < 2:
        raise ValueError("rvw_weights needs at least two rows")
    means = mat.mean(axis=0)
    stds = mat.std(axis=0, ddof=1)
    y = np.zeros_like(means)
    for i in range(mat.shape[1]):
        if stds[i] == 0.0:
            continue  # constant column: no dispersion, zero weight
        if means[i] == 0.0:
            raise DegenerateAttributeError(
                f"attribute column {i} has zero mean but dispersion {stds[i]}"
            )
        y[i] = stds[i] / abs(means[i])
    total = y.sum()
    if total == 0.0:
        return np.full(mat.shape[1], 1.0 / mat.shape[1])
    return y / total


def task_similarity_matrix(tasks: Sequence[Task], weights: np.ndarray) -> TaskSimilarityMatrix:
    """All-pairs similarity s = 1/(1 + d), d = weighted Euclidean distance."""
    mat = attribute_matrix(tasks)
    w = np.asarray(weights, dtype=np.float64)
    if w.shape != (mat.shape[1],):
        raise ValueError(f"expected {mat.shape[1]} weights, got shape {w.shape}")
    sq = np.zeros((mat.shape[0], mat.shape[0]))
    for i in range(mat.shape[1]):
        col = mat[:, i]
        sq += w[i] * (col[:, None] - col[None, :]) ** 2
    return TaskSimilarityMatrix(1.0 / (1.0 + np.sqrt(sq)))


def _values(ts) -> np.ndarray:
    return ts.values if isinstance(ts, TaskSimilarityMatrix) else np.asarray(ts)


def individual_similarity(a: np.ndarray, b: np.ndarray, ts) -> float:
    """Positionwise mean task similarity between two permutations.

    a and b are 0-based task index arrays of equal length over the matrix ts.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"permutation lengths differ: {a.shape} vs {b.shape}")
    if a.size == 0:
        raise ValueError("empty permutations have no similarity")
    return float(_values(ts)[a, b].mean())


def generation_threshold(x: int, m: int, ave: float, std: float) -> float:
    """Selection threshold at generation x of m: ave - std*(1 - 2^(-(x-1)/(m-1)))."""
    if m < 2:
        raise ValueError("threshold needs at least two generations")
    if not 1 <= x <= m:
        raise ValueError(f"generation index {x} outside [1, {m}]")
    decay = 1.0 - math.exp(-math.log(2.0) * (x - 1) / (m - 1))
    return ave - std * decay


def population_similarity_stats(perms: Sequence[np.ndarray], ts) -> tuple[float, float]:
    """Mean and sample std of similarity over all unordered distinct pairs.

    A single pair has std 0 by convention, keeping the threshold defined for
    two-individual populations.
    """
    k = len(perms)
    if k < 2:
        raise ValueError("population similarity needs at least two individuals")
    values = [individual_similarity(perms[i], perms[j], ts)
              for i in range(k) for j in range(i + 1, k)]
    arr = np.asarray(values)
    ave = float(arr.mean())
    std = 0.0 if arr.size == 1 else float(arr.std(ddof=1))
    return ave, std
