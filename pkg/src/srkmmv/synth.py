"""Synthetic problem generation: Gaussian sensing matrices and row-sparse
signals with a support shared by every column."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidSparsityError
from .sampling import SeededRng, SupportSet, sample_support

__all__ = ["SyntheticProblem", "generate_problem"]


@dataclass(frozen=True)
class SyntheticProblem:
    """A consistent system ``B = A @ X_true`` with known row-sparse truth."""

    A: np.ndarray  # m x n
    X_true: np.ndarray  # n x L
    B: np.ndarray  # m x L
    true_support: SupportSet  # K rows
    seed: int


def generate_problem(m: int, n: int, L: int, K: int, rng: SeededRng) -> SyntheticProblem:
    """Draw one random instance.

    Entries of ``A`` are i.i.d. standard normal; the K-row support is uniform
    without replacement; nonzero entries of ``X_true`` are i.i.d. standard
    normal (an entry that lands exactly on 0.0 is redrawn, so the nonzero
    pattern of every column equals the support).
    """
    if m < 1 or n < 1 or L < 1:
        raise InvalidSparsityError(f"dimensions must be positive, got m={m} n={n} L={L}")
    if not 1 <= K <= n:
        raise InvalidSparsityError(f"K={K} outside [1, {n}]")
    A = rng.standard_normal(m, n)
    support = sample_support(n, K, rng)
    values = rng.standard_normal(K, L)
    while True:
        zero = values == 0.0
        if not zero.any():
            break
        values[zero] = rng.standard_normal(int(zero.sum()))
    X_true = np.zeros((n, L))
    X_true[support.indices] = values
    return SyntheticProblem(A=A, X_true=X_true, B=A @ X_true, true_support=support, seed=rng.seed)
