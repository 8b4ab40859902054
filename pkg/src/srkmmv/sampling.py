"""Seeded randomness and norm-proportional row selection.

Every stochastic component in the library draws from a :class:`SeededRng`,
a thin wrapper around numpy's PCG64 generator. Identical seeds give
bit-identical streams, which is what makes solver runs and whole Monte Carlo
reports exactly reproducible. Independent streams (per trial, per purpose)
are derived with :func:`derive_seed`.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateDistributionError, InvalidSparsityError
from .linalg import as_matrix, row_norms_sq

__all__ = [
    "SeededRng",
    "derive_seed",
    "RowSampler",
    "SupportSet",
    "build_row_sampler",
    "sample_row",
    "sample_rows",
    "sample_support",
]

_SEED_MOD = 2**64


class SeededRng:
    """Deterministic random source; single-owner, not thread-safe.

    Parameters
    ----------
    seed : int
        Stream identifier, reduced modulo 2**64.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) % _SEED_MOD
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def random(self) -> float:
        """One uniform draw from [0, 1)."""
        return self._gen.random()

    def randoms(self, count: int) -> np.ndarray:
        """``count`` uniform draws; same stream as repeated :meth:`random`."""
        return self._gen.random(count)

    def standard_normal(self, *shape: int) -> np.ndarray:
        return self._gen.standard_normal(shape if shape else None)

    def sample_indices(self, n: int, k: int) -> np.ndarray:
        """``k`` distinct indices drawn uniformly from ``range(n)``, unsorted."""
        return self._gen.choice(n, size=k, replace=False)

    def __repr__(self) -> str:  # pragma: no cover
        return f"SeededRng(seed={self.seed})"


def derive_seed(base_seed: int, *parts) -> int:
    """Derive a child seed from ``base_seed`` and a label tuple.

    Stable across runs, platforms and processes (keyed on the string form of
    each part), so trials of an experiment can be executed in any order or in
    parallel and still use identical streams.
    """
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        h.update(str(part).encode())
        h.update(b"\x1f")
    return (int(base_seed) + int.from_bytes(h.digest(), "little")) % _SEED_MOD


@dataclass(frozen=True)
class RowSampler:
    """Precomputed inverse-CDF table for norm-proportional row selection.

    ``cumulative[i]`` is the probability of drawing a row index <= i; the
    final entry is exactly 1. Rows with zero norm occupy zero probability
    mass and are never returned.
    """

    cumulative: np.ndarray
    num_rows: int


@dataclass(frozen=True)
class SupportSet:
    """Sorted set of distinct coordinate indices inside ``range(n)``."""

    indices: np.ndarray
    n: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        if idx.ndim != 1 or idx.size < 1:
            raise InvalidSparsityError("support must contain at least one index")
        if idx.size > self.n:
            raise InvalidSparsityError(f"support size {idx.size} exceeds n={self.n}")
        if np.any(idx < 0) or np.any(idx >= self.n):
            raise InvalidSparsityError(f"support indices out of range [0, {self.n})")
        idx = np.sort(idx)
        if np.any(np.diff(idx) == 0):
            raise InvalidSparsityError("support indices must be distinct")
        object.__setattr__(self, "indices", idx)

    @property
    def size(self) -> int:
        return int(self.indices.size)

    def mask(self) -> np.ndarray:
        """Boolean membership mask of length ``n``."""
        m = np.zeros(self.n, dtype=bool)
        m[self.indices] = True
        return m


def build_row_sampler(A) -> RowSampler:
    """Sampler with P(row i) proportional to the squared row norm."""
    A = as_matrix(A)
    norms = row_norms_sq(A)
    total = float(norms.sum())
    if total <= 0.0:
        raise DegenerateDistributionError("all rows are zero; no distribution")
    cumulative = np.cumsum(norms) / total
    cumulative[-1] = 1.0
    return RowSampler(cumulative=cumulative, num_rows=A.shape[0])


def sample_row(sampler: RowSampler, rng: SeededRng) -> int:
    """Draw one row index; consumes exactly one uniform from ``rng``.

    Inverse-CDF search resolves ties upward, so zero-mass rows (repeated
    cumulative values) are skipped.
    """
    u = rng.random()
    i = int(np.searchsorted(sampler.cumulative, u, side="right"))
    return min(i, sampler.num_rows - 1)


def sample_rows(sampler: RowSampler, rng: SeededRng, count: int) -> np.ndarray:
    """Vectorized :func:`sample_row`; identical stream, identical results."""
    u = rng.randoms(count)
    idx = np.searchsorted(sampler.cumulative, u, side="right")
    return np.minimum(idx, sampler.num_rows - 1).astype(np.int64)


def sample_support(n: int, K: int, rng: SeededRng) -> SupportSet:
    """``K`` distinct indices drawn uniformly from ``range(n)``, sorted."""
    if not 1 <= K <= n:
        raise InvalidSparsityError(f"K={K} outside [1, {n}]")
    return SupportSet(indices=rng.sample_indices(n, K), n=n)
