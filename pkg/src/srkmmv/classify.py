"""Sparse-representation classification.

A test sample is expressed as a sparse combination of all training samples
(stacked as dictionary columns, grouped by class); the predicted class is the
one whose coefficient block reconstructs the sample with the smallest
residual. Multi-frame test sequences use the joint solver, so all frames
share one row-sparse coefficient support.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence, Tuple

import numpy as np

from .errors import DimensionError, SpecValidationError
from .linalg import as_matrix, as_vector
from .solvers import SolverConfig, Variant, solve

__all__ = [
    "ClassDictionary",
    "ClassificationResult",
    "build_dictionary",
    "classify_smv",
    "classify_mmv",
]


@dataclass(frozen=True)
class ClassDictionary:
    """Training samples as columns of ``V``, contiguous per class.

    ``class_ranges`` lists ``(class_id, start, stop)`` column ranges in
    first-seen class order; the ranges partition ``range(V.shape[1])``.
    """

    V: np.ndarray
    class_ranges: tuple

    @property
    def num_classes(self) -> int:
        return len(self.class_ranges)

    @property
    def classes(self) -> tuple:
        return tuple(cid for cid, _, _ in self.class_ranges)

    def block(self, class_id) -> np.ndarray:
        for cid, start, stop in self.class_ranges:
            if cid == class_id:
                return self.V[:, start:stop]
        raise KeyError(class_id)


@dataclass(frozen=True)
class ClassificationResult:
    classes: tuple
    residuals: np.ndarray  # aligned with ``classes``
    predicted: object
    alpha: np.ndarray  # total-samples x num-test-frames


def build_dictionary(samples: Sequence[Tuple[object, np.ndarray]]) -> ClassDictionary:
    """Stack ``(class_id, feature_vector)`` pairs into a dictionary.

    Columns are grouped contiguously by class, classes ordered by first
    appearance; within a class, columns keep input order.
    """
    if len(samples) == 0:
        raise SpecValidationError("no training samples")
    by_class: dict = {}
    order = []
    dim = None
    for cid, vec in samples:
        v = as_vector(vec)
        if dim is None:
            dim = v.shape[0]
        elif v.shape[0] != dim:
            raise DimensionError(f"sample length {v.shape[0]} != {dim}")
        if cid not in by_class:
            by_class[cid] = []
            order.append(cid)
        by_class[cid].append(v)
    cols = []
    ranges = []
    start = 0
    for cid in order:
        block = by_class[cid]
        cols.extend(block)
        ranges.append((cid, start, start + len(block)))
        start += len(block)
    return ClassDictionary(V=np.column_stack(cols), class_ranges=tuple(ranges))


def _default_config(dictionary: ClassDictionary, cfg: SolverConfig) -> SolverConfig:
    # Default khat: the largest per-class sample count, matching the working
    # assumption that nonzeros concentrate on a single class block.
    if cfg.estimated_support is None and Variant(cfg.variant).is_sparse:
        khat = max(stop - start for _, start, stop in dictionary.class_ranges)
        cfg = replace(cfg, estimated_support=min(khat, dictionary.V.shape[1]))
    return cfg


def _residuals(dictionary: ClassDictionary, target: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    res = np.empty(dictionary.num_classes)
    for k, (_, start, stop) in enumerate(dictionary.class_ranges):
        recon = dictionary.V[:, start:stop] @ alpha[start:stop]
        res[k] = np.sqrt(np.sum((target - recon) ** 2))
    return res


def _decide(dictionary: ClassDictionary, target: np.ndarray, alpha: np.ndarray) -> ClassificationResult:
    res = _residuals(dictionary, target, alpha)
    predicted = dictionary.classes[int(np.argmin(res))]  # ties: lowest class index
    return ClassificationResult(
        classes=dictionary.classes, residuals=res, predicted=predicted, alpha=alpha
    )


def classify_smv(dictionary: ClassDictionary, v_test, cfg: SolverConfig) -> ClassificationResult:
    """Classify a single test vector.

    The coefficient vector is recovered by the configured solver; per-class
    residuals use only that class's coefficient block.
    """
    v = as_vector(v_test)
    if v.shape[0] != dictionary.V.shape[0]:
        raise DimensionError(
            f"test vector length {v.shape[0]} != feature dim {dictionary.V.shape[0]}"
        )
    cfg = _default_config(dictionary, cfg)
    alpha = solve(dictionary.V, v, cfg).solution
    return _decide(dictionary, v[:, None], alpha)


def classify_mmv(dictionary: ClassDictionary, V_test, cfg: SolverConfig) -> ClassificationResult:
    """Classify a multi-frame test sequence jointly.

    All frames share one row-sparse coefficient support; per-class residuals
    are Frobenius norms of the per-class reconstruction gap (which reduces to
    the single-vector rule at one frame).
    """
    T = as_matrix(V_test)
    if T.shape[0] != dictionary.V.shape[0]:
        raise DimensionError(
            f"test frames have dim {T.shape[0]} != feature dim {dictionary.V.shape[0]}"
        )
    cfg = _default_config(dictionary, cfg)
    alpha = solve(dictionary.V, T, cfg).solution
    return _decide(dictionary, T, alpha)
