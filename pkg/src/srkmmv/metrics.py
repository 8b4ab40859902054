"""Recovery metrics: squared-Frobenius relative error, success threshold,
recovery rate in percent."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DegenerateMetricError, DimensionError
from .linalg import as_matrix, frobenius_norm_sq

__all__ = ["RecoveryOutcome", "relative_error", "is_success", "recovery_rate"]


@dataclass(frozen=True)
class RecoveryOutcome:
    relative_error: float
    success: bool
    dot_products: int


def relative_error(X_true, X_hat) -> float:
    """``||X_true - X_hat||_F^2 / ||X_true||_F^2``.

    Note the ratio of *squared* norms; that is the convention used throughout
    the experiment harness.
    """
    X_true = as_matrix(X_true)
    X_hat = as_matrix(X_hat)
    if X_true.shape != X_hat.shape:
        raise DimensionError(f"shape mismatch: {X_true.shape} vs {X_hat.shape}")
    denom = frobenius_norm_sq(X_true)
    if denom == 0.0:
        raise DegenerateMetricError("reference matrix is zero")
    return frobenius_norm_sq(X_true - X_hat) / denom


def is_success(err: float, threshold: float) -> bool:
    """Strict comparison: recovery succeeds iff ``err < threshold``."""
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    return err < threshold


def recovery_rate(outcomes: Sequence[RecoveryOutcome]) -> float:
    """Percentage of successful outcomes, in [0, 100]."""
    if len(outcomes) == 0:
        raise DegenerateMetricError("no outcomes to aggregate")
    return 100.0 * sum(o.success for o in outcomes) / len(outcomes)
