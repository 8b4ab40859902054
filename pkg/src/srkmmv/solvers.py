"""The Kaczmarz solver family.

Four variants share one iteration engine:

* ``CYCLIC``  - classical Kaczmarz, rows visited in order ``0, 1, ..., m-1``.
* ``RK``      - randomized Kaczmarz, row i drawn with probability
  ``||a_i||^2 / ||A||_F^2``.
* ``SRK``     - sparse randomized Kaczmarz: RK plus a shrinking support
  estimate; coordinates outside the estimate are damped by ``1/sqrt(j)`` in
  iteration j.
* ``SRK_MMV`` - the joint-recovery extension to multiple measurement vectors:
  the support estimate ranks rows of the iterate matrix by their l2 norm, and
  one sampled row of A drives a weighted projection of every column.

A run performs exactly ``sweeps * m`` iterations from a zero start. Iteration
j uses support size ``max(khat, n - j + 1)``: the estimate starts at the full
coordinate set and shrinks by one per iteration until it reaches ``khat``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import (
    DimensionError,
    InvalidSparsityError,
    UnsupportedVariantError,
    ZeroRowError,
)
from .linalg import as_matrix, as_vector, frobenius_norm_sq
from .sampling import SeededRng, SupportSet, build_row_sampler, sample_row

__all__ = [
    "Variant",
    "SupportSet",
    "WeightVector",
    "SolverConfig",
    "SolveResult",
    "kaczmarz_step",
    "weighted_kaczmarz_step",
    "estimate_support_smv",
    "estimate_support_mmv",
    "build_weight_vector",
    "solve",
]


class Variant(str, enum.Enum):
    CYCLIC = "cyclic"
    RK = "rk"
    SRK = "srk"
    SRK_MMV = "srk-mmv"

    @property
    def is_sparse(self) -> bool:
        return self in (Variant.SRK, Variant.SRK_MMV)


@dataclass(frozen=True)
class WeightVector:
    """Per-coordinate damping for one iteration.

    Entries are 1 on the support estimate and ``1/sqrt(iteration)`` off it.
    """

    weights: np.ndarray
    iteration: int

    def __post_init__(self):
        if self.iteration < 1:
            raise ValueError("iteration index starts at 1")


@dataclass(frozen=True)
class SolverConfig:
    """All knobs of a solver run.

    ``estimated_support`` (khat) is required by the sparse variants and
    ignored by CYCLIC/RK. ``sweeps`` counts expected passes over the rows;
    the run executes ``sweeps * m`` iterations. ``trace_every`` > 0 records
    the relative residual every that many iterations.
    """

    variant: Variant
    estimated_support: Optional[int] = None
    sweeps: int = 1
    seed: int = 0
    trace_every: int = 0


@dataclass
class SolveResult:
    solution: np.ndarray  # n x L
    iterations_run: int
    dot_products: int  # length-n inner products, 2 per column per iteration
    trace: list  # (iteration, relative residual) pairs


def kaczmarz_step(x, a_i, b_i: float) -> np.ndarray:
    """Orthogonal projection of ``x`` onto the hyperplane ``<a_i, u> = b_i``.

    The returned point satisfies the equation exactly (to roundoff) and is
    the closest such point to ``x``; the move is parallel to ``a_i``.
    """
    x = as_vector(x)
    a_i = as_vector(a_i)
    if x.shape[0] != a_i.shape[0]:
        raise DimensionError("kaczmarz_step: x and a_i lengths differ")
    denom = float(a_i @ a_i)
    if denom == 0.0:
        raise ZeroRowError("cannot project onto a zero row")
    return x + ((b_i - float(a_i @ x)) / denom) * a_i


def weighted_kaczmarz_step(x, a_i, b_i: float, w: WeightVector) -> np.ndarray:
    """Kaczmarz projection using the damped row ``w * a_i``.

    Equivalent to :func:`kaczmarz_step` on the elementwise-weighted row; with
    all weights 1 the two coincide. The weighted residual
    ``b_i - <w * a_i, x'>`` is zero to roundoff after the step.
    """
    x = as_vector(x)
    a_i = as_vector(a_i)
    if not (x.shape[0] == a_i.shape[0] == w.weights.shape[0]):
        raise DimensionError("weighted_kaczmarz_step: length mismatch")
    wa = w.weights * a_i
    denom = float(wa @ wa)
    if denom == 0.0:
        # Unreachable for weights >= 1/sqrt(j) and a nonzero row; defensive.
        raise ZeroRowError("weighted row has zero norm")
    return x + ((b_i - float(wa @ x)) / denom) * wa


def _top_indices(scores: np.ndarray, size: int) -> np.ndarray:
    # Stable sort on negated scores: ties resolve to the lower index.
    return np.argsort(-scores, kind="stable")[:size]


def estimate_support_smv(x, size: int) -> SupportSet:
    """Indices of the ``size`` largest-magnitude entries, ties to lower index."""
    x = as_vector(x)
    n = x.shape[0]
    if not 1 <= size <= n:
        raise InvalidSparsityError(f"support size {size} outside [1, {n}]")
    return SupportSet(indices=_top_indices(np.abs(x), size), n=n)


def estimate_support_mmv(X, size: int) -> SupportSet:
    """Indices of the ``size`` rows with largest l2 norm, ties to lower index."""
    X = as_matrix(X)
    n = X.shape[0]
    if not 1 <= size <= n:
        raise InvalidSparsityError(f"support size {size} outside [1, {n}]")
    norms = np.einsum("ij,ij->i", X, X)
    return SupportSet(indices=_top_indices(norms, size), n=n)


def build_weight_vector(S: SupportSet, n: int, j: int) -> WeightVector:
    """Weights 1 on ``S`` and ``1/sqrt(j)`` elsewhere, for iteration ``j``."""
    if j < 1:
        raise ValueError("iteration index starts at 1")
    if S.n != n:
        raise DimensionError(f"support is over n={S.n}, expected {n}")
    w = np.full(n, 1.0 / np.sqrt(j))
    w[S.indices] = 1.0
    return WeightVector(weights=w, iteration=j)


def solve(
    A,
    B,
    cfg: SolverConfig,
    on_sweep: Optional[Callable[[int, np.ndarray], None]] = None,
) -> SolveResult:
    """Run the configured Kaczmarz variant on ``A X = B``.

    Parameters
    ----------
    A : (m, n) array_like
    B : (m, L) or (m,) array_like
        Right-hand side; a 1-D vector is treated as a single column.
    cfg : SolverConfig
    on_sweep : callable, optional
        Invoked as ``on_sweep(sweep_index, X)`` after every ``m`` iterations
        with the live iterate (read-only; valid only during the call).

    Returns
    -------
    SolveResult
        ``solution`` is n x L. ``dot_products`` counts length-n inner
        products at the accounting rate of 2 per column per iteration (the
        weighted-row residual and the weighted-row norm), which is the
        currency used for fairness comparisons between solvers.

    Notes
    -----
    The run is bit-reproducible: identical ``(A, B, cfg)`` give an identical
    result. The randomized variants consume exactly one uniform draw per
    iteration, via :func:`srkmmv.sampling.sample_row`.
    """
    A = as_matrix(A)
    B = np.asarray(B, dtype=np.float64)
    if B.ndim == 1:
        B = B[:, None]
    B = as_matrix(B)
    m, n = A.shape
    if B.shape[0] != m:
        raise DimensionError(f"A has {m} rows but B has {B.shape[0]}")
    L = B.shape[1]
    variant = Variant(cfg.variant)
    if variant in (Variant.CYCLIC, Variant.RK, Variant.SRK) and L != 1:
        raise UnsupportedVariantError(f"{variant.value} handles a single column, got L={L}")
    khat = cfg.estimated_support
    if variant.is_sparse:
        if khat is None:
            raise InvalidSparsityError("sparse variants require estimated_support")
        if not 1 <= khat <= n:
            raise InvalidSparsityError(f"estimated_support {khat} outside [1, {n}]")
    if cfg.sweeps < 1:
        raise ValueError("sweeps must be >= 1")
    if cfg.trace_every < 0:
        raise ValueError("trace_every must be >= 0")

    rng = SeededRng(cfg.seed)
    sampler = None
    if variant is not Variant.CYCLIC:
        sampler = build_row_sampler(A)

    X = np.zeros((n, L))
    total = cfg.sweeps * m
    dots = 0
    trace: list = []
    b_norm = np.sqrt(frobenius_norm_sq(B))
    sparse = variant.is_sparse

    # Hot loop: plain numpy, no per-iteration object construction. The public
    # step/estimate functions define the semantics; equivalence is pinned by
    # the reference-trajectory tests.
    inv_sqrt = 1.0 / np.sqrt(np.arange(1, total + 1))
    w = np.empty(n)
    for j in range(1, total + 1):
        if variant is Variant.CYCLIC:
            i = (j - 1) % m
        else:
            i = sample_row(sampler, rng)
        a = A[i]
        if sparse:
            size = khat if khat > n - j + 1 else n - j + 1
            if size >= n:
                wa = a
            else:
                norms = np.einsum("ij,ij->i", X, X)
                sel = np.argsort(-norms, kind="stable")[:size]
                w.fill(inv_sqrt[j - 1])
                w[sel] = 1.0
                wa = w * a
        else:
            wa = a
        denom = wa @ wa
        if denom == 0.0:
            raise ZeroRowError(f"row {i} has zero norm")
        r = (B[i] - wa @ X) / denom
        X += np.outer(wa, r)
        dots += 2 * L
        if cfg.trace_every and j % cfg.trace_every == 0:
            resid = np.sqrt(frobenius_norm_sq(B - A @ X))
            trace.append((j, resid / b_norm if b_norm > 0 else resid))
        if on_sweep is not None and j % m == 0:
            on_sweep(j // m, X)

    return SolveResult(solution=X, iterations_run=total, dot_products=dots, trace=trace)
