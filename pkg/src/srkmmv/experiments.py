"""Deterministic Monte Carlo harness for the three synthetic experiments.

Each experiment is described by an :class:`ExperimentSpec` and produces a
:class:`MonteCarloReport`, one row per grid point. Trial seeds are derived
from the base seed and the grid-point labels, so reports are bit-identical
no matter how trials are scheduled (sequentially or across worker
processes).

Experiments:

* support sweep   - mean relative error as a function of the estimated
  support size ``khat``, for one or more true sparsities K.
* convergence     - mean relative error after each sweep.
* phase transition - recovery rate as a function of K, for one or more
  column counts L, with ``khat`` tied to K by a rule (``K+15``, ``2K``, ...).
"""

from __future__ import annotations

import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import SpecValidationError
from .metrics import RecoveryOutcome, is_success, relative_error
from .sampling import SeededRng, derive_seed
from .solvers import SolverConfig, Variant, solve
from .synth import generate_problem

__all__ = [
    "ExperimentKind",
    "SupportRule",
    "ExperimentSpec",
    "ReportRow",
    "MonteCarloReport",
    "run_support_sweep",
    "run_convergence",
    "run_phase_transition",
    "run_experiment",
    "preset",
    "PRESET_NAMES",
]


class ExperimentKind(str, enum.Enum):
    SUPPORT_SWEEP = "support-sweep"
    CONVERGENCE = "convergence"
    PHASE_TRANSITION = "phase-transition"


@dataclass(frozen=True)
class SupportRule:
    """Maps a true sparsity K to the solver's estimated support size.

    ``kind`` is one of ``absolute`` (fixed value), ``offset`` (K + value) or
    ``scale`` (value * K).
    """

    kind: str
    value: float

    def resolve(self, K: int) -> int:
        if self.kind == "absolute":
            return int(self.value)
        if self.kind == "offset":
            return K + int(self.value)
        if self.kind == "scale":
            return int(round(self.value * K))
        raise SpecValidationError(f"unknown support rule kind: {self.kind!r}")

    def describe(self) -> str:
        if self.kind == "absolute":
            return str(int(self.value))
        if self.kind == "offset":
            v = int(self.value)
            return f"K{v:+d}"
        return f"{self.value:g}K"

    @staticmethod
    def parse(text: str) -> "SupportRule":
        """Parse ``"21"``, ``"K+15"``, ``"K-3"`` or ``"2K"``/``"2*K"``."""
        s = text.strip().replace(" ", "")
        try:
            return SupportRule("absolute", int(s))
        except ValueError:
            pass
        up = s.upper()
        if up.startswith("K+") or up.startswith("K-"):
            return SupportRule("offset", int(up[1:]))
        if up.endswith("K"):
            factor = up[:-1].rstrip("*")
            return SupportRule("scale", float(factor) if factor else 1.0)
        raise SpecValidationError(f"cannot parse support rule {text!r}")


@dataclass(frozen=True)
class ExperimentSpec:
    kind: ExperimentKind
    m: int
    n: int
    num_vectors: tuple  # L values; a single entry except for phase transitions
    sparsities: tuple  # K values
    khat_rule: SupportRule
    sweeps: int
    trials: int
    khat_grid: tuple = ()  # support sweep only: the khat values scanned
    threshold: float = 1e-3
    base_seed: int = 0

    def validate(self) -> None:
        if self.m < 1 or self.n < 1:
            raise SpecValidationError(f"bad dimensions m={self.m} n={self.n}")
        if self.trials < 1:
            raise SpecValidationError("trials must be >= 1")
        if self.sweeps < 1:
            raise SpecValidationError("sweeps must be >= 1")
        if self.threshold <= 0:
            raise SpecValidationError("threshold must be positive")
        if not self.num_vectors or any(L < 1 for L in self.num_vectors):
            raise SpecValidationError(f"bad column counts {self.num_vectors}")
        if not self.sparsities or any(not 1 <= K <= self.n for K in self.sparsities):
            raise SpecValidationError(f"sparsities outside [1, {self.n}]: {self.sparsities}")
        if self.kind is ExperimentKind.SUPPORT_SWEEP:
            if not self.khat_grid:
                raise SpecValidationError("support sweep needs a khat grid")
            bad = [k for k in self.khat_grid if not 1 <= k <= self.n]
            if bad:
                raise SpecValidationError(f"khat grid outside [1, {self.n}]: {bad}")
        else:
            for K in self.sparsities:
                khat = self.khat_rule.resolve(K)
                if not 1 <= khat <= self.n:
                    raise SpecValidationError(
                        f"khat rule {self.khat_rule.describe()} gives {khat} "
                        f"for K={K}, outside [1, {self.n}]"
                    )
        if self.kind is not ExperimentKind.PHASE_TRANSITION and len(self.num_vectors) != 1:
            raise SpecValidationError("only phase transitions scan several L values")
        if self.kind is ExperimentKind.CONVERGENCE and len(self.sparsities) != 1:
            raise SpecValidationError("convergence runs use a single sparsity")


@dataclass(frozen=True)
class ReportRow:
    """Aggregates for one grid point. ``sweep`` is the sweep count the
    numbers refer to (intermediate for convergence runs, final otherwise)."""

    L: int
    K: int
    khat: int
    sweep: int
    mean_rel_err: float
    recovery_rate_pct: float
    mean_dot_products: float
    trials: int
    outcomes: Optional[tuple] = None


@dataclass(frozen=True)
class MonteCarloReport:
    kind: ExperimentKind
    spec: ExperimentSpec
    rows: tuple


# ---------------------------------------------------------------------------
# Trial execution. Module-level functions with plain-tuple arguments so the
# process pool can pickle them; aggregation happens in task order, which
# makes reports independent of worker scheduling.

def _recovery_trial(task):
    m, n, L, K, khat, sweeps, problem_seed, solver_seed = task
    problem = generate_problem(m, n, L, K, SeededRng(problem_seed))
    cfg = SolverConfig(
        variant=Variant.SRK_MMV, estimated_support=khat, sweeps=sweeps, seed=solver_seed
    )
    result = solve(problem.A, problem.B, cfg)
    err = relative_error(problem.X_true, result.solution)
    return err, result.dot_products


def _convergence_trial(task):
    m, n, L, K, khat, sweeps, problem_seed, solver_seed = task
    problem = generate_problem(m, n, L, K, SeededRng(problem_seed))
    cfg = SolverConfig(
        variant=Variant.SRK_MMV, estimated_support=khat, sweeps=sweeps, seed=solver_seed
    )
    errs = np.empty(sweeps)

    def record(sweep, X):
        errs[sweep - 1] = relative_error(problem.X_true, X)

    result = solve(problem.A, problem.B, cfg, on_sweep=record)
    return errs, result.dot_products


def _run_tasks(fn, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    chunk = max(1, len(tasks) // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=chunk))


def _trial_seeds(spec: ExperimentSpec, *labels, trial: int):
    p = derive_seed(spec.base_seed, spec.kind.value, *labels, trial, "problem")
    s = derive_seed(spec.base_seed, spec.kind.value, *labels, trial, "solver")
    return p, s


def _aggregate(spec, results) -> tuple:
    errs = np.array([e for e, _ in results])
    dots = np.array([d for _, d in results], dtype=np.float64)
    outcomes = tuple(
        RecoveryOutcome(float(e), is_success(float(e), spec.threshold), int(d))
        for e, d in results
    )
    rate = 100.0 * sum(o.success for o in outcomes) / len(outcomes)
    return float(errs.mean()), rate, float(dots.mean()), outcomes


# ---------------------------------------------------------------------------
# Runners


def run_support_sweep(spec: ExperimentSpec, workers: int = 1, keep_outcomes: bool = False) -> MonteCarloReport:
    """Mean relative error for every (K, khat) pair in the grid."""
    if spec.kind is not ExperimentKind.SUPPORT_SWEEP:
        raise SpecValidationError(f"expected a support-sweep spec, got {spec.kind.value}")
    spec.validate()
    L = spec.num_vectors[0]
    rows = []
    for K in spec.sparsities:
        for khat in spec.khat_grid:
            tasks = [
                (spec.m, spec.n, L, K, khat, spec.sweeps,
                 *_trial_seeds(spec, "L", L, "K", K, "khat", khat, trial=t))
                for t in range(spec.trials)
            ]
            results = _run_tasks(_recovery_trial, tasks, workers)
            mean_err, rate, mean_dots, outcomes = _aggregate(spec, results)
            rows.append(ReportRow(
                L=L, K=K, khat=khat, sweep=spec.sweeps,
                mean_rel_err=mean_err, recovery_rate_pct=rate,
                mean_dot_products=mean_dots, trials=spec.trials,
                outcomes=outcomes if keep_outcomes else None,
            ))
    return MonteCarloReport(kind=spec.kind, spec=spec, rows=tuple(rows))


def run_convergence(spec: ExperimentSpec, workers: int = 1, keep_outcomes: bool = False) -> MonteCarloReport:
    """Mean relative error after each sweep, one report row per sweep."""
    if spec.kind is not ExperimentKind.CONVERGENCE:
        raise SpecValidationError(f"expected a convergence spec, got {spec.kind.value}")
    spec.validate()
    L = spec.num_vectors[0]
    K = spec.sparsities[0]
    khat = spec.khat_rule.resolve(K)
    tasks = [
        (spec.m, spec.n, L, K, khat, spec.sweeps,
         *_trial_seeds(spec, "L", L, "K", K, "khat", khat, trial=t))
        for t in range(spec.trials)
    ]
    results = _run_tasks(_convergence_trial, tasks, workers)
    per_trial = np.vstack([errs for errs, _ in results])  # trials x sweeps
    rows = []
    for s in range(1, spec.sweeps + 1):
        col = per_trial[:, s - 1]
        successes = int(np.sum(col < spec.threshold))
        outcomes = None
        if keep_outcomes:
            dots_at_s = 2 * L * s * spec.m
            outcomes = tuple(
                RecoveryOutcome(float(e), is_success(float(e), spec.threshold), dots_at_s)
                for e in col
            )
        rows.append(ReportRow(
            L=L, K=K, khat=khat, sweep=s,
            mean_rel_err=float(col.mean()),
            recovery_rate_pct=100.0 * successes / spec.trials,
            mean_dot_products=float(2 * L * s * spec.m),
            trials=spec.trials,
            outcomes=outcomes,
        ))
    return MonteCarloReport(kind=spec.kind, spec=spec, rows=tuple(rows))


def run_phase_transition(spec: ExperimentSpec, workers: int = 1, keep_outcomes: bool = False) -> MonteCarloReport:
    """Recovery rate per (L, K) grid point under the spec's khat rule."""
    if spec.kind is not ExperimentKind.PHASE_TRANSITION:
        raise SpecValidationError(f"expected a phase-transition spec, got {spec.kind.value}")
    spec.validate()
    rows = []
    for L in spec.num_vectors:
        for K in spec.sparsities:
            khat = spec.khat_rule.resolve(K)
            tasks = [
                (spec.m, spec.n, L, K, khat, spec.sweeps,
                 *_trial_seeds(spec, "L", L, "K", K, "khat", khat, trial=t))
                for t in range(spec.trials)
            ]
            results = _run_tasks(_recovery_trial, tasks, workers)
            mean_err, rate, mean_dots, outcomes = _aggregate(spec, results)
            rows.append(ReportRow(
                L=L, K=K, khat=khat, sweep=spec.sweeps,
                mean_rel_err=mean_err, recovery_rate_pct=rate,
                mean_dot_products=mean_dots, trials=spec.trials,
                outcomes=outcomes if keep_outcomes else None,
            ))
    return MonteCarloReport(kind=spec.kind, spec=spec, rows=tuple(rows))


_RUNNERS = {
    ExperimentKind.SUPPORT_SWEEP: run_support_sweep,
    ExperimentKind.CONVERGENCE: run_convergence,
    ExperimentKind.PHASE_TRANSITION: run_phase_transition,
}


def run_experiment(spec: ExperimentSpec, workers: int = 1, keep_outcomes: bool = False) -> MonteCarloReport:
    return _RUNNERS[spec.kind](spec, workers=workers, keep_outcomes=keep_outcomes)


# ---------------------------------------------------------------------------
# Named configurations. "paper" presets use the full trial counts of the
# original study; "desk" presets run the same grids at reduced trial counts
# for quick local turnaround.

def preset(kind: ExperimentKind, scale: str = "desk", regime: str = "over") -> ExperimentSpec:
    """Named experiment configuration.

    ``scale`` is ``"paper"`` (full trial counts) or ``"desk"`` (reduced).
    ``regime`` selects the overdetermined or underdetermined phase-transition
    setup and is ignored by the other kinds.
    """
    if scale not in ("paper", "desk"):
        raise SpecValidationError(f"unknown scale {scale!r}")
    if kind is ExperimentKind.SUPPORT_SWEEP:
        return ExperimentSpec(
            kind=kind, m=500, n=100, num_vectors=(5,),
            sparsities=(10, 20, 30, 40) if scale == "paper" else (10,),
            khat_rule=SupportRule("absolute", 0),
            khat_grid=tuple(range(1, 100, 2)),
            sweeps=5, trials=100 if scale == "paper" else 20,
        )
    if kind is ExperimentKind.CONVERGENCE:
        return ExperimentSpec(
            kind=kind, m=100, n=400, num_vectors=(5,), sparsities=(10,),
            khat_rule=SupportRule("absolute", 20),
            sweeps=50, trials=500 if scale == "paper" else 50,
        )
    if kind is ExperimentKind.PHASE_TRANSITION:
        if regime == "over":
            return ExperimentSpec(
                kind=kind, m=500, n=100,
                num_vectors=(2, 5, 10, 15) if scale == "paper" else (5,),
                sparsities=tuple(range(5, 50, 2)),
                khat_rule=SupportRule("offset", 15),
                sweeps=5, trials=500 if scale == "paper" else 50,
            )
        if regime == "under":
            return ExperimentSpec(
                kind=kind, m=50, n=200,
                num_vectors=(2, 5, 10) if scale == "paper" else (2,),
                sparsities=tuple(range(1, 26, 2)),
                khat_rule=SupportRule("scale", 2),
                sweeps=50, trials=500 if scale == "paper" else 50,
            )
        raise SpecValidationError(f"unknown regime {regime!r}")
    raise SpecValidationError(f"unknown experiment kind {kind!r}")


PRESET_NAMES = ("paper", "desk")
