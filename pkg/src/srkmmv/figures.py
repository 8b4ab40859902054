"""Figure rendering for experiment reports.

Each report kind maps to one matplotlib figure, written next to the
delimited output (log-scale error curves, recovery-rate curves). Rendering
is headless (Agg backend).
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .experiments import ExperimentKind, MonteCarloReport

__all__ = ["render_report", "figure_path"]


def figure_path(out_path) -> Path:
    return Path(out_path).with_suffix(".png")


def _plot_support_sweep(report: MonteCarloReport, ax) -> None:
    for K in report.spec.sparsities:
        rows = [r for r in report.rows if r.K == K]
        ax.semilogy(
            [r.khat for r in rows], [r.mean_rel_err for r in rows],
            lw=1.2, label=f"K={K}",
        )
    ax.set_xlabel("Estimated no. of nonzero rows")
    ax.set_ylabel("Mean relative error")


def _plot_convergence(report: MonteCarloReport, ax) -> None:
    ax.semilogy(
        [r.sweep for r in report.rows], [r.mean_rel_err for r in report.rows],
        lw=1.2, label=f"K={report.spec.sparsities[0]}",
    )
    ax.set_xlabel("Sweeps (1 sweep = m iterations)")
    ax.set_ylabel("Mean relative error")


def _plot_phase_transition(report: MonteCarloReport, ax) -> None:
    for L in report.spec.num_vectors:
        rows = [r for r in report.rows if r.L == L]
        ax.plot(
            [r.K for r in rows], [r.recovery_rate_pct for r in rows],
            lw=1.2, marker="x", label=f"L={L}",
        )
    ax.set_xlabel("No. of nonzero rows")
    ax.set_ylabel("Recovery rate (%)")
    ax.set_ylim(-2, 102)


_PLOTTERS = {
    ExperimentKind.SUPPORT_SWEEP: _plot_support_sweep,
    ExperimentKind.CONVERGENCE: _plot_convergence,
    ExperimentKind.PHASE_TRANSITION: _plot_phase_transition,
}


def render_report(report: MonteCarloReport, path) -> Path:
    """Render the report's figure to ``path`` (PNG). Returns the path."""
    fig, ax = plt.subplots(figsize=(5.5, 4.0))
    _PLOTTERS[ExperimentKind(report.kind)](report, ax)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
