import numpy as np
import pytest

from srkmmv import (
    ExperimentKind,
    ExperimentSpec,
    SpecValidationError,
    SupportRule,
    preset,
    run_convergence,
    run_experiment,
    run_phase_transition,
    run_support_sweep,
)
from srkmmv.fileio import write_report_csv


def small_sweep_spec(**overrides):
    base = dict(
        kind=ExperimentKind.SUPPORT_SWEEP, m=30, n=12, num_vectors=(2,),
        sparsities=(3,), khat_rule=SupportRule("absolute", 0),
        khat_grid=(2, 6), sweeps=2, trials=6, base_seed=5,
    )
    base.update(overrides)
    return ExperimentSpec(**base)


def test_support_rule_parse_and_resolve():
    assert SupportRule.parse("21") == SupportRule("absolute", 21)
    assert SupportRule.parse("K+15") == SupportRule("offset", 15)
    assert SupportRule.parse("K-3") == SupportRule("offset", -3)
    assert SupportRule.parse("2K") == SupportRule("scale", 2.0)
    assert SupportRule.parse("1.5*K") == SupportRule("scale", 1.5)
    assert SupportRule.parse("K+15").resolve(10) == 25
    assert SupportRule.parse("2K").resolve(7) == 14
    assert SupportRule.parse("40").resolve(7) == 40
    with pytest.raises(SpecValidationError):
        SupportRule.parse("twice")


def test_spec_validation():
    with pytest.raises(SpecValidationError):
        small_sweep_spec(khat_grid=()).validate()
    with pytest.raises(SpecValidationError):
        small_sweep_spec(khat_grid=(0, 5)).validate()
    with pytest.raises(SpecValidationError):
        small_sweep_spec(sparsities=(99,)).validate()
    with pytest.raises(SpecValidationError):
        small_sweep_spec(trials=0).validate()
    # khat rule must stay inside [1, n] for every K
    bad = ExperimentSpec(
        kind=ExperimentKind.PHASE_TRANSITION, m=20, n=10, num_vectors=(2,),
        sparsities=(8,), khat_rule=SupportRule("offset", 15), sweeps=2, trials=2,
    )
    with pytest.raises(SpecValidationError):
        bad.validate()


def test_runner_kind_mismatch():
    with pytest.raises(SpecValidationError):
        run_convergence(small_sweep_spec())
    with pytest.raises(SpecValidationError):
        run_phase_transition(small_sweep_spec())


def test_support_sweep_report_shape_and_determinism():
    spec = small_sweep_spec()
    r1 = run_support_sweep(spec)
    r2 = run_support_sweep(spec)
    assert [(row.K, row.khat) for row in r1.rows] == [(3, 2), (3, 6)]
    assert [row.mean_rel_err for row in r1.rows] == [row.mean_rel_err for row in r2.rows]
    for row in r1.rows:
        assert row.trials == 6
        assert row.mean_dot_products == 2 * 2 * 2 * 30  # 2 * L * J * m


def test_parallel_execution_matches_sequential(tmp_path):
    spec = small_sweep_spec()
    seq = run_support_sweep(spec, workers=1)
    par = run_support_sweep(spec, workers=2)
    f1, f2 = tmp_path / "seq.csv", tmp_path / "par.csv"
    write_report_csv(seq, f1)
    write_report_csv(par, f2)
    assert f1.read_bytes() == f2.read_bytes()


def test_support_sweep_u_shape_reduced():
    # under-estimating the support wrecks recovery; a roomy estimate nails it
    spec = ExperimentSpec(
        kind=ExperimentKind.SUPPORT_SWEEP, m=500, n=100, num_vectors=(5,),
        sparsities=(10,), khat_rule=SupportRule("absolute", 0),
        khat_grid=(1, 23), sweeps=5, trials=5, base_seed=3,
    )
    report = run_support_sweep(spec)
    err = {row.khat: row.mean_rel_err for row in report.rows}
    assert err[23] * 100 <= err[1]


def test_convergence_rows_and_trend():
    spec = ExperimentSpec(
        kind=ExperimentKind.CONVERGENCE, m=100, n=400, num_vectors=(5,),
        sparsities=(10,), khat_rule=SupportRule("absolute", 20),
        sweeps=50, trials=8, base_seed=11,
    )
    report = run_convergence(spec)
    assert [row.sweep for row in report.rows] == list(range(1, 51))
    for row in report.rows:
        assert row.mean_dot_products == 2 * 5 * row.sweep * 100
    means = [row.mean_rel_err for row in report.rows]
    assert means[-1] < 1e-2
    # decreasing trend over the last ten sweeps
    for a, b in zip(means[-10:], means[-9:]):
        assert b <= a * 1.10


def test_phase_transition_grid_and_monotonicity():
    spec = ExperimentSpec(
        kind=ExperimentKind.PHASE_TRANSITION, m=50, n=200, num_vectors=(2,),
        sparsities=(1, 9, 21), khat_rule=SupportRule("scale", 2),
        sweeps=20, trials=8, base_seed=7,
    )
    report = run_phase_transition(spec)
    assert [(row.L, row.K) for row in report.rows] == [(2, 1), (2, 9), (2, 21)]
    rates = [row.recovery_rate_pct for row in report.rows]
    assert all(0.0 <= r <= 100.0 for r in rates)
    assert rates[0] == 100.0  # trivially sparse is always recovered
    assert rates[-1] <= rates[0]
    for row in report.rows:
        assert row.khat == 2 * row.K
        assert row.mean_dot_products == 2 * 2 * 20 * 50


def test_keep_outcomes():
    spec = small_sweep_spec(trials=3)
    report = run_experiment(spec, keep_outcomes=True)
    for row in report.rows:
        assert row.outcomes is not None and len(row.outcomes) == 3
        for outcome in row.outcomes:
            assert outcome.success == (outcome.relative_error < spec.threshold)


def test_presets_validate():
    for kind in ExperimentKind:
        for scale in ("paper", "desk"):
            for regime in ("over", "under"):
                spec = preset(kind, scale=scale, regime=regime)
                spec.validate()
    assert preset(ExperimentKind.CONVERGENCE, "desk").trials == 50
    assert preset(ExperimentKind.SUPPORT_SWEEP, "paper").sparsities == (10, 20, 30, 40)
    with pytest.raises(SpecValidationError):
        preset(ExperimentKind.CONVERGENCE, scale="huge")
