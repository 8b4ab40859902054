import json

import numpy as np
import pytest

from srkmmv import (
    ExperimentKind,
    SeededRng,
    SpecValidationError,
    SupportRule,
    generate_problem,
    preset,
    run_experiment,
)
from srkmmv.fileio import (
    load_features,
    load_problem,
    parse_config,
    report_columns,
    save_features,
    save_problem,
    spec_from_config,
    write_report_csv,
    write_report_json,
)


def test_problem_round_trip(tmp_path):
    p = generate_problem(6, 4, 2, 2, SeededRng(9))
    path = tmp_path / "p.tsv"
    save_problem(p, path)
    q = load_problem(path)
    assert np.array_equal(p.A, q.A)
    assert np.array_equal(p.X_true, q.X_true)
    assert np.array_equal(p.B, q.B)  # recomputed from the same A, X
    assert np.array_equal(p.true_support.indices, q.true_support.indices)
    assert q.seed == 9


def test_problem_file_errors(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("1 2 3\n")
    with pytest.raises(SpecValidationError):
        load_problem(path)
    path.write_text("2 2 1 1 0\n1.0 0.0\n0.0 1.0\n1.0\n")  # missing X lines
    with pytest.raises(SpecValidationError):
        load_problem(path)


def test_features_round_trip(tmp_path):
    rng = np.random.default_rng(4)
    M = rng.standard_normal((5, 6))
    labels = ["a", "a", "b", "b", "c", "c"]
    labeled = tmp_path / "train.tsv"
    save_features(M, labeled, labels=labels)
    M2, labels2 = load_features(labeled, labeled=True)
    assert np.array_equal(M, M2)
    assert labels2 == labels
    plain = tmp_path / "test.tsv"
    save_features(M, plain)
    M3, labels3 = load_features(plain)
    assert np.array_equal(M, M3)
    assert labels3 is None


def test_features_errors(tmp_path):
    path = tmp_path / "f.tsv"
    path.write_text("2 2\n1.0 2.0\n")
    with pytest.raises(SpecValidationError):
        load_features(path)


def test_parse_config(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text(
        "# convergence at reduced trials\n"
        "kind = convergence\n"
        "m = 100\n"
        "n = 400   # columns\n"
        "L = 5\n"
        "K = 10\n"
        "khat = 20\n"
        "sweeps = 50\n"
        "trials = 4\n"
    )
    config = parse_config(path)
    assert config["kind"] == "convergence"
    assert config["n"] == "400"
    spec = spec_from_config(config)
    assert spec.kind is ExperimentKind.CONVERGENCE
    assert spec.khat_rule.resolve(10) == 20
    assert spec.trials == 4


def test_parse_config_errors(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("mystery = 3\n")
    with pytest.raises(SpecValidationError):
        parse_config(path)
    path.write_text("m = 3\nm = 4\n")
    with pytest.raises(SpecValidationError):
        parse_config(path)
    path.write_text("just a line\n")
    with pytest.raises(SpecValidationError):
        parse_config(path)


def test_spec_from_config_requires_kind_or_base():
    with pytest.raises(SpecValidationError):
        spec_from_config({"m": "10"})


def test_spec_from_config_overrides_preset():
    base = preset(ExperimentKind.PHASE_TRANSITION, "desk", regime="under")
    spec = spec_from_config({"trials": "7", "K": "1,3", "khat": "2K"}, base=base)
    assert spec.trials == 7
    assert spec.sparsities == (1, 3)
    assert spec.m == base.m and spec.n == base.n
    assert spec.khat_rule == SupportRule("scale", 2.0)


def test_spec_from_config_range_syntax():
    base = preset(ExperimentKind.SUPPORT_SWEEP, "desk")
    spec = spec_from_config({"khat_grid": "1:9:2", "trials": "2"}, base=base)
    assert spec.khat_grid == (1, 3, 5, 7, 9)


def _tiny_report(kind):
    if kind is ExperimentKind.SUPPORT_SWEEP:
        spec = preset(kind, "desk")
        spec = spec_from_config(
            {"m": "20", "n": "8", "L": "2", "K": "2", "khat_grid": "2,4",
             "sweeps": "2", "trials": "3"}, base=spec)
    elif kind is ExperimentKind.CONVERGENCE:
        spec = spec_from_config(
            {"kind": "convergence", "m": "20", "n": "8", "L": "2", "K": "2",
             "khat": "4", "sweeps": "3", "trials": "3"})
    else:
        spec = spec_from_config(
            {"kind": "phase-transition", "m": "20", "n": "8", "L": "1,2",
             "K": "2,4", "khat": "2K", "sweeps": "2", "trials": "3"})
    return run_experiment(spec)


@pytest.mark.parametrize("kind", list(ExperimentKind))
def test_csv_schema_and_round_trip(tmp_path, kind):
    report = _tiny_report(kind)
    path = tmp_path / "report.csv"
    write_report_csv(report, path)
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(report_columns(kind))
    assert len(lines) == 1 + len(report.rows)
    # numeric fields round-trip at full precision
    first = lines[1].split(",")
    err_col = report_columns(kind).index(
        "mean_rel_err" if kind is not ExperimentKind.PHASE_TRANSITION else "recovery_rate_pct"
    )
    expected = (report.rows[0].mean_rel_err
                if kind is not ExperimentKind.PHASE_TRANSITION
                else report.rows[0].recovery_rate_pct)
    assert float(first[err_col]) == expected


@pytest.mark.parametrize("kind", list(ExperimentKind))
def test_json_payload(tmp_path, kind):
    report = _tiny_report(kind)
    path = tmp_path / "report.json"
    write_report_json(report, path)
    payload = json.loads(path.read_text())
    assert payload["kind"] == kind.value
    assert len(payload["rows"]) == len(report.rows)
    assert set(payload["rows"][0]) == set(report_columns(kind))
    assert payload["spec"]["trials"] == report.spec.trials
