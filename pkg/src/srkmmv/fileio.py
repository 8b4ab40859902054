"""Text formats: problem fixtures, experiment config files, feature matrices,
and CSV/JSON report serialization.

All formats are whitespace- or comma-delimited decimal text so fixtures can
be audited by eye and regenerated bit-identically by other implementations.
Floats are written with ``repr``, which round-trips IEEE doubles exactly.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence, Tuple

import numpy as np

from .errors import DimensionError, SpecValidationError
from .experiments import (
    ExperimentKind,
    ExperimentSpec,
    MonteCarloReport,
    SupportRule,
)
from .linalg import as_matrix, matmul
from .sampling import SupportSet
from .synth import SyntheticProblem

__all__ = [
    "save_problem",
    "load_problem",
    "save_features",
    "load_features",
    "parse_config",
    "spec_from_config",
    "report_columns",
    "report_table",
    "write_report_csv",
    "write_report_json",
]


def _fmt(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# Problem fixtures: header "m n L K seed", then A (m lines of n values), then
# X_true (n lines of L values), then the support indices on one line.

def save_problem(problem: SyntheticProblem, path) -> None:
    lines = []
    m, n = problem.A.shape
    L = problem.X_true.shape[1]
    K = problem.true_support.size
    lines.append(f"{m} {n} {L} {K} {problem.seed}")
    for row in problem.A:
        lines.append(" ".join(_fmt(x) for x in row))
    for row in problem.X_true:
        lines.append(" ".join(_fmt(x) for x in row))
    lines.append(" ".join(str(int(i)) for i in problem.true_support.indices))
    Path(path).write_text("\n".join(lines) + "\n")


def load_problem(path) -> SyntheticProblem:
    tokens_per_line = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip()]
    header = tokens_per_line[0]
    if len(header) != 5:
        raise SpecValidationError("problem file header must be 'm n L K seed'")
    m, n, L, K, seed = (int(t) for t in header)
    expected = 1 + m + n + 1
    if len(tokens_per_line) != expected:
        raise SpecValidationError(
            f"problem file has {len(tokens_per_line)} lines, expected {expected}"
        )
    A = as_matrix([[float(t) for t in tokens_per_line[1 + i]] for i in range(m)])
    X = as_matrix([[float(t) for t in tokens_per_line[1 + m + i]] for i in range(n)])
    if A.shape != (m, n) or X.shape != (n, L):
        raise DimensionError("problem file body does not match its header")
    support = SupportSet(indices=[int(t) for t in tokens_per_line[1 + m + n]], n=n)
    if support.size != K:
        raise SpecValidationError(f"support line has {support.size} indices, header says {K}")
    return SyntheticProblem(A=A, X_true=X, B=matmul(A, X), true_support=support, seed=seed)


# ---------------------------------------------------------------------------
# Feature matrices for classification. Training files carry a label line:
#   d N
#   label_1 ... label_N
#   d lines of N values (samples are columns)
# Test files omit the label line.

def save_features(matrix, path, labels: Sequence = None) -> None:
    M = as_matrix(matrix)
    d, N = M.shape
    lines = [f"{d} {N}"]
    if labels is not None:
        if len(labels) != N:
            raise DimensionError(f"{len(labels)} labels for {N} columns")
        lines.append(" ".join(str(l) for l in labels))
    for row in M:
        lines.append(" ".join(_fmt(x) for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


def load_features(path, labeled: bool = False):
    """Returns ``(matrix, labels)``; ``labels`` is None for unlabeled files."""
    rows = [ln.split() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not rows or len(rows[0]) != 2:
        raise SpecValidationError("feature file header must be 'd N'")
    d, N = int(rows[0][0]), int(rows[0][1])
    labels = None
    body = rows[1:]
    if labeled:
        if len(body) != d + 1:
            raise SpecValidationError(f"labeled feature file needs {d + 1} body lines")
        labels = body[0]
        if len(labels) != N:
            raise SpecValidationError(f"label line has {len(labels)} entries, expected {N}")
        body = body[1:]
    elif len(body) != d:
        raise SpecValidationError(f"feature file needs {d} body lines, found {len(body)}")
    M = as_matrix([[float(t) for t in r] for r in body])
    if M.shape != (d, N):
        raise DimensionError("feature file body does not match its header")
    return M, labels


# ---------------------------------------------------------------------------
# Experiment config files: one "key = value" per line, '#' comments.

_LIST_KEYS = {"K", "L"}
_INT_KEYS = {"m", "n", "sweeps", "trials", "seed"}
_FLOAT_KEYS = {"threshold"}
_OTHER_KEYS = {"kind", "khat", "khat_grid"}
_ALL_KEYS = _LIST_KEYS | _INT_KEYS | _FLOAT_KEYS | _OTHER_KEYS


def parse_config(path) -> dict:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecValidationError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _ALL_KEYS:
            raise SpecValidationError(f"{path}:{lineno}: unknown key {key!r}")
        if key in out:
            raise SpecValidationError(f"{path}:{lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _int_list(text: str) -> tuple:
    """Parse '5,7,9' or a range '1:99:2' into a tuple of ints."""
    s = text.strip()
    if ":" in s:
        parts = [int(p) for p in s.split(":")]
        if len(parts) == 2:
            lo, hi = parts
            step = 1
        elif len(parts) == 3:
            lo, hi, step = parts
        else:
            raise SpecValidationError(f"bad range {text!r}")
        return tuple(range(lo, hi + 1, step))
    return tuple(int(p) for p in s.split(","))


def spec_from_config(config: dict, base: ExperimentSpec = None) -> ExperimentSpec:
    """Build an :class:`ExperimentSpec` from parsed config keys.

    ``base`` supplies defaults (typically a named preset); keys present in
    the config override it. Without a base, ``kind, m, n, L, K, sweeps,
    trials`` are required.
    """
    values = dict(config)
    kind = values.pop("kind", None)
    if kind is not None:
        kind = ExperimentKind(kind)
    elif base is not None:
        kind = base.kind
    else:
        raise SpecValidationError("config is missing 'kind'")

    def take(key, parse, default):
        if key in values:
            return parse(values.pop(key))
        if default is not None:
            return default
        raise SpecValidationError(f"config is missing {key!r}")

    b = base if base is not None and base.kind == kind else None
    m = take("m", int, b.m if b else None)
    n = take("n", int, b.n if b else None)
    L = take("L", _int_list, b.num_vectors if b else None)
    K = take("K", _int_list, b.sparsities if b else None)
    sweeps = take("sweeps", int, b.sweeps if b else None)
    trials = take("trials", int, b.trials if b else None)
    threshold = take("threshold", float, b.threshold if b else 1e-3)
    seed = take("seed", int, b.base_seed if b else 0)
    khat_rule = take("khat", SupportRule.parse, b.khat_rule if b else SupportRule("absolute", 0))
    khat_grid = take("khat_grid", _int_list, b.khat_grid if b else ())
    if kind is ExperimentKind.SUPPORT_SWEEP and not khat_grid:
        raise SpecValidationError("support sweep config needs 'khat_grid'")
    if values:
        raise SpecValidationError(f"config keys not applicable: {sorted(values)}")
    spec = ExperimentSpec(
        kind=kind, m=m, n=n, num_vectors=tuple(L), sparsities=tuple(K),
        khat_rule=khat_rule, khat_grid=tuple(khat_grid),
        sweeps=sweeps, trials=trials, threshold=threshold, base_seed=seed,
    )
    spec.validate()
    return spec


# ---------------------------------------------------------------------------
# Report serialization. One CSV schema per experiment kind.

_SCHEMAS = {
    ExperimentKind.SUPPORT_SWEEP: ("K", "khat", "mean_rel_err", "trials"),
    ExperimentKind.CONVERGENCE: ("sweep", "mean_rel_err", "trials"),
    ExperimentKind.PHASE_TRANSITION: (
        "L", "K", "recovery_rate_pct", "trials", "mean_dot_products",
    ),
}


def report_columns(kind: ExperimentKind) -> tuple:
    return _SCHEMAS[ExperimentKind(kind)]


def report_table(report: MonteCarloReport) -> list:
    """Report rows as lists of strings, in schema column order."""
    columns = report_columns(report.kind)
    table = []
    for row in report.rows:
        record = []
        for col in columns:
            value = getattr(row, col)
            record.append(_fmt(value) if isinstance(value, float) else str(value))
        table.append(record)
    return table


def write_report_csv(report: MonteCarloReport, path) -> None:
    columns = report_columns(report.kind)
    lines = [",".join(columns)]
    lines.extend(",".join(record) for record in report_table(report))
    Path(path).write_text("\n".join(lines) + "\n")


def write_report_json(report: MonteCarloReport, path) -> None:
    columns = report_columns(report.kind)
    spec = report.spec
    payload = {
        "kind": report.kind.value,
        "spec": {
            "m": spec.m, "n": spec.n, "L": list(spec.num_vectors),
            "K": list(spec.sparsities), "khat": spec.khat_rule.describe(),
            "khat_grid": list(spec.khat_grid), "sweeps": spec.sweeps,
            "trials": spec.trials, "threshold": spec.threshold,
            "seed": spec.base_seed,
        },
        "rows": [
            {col: getattr(row, col) for col in columns} for row in report.rows
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")
