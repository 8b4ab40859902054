"""Command-line interface.

Subcommands::

    support-sweep     mean error vs estimated support size
    convergence       mean error vs sweep count
    phase-transition  recovery rate vs sparsity (--regime over|under)
    gen-problem       write a synthetic problem fixture
    solve             run one solver on a problem fixture
    classify          classify feature files with the sparse classifier

Experiment commands start from a named preset (``--preset paper|desk``),
apply an optional config file (``--spec``), then apply flag overrides. They
write a delimited report (CSV by default) and, unless ``--no-fig`` is given,
a PNG figure next to it. Exit codes: 0 success, 1 invalid arguments or
config, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import fileio
from .classify import build_dictionary, classify_mmv, classify_smv
from .errors import KaczmarzError, SpecValidationError
from .experiments import ExperimentKind, SupportRule, preset, run_experiment
from .metrics import relative_error
from .sampling import SeededRng
from .solvers import SolverConfig, Variant, solve
from .synth import generate_problem

__all__ = ["main", "entry"]

OUT_DIR_ENV = "SRKMMV_OUT_DIR"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; the CLI contract wants 1.
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="srkmmv", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output_flags(p, default_name):
        p.add_argument("--out", help=f"output path (default: {default_name} in "
                                     f"${OUT_DIR_ENV} or the working directory)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    def add_experiment(name, kind):
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--preset", choices=("paper", "desk"), default="desk")
        p.add_argument("--spec", help="config file overriding the preset")
        p.add_argument("--seed", type=int, help="base seed override")
        p.add_argument("--trials", type=int, help="trial count override")
        p.add_argument("--threads", type=int, default=1,
                       help="max worker processes for trials")
        p.add_argument("--no-fig", action="store_true",
                       help="skip the PNG figure next to the report")
        if kind is ExperimentKind.PHASE_TRANSITION:
            p.add_argument("--regime", choices=("over", "under"), default="over")
        add_output_flags(p, f"{name}.csv")
        p.set_defaults(kind=kind)
        return p

    add_experiment("support-sweep", ExperimentKind.SUPPORT_SWEEP)
    add_experiment("convergence", ExperimentKind.CONVERGENCE)
    add_experiment("phase-transition", ExperimentKind.PHASE_TRANSITION)

    g = sub.add_parser("gen-problem", help="write a synthetic problem fixture")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--L", type=int, required=True)
    g.add_argument("--K", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)

    s = sub.add_parser("solve", help="run one solver on a problem fixture")
    s.add_argument("--problem", required=True, help="fixture from gen-problem")
    s.add_argument("--variant", choices=[v.value for v in Variant], default="srk-mmv")
    s.add_argument("--khat", type=int, help="estimated support size (sparse variants)")
    s.add_argument("--sweeps", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--trace-every", type=int, default=0)
    add_output_flags(s, "solve.csv")

    c = sub.add_parser("classify", help="classify feature files")
    c.add_argument("--train", required=True, help="labeled feature file")
    c.add_argument("--test", required=True, help="unlabeled feature file")
    c.add_argument("--mode", choices=("smv", "mmv"), default="mmv",
                   help="per-frame or joint classification")
    c.add_argument("--khat", type=int, help="estimated support size "
                                            "(default: samples per class)")
    c.add_argument("--sweeps", type=int, default=20)
    c.add_argument("--seed", type=int, default=0)
    add_output_flags(c, "classify.csv")

    return parser


def _out_path(args, default_name: str) -> Path:
    if args.out:
        return Path(args.out)
    return Path(os.environ.get(OUT_DIR_ENV, ".")) / default_name


def _run_experiment_command(args) -> int:
    spec = preset(args.kind, scale=args.preset,
                  regime=getattr(args, "regime", "over"))
    if args.spec:
        config = fileio.parse_config(args.spec)
        spec = fileio.spec_from_config(config, base=spec)
    overrides = {}
    if args.seed is not None:
        overrides["base_seed"] = args.seed
    if args.trials is not None:
        overrides["trials"] = args.trials
    if overrides:
        from dataclasses import replace
        spec = replace(spec, **overrides)
    spec.validate()

    report = run_experiment(spec, workers=max(1, args.threads))
    out = _out_path(args, f"{args.kind.value}.{args.format}")
    if args.format == "csv":
        fileio.write_report_csv(report, out)
    else:
        fileio.write_report_json(report, out)
    print(f"wrote {out} ({len(report.rows)} rows)")
    if not args.no_fig:
        from .figures import figure_path, render_report
        fig = render_report(report, figure_path(out))
        print(f"wrote {fig}")
    return 0


def _run_gen_problem(args) -> int:
    problem = generate_problem(args.m, args.n, args.L, args.K, SeededRng(args.seed))
    fileio.save_problem(problem, args.out)
    print(f"wrote {args.out}")
    return 0


def _run_solve(args) -> int:
    problem = fileio.load_problem(args.problem)
    cfg = SolverConfig(
        variant=Variant(args.variant), estimated_support=args.khat,
        sweeps=args.sweeps, seed=args.seed, trace_every=args.trace_every,
    )
    result = solve(problem.A, problem.B, cfg)
    err = relative_error(problem.X_true, result.solution)
    print(f"relative_error={err!r} iterations={result.iterations_run} "
          f"dot_products={result.dot_products}")
    out = _out_path(args, f"solve.{args.format}")
    header = ("variant", "khat", "sweeps", "seed",
              "relative_error", "iterations_run", "dot_products")
    values = (args.variant, args.khat if args.khat is not None else "",
              args.sweeps, args.seed, repr(err),
              result.iterations_run, result.dot_products)
    if args.format == "csv":
        out.write_text(",".join(header) + "\n" +
                       ",".join(str(v) for v in values) + "\n")
    else:
        import json
        out.write_text(json.dumps(dict(zip(header, values)), indent=2) + "\n")
    print(f"wrote {out}")
    return 0


def _run_classify(args) -> int:
    V, labels = fileio.load_features(args.train, labeled=True)
    T, _ = fileio.load_features(args.test)
    dictionary = build_dictionary(list(zip(labels, V.T)))
    if args.mode == "mmv":
        cfg = SolverConfig(variant=Variant.SRK_MMV, estimated_support=args.khat,
                           sweeps=args.sweeps, seed=args.seed)
        result = classify_mmv(dictionary, T, cfg)
        predictions = [(None, result)]
    else:
        cfg = SolverConfig(variant=Variant.SRK, estimated_support=args.khat,
                           sweeps=args.sweeps, seed=args.seed)
        predictions = [
            (frame, classify_smv(dictionary, T[:, frame], cfg))
            for frame in range(T.shape[1])
        ]
    for frame, result in predictions:
        tag = "sequence" if frame is None else f"frame {frame}"
        print(f"{tag}: predicted={result.predicted}")
    out = _out_path(args, f"classify.{args.format}")
    rows = []
    for frame, result in predictions:
        for cls, res in zip(result.classes, result.residuals):
            rows.append({
                "frame": "" if frame is None else frame, "class": cls,
                "residual": repr(float(res)),
                "predicted": int(cls == result.predicted),
            })
    if args.format == "csv":
        lines = ["frame,class,residual,predicted"]
        lines += [f"{r['frame']},{r['class']},{r['residual']},{r['predicted']}"
                  for r in rows]
        out.write_text("\n".join(lines) + "\n")
    else:
        import json
        out.write_text(json.dumps(rows, indent=2) + "\n")
    print(f"wrote {out}")
    return 0


_VALIDATION_ERRORS = (_UsageError, SpecValidationError, OSError, ValueError)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"srkmmv: error: {exc}", file=sys.stderr)
        return 1
    try:
        if args.command in ("support-sweep", "convergence", "phase-transition"):
            return _run_experiment_command(args)
        if args.command == "gen-problem":
            return _run_gen_problem(args)
        if args.command == "solve":
            return _run_solve(args)
        if args.command == "classify":
            return _run_classify(args)
        raise _UsageError(f"unknown command {args.command!r}")  # pragma: no cover
    except _VALIDATION_ERRORS as exc:
        print(f"srkmmv: error: {exc}", file=sys.stderr)
        return 1
    except KaczmarzError as exc:
        print(f"srkmmv: runtime failure: {exc}", file=sys.stderr)
        return 2


def entry() -> None:  # console-script hook
    raise SystemExit(main())


if __name__ == "__main__":  # pragma: no cover
    entry()
