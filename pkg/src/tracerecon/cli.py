"""Command-line entry point: generate, reconstruct, evaluate, rate.

Exit statuses: 0 success, 1 acceptance band missed, 2 usage error,
3 fatal pipeline gate (Stage 0 or 1), 4 calibration failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Sequence

from .adapters import REGIME_CLASSES, read_jsonl
from .core import IMPLEMENTATION_ROWS, as_row
from .evalharness import CalibrationFailure, EvalConfig, acceptance_checks, evaluate, write_tables
from .evalharness.tables import build_tables, dumps, results_document, to_tsv
from .pipeline import FeasibilityReport, PipelineConfig, reconstruct, reconstruct_fragments, report_from_document
from .scoring import DeclaredProcess, maturity_rate
from .synthgen import generate_suite, read_suite, suite_digest, write_suite
from .synthgen.suite import RUN_SNAPSHOT, read_index

EXIT_OK = 0
EXIT_BANDS = 1
EXIT_USAGE = 2
EXIT_GATE = 3
EXIT_CALIBRATION = 4
FATAL_STAGE_VERDICTS = ("regime_unsupported", "no_fragments_recovered")


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    master_seed: int | None = 42
    suite_dir: str | None = None
    output_dir: str | None = None
    thresholds: dict[str, float] = field(default_factory=lambda: {"delta": 1.0, "theta": 0.5})
    bootstrap: dict[str, int] = field(default_factory=lambda: {"resamples": 1000, "seed": 0})
    extra: dict[str, Any] = field(default_factory=dict)

    def write(self, out_dir: Path) -> None:
        (out_dir / RUN_SNAPSHOT).write_text(dumps(asdict(self)))


def _pipeline_config(args: argparse.Namespace) -> PipelineConfig:
    if not 0 <= args.theta <= 1:
        raise UsageError("--theta must lie in [0, 1]")
    if args.delta < 0:
        raise UsageError("--delta must be non-negative")
    return PipelineConfig(delta=args.delta, theta=args.theta)


def _out_dir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------

def cmd_generate(args: argparse.Namespace) -> int:
    out = Path(args.out)
    if out.exists() and any(out.iterdir()) and not args.overwrite:
        raise UsageError(f"{out} is not empty; pass --overwrite to replace it")
    if out.exists() and args.overwrite:
        for old in sorted(out.rglob("*"), reverse=True):
            old.unlink() if old.is_file() else old.rmdir()
    suite = generate_suite(args.seed)
    write_suite(suite, out)
    RunConfig("generate", master_seed=args.seed, suite_dir=str(args.out), output_dir=str(args.out)).write(out)
    print(f"wrote {len(suite.scenarios)} scenarios to {out}")
    print(f"digest {suite_digest(out)}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# reconstruct
# ---------------------------------------------------------------------------

def _load_input(path: Path, descriptor: str) -> list[tuple[str, list[Any], str]]:
    """(scenario_id, records, descriptor) per scenario found at ``path``."""
    if path.is_dir():
        if not (path / "index.json").exists():
            raise UsageError(f"{path} has no index.json")
        suite = read_suite(path)
        return [(s.scenario_id, list(s.fragments), "normalized") for s in suite.scenarios]
    if not path.exists():
        raise UsageError(f"{path} does not exist")
    if path.suffix == ".json":
        try:
            data = json.loads(path.read_text(encoding="utf-8") or "[]")
        except json.JSONDecodeError:
            return [(path.stem, [path.read_text(encoding="utf-8")], descriptor)]
        if isinstance(data, dict) and "records" in data:
            return [(data.get("incident_id", path.stem), list(data["records"]),
                     data.get("descriptor", descriptor))]
        return [(path.stem, data if isinstance(data, list) else [data], descriptor)]
    stem = path.name.split(".")[0]
    return [(stem, read_jsonl(path), descriptor)]


def _run_reconstruct(sid: str, records: list[Any], descriptor: str,
                     config: PipelineConfig) -> list[FeasibilityReport]:
    if descriptor == "normalized":
        return reconstruct_fragments(records, "generic_jsonl", scenario_id=sid, config=config)
    return reconstruct(records, descriptor, scenario_id=sid, config=config)


def cmd_reconstruct(args: argparse.Namespace) -> int:
    config = _pipeline_config(args)
    inputs = _load_input(Path(args.input), args.descriptor)
    out = _out_dir(args.out) if args.out else None
    status = EXIT_OK
    rows = []
    documents = []
    for sid, records, descriptor in inputs:
        reports = _run_reconstruct(sid, records, descriptor, config)
        for k, report in enumerate(reports):
            fatal = [g for g in report.gate_log if g.verdict in FATAL_STAGE_VERDICTS]
            if fatal:
                status = EXIT_GATE
                print(f"{sid}: {fatal[0].verdict}: {fatal[0].detail}", file=sys.stderr)
            name = sid if len(reports) == 1 else f"{sid}.{report.chain_id}"
            if out is not None:
                (out / f"{name.replace('/', '_')}.report.json").write_text(report.dumps())
            rows.append({"scenario_id": sid, "chain_id": report.chain_id,
                         "completeness": f"{report.completeness:.4f}",
                         "gate": "failed" if fatal else "ok"})
            documents.append(report.to_document())
    if out is not None:
        RunConfig("reconstruct", master_seed=None, suite_dir=str(args.input), output_dir=str(args.out),
                  thresholds={"delta": config.delta, "theta": config.theta},
                  extra={"descriptor": args.descriptor}).write(out)
    if args.format == "document":
        print(dumps(documents if len(documents) != 1 else documents[0]), end="")
    else:
        print(to_tsv(rows), end="")
    return status


# ---------------------------------------------------------------------------
# evaluate
# ---------------------------------------------------------------------------

def cmd_evaluate(args: argparse.Namespace) -> int:
    config = EvalConfig(_pipeline_config(args), args.resamples, args.bootstrap_seed)
    if args.suite:
        index = read_index(args.suite)
        if args.seed is not None and args.seed != index["master_seed"]:
            raise UsageError(f"--seed {args.seed} does not match the suite's master seed {index['master_seed']}")
        suite = read_suite(args.suite)
    else:
        suite = generate_suite(42 if args.seed is None else args.seed)
    try:
        ev = evaluate(suite, config)
    except CalibrationFailure as exc:
        print("calibration failed; refusing to emit tables", file=sys.stderr)
        for line in exc.result.lines():
            print(line, file=sys.stderr)
        return EXIT_CALIBRATION
    if args.out:
        out = _out_dir(args.out)
        write_tables(ev, out)
        RunConfig("evaluate", master_seed=suite.master_seed, suite_dir=args.suite, output_dir=str(args.out),
                  thresholds={"delta": config.pipeline.delta, "theta": config.pipeline.theta},
                  bootstrap={"resamples": config.resamples, "seed": config.bootstrap_seed}).write(out)
    if args.format == "document":
        print(dumps(results_document(ev)), end="")
    else:
        for tid, rows in build_tables(ev).items():
            print(f"# {tid}")
            print(to_tsv(rows))
        print(f"premium\t{ev.premium:.1f}")
    checks = acceptance_checks(ev)
    for check in checks:
        print(check.line())
    return EXIT_OK if all(c.passed for c in checks) else EXIT_BANDS


# ---------------------------------------------------------------------------
# rate
# ---------------------------------------------------------------------------

def _tested_rows(text: str | None) -> list[str]:
    names = [t.strip() for t in (text or "").split(",") if t.strip()]
    if not names:
        raise UsageError("--tested-rows needs at least one row")
    try:
        return [as_row(n) for n in names]
    except (KeyError, ValueError) as exc:
        raise UsageError(f"unknown row in --tested-rows: {exc}") from None


def cmd_rate(args: argparse.Namespace) -> int:
    tested = _tested_rows(args.tested_rows)
    report_path = Path(args.report)
    if not report_path.exists():
        raise UsageError(f"{report_path} does not exist")
    report = report_from_document(json.loads(report_path.read_text(encoding="utf-8")))
    declared = DeclaredProcess()
    if args.declared:
        declared = DeclaredProcess.from_dict(json.loads(Path(args.declared).read_text(encoding="utf-8")))
    history = {row: [v] for row, v in report.verdicts.items()}
    rating = maturity_rate(history, tested, declared)
    if args.format == "document":
        print(dumps(rating.to_dict()), end="")
    else:
        rows = [{"row": r, "level": lvl, "tested": r in rating.tested_rows}
                for r, lvl in rating.per_row_level.items()]
        print(to_tsv(rows), end="")
        print(f"aggregate\t{rating.aggregate_level}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _thresholds(p: argparse.ArgumentParser) -> None:
    p.add_argument("--delta", type=float, default=1.0, help="timestamp gap that marks a boundary (default 1.0)")
    p.add_argument("--theta", type=float, default=0.5, help="boundary confidence threshold (default 0.5)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tracerecon", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write the seeded scenario suite")
    g.add_argument("--seed", type=int, default=42)
    g.add_argument("--out", required=True)
    g.add_argument("--overwrite", action="store_true", help="replace a non-empty output directory")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("reconstruct", help="run the pipeline over a fragment file or suite")
    r.add_argument("--input", "--suite", dest="input", required=True)
    r.add_argument("--out")
    r.add_argument("--descriptor", default="generic_jsonl", choices=REGIME_CLASSES)
    r.add_argument("--format", choices=("table", "document"), default="table")
    _thresholds(r)
    r.set_defaults(func=cmd_reconstruct)

    e = sub.add_parser("evaluate", help="golden tables and acceptance verdicts")
    e.add_argument("--suite", help="suite directory (default: generate in memory)")
    e.add_argument("--seed", type=int, help="expected master seed (default 42 without --suite)")
    e.add_argument("--out")
    e.add_argument("--resamples", type=int, default=1000)
    e.add_argument("--bootstrap-seed", type=int, default=0)
    e.add_argument("--format", choices=("table", "document"), default="table")
    _thresholds(e)
    e.set_defaults(func=cmd_evaluate)

    t = sub.add_parser("rate", help="maturity rating of one report")
    t.add_argument("--report", required=True)
    t.add_argument("--tested-rows", required=True,
                   help="comma list of rows: " + ", ".join(IMPLEMENTATION_ROWS))
    t.add_argument("--declared", help="JSON file of declared process attributes")
    t.add_argument("--format", choices=("table", "document"), default="table")
    t.set_defaults(func=cmd_rate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
