"""The eleven acceptance criteria, one test each, with one PASS/FAIL line per criterion."""

from __future__ import annotations

import hashlib
import time
from pathlib import Path

from tracerecon.cli import main
from tracerecon.evalharness import load_incidents, run_all, run_incident
from tracerecon.evalharness.acceptance import (
    check_baseline,
    check_counts,
    check_dominance,
    check_f1,
    check_incidents,
    check_means,
    check_no_conflicting,
    check_orderings,
    check_overclaim,
)
from tracerecon.evalharness.tables import f1_table
from tracerecon.synthgen import suite_digest

from .properties import ALL_CHECKS

INCIDENT_BUDGET_S = 1.0
FULL_RUN_BUDGET_S = 60.0


def verdict(capsys, number: int, label: str, passed: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\ncriterion {number:2d} {label}: {'PASS' if passed else 'FAIL'} ({detail})")
    assert passed, detail


def test_criterion_01_incident_arithmetic(evaluation, capsys):
    start = time.perf_counter()
    for fixture in load_incidents():
        run_incident(fixture)
    elapsed = time.perf_counter() - start
    check = check_incidents(evaluation)
    passed = check.passed and elapsed < INCIDENT_BUDGET_S
    verdict(capsys, 1, "named-incident arithmetic", passed, f"{check.detail}; {elapsed:.3f} s")


def test_criterion_02_baseline_ceiling(evaluation, capsys):
    check = check_baseline(evaluation)
    verdict(capsys, 2, "baseline ceiling", check.passed, check.detail)


def test_criterion_03_row_counts_after_pipeline(evaluation, capsys):
    check = check_counts(evaluation)
    verdict(capsys, 3, "row tallies after pipeline", check.passed, check.detail)


def test_criterion_04_cell_means_and_runtime(capsys):
    start = time.perf_counter()
    ev = run_all(42)
    elapsed = time.perf_counter() - start
    check = check_means(ev)
    passed = check.passed and elapsed < FULL_RUN_BUDGET_S
    verdict(capsys, 4, "cell means", passed, f"{check.detail}; full run {elapsed:.2f} s")


def test_criterion_05_orderings(evaluation, capsys):
    check = check_orderings(evaluation)
    verdict(capsys, 5, "orderings", check.passed, check.detail)


def test_criterion_06_overclaim_indicators(evaluation, capsys):
    check = check_overclaim(evaluation)
    verdict(capsys, 6, "overclaim indicators", check.passed, check.detail)


def test_criterion_07_modal_modes(evaluation, capsys):
    check = check_dominance(evaluation)
    verdict(capsys, 7, "modal failure modes", check.passed, check.detail)


def test_criterion_08_boundary_f1(evaluation, capsys):
    check = check_f1(evaluation)
    incidents = [r for r in f1_table(evaluation) if r["stack_coverage"] == "named_incident"]
    passed = check.passed and len(incidents) == 3 and all(r["f1"] == "not_applicable" for r in incidents)
    verdict(capsys, 8, "boundary F1", passed, check.detail)


def _tree_digest(root: Path) -> str:
    h = hashlib.sha256()
    for path in sorted(p for p in root.rglob("*") if p.is_file() and p.name != "run_config.json"):
        h.update(path.relative_to(root).as_posix().encode() + b"\0" + path.read_bytes())
    return h.hexdigest()


def _full_run(root: Path) -> tuple[str, str, str]:
    suite_dir, reports, tables = root / "suite", root / "reports", root / "tables"
    codes = [
        main(["generate", "--seed", "42", "--out", str(suite_dir)]),
        main(["reconstruct", "--suite", str(suite_dir), "--out", str(reports)]),
        main(["evaluate", "--suite", str(suite_dir), "--out", str(tables)]),
    ]
    assert codes == [0, 0, 0], codes
    return suite_digest(suite_dir), _tree_digest(reports), _tree_digest(tables)


def test_criterion_09_determinism(tmp_path, capsys):
    first = _full_run(tmp_path / "one")
    second = _full_run(tmp_path / "two")
    capsys.readouterr()
    passed = first == second
    detail = f"suite {first[0][:12]}, reports {first[1][:12]}, tables {first[2][:12]}"
    if not passed:
        detail = f"digests differ: {first} vs {second}"
    verdict(capsys, 9, "determinism", passed, detail)


def test_criterion_10_property_suite(capsys):
    failures = []
    for name, check in ALL_CHECKS.items():
        try:
            check()
        except Exception as exc:  # report every failing property, not just the first
            failures.append(f"{name}: {exc!r}"[:200])
    detail = "; ".join(failures) or f"{len(ALL_CHECKS)} properties hold"
    verdict(capsys, 10, "property suite", not failures, detail)


def test_criterion_11_no_conflicting(evaluation, capsys):
    check = check_no_conflicting(evaluation)
    runs = len(evaluation.scenarios) + len(evaluation.incidents)
    verdict(capsys, 11, "null results", check.passed and runs == 143, check.detail)
