"""Pinned calibration targets and the suite validator (constraints C1-C6).

The targets are the published per-row tallies over the 140-scenario suite,
the per-cell completeness means, the per-cell modal failure modes and the
container-presence convention. :func:`validate_calibration` checks a suite's
manifests against them; the evaluation harness applies the same row-count
check to pipeline output.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from ..core import ALL_CELLS, IMPLEMENTATION_ROWS, MatrixCell
from ..scoring import CONTAINERS

FULL, PARTIAL, UNFILLABLE, OPAQUE = (
    "fully_fillable", "partially_fillable", "structurally_unfillable", "opaque",
)
TAG_ORDER = (FULL, PARTIAL, UNFILLABLE, OPAQUE)

# row -> (full, partial, unfillable, opaque) over all 140 scenarios
ROW_COUNT_TARGETS: Mapping[str, tuple[int, int, int, int]] = {
    "inputs": (80, 59, 1, 0),
    "policy_basis": (102, 0, 38, 0),
    "actor_identity_principal_authority": (27, 73, 40, 0),
    "action_boundary_config_envelope": (140, 0, 0, 0),
    "reasoning_trace": (0, 0, 0, 140),
    "output_action": (107, 0, 33, 0),
    "post_condition_state": (76, 58, 6, 0),
}
ROW_COUNT_CONSTRAINT = {"inputs": "C1"}  # every other row is C2

_cell = MatrixCell.from_key
CELL_MEAN_TARGETS: Mapping[MatrixCell, float] = {
    _cell("single_agent/within_stack"): 85.0,
    _cell("single_agent/cross_stack"): 71.1,
    _cell("multi_agent/within_stack"): 67.5,
    _cell("multi_agent/cross_stack"): 53.6,
    _cell("hitl/within_stack"): 94.3,
    _cell("hitl/cross_stack"): 79.3,
    _cell("non_agentic_baseline/not_applicable"): 100.0,
}
F1_TARGETS: Mapping[MatrixCell, float] = {
    _cell("single_agent/within_stack"): 0.84,
    _cell("single_agent/cross_stack"): 0.76,
    _cell("multi_agent/within_stack"): 0.13,
    _cell("multi_agent/cross_stack"): 0.46,
    _cell("hitl/within_stack"): 0.73,
    _cell("hitl/cross_stack"): 0.74,
}
MODAL_MODE_TARGETS: Mapping[MatrixCell, int | None] = {
    _cell("single_agent/within_stack"): 4,
    _cell("single_agent/cross_stack"): 3,
    _cell("multi_agent/within_stack"): 6,
    _cell("multi_agent/cross_stack"): 3,
    _cell("hitl/within_stack"): None,
    _cell("hitl/cross_stack"): 3,
}
IMPLICIT_POLICY_CELL = _cell("multi_agent/within_stack")
IMPLICIT_POLICY_SHARE = 0.53
SHARE_TOLERANCE = 0.02
UNIFORM_CELL = _cell("hitl/within_stack")
SCENARIOS_PER_CELL = 20

_TAG_WORDS = {FULL: "full", PARTIAL: "partial", UNFILLABLE: "unfillable", OPAQUE: "opaque"}


@dataclass(frozen=True)
class Violation:
    constraint: str
    message: str

    def __str__(self) -> str:
        return f"{self.constraint} violated: {self.message}"


@dataclass(frozen=True)
class CalibrationResult:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return not self.violations

    def failed(self, constraint: str) -> bool:
        return any(v.constraint == constraint for v in self.violations)

    def lines(self) -> list[str]:
        return [str(v) for v in self.violations]


def profile_completeness(profile: Mapping[str, Mapping[str, object]]) -> float:
    """Completeness (fraction) implied by an expected profile."""
    return sum(float(profile[r]["confidence"] or 0.0) for r in IMPLEMENTATION_ROWS) / len(IMPLEMENTATION_ROWS)


def check_row_counts(tallies: Mapping[str, Mapping[str, int]]) -> list[Violation]:
    """Compare row -> tag -> count tallies with the pinned 140-scenario counts."""
    out = []
    for row, target in ROW_COUNT_TARGETS.items():
        got = tallies.get(row, {})
        for tag, want in zip(TAG_ORDER, target):
            have = got.get(tag, 0)
            if have != want:
                out.append(Violation(
                    ROW_COUNT_CONSTRAINT.get(row, "C2"),
                    f"{row} {_TAG_WORDS[tag]} count {have} ≠ {want}",
                ))
        extra = sum(n for t, n in got.items() if t not in TAG_ORDER)
        if extra:
            out.append(Violation(ROW_COUNT_CONSTRAINT.get(row, "C2"),
                                 f"{row} has {extra} verdicts outside the scored categories"))
    return out


def mode_shares(unfillable_modes: Iterable[int]) -> tuple[int | None, float]:
    counts = Counter(unfillable_modes)
    total = sum(counts.values())
    if not total:
        return None, 0.0
    modal = min(counts, key=lambda m: (-counts[m], m))
    return modal, counts[modal] / total


def validate_calibration(manifests: Sequence) -> CalibrationResult:
    """Check scenario manifests against C1-C6 and report every violation."""
    violations: list[Violation] = []
    by_cell: dict[MatrixCell, list] = {c: [] for c in ALL_CELLS}
    for m in manifests:
        by_cell.setdefault(m.cell, []).append(m)
    for cell, group in by_cell.items():
        if len(group) != SCENARIOS_PER_CELL:
            violations.append(Violation(
                "suite", f"{cell.key} has {len(group)} scenarios, expected {SCENARIOS_PER_CELL}"))

    # C1, C2: row tallies
    tallies: dict[str, Counter] = {row: Counter() for row in IMPLEMENTATION_ROWS}
    for m in manifests:
        for row in IMPLEMENTATION_ROWS:
            tallies[row][m.expected_profile[row]["tag"]] += 1
    violations += check_row_counts(tallies)

    # C3: per-cell means to one decimal; C4: the uniform cell
    for cell, target in CELL_MEAN_TARGETS.items():
        group = by_cell.get(cell, [])
        if not group:
            continue
        values = [profile_completeness(m.expected_profile) for m in group]
        mean = round(100 * sum(values) / len(values), 1)
        if mean != target:
            violations.append(Violation("C3", f"{cell.key} mean completeness {mean} ≠ {target}"))
        if cell == UNIFORM_CELL and max(values) - min(values) > 1e-12:
            violations.append(Violation("C4", f"{cell.key} completeness is not identical across scenarios"))

    # C5: mode tagging, modal modes, the implicit-policy share
    for m in manifests:
        unfillable = [r for r in IMPLEMENTATION_ROWS
                      if m.expected_profile[r]["tag"] == UNFILLABLE]
        tagged = Counter(row for _, row in m.injected_modes)
        for row in unfillable:
            if tagged[row] != 1:
                violations.append(Violation(
                    "C5", f"{m.scenario_id} unfillable {row} carries {tagged[row]} mode tags, expected 1"))
        if any(not 1 <= mode <= 7 for mode, _ in m.injected_modes):
            violations.append(Violation("C5", f"{m.scenario_id} has a mode tag outside 1-7"))
        if m.cell.stack_coverage == "cross_stack" and not any(mode == 3 for mode, _ in m.injected_modes):
            violations.append(Violation("C5", f"{m.scenario_id} is cross-stack without a mode-3 injection"))
    for cell, target in MODAL_MODE_TARGETS.items():
        group = by_cell.get(cell, [])
        modes = [m.row_modes()[r] for m in group for r in IMPLEMENTATION_ROWS
                 if m.expected_profile[r]["tag"] == UNFILLABLE and r in m.row_modes()]
        if cell == UNIFORM_CELL and modes:
            violations.append(Violation("C5", f"{cell.key} has {len(modes)} unfillable rows, expected 0"))
        modal, share = mode_shares(modes)
        if modal != target:
            violations.append(Violation("C5", f"{cell.key} modal mode {modal} ≠ {target}"))
        if cell == IMPLICIT_POLICY_CELL and abs(share - IMPLICIT_POLICY_SHARE) > SHARE_TOLERANCE:
            violations.append(Violation(
                "C5", f"{cell.key} mode-6 share {share:.3f} outside {IMPLICIT_POLICY_SHARE} ± {SHARE_TOLERANCE}"))

    # C6: container flags
    for m in manifests:
        missing = [c for c in CONTAINERS if not m.container_flags.get(c, False)]
        if missing:
            violations.append(Violation("C6", f"{m.scenario_id} lacks containers {missing}"))
    return CalibrationResult(tuple(violations))
