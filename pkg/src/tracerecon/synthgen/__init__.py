"""Synthetic scenario generation with controlled failure-mode injection."""

from __future__ import annotations

from .calibration import (
    CELL_MEAN_TARGETS,
    F1_TARGETS,
    MODAL_MODE_TARGETS,
    ROW_COUNT_TARGETS,
    CalibrationResult,
    Violation,
    check_row_counts,
    profile_completeness,
    validate_calibration,
)
from .generator import BuiltScenario, build_scenario, derive_seed, expected_profile
from .modes import (
    AMBIGUITY,
    BREAK_GROUPS,
    DIFFUSION,
    FAILURE_MODES,
    FRAGMENTATION,
    FailureMode,
    InapplicableMode,
    check_applicable,
    inject_mode,
)
from .suite import (
    DECLARED_BREAK,
    PER_CELL,
    Scenario,
    ScenarioManifest,
    Suite,
    generate_scenario,
    generate_suite,
    load_profiles,
    read_suite,
    suite_digest,
    write_suite,
)

__all__ = [
    "CELL_MEAN_TARGETS", "CalibrationResult", "F1_TARGETS", "MODAL_MODE_TARGETS",
    "ROW_COUNT_TARGETS", "Violation", "check_row_counts", "profile_completeness",
    "validate_calibration",
    "AMBIGUITY", "BREAK_GROUPS", "BuiltScenario", "DECLARED_BREAK", "DIFFUSION",
    "FAILURE_MODES", "FRAGMENTATION", "FailureMode", "InapplicableMode", "PER_CELL",
    "Scenario", "ScenarioManifest", "Suite", "build_scenario", "check_applicable",
    "derive_seed", "expected_profile", "generate_scenario", "generate_suite",
    "inject_mode", "load_profiles", "read_suite", "suite_digest", "write_suite",
]
