"""Evaluation harness: suite runs, named incidents, metrics and golden tables."""

from __future__ import annotations

from .acceptance import Check, acceptance_checks
from .harness import (
    NOT_APPLICABLE,
    CalibrationFailure,
    CellSummary,
    EvalConfig,
    Evaluation,
    IncidentResult,
    ScenarioResult,
    evaluate,
    run_all,
    run_scenario,
)
from .incidents import INCIDENT_IDS, NamedIncidentFixture, load_incident, load_incidents, run_incident
from .metrics import BOOTSTRAP_RESAMPLES, Interval, ModeDominance, bootstrap_ci, boundary_f1, match_boundaries, mode_dominance
from .tables import TABLE_IDS, build_tables, results_document, to_tsv, write_tables

__all__ = [
    "BOOTSTRAP_RESAMPLES", "CalibrationFailure", "Check", "acceptance_checks", "CellSummary", "EvalConfig", "Evaluation",
    "INCIDENT_IDS", "IncidentResult", "Interval", "ModeDominance", "NOT_APPLICABLE",
    "NamedIncidentFixture", "ScenarioResult", "TABLE_IDS", "bootstrap_ci", "boundary_f1",
    "build_tables", "evaluate", "load_incident", "load_incidents", "match_boundaries",
    "mode_dominance", "results_document", "run_all", "run_incident", "run_scenario",
    "to_tsv", "write_tables",
]
