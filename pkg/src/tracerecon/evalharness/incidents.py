"""Named-incident fixtures: hand-encoded public postmortems run through the pipeline."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Any, Mapping

from ..core import MatrixCell
from ..pipeline import FeasibilityReport, PipelineConfig, reconstruct

INCIDENT_IDS = ("replit_drop_database", "cursor_rm_rf", "claude_code_datatalks")


@dataclass(frozen=True)
class NamedIncidentFixture:
    incident_id: str
    cell: MatrixCell
    descriptor: str
    records: tuple[Mapping[str, Any], ...]
    expected_profile: Mapping[str, str]  # row -> category tag
    metadata: Mapping[str, Any]

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "NamedIncidentFixture":
        meta_keys = ("title", "date", "evidentiary_strength", "sources", "encoding_note")
        return cls(
            incident_id=data["incident_id"],
            cell=MatrixCell(data["architecture"], data["stack_coverage"]),
            descriptor=data["descriptor"],
            records=tuple(data["records"]),
            expected_profile=dict(data["expected_profile"]),
            metadata={k: data[k] for k in meta_keys if k in data},
        )


def load_incident(incident_id: str) -> NamedIncidentFixture:
    if incident_id not in INCIDENT_IDS:
        raise KeyError(f"unknown incident {incident_id!r}")
    text = resources.files(__package__).joinpath("incidents", f"{incident_id}.json").read_text("utf-8")
    return NamedIncidentFixture.from_dict(json.loads(text))


def load_incidents() -> list[NamedIncidentFixture]:
    return [load_incident(i) for i in INCIDENT_IDS]


def run_incident(fixture: NamedIncidentFixture, config: PipelineConfig = PipelineConfig()) -> FeasibilityReport:
    """Reconstruct one incident; a postmortem narrative forms a single chain."""
    reports = reconstruct(list(fixture.records), fixture.descriptor,
                          scenario_id=fixture.incident_id, config=config)
    if len(reports) != 1:
        raise ValueError(f"{fixture.incident_id}: expected one chain, got {len(reports)}")
    return reports[0]
