"""Stage 6: the feasibility report and its byte-reproducible serialization."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Mapping, Sequence

from ..core import IMPLEMENTATION_ROWS, SufficiencyCategory, category_from_dict, category_to_dict
from ..scoring import Recommendation, completeness
from .boundaries import DecisionUnit

GATE_VERDICTS = (
    "passed",
    "regime_unsupported",
    "no_fragments_recovered",
    "unordered_fragments",
    "unattributed_evidence_rejected",
    "boundary_unrecoverable",
    "property_unfillable_mapped",
    "report_emitted",
)
STAGE_NAMES = MappingProxyType(
    {
        0: "normalize",
        1: "collect",
        2: "order",
        3: "assemble",
        4: "segment",
        5: "map",
        6: "report",
    }
)


class GateContractError(RuntimeError):
    """An upstream stage did not log a verdict; no partial report is emitted."""


@dataclass(frozen=True)
class GateLogEntry:
    stage: int
    verdict: str
    detail: str = ""
    affected_fragment_ids: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.stage not in STAGE_NAMES:
            raise ValueError(f"stage {self.stage} outside 0-6")
        if self.verdict not in GATE_VERDICTS:
            raise ValueError(f"unknown gate verdict {self.verdict!r}")
        object.__setattr__(self, "affected_fragment_ids", tuple(self.affected_fragment_ids))

    def to_dict(self) -> dict[str, Any]:
        return {
            "affected_fragment_ids": list(self.affected_fragment_ids),
            "detail": self.detail,
            "stage": self.stage,
            "verdict": self.verdict,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "GateLogEntry":
        return cls(data["stage"], data["verdict"], data.get("detail", ""),
                   tuple(data.get("affected_fragment_ids", ())))


@dataclass(frozen=True)
class FeasibilityReport:
    scenario_id: str
    chain_id: str | None
    verdicts: Mapping[str, SufficiencyCategory]
    completeness: float
    gate_log: tuple[GateLogEntry, ...]
    recommendations: tuple[Recommendation, ...] = ()
    boundary_units: tuple[DecisionUnit, ...] = ()
    predicted_boundaries: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        if set(self.verdicts) != set(IMPLEMENTATION_ROWS):
            raise ValueError("a report carries exactly the seven implementation rows")
        object.__setattr__(self, "verdicts", MappingProxyType(dict(self.verdicts)))

    @property
    def normalize_failed(self) -> bool:
        """True when Stage 0 could not read the source at all."""
        return self.gate_log[0].verdict != "passed"

    def to_document(self) -> dict[str, Any]:
        return {
            "chain_id": self.chain_id,
            "completeness": round(self.completeness, 4),
            "gate_log": [e.to_dict() for e in self.gate_log],
            "predicted_boundaries": list(self.predicted_boundaries),
            "recommendations": [r.to_dict() for r in self.recommendations],
            "scenario_id": self.scenario_id,
            "units": [u.to_dict() for u in self.boundary_units],
            "verdicts": {row: category_to_dict(self.verdicts[row]) for row in IMPLEMENTATION_ROWS},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_document(), sort_keys=True, indent=2) + "\n"


def report_from_document(data: Mapping[str, Any]) -> FeasibilityReport:
    verdicts = {row: category_from_dict(v) for row, v in data["verdicts"].items()}
    return FeasibilityReport(
        scenario_id=data["scenario_id"],
        chain_id=data.get("chain_id"),
        verdicts=verdicts,
        completeness=completeness(verdicts),
        gate_log=tuple(GateLogEntry.from_dict(e) for e in data["gate_log"]),
        recommendations=tuple(Recommendation.from_dict(r) for r in data.get("recommendations", ())),
        boundary_units=tuple(DecisionUnit.from_dict(u) for u in data.get("units", ())),
        predicted_boundaries=tuple(data.get("predicted_boundaries", ())),
    )


def emit_report(
    scenario_id: str,
    chain_id: str | None,
    units: Sequence[DecisionUnit],
    verdicts: Mapping[str, SufficiencyCategory],
    gate_log: Sequence[GateLogEntry],
    recommendations: Sequence[Recommendation] = (),
    predicted: Sequence[int] = (),
) -> FeasibilityReport:
    """Close the gate log with Stage 6 and assemble the report.

    Every stage 0-5 must already have exactly one entry, in order.
    """
    stages = [e.stage for e in gate_log]
    if stages != list(range(6)):
        raise GateContractError(f"gate log stages {stages}, expected one entry for each of 0-5")
    log = tuple(gate_log) + (
        GateLogEntry(6, "report_emitted", f"{len(units)} units, chain {chain_id}"),
    )
    return FeasibilityReport(
        scenario_id=scenario_id,
        chain_id=chain_id,
        verdicts=verdicts,
        completeness=completeness(verdicts),
        gate_log=log,
        recommendations=tuple(recommendations),
        boundary_units=tuple(units),
        predicted_boundaries=tuple(predicted),
    )
