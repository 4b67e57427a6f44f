"""Completeness, the output tensor, recommendations, maturity rating and the container comparator."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Iterable, Mapping, Sequence

from .core import (
    CATEGORY_TAGS,
    IMPLEMENTATION_ROWS,
    Conflicting,
    EvidenceRegimeCoordinate,
    FullyFillable,
    MatrixCell,
    Opaque,
    StructurallyUnfillable,
    SufficiencyCategory,
    UnscoredCategoryError,
    as_row,
    weight,
)

# ---------------------------------------------------------------------------
# Completeness
# ---------------------------------------------------------------------------


def completeness(verdicts: Mapping[str, SufficiencyCategory]) -> float:
    """Mean category weight over the seven implementation rows."""
    missing = set(IMPLEMENTATION_ROWS) - set(verdicts)
    if missing:
        raise ValueError(f"verdicts missing rows {sorted(missing)}")
    extra = set(verdicts) - set(IMPLEMENTATION_ROWS)
    if extra:
        raise ValueError(f"unknown rows {sorted(extra)}")
    return sum(weight(verdicts[row]) for row in IMPLEMENTATION_ROWS) / len(IMPLEMENTATION_ROWS)


# ---------------------------------------------------------------------------
# Recommendations
# ---------------------------------------------------------------------------

GAP_CLOSING = "gap_closing"
OPTIONAL_ENRICHMENT = "optional_enrichment"

EXECUTION_CONTRACT = "execution-contract or delegation records"
RUNTIME_FIREWALL = "runtime or firewall records"
TRACE_CONTEXT = "trace-context propagation across stacks"
FORENSIC = "forensic artefacts"
REASONING_ENRICHMENT = "reasoning-capture enrichment"

_ROW_ROUTES = MappingProxyType(
    {
        "policy_basis": EXECUTION_CONTRACT,
        "actor_identity_principal_authority": EXECUTION_CONTRACT,
        "action_boundary_config_envelope": EXECUTION_CONTRACT,
        "output_action": RUNTIME_FIREWALL,
        "post_condition_state": RUNTIME_FIREWALL,
        "inputs": RUNTIME_FIREWALL,
        "reasoning_trace": REASONING_ENRICHMENT,
    }
)


@dataclass(frozen=True)
class Recommendation:
    row: str
    kind: str
    recommended_regime: str

    def to_dict(self) -> dict[str, str]:
        return {"kind": self.kind, "recommended_regime": self.recommended_regime, "row": self.row}

    @classmethod
    def from_dict(cls, data: Mapping[str, str]) -> "Recommendation":
        return cls(data["row"], data["kind"], data["recommended_regime"])


def recommend(
    row: str,
    category: SufficiencyCategory,
    cell: MatrixCell | None = None,
    regime: EvidenceRegimeCoordinate | str = "cooperative",
) -> Recommendation:
    """Route one non-full verdict to the evidence regime that would close it.

    Precedence: opaque rows get optional enrichment; otherwise a
    non-cooperative source routes to forensic artefacts, a cross-stack
    reason routes to trace-context propagation, and the row decides the rest.
    """
    row = as_row(row)
    cooperation = regime.cooperation if isinstance(regime, EvidenceRegimeCoordinate) else regime
    if isinstance(category, FullyFillable):
        raise ValueError(f"{row} is fully fillable; nothing to recommend")
    if isinstance(category, Conflicting):
        raise UnscoredCategoryError("conflicting verdicts need a resolution policy first")
    if isinstance(category, Opaque):
        return Recommendation(row, OPTIONAL_ENRICHMENT, REASONING_ENRICHMENT)
    if cooperation == "non_cooperative":
        return Recommendation(row, GAP_CLOSING, FORENSIC)
    if isinstance(category, StructurallyUnfillable) and category.reason == "cross_stack_boundary":
        return Recommendation(row, GAP_CLOSING, TRACE_CONTEXT)
    return Recommendation(row, GAP_CLOSING, _ROW_ROUTES[row])


def recommendations_for(
    verdicts: Mapping[str, SufficiencyCategory],
    cell: MatrixCell | None = None,
    regime: EvidenceRegimeCoordinate | str = "cooperative",
) -> list[Recommendation]:
    return [
        recommend(row, verdicts[row], cell, regime)
        for row in IMPLEMENTATION_ROWS
        if not isinstance(verdicts[row], FullyFillable)
    ]


# ---------------------------------------------------------------------------
# Output tensor
# ---------------------------------------------------------------------------


@dataclass
class Tensor:
    """Counts keyed by (architecture, stack_coverage, regime_class, row, tag)."""

    cells: Counter = field(default_factory=Counter)

    def add(self, cell: MatrixCell, regime_class: str, verdicts: Mapping[str, SufficiencyCategory]) -> None:
        for row in IMPLEMENTATION_ROWS:
            key = (cell.architecture, cell.stack_coverage, regime_class, row, verdicts[row].tag)
            self.cells[key] += 1

    def row_tally(self, row: str, cell: MatrixCell | None = None) -> dict[str, int]:
        tally = {tag: 0 for tag in CATEGORY_TAGS}
        for (arch, cov, _, r, tag), n in self.cells.items():
            if r == row and (cell is None or (arch, cov) == (cell.architecture, cell.stack_coverage)):
                tally[tag] += n
        return tally

    def scenario_count(self, cell: MatrixCell, row: str = IMPLEMENTATION_ROWS[0]) -> int:
        return sum(self.row_tally(row, cell).values())

    def to_document(self) -> dict[str, Any]:
        entries = [
            {"architecture": a, "count": n, "regime_class": g, "row": r,
             "stack_coverage": s, "tag": t}
            for (a, s, g, r, t), n in sorted(self.cells.items())
        ]
        return {"cells": entries}


def build_tensor(records: Iterable[tuple[MatrixCell, str, Mapping[str, SufficiencyCategory]]]) -> Tensor:
    tensor = Tensor()
    for cell, regime_class, verdicts in records:
        tensor.add(cell, regime_class, verdicts)
    return tensor


# ---------------------------------------------------------------------------
# Maturity rubric
# ---------------------------------------------------------------------------

MATURITY_LEVELS = MappingProxyType(
    {
        1: "ad_hoc",
        2: "process_attested",
        3: "property_instrumented",
        4: "sufficiency_tested",
        5: "continuously_attested",
    }
)
EVIDENCE_CEILING = MappingProxyType(
    {
        "structurally_unfillable": 2,
        "conflicting": 2,  # disagreement is not a measurement; treat like a gap
        "partially_fillable": 3,
        "fully_fillable": 5,
        "opaque": 5,
    }
)
NO_EVIDENCE_CEILING = 1


@dataclass(frozen=True)
class DeclaredProcess:
    """Process-side facts the evidence cannot establish on its own.

    Rows without a declared level are not capped by process (level 5), so a
    bare rating reflects the evidence ceiling alone.
    """

    default_level: int = 5
    row_levels: Mapping[str, int] = field(default_factory=dict)
    attributes: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        levels = {as_row(k): int(v) for k, v in self.row_levels.items()}
        for v in list(levels.values()) + [self.default_level]:
            if v not in MATURITY_LEVELS:
                raise ValueError(f"maturity level {v} outside 1-5")
        object.__setattr__(self, "row_levels", MappingProxyType(levels))
        object.__setattr__(self, "attributes", MappingProxyType(dict(self.attributes)))

    def level(self, row: str) -> int:
        return self.row_levels.get(row, self.default_level)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "DeclaredProcess":
        return cls(
            int(data.get("default_level", 5)),
            dict(data.get("row_levels", {})),
            dict(data.get("attributes", {})),
        )


@dataclass(frozen=True)
class MaturityRating:
    per_row_level: Mapping[str, int]
    tested_rows: tuple[str, ...]
    aggregate_level: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "aggregate_level": self.aggregate_level,
            "aggregate_name": MATURITY_LEVELS[self.aggregate_level],
            "per_row_level": dict(sorted(self.per_row_level.items())),
            "tested_rows": list(self.tested_rows),
        }


def maturity_rate(
    history: Mapping[str, Sequence[SufficiencyCategory | str]],
    tested_rows: Iterable[str],
    declared: DeclaredProcess = DeclaredProcess(),
) -> MaturityRating:
    """Per-row level = min(evidence ceiling, declared level); aggregate = min over tested rows.

    The evidence ceiling of a row is set by the worst verdict in its history.
    A row with no history at all is capped at ad-hoc.
    """
    tested = tuple(dict.fromkeys(as_row(r) for r in tested_rows))
    if not tested:
        raise ValueError("tested_rows is empty; the aggregate level is undefined")
    rows = {as_row(r): list(v) for r, v in history.items()}
    per_row = {}
    for row in sorted(set(rows) | set(tested)):
        tags = [v if isinstance(v, str) else v.tag for v in rows.get(row, ())]
        ceiling = min((EVIDENCE_CEILING[t] for t in tags), default=NO_EVIDENCE_CEILING)
        per_row[row] = min(ceiling, declared.level(row))
    return MaturityRating(
        MappingProxyType(per_row), tested, min(per_row[r] for r in tested)
    )


# ---------------------------------------------------------------------------
# Container-presence comparator
# ---------------------------------------------------------------------------

QUALITATIVE_ONLY = "qualitative_only"
CONTAINER_ROWS = MappingProxyType(
    {
        "aer": "actor_identity_principal_authority",
        "provenance_graph": "policy_basis",
        "lifecycle_trail": "output_action",
        "dcc_hdp": "output_action",
        "iet_text": "post_condition_state",
        "aegis_firewall": "post_condition_state",
        "openclaw": None,
    }
)
CONTAINERS = tuple(CONTAINER_ROWS)


def container_baseline(
    container_flags: Sequence[Mapping[str, bool]],
    tallies: Mapping[str, Mapping[str, int]],
    containers: Iterable[str] = CONTAINERS,
) -> dict[str, float | str]:
    """Strict overclaim per container: presence% minus fully-fillable% of its tested row.

    ``container_flags`` holds one mapping per scenario (container -> present
    and well formed); ``tallies`` maps row -> tag -> count over the same
    scenarios. Values are percentage points at one decimal.
    """
    if not container_flags:
        raise ValueError("no scenarios to compare")
    out: dict[str, float | str] = {}
    for container in containers:
        if container not in CONTAINER_ROWS:
            raise ValueError(f"unknown container {container!r}")
        row = CONTAINER_ROWS[container]
        if row is None:
            out[container] = QUALITATIVE_ONLY
            continue
        present = sum(1 for flags in container_flags if flags.get(container, False))
        presence = 100.0 * present / len(container_flags)
        tally = tallies[row]
        total = sum(tally.values())
        if total != len(container_flags):
            raise ValueError(f"{row}: tallies cover {total} scenarios, flags cover {len(container_flags)}")
        full = 100.0 * tally.get("fully_fillable", 0) / total
        out[container] = round(round(presence, 1) - round(full, 1), 1)
    return out
