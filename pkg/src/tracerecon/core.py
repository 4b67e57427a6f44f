"""Shared vocabulary: property classes, sufficiency categories, regimes, fragment families.

Every other module consumes these types. All values are frozen after
construction so they can be shared freely between worker processes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Mapping, Union

# ---------------------------------------------------------------------------
# Property classes and the 8 -> 7 crosswalk
# ---------------------------------------------------------------------------

CANONICAL_CLASSES = (
    "actor_identity",
    "principal_authority",
    "action_boundary",
    "policy_basis",
    "decision_basis",
    "data_resource_touch",
    "lifecycle_context",
    "verification_strength",
)

IMPLEMENTATION_ROWS = (
    "inputs",
    "policy_basis",
    "actor_identity_principal_authority",
    "action_boundary_config_envelope",
    "reasoning_trace",
    "output_action",
    "post_condition_state",
)

CROSSWALK = MappingProxyType(
    {
        "actor_identity": "actor_identity_principal_authority",
        "principal_authority": "actor_identity_principal_authority",
        "action_boundary": "action_boundary_config_envelope",
        "policy_basis": "policy_basis",
        "decision_basis": "reasoning_trace",
        "data_resource_touch": "inputs",
        "lifecycle_context": "post_condition_state",
        "verification_strength": "output_action",
    }
)


def crosswalk(canonical: str) -> str:
    """Map a canonical property class onto its implementation row."""
    try:
        return CROSSWALK[canonical]
    except KeyError:
        raise ValueError(f"unknown canonical property class: {canonical!r}") from None


def as_row(name: str) -> str:
    """Accept either an implementation row or a canonical class name."""
    if name in IMPLEMENTATION_ROWS:
        return name
    return crosswalk(name)


@dataclass(frozen=True)
class PropertyClass:
    canonical_id: str
    implementation_row: str = ""

    def __post_init__(self) -> None:
        row = crosswalk(self.canonical_id)
        if self.implementation_row and self.implementation_row != row:
            raise ValueError(
                f"{self.canonical_id} maps to {row}, not {self.implementation_row}"
            )
        object.__setattr__(self, "implementation_row", row)


# ---------------------------------------------------------------------------
# Regimes, fragment families, matrix cells
# ---------------------------------------------------------------------------

PRODUCER_ROLES = (
    "agent_self",
    "platform_runtime",
    "transport_interceptor",
    "external_forensic",
    "human_narrative",
)
TEMPORAL_MODES = ("prospective", "contemporaneous", "retrospective")
COOPERATION = ("cooperative", "non_cooperative")
SCHEMA_COMMITMENTS = ("committed_schema", "free_form")


@dataclass(frozen=True)
class EvidenceRegimeCoordinate:
    producer_role: str
    temporal_mode: str
    cooperation: str
    schema_commitment: str

    def __post_init__(self) -> None:
        for name, allowed in (
            ("producer_role", PRODUCER_ROLES),
            ("temporal_mode", TEMPORAL_MODES),
            ("cooperation", COOPERATION),
            ("schema_commitment", SCHEMA_COMMITMENTS),
        ):
            value = getattr(self, name)
            if value not in allowed:
                raise ValueError(f"{name}={value!r} not in {allowed}")

    def to_dict(self) -> dict[str, str]:
        return {
            "cooperation": self.cooperation,
            "producer_role": self.producer_role,
            "schema_commitment": self.schema_commitment,
            "temporal_mode": self.temporal_mode,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, str]) -> "EvidenceRegimeCoordinate":
        return cls(
            producer_role=data["producer_role"],
            temporal_mode=data["temporal_mode"],
            cooperation=data["cooperation"],
            schema_commitment=data["schema_commitment"],
        )


FRAGMENT_FAMILIES = (
    "decision_event_log",
    "tool_call_payload",
    "policy_snapshot",
    "authorization_chain",
    "reasoning_placeholder",
    "post_condition_state",
)

ARCHITECTURES = ("single_agent", "multi_agent", "hitl", "non_agentic_baseline")
STACK_COVERAGE = ("within_stack", "cross_stack", "not_applicable")


@dataclass(frozen=True, order=True)
class MatrixCell:
    architecture: str
    stack_coverage: str

    def __post_init__(self) -> None:
        if self.architecture not in ARCHITECTURES:
            raise ValueError(f"unknown architecture {self.architecture!r}")
        if self.stack_coverage not in STACK_COVERAGE:
            raise ValueError(f"unknown stack coverage {self.stack_coverage!r}")
        baseline = self.architecture == "non_agentic_baseline"
        if baseline != (self.stack_coverage == "not_applicable"):
            raise ValueError(
                "non_agentic_baseline pairs only with not_applicable, "
                "agentic architectures only with within_stack/cross_stack"
            )

    @property
    def key(self) -> str:
        return f"{self.architecture}/{self.stack_coverage}"

    @property
    def is_baseline(self) -> bool:
        return self.architecture == "non_agentic_baseline"

    @classmethod
    def from_key(cls, key: str) -> "MatrixCell":
        architecture, _, coverage = key.partition("/")
        return cls(architecture, coverage)


AGENTIC_CELLS = tuple(
    MatrixCell(a, s)
    for a in ("single_agent", "multi_agent", "hitl")
    for s in ("within_stack", "cross_stack")
)
BASELINE_CELL = MatrixCell("non_agentic_baseline", "not_applicable")
ALL_CELLS = AGENTIC_CELLS + (BASELINE_CELL,)


# ---------------------------------------------------------------------------
# Sufficiency categories
# ---------------------------------------------------------------------------

CATEGORY_TAGS = (
    "fully_fillable",
    "partially_fillable",
    "structurally_unfillable",
    "opaque",
    "conflicting",
)
UNFILLABLE_REASONS = (
    "cross_stack_boundary",
    "state_lost",
    "never_persisted",
    "non_cooperative_stripping",
)
DEFAULT_PARTIAL_CONFIDENCE = 0.5

# unfillable < partial < full; opaque sits with full for scoring purposes
CATEGORY_RANK = MappingProxyType(
    {
        "structurally_unfillable": 0,
        "partially_fillable": 1,
        "fully_fillable": 2,
        "opaque": 2,
    }
)


class UnscoredCategoryError(ValueError):
    """Raised when a `conflicting` verdict reaches a scoring function."""

    code = "unscored_category"


def _freeze(value: Any) -> Any:
    if isinstance(value, Mapping):
        return MappingProxyType({k: _freeze(v) for k, v in value.items()})
    if isinstance(value, (list, tuple)):
        return tuple(_freeze(v) for v in value)
    return value


def thaw(value: Any) -> Any:
    """Turn frozen payloads back into plain JSON-compatible containers."""
    if isinstance(value, Mapping):
        return {k: thaw(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [thaw(v) for v in value]
    return value


@dataclass(frozen=True)
class AuthorizationEnvelope:
    """Substitute evidence for an opaque reasoning step."""

    inputs_available: tuple[str, ...] = ()
    constraints_active: tuple[str, ...] = ()
    outputs_possible: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        for name in ("inputs_available", "constraints_active", "outputs_possible"):
            object.__setattr__(self, name, tuple(getattr(self, name)))

    def to_dict(self) -> dict[str, list[str]]:
        return {
            "constraints_active": list(self.constraints_active),
            "inputs_available": list(self.inputs_available),
            "outputs_possible": list(self.outputs_possible),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "AuthorizationEnvelope":
        return cls(
            tuple(data.get("inputs_available", ())),
            tuple(data.get("constraints_active", ())),
            tuple(data.get("outputs_possible", ())),
        )


@dataclass(frozen=True)
class FullyFillable:
    value: Mapping[str, Any] = field(default_factory=dict)
    tag = "fully_fillable"

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", _freeze(self.value))

    def payload(self) -> dict[str, Any]:
        return {"value": thaw(self.value)}


@dataclass(frozen=True)
class PartiallyFillable:
    evidence: Mapping[str, Any]
    gap: str
    confidence: float = DEFAULT_PARTIAL_CONFIDENCE
    tag = "partially_fillable"

    def __post_init__(self) -> None:
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")
        if not self.gap:
            raise ValueError("partially_fillable requires a gap description")
        object.__setattr__(self, "evidence", _freeze(self.evidence))

    def payload(self) -> dict[str, Any]:
        return {
            "confidence": self.confidence,
            "evidence": thaw(self.evidence),
            "gap": self.gap,
        }


@dataclass(frozen=True)
class StructurallyUnfillable:
    reason: str
    note: str = ""
    tag = "structurally_unfillable"

    def __post_init__(self) -> None:
        if self.reason not in UNFILLABLE_REASONS:
            raise ValueError(f"unknown architectural reason {self.reason!r}")

    def payload(self) -> dict[str, Any]:
        return {"note": self.note, "reason": self.reason}


@dataclass(frozen=True)
class Opaque:
    envelope: AuthorizationEnvelope
    tag = "opaque"

    def __post_init__(self) -> None:
        if not isinstance(self.envelope, AuthorizationEnvelope):
            raise TypeError("opaque verdicts carry an AuthorizationEnvelope")

    def payload(self) -> dict[str, Any]:
        return {"envelope": self.envelope.to_dict()}


@dataclass(frozen=True)
class Conflicting:
    values: tuple[Any, ...]
    source_regimes: tuple[str, ...]
    resolution_policy: str | None = None  # placeholder, never auto-resolved
    tag = "conflicting"

    def __post_init__(self) -> None:
        if len(self.values) < 2:
            raise ValueError("conflicting needs at least two disagreeing values")
        object.__setattr__(self, "values", _freeze(self.values))
        object.__setattr__(self, "source_regimes", tuple(self.source_regimes))

    def payload(self) -> dict[str, Any]:
        return {
            "resolution_policy": self.resolution_policy,
            "source_regimes": list(self.source_regimes),
            "values": thaw(self.values),
        }


SufficiencyCategory = Union[
    FullyFillable, PartiallyFillable, StructurallyUnfillable, Opaque, Conflicting
]


def category_to_dict(category: SufficiencyCategory) -> dict[str, Any]:
    return {"payload": category.payload(), "tag": category.tag}


def category_from_dict(data: Mapping[str, Any]) -> SufficiencyCategory:
    tag, payload = data["tag"], data.get("payload", {})
    if tag == "fully_fillable":
        return FullyFillable(payload.get("value", {}))
    if tag == "partially_fillable":
        return PartiallyFillable(
            payload.get("evidence", {}), payload["gap"], payload["confidence"]
        )
    if tag == "structurally_unfillable":
        return StructurallyUnfillable(payload["reason"], payload.get("note", ""))
    if tag == "opaque":
        return Opaque(AuthorizationEnvelope.from_dict(payload["envelope"]))
    if tag == "conflicting":
        return Conflicting(
            tuple(payload["values"]),
            tuple(payload["source_regimes"]),
            payload.get("resolution_policy"),
        )
    raise ValueError(f"unknown category tag {tag!r}")


def weight(category: SufficiencyCategory) -> float:
    """Completeness weight of one verdict.

    ``conflicting`` has no executable weight and raises
    :class:`UnscoredCategoryError`; callers must exclude it or fail the chain.
    """
    if isinstance(category, (FullyFillable, Opaque)):
        return 1.0
    if isinstance(category, PartiallyFillable):
        return category.confidence
    if isinstance(category, StructurallyUnfillable):
        return 0.0
    if isinstance(category, Conflicting):
        raise UnscoredCategoryError("conflicting verdicts are not scored")
    raise TypeError(f"not a sufficiency category: {category!r}")
