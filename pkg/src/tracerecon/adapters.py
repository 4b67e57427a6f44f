"""Stage 0: normalize regime-native records into a typed fragment stream.

Three inputs are executable: the canonical line-delimited fragment format
(``generic_jsonl``), synthetic suites (generic_jsonl plus a manifest, see
:mod:`tracerecon.synthgen`), and structured postmortem summaries
(``postmortem_prose``). The other seven regime classes are registered as
descriptors only; asking to normalize them raises :class:`RegimeUnsupported`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from types import MappingProxyType
from typing import Any, Iterable, Mapping, Sequence

from .core import (
    FRAGMENT_FAMILIES,
    IMPLEMENTATION_ROWS,
    EvidenceRegimeCoordinate,
    _freeze,
    thaw,
)

CAN_FILL = "can_fill"
CAN_PARTIALLY_FILL = "can_partially_fill"
CANNOT_FILL = "cannot_fill"
FILL_LEVELS = (CANNOT_FILL, CAN_PARTIALLY_FILL, CAN_FILL)

WIRE_KEYS = frozenset(
    {
        "fragment_id",
        "scenario_id",
        "family",
        "ts",
        "parents",
        "actor_id",
        "principal_id",
        "regime",
        "payload",
        "well_formed",
    }
)
REQUIRED_WIRE_KEYS = frozenset(
    {"fragment_id", "scenario_id", "family", "parents", "regime", "payload"}
)
PAYLOAD_KEYS = MappingProxyType(
    {
        "tool_call_payload": frozenset({"tool", "inputs", "result"}),
        "policy_snapshot": frozenset({"policy_id", "scopes", "valid_from_ts"}),
        "authorization_chain": frozenset({"links"}),
        "decision_event_log": frozenset({"kind", "detail"}),
        "reasoning_placeholder": frozenset({"model_id"}),
        "post_condition_state": frozenset({"resource", "delta_magnitude"}),
    }
)
EVENT_KINDS = ("step", "human_approval", "constraint_fired")


class RegimeUnsupported(Exception):
    """No executable adapter is declared for the source regime class."""

    code = "regime_unsupported"


@dataclass(frozen=True)
class Fragment:
    # ts is an integer logical tick; calendar sources convert to epoch ticks
    # in their adapter so one scenario never mixes timestamp kinds
    fragment_id: str
    scenario_id: str
    family: str
    regime: EvidenceRegimeCoordinate
    payload: Mapping[str, Any] = field(default_factory=dict)
    ts: int | None = None
    causal_parents: tuple[str, ...] = ()
    actor_id: str | None = None
    principal_id: str | None = None
    well_formed: bool = True

    def __post_init__(self) -> None:
        if self.family not in FRAGMENT_FAMILIES:
            raise ValueError(f"unknown fragment family {self.family!r}")
        object.__setattr__(self, "causal_parents", tuple(self.causal_parents))
        object.__setattr__(self, "payload", _freeze(self.payload))

    def to_record(self) -> dict[str, Any]:
        record: dict[str, Any] = {
            "family": self.family,
            "fragment_id": self.fragment_id,
            "parents": list(self.causal_parents),
            "payload": thaw(self.payload),
            "regime": self.regime.to_dict(),
            "scenario_id": self.scenario_id,
            "well_formed": self.well_formed,
        }
        if self.ts is not None:
            record["ts"] = self.ts
        if self.actor_id is not None:
            record["actor_id"] = self.actor_id
        if self.principal_id is not None:
            record["principal_id"] = self.principal_id
        return record

    def to_line(self) -> str:
        return json.dumps(self.to_record(), sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class AdapterDescriptor:
    regime_class: str
    fragment_family_mapping: Mapping[str, str]
    fillability_mask: Mapping[str, str]
    regime: EvidenceRegimeCoordinate
    executable: bool = False
    fallback_family: str = "decision_event_log"

    def __post_init__(self) -> None:
        missing = set(IMPLEMENTATION_ROWS) - set(self.fillability_mask)
        if missing:
            raise ValueError(f"{self.regime_class}: mask misses rows {sorted(missing)}")
        bad = {v for v in self.fillability_mask.values() if v not in FILL_LEVELS}
        if bad:
            raise ValueError(f"{self.regime_class}: bad mask levels {bad}")
        for family in self.fragment_family_mapping.values():
            if family not in FRAGMENT_FAMILIES:
                raise ValueError(f"{self.regime_class}: unknown family {family}")
        object.__setattr__(
            self, "fragment_family_mapping", MappingProxyType(dict(self.fragment_family_mapping))
        )
        object.__setattr__(self, "fillability_mask", MappingProxyType(dict(self.fillability_mask)))


# ---------------------------------------------------------------------------
# Descriptor registry
# ---------------------------------------------------------------------------

def _mask(**rows: str) -> dict[str, str]:
    # rows the source literature is silent on get the least-commitment default
    mask = {row: CAN_PARTIALLY_FILL for row in IMPLEMENTATION_ROWS}
    mask.update(rows)
    return mask


_IDENTITY = {family: family for family in FRAGMENT_FAMILIES}
_ACTOR = "actor_identity_principal_authority"
_BOUNDARY = "action_boundary_config_envelope"

_DESCRIPTORS = (
    AdapterDescriptor(
        "ieec",
        {"execution_contract": "authorization_chain", "contract_step": "decision_event_log",
         "tool_invocation": "tool_call_payload"},
        _mask(**{_ACTOR: CAN_FILL, _BOUNDARY: CAN_FILL}),
        EvidenceRegimeCoordinate("platform_runtime", "prospective", "cooperative", "committed_schema"),
    ),
    AdapterDescriptor(
        "dcc_hdp",
        {"delegation_token": "authorization_chain", "token_presentation": "decision_event_log"},
        _mask(**{_ACTOR: CAN_FILL, "post_condition_state": CANNOT_FILL}),
        EvidenceRegimeCoordinate("platform_runtime", "prospective", "cooperative", "committed_schema"),
    ),
    AdapterDescriptor(
        "aer",
        {"reasoning_record": "reasoning_placeholder", "intercepted_call": "tool_call_payload"},
        _mask(reasoning_trace=CAN_FILL, **{_ACTOR: CANNOT_FILL}),
        EvidenceRegimeCoordinate(
            "transport_interceptor", "contemporaneous", "cooperative", "committed_schema"
        ),
    ),
    AdapterDescriptor(
        "tba_mat",
        {"mat_claim": "decision_event_log", "mat_evidence": "tool_call_payload",
         "mat_constraint": "policy_snapshot"},
        _mask(),
        EvidenceRegimeCoordinate("platform_runtime", "prospective", "cooperative", "committed_schema"),
    ),
    AdapterDescriptor(
        "springdrift_dag",
        {"dag_node": "decision_event_log", "dag_tool": "tool_call_payload",
         "dag_effect": "post_condition_state"},
        _mask(),
        EvidenceRegimeCoordinate(
            "platform_runtime", "contemporaneous", "cooperative", "committed_schema"
        ),
    ),
    AdapterDescriptor(
        "lang_audit",
        {"uicr_event": "decision_event_log", "mcp_call": "tool_call_payload"},
        _mask(),
        EvidenceRegimeCoordinate(
            "transport_interceptor", "contemporaneous", "cooperative", "committed_schema"
        ),
    ),
    AdapterDescriptor(
        "aegis_ntc_firewall",
        {"firewall_decision": "decision_event_log", "firewall_rule": "policy_snapshot",
         "mediated_call": "tool_call_payload"},
        _mask(**{_BOUNDARY: CAN_FILL, "post_condition_state": CANNOT_FILL}),
        EvidenceRegimeCoordinate(
            "transport_interceptor", "contemporaneous", "cooperative", "committed_schema"
        ),
    ),
    AdapterDescriptor(
        "openclaw_artifact",
        {"recovered_artifact": "post_condition_state", "recovered_log_line": "decision_event_log"},
        _mask(),
        EvidenceRegimeCoordinate(
            "external_forensic", "retrospective", "non_cooperative", "free_form"
        ),
    ),
    AdapterDescriptor(
        "postmortem_prose",
        {"session": "decision_event_log", "approval": "decision_event_log",
         "constraint": "decision_event_log", "delegation": "authorization_chain",
         "action": "tool_call_payload", "state": "post_condition_state",
         "policy": "policy_snapshot", "model": "reasoning_placeholder"},
        _mask(**{_ACTOR: CAN_FILL, "output_action": CAN_FILL, "reasoning_trace": CAN_FILL}),
        EvidenceRegimeCoordinate("human_narrative", "retrospective", "non_cooperative", "free_form"),
        executable=True,
    ),
    AdapterDescriptor(
        "generic_jsonl",
        _IDENTITY,
        {row: CAN_FILL for row in IMPLEMENTATION_ROWS},
        EvidenceRegimeCoordinate(
            "platform_runtime", "contemporaneous", "cooperative", "committed_schema"
        ),
        executable=True,
    ),
)

REGISTRY: Mapping[str, AdapterDescriptor] = MappingProxyType(
    {d.regime_class: d for d in _DESCRIPTORS}
)
REGIME_CLASSES = tuple(REGISTRY)


def get_descriptor(regime_class: str) -> AdapterDescriptor:
    try:
        return REGISTRY[regime_class]
    except KeyError:
        raise RegimeUnsupported(f"no adapter declared for {regime_class!r}") from None


def declared_fillability(regime_class: str) -> Mapping[str, str]:
    """Pinned per-row fillability mask for one of the ten regime classes."""
    return get_descriptor(regime_class).fillability_mask


# ---------------------------------------------------------------------------
# normalize
# ---------------------------------------------------------------------------

def normalize(
    source_records: Sequence[Any], descriptor: AdapterDescriptor | str
) -> list[Fragment]:
    """Normalize records in source order; malformed records are kept, flagged."""
    if isinstance(descriptor, str):
        descriptor = get_descriptor(descriptor)
    if not descriptor.executable:
        raise RegimeUnsupported(
            f"{descriptor.regime_class} ships as a descriptor table only"
        )
    if descriptor.regime_class == "generic_jsonl":
        if source_records and not any(_parses(r) for r in source_records):
            # nothing is even a record: the source is not in this regime at all
            raise RegimeUnsupported("no record parses as a generic_jsonl object")
        fragments = [_from_wire(r, i, descriptor) for i, r in enumerate(source_records)]
    elif descriptor.regime_class == "postmortem_prose":
        fragments = _from_postmortem(source_records, descriptor)
    else:  # pragma: no cover - registry and dispatch are kept in step
        raise RegimeUnsupported(descriptor.regime_class)
    return _check_references(fragments)


def _payload_ok(family: str, payload: Any) -> bool:
    if not isinstance(payload, Mapping) or set(payload) != PAYLOAD_KEYS[family]:
        return False
    if family == "policy_snapshot":
        return isinstance(payload["scopes"], list)
    if family == "authorization_chain":
        links = payload["links"]
        return isinstance(links, list) and all(
            isinstance(l, Mapping) and set(l) == {"from", "to", "scope"} for l in links
        )
    if family == "decision_event_log":
        return payload["kind"] in EVENT_KINDS
    if family == "post_condition_state":
        delta = payload["delta_magnitude"]
        return isinstance(delta, (int, float)) and not isinstance(delta, bool) and delta >= 0
    return True


def _parses(raw: Any) -> bool:
    if isinstance(raw, Mapping):
        return True
    if isinstance(raw, (str, bytes)):
        try:
            return isinstance(json.loads(raw), Mapping)
        except json.JSONDecodeError:
            return False
    return False


def _from_wire(raw: Any, index: int, descriptor: AdapterDescriptor) -> Fragment:
    ok = True
    record: Any = raw
    if isinstance(raw, (str, bytes)):
        try:
            record = json.loads(raw)
        except json.JSONDecodeError:
            record = None
    if not isinstance(record, Mapping):
        return Fragment(
            fragment_id=f"unparsed-{index}",
            scenario_id="",
            family=descriptor.fallback_family,
            regime=descriptor.regime,
            payload={"raw": str(raw)[:200]},
            well_formed=False,
        )
    keys = set(record)
    if keys - WIRE_KEYS or REQUIRED_WIRE_KEYS - keys:
        ok = False

    family = descriptor.fragment_family_mapping.get(record.get("family"))
    if family is None:
        family, ok = descriptor.fallback_family, False

    try:
        regime = EvidenceRegimeCoordinate.from_dict(record["regime"])
    except (KeyError, TypeError, ValueError):
        regime, ok = descriptor.regime, False

    payload = record.get("payload", {})
    if not _payload_ok(family, payload):
        ok = False
        payload = payload if isinstance(payload, Mapping) else {"raw": payload}

    ts = record.get("ts")
    if ts is not None and (isinstance(ts, bool) or not isinstance(ts, int) or ts < 0):
        ts, ok = None, False

    parents = record.get("parents", [])
    if not isinstance(parents, list) or not all(isinstance(p, str) for p in parents):
        parents, ok = [], False

    return Fragment(
        fragment_id=str(record.get("fragment_id", f"unidentified-{index}")),
        scenario_id=str(record.get("scenario_id", "")),
        family=family,
        regime=regime,
        payload=payload,
        ts=ts,
        causal_parents=tuple(parents),
        actor_id=record.get("actor_id"),
        principal_id=record.get("principal_id"),
        well_formed=ok and bool(record.get("well_formed", True)),
    )


def _check_references(fragments: list[Fragment]) -> list[Fragment]:
    ids: dict[str, int] = {}
    for f in fragments:
        ids[f.fragment_id] = ids.get(f.fragment_id, 0) + 1
    out = []
    for f in fragments:
        dangling = any(p not in ids for p in f.causal_parents)
        duplicate = ids[f.fragment_id] > 1
        if f.well_formed and (dangling or duplicate):
            f = replace(f, well_formed=False)
        out.append(f)
    return out


def _from_postmortem(
    records: Sequence[Mapping[str, Any]], descriptor: AdapterDescriptor
) -> list[Fragment]:
    """Structured postmortem summaries: one record per documented event.

    Records carry ``kind`` and ``seq``; ``seq`` becomes a logical tick and the
    narrative order becomes the causal chain unless ``after`` names a parent.
    """
    fragments = []
    previous: str | None = None
    for index, record in enumerate(records):
        incident = record.get("incident_id", "incident")
        seq = record.get("seq", index)
        fragment_id = f"{incident}:{seq}"
        kind = record.get("kind")
        family = descriptor.fragment_family_mapping.get(kind)
        ok = family is not None
        family = family or descriptor.fallback_family
        if "after" in record:
            parents = tuple(f"{incident}:{s}" for s in record["after"])
        else:
            parents = (previous,) if previous else ()

        if kind in ("session", "approval", "constraint"):
            event_kind = {"session": "step", "approval": "human_approval",
                          "constraint": "constraint_fired"}[kind]
            payload = {"kind": event_kind, "detail": record.get("detail", "")}
        elif kind == "delegation":
            payload = {"links": [
                {"from": record.get("from"), "to": record.get("to"), "scope": record.get("scope")}
            ]}
        elif kind == "action":
            payload = {"tool": record.get("tool"), "inputs": record.get("inputs"),
                       "result": record.get("result")}
        elif kind == "state":
            payload = {"resource": record.get("resource"),
                       "delta_magnitude": record.get("delta_magnitude", 0.0)}
        elif kind == "policy":
            payload = {"policy_id": record.get("policy_id"), "scopes": record.get("scopes", []),
                       "valid_from_ts": record.get("valid_from", seq)}
        elif kind == "model":
            payload = {"model_id": record.get("model_id")}
        else:
            payload = {"raw": thaw(record)}
        ok = ok and _payload_ok(family, payload)

        fragments.append(
            Fragment(
                fragment_id=fragment_id,
                scenario_id=incident,
                family=family,
                regime=descriptor.regime,
                payload=payload,
                ts=seq if isinstance(seq, int) else None,
                causal_parents=parents,
                actor_id=record.get("actor"),
                principal_id=record.get("principal"),
                well_formed=ok,
            )
        )
        previous = fragment_id
    return fragments


# ---------------------------------------------------------------------------
# Line-delimited I/O
# ---------------------------------------------------------------------------

def read_jsonl(path: str | Path) -> list[str]:
    """Raw non-empty lines; parsing happens in :func:`normalize`."""
    text = Path(path).read_text(encoding="utf-8")
    return [line for line in text.splitlines() if line.strip()]


def write_jsonl(path: str | Path, fragments: Iterable[Fragment]) -> None:
    lines = [f.to_line() for f in fragments]
    Path(path).write_text("".join(line + "\n" for line in lines), encoding="utf-8")
