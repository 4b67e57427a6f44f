"""Stage 5: map a chain's fragments onto the seven implementation rows.

Each row has one pinned rule. Reasoning is never reconstructed: it is always
``opaque`` and carries an authorization envelope built from what the
evidence does show (available inputs, active constraints, permitted tools).
"""

from __future__ import annotations

from typing import Any, Iterable, Mapping, Sequence

from ..adapters import CAN_FILL, CANNOT_FILL, FILL_LEVELS, Fragment
from ..core import (
    DEFAULT_PARTIAL_CONFIDENCE,
    IMPLEMENTATION_ROWS,
    AuthorizationEnvelope,
    FullyFillable,
    Opaque,
    PartiallyFillable,
    StructurallyUnfillable,
    SufficiencyCategory,
)
from .boundaries import is_invocation

ACTOR_ROW = "actor_identity_principal_authority"
BOUNDARY_ROW = "action_boundary_config_envelope"
ORDER_SENSITIVE_ROWS = ("inputs", "post_condition_state")


def _present(value: Any) -> bool:
    return value not in (None, "", {}, [], ())


def _fraction(part: int, whole: int) -> float:
    return round(part / whole, 6)


class _Evidence:
    """Indexes over one chain's well-formed fragments."""

    def __init__(self, fragments: Sequence[Fragment]):
        self.all = list(fragments)
        good = [f for f in fragments if f.well_formed]
        self.by_id = {f.fragment_id: f for f in good}
        self.calls = [f for f in good if is_invocation(f, self.by_id)]
        call_ids = {c.fragment_id for c in self.calls}

        # completion records: same-tool tool payloads hanging off an invocation
        self.completions: dict[str, list[Fragment]] = {c: [] for c in call_ids}
        for f in good:
            if f.family == "tool_call_payload" and f.fragment_id not in call_ids:
                for p in f.causal_parents:
                    if p in self.completions:
                        self.completions[p].append(f)

        self.snapshots = [f for f in good if f.family == "policy_snapshot"]
        self.auth = [f for f in good if f.family == "authorization_chain"]
        self.events = [f for f in good if f.family == "decision_event_log"]
        self.states = [f for f in good if f.family == "post_condition_state"]
        self.malformed_calls = [
            f for f in fragments if f.family == "tool_call_payload" and not f.well_formed
        ]
        self.stack_exit = any(
            isinstance(e.payload.get("detail"), Mapping) and e.payload["detail"].get("stack_exit")
            for e in self.events
        )
        self.non_cooperative = any(f.regime.cooperation == "non_cooperative" for f in good)
        self.embedded_policy = any(
            isinstance(e.payload.get("detail"), Mapping) and "policy_text" in e.payload["detail"]
            for e in self.events
        )
        acting = [f.ts for f in good if f.family in ("tool_call_payload", "decision_event_log")]
        stamps = [t for t in acting if t is not None]
        self.start_ts = min(stamps) if stamps else None

    def field(self, call: Fragment, key: str) -> Any:
        if _present(call.payload.get(key)):
            return call.payload[key]
        for done in self.completions[call.fragment_id]:
            if _present(done.payload.get(key)):
                return done.payload[key]
        return None

    def missing_reason(self) -> str:
        if self.stack_exit:
            return "cross_stack_boundary"
        if self.non_cooperative:
            return "non_cooperative_stripping"
        return "state_lost"


def _inputs(ev: _Evidence) -> SufficiencyCategory:
    n = len(ev.calls)
    if n == 0:
        return StructurallyUnfillable("never_persisted", "no tool invocations recorded")
    have = [c.fragment_id for c in ev.calls if _present(ev.field(c, "inputs"))]
    if len(have) == n:
        return FullyFillable({"fragment_ids": have})
    if not have:
        return StructurallyUnfillable(ev.missing_reason(), "no invocation carries its inputs")
    return PartiallyFillable(
        {"fragment_ids": have},
        f"{n - len(have)} of {n} invocations lack input payloads",
        _fraction(len(have), n),
    )


def _policy_basis(ev: _Evidence) -> SufficiencyCategory:
    in_force = [
        s for s in ev.snapshots
        if s.payload.get("valid_from_ts") is None
        or ev.start_ts is None
        or s.payload["valid_from_ts"] <= ev.start_ts
    ]
    if in_force:
        return FullyFillable({
            "fragment_ids": [s.fragment_id for s in in_force],
            "policy_ids": sorted({str(s.payload.get("policy_id")) for s in in_force}),
        })
    notes = []
    if ev.snapshots:
        notes.append("snapshot recorded only after the decision started")
    if ev.embedded_policy:
        notes.append("policy text embedded in event detail, not persisted as a snapshot")
    reason = "cross_stack_boundary" if ev.stack_exit else "never_persisted"
    return StructurallyUnfillable(reason, "; ".join(notes) or "no policy snapshot in force")


def _ambiguous_actors(ev: _Evidence) -> set[str]:
    approvers = {
        e.actor_id for e in ev.events if e.payload.get("kind") == "human_approval" and e.actor_id
    }
    return approvers & {c.actor_id for c in ev.calls if c.actor_id}


def _actor(ev: _Evidence) -> SufficiencyCategory:
    links = [link for a in ev.auth for link in a.payload.get("links", ())]
    session = any(f.principal_id for f in ev.by_id.values())
    ambiguous = _ambiguous_actors(ev)

    def covered(call: Fragment) -> bool:
        if call.actor_id is None or call.actor_id in ambiguous:
            return False
        tool = call.payload.get("tool")
        return any(
            link.get("to") == call.actor_id and link.get("scope") in (None, "*", tool)
            for link in links
        )

    n = len(ev.calls)
    hits = [c.fragment_id for c in ev.calls if covered(c)]
    coverage = len(hits) / n if n else 0.0
    if n and len(hits) == n:
        principals = {link.get("from") for link in links if link.get("from")}
        principals.update(f.principal_id for f in ev.by_id.values() if f.principal_id)
        return FullyFillable({
            "actors": sorted({c.actor_id for c in ev.calls}),
            "principals": sorted(principals),
        })
    if session or hits:
        gaps = []
        if ambiguous:
            gaps.append(f"actor ids shared by approver and agent: {sorted(ambiguous)}")
        gaps.append(f"{n - len(hits)} of {n} steps lack a step-level delegation link")
        return PartiallyFillable(
            {"covered_steps": hits, "session_principal": session},
            "; ".join(gaps),
            round(0.5 * session + 0.5 * coverage, 6),
        )
    reason = "cross_stack_boundary" if ev.stack_exit else "never_persisted"
    return StructurallyUnfillable(reason, "no delegation links and no session principal")


def _scopes(ev: _Evidence) -> list[str]:
    """Snapshot scopes, delegated link scopes and any recorded tool-permission set."""
    scopes = {str(s) for snap in ev.snapshots for s in snap.payload.get("scopes", ())}
    for e in ev.events:
        detail = e.payload.get("detail")
        if isinstance(detail, Mapping):
            scopes.update(str(t) for t in detail.get("permissions", ()))
    for a in ev.auth:
        for link in a.payload.get("links", ()):
            if link.get("scope") is not None:
                scopes.add(str(link["scope"]))
    return sorted(scopes)


def _action_boundary(ev: _Evidence) -> SufficiencyCategory:
    scopes = _scopes(ev)
    if scopes:
        return FullyFillable({"scopes": scopes})
    reason = "cross_stack_boundary" if ev.stack_exit else "never_persisted"
    return StructurallyUnfillable(reason, "no scope or permission set recorded")


def _reasoning(ev: _Evidence) -> SufficiencyCategory:
    inputs = [
        c.fragment_id for c in ev.calls
        if _present(ev.field(c, "inputs")) or _present(ev.field(c, "result"))
    ]
    constraints = [f"policy:{s.payload.get('policy_id')}" for s in ev.snapshots]
    constraints += [
        f"constraint:{e.fragment_id}" for e in ev.events
        if e.payload.get("kind") == "constraint_fired"
    ]
    scopes = _scopes(ev)
    constraints += [f"scope:{s}" for s in scopes]
    return Opaque(AuthorizationEnvelope(tuple(inputs), tuple(constraints), tuple(scopes)))


def _output(ev: _Evidence) -> SufficiencyCategory:
    n = len(ev.calls)
    if n == 0:
        return StructurallyUnfillable("never_persisted", "no tool invocations recorded")
    have = [c.fragment_id for c in ev.calls if _present(ev.field(c, "result"))]
    if len(have) == n:
        return FullyFillable({"fragment_ids": have})
    note = ""
    if ev.malformed_calls:
        note = f"{len(ev.malformed_calls)} result records under a mismatched schema"
    if not have:
        return StructurallyUnfillable(ev.missing_reason(), note or "results not recorded")
    return PartiallyFillable(
        {"fragment_ids": have},
        f"{n - len(have)} of {n} invocations lack results",
        _fraction(len(have), n),
    )


def _post_condition(ev: _Evidence) -> SufficiencyCategory:
    n = len(ev.calls)
    if n == 0:
        if ev.states:
            return FullyFillable({"fragment_ids": [s.fragment_id for s in ev.states]})
        return StructurallyUnfillable("never_persisted", "no state record and no invocation")
    observed, inferred = [], []
    for c in ev.calls:
        lineage = {c.fragment_id} | {d.fragment_id for d in ev.completions[c.fragment_id]}
        # a state belongs to the step it hangs directly off; every later state
        # descends from every earlier call in a linear trace, so depth is no signal
        if any(lineage & set(s.causal_parents) for s in ev.states):
            observed.append(c.fragment_id)
        elif _present(ev.field(c, "result")):
            inferred.append(c.fragment_id)
    if len(observed) == n:
        return FullyFillable({"covered_steps": observed})
    score = len(observed) + 0.5 * len(inferred)
    if score == 0:
        return StructurallyUnfillable(ev.missing_reason(), "no state record and no result to infer from")
    return PartiallyFillable(
        {"observed_steps": observed, "inferred_from_results": inferred},
        f"{n - len(observed)} of {n} steps lack a recorded post-condition",
        round(score / n, 6),
    )


_RULES = {
    "inputs": _inputs,
    "policy_basis": _policy_basis,
    ACTOR_ROW: _actor,
    BOUNDARY_ROW: _action_boundary,
    "reasoning_trace": _reasoning,
    "output_action": _output,
    "post_condition_state": _post_condition,
}


def _apply_mask(row: str, verdict: SufficiencyCategory, level: str) -> SufficiencyCategory:
    if row == "reasoning_trace" or level == CAN_FILL:
        return verdict
    if level == CANNOT_FILL:
        if isinstance(verdict, StructurallyUnfillable):
            return verdict
        return StructurallyUnfillable("never_persisted", "regime declares this row unfillable")
    if isinstance(verdict, FullyFillable):
        return PartiallyFillable(
            verdict.value, "regime declares only partial fillability", DEFAULT_PARTIAL_CONFIDENCE
        )
    return verdict


def _degrade_for_order(verdict: SufficiencyCategory, confidence: float) -> SufficiencyCategory:
    if isinstance(verdict, FullyFillable):
        return PartiallyFillable(verdict.value, "fragment order resolved only by tie-break", confidence)
    if isinstance(verdict, PartiallyFillable) and verdict.confidence > confidence:
        return PartiallyFillable(verdict.evidence, verdict.gap, confidence)
    return verdict


def map_to_schema(
    fragments: Sequence[Fragment],
    masks: Iterable[Mapping[str, str]] = (),
    *,
    order_confidence: float = 1.0,
    order_threshold: float = 1.0,
) -> dict[str, SufficiencyCategory]:
    """Row verdicts for one chain; never raises on sparse evidence."""
    ev = _Evidence(fragments)
    masks = list(masks)
    verdicts = {}
    for row in IMPLEMENTATION_ROWS:
        verdict = _RULES[row](ev)
        if masks:
            level = max((m[row] for m in masks), key=FILL_LEVELS.index)
            verdict = _apply_mask(row, verdict, level)
        if row in ORDER_SENSITIVE_ROWS and order_confidence < order_threshold:
            verdict = _degrade_for_order(verdict, order_confidence)
        verdicts[row] = verdict
    return verdicts


def all_unfillable(note: str, reason: str = "never_persisted") -> dict[str, SufficiencyCategory]:
    """Verdicts for a chain that never reached the mapper, reasoning included."""
    return {row: StructurallyUnfillable(reason, note) for row in IMPLEMENTATION_ROWS}
