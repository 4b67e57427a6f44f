"""The seven operational failure modes and their fragment-level injections."""

from __future__ import annotations

from dataclasses import dataclass, replace
from types import MappingProxyType
from typing import Collection, Sequence

from ..adapters import Fragment
from ..core import MatrixCell

DIFFUSION = "decision_diffusion"
FRAGMENTATION = "evidence_fragmentation"
AMBIGUITY = "responsibility_ambiguity"
BREAK_GROUPS = (DIFFUSION, FRAGMENTATION, AMBIGUITY)


@dataclass(frozen=True)
class FailureMode:
    id: int
    name: str
    break_group: str


FAILURE_MODES = MappingProxyType(
    {
        1: FailureMode(1, "prompt_context_loss", DIFFUSION),
        2: FailureMode(2, "delegation_chain_fragmentation", DIFFUSION),
        3: FailureMode(3, "channel_gap", FRAGMENTATION),
        4: FailureMode(4, "schema_mismatch", FRAGMENTATION),
        5: FailureMode(5, "policy_snapshot_absence", DIFFUSION),
        6: FailureMode(6, "implicit_policy_coupling", DIFFUSION),
        7: FailureMode(7, "authorship_ambiguity", AMBIGUITY),
    }
)

POLICY_TEXT = "Agents may call only the tools listed in the approved manifest."


class InapplicableMode(ValueError):
    """The mode cannot occur in the scenario's matrix cell."""


def check_applicable(mode: int, cell: MatrixCell) -> None:
    if mode not in FAILURE_MODES:
        raise InapplicableMode(f"unknown mode {mode}")
    if cell.is_baseline:
        raise InapplicableMode("the non-agentic baseline takes no injected failures")
    if mode == 3 and cell.stack_coverage != "cross_stack":
        raise InapplicableMode("a channel gap needs a stack boundary")
    if mode == 7 and cell.architecture != "hitl":
        raise InapplicableMode("authorship ambiguity needs a human approver")


def remove_fragments(fragments: Sequence[Fragment], drop: Collection[str]) -> list[Fragment]:
    """Delete fragments and re-point their children at the deleted fragments' parents."""
    drop = set(drop)
    by_id = {f.fragment_id: f for f in fragments}

    def surviving_parents(parents: Sequence[str], seen: frozenset = frozenset()) -> list[str]:
        out: list[str] = []
        for p in parents:
            if p in drop and p not in seen and p in by_id:
                out.extend(surviving_parents(by_id[p].causal_parents, seen | {p}))
            elif p not in drop:
                out.append(p)
        return list(dict.fromkeys(out))

    return [
        replace(f, causal_parents=tuple(surviving_parents(f.causal_parents)))
        for f in fragments
        if f.fragment_id not in drop
    ]


def _payload(f: Fragment, **changes) -> Fragment:
    payload = {k: v for k, v in f.payload.items()}
    payload.update(changes)
    return replace(f, payload=payload)


def inject_mode(
    fragments: Sequence[Fragment],
    mode: int,
    cell: MatrixCell,
    targets: Collection[str] | None = None,
    *,
    boundary: int | None = None,
) -> list[Fragment]:
    """Degrade a fragment list (given in causal order) under one failure mode.

    ``targets`` narrows the injection to specific fragment ids (tool calls for
    modes 1, 4 and 7; link scopes for mode 2). ``boundary`` is the
    stack-boundary position for mode 3.
    """
    check_applicable(mode, cell)
    frs = list(fragments)

    def hit(f: Fragment) -> bool:
        return targets is None or f.fragment_id in targets

    if mode == 1:
        # strip inputs at the invocation and on any completion record of it
        chosen = {f.fragment_id: f.payload.get("tool")
                  for f in frs if f.family == "tool_call_payload" and hit(f)}

        def stripped(f: Fragment) -> bool:
            if f.family != "tool_call_payload":
                return False
            tool = f.payload.get("tool")
            return f.fragment_id in chosen or any(chosen.get(p) == tool for p in f.causal_parents)

        return [_payload(f, inputs=None) if stripped(f) else f for f in frs]

    if mode == 2:
        out, emptied = [], []
        for f in frs:
            if f.family != "authorization_chain":
                out.append(f)
                continue
            keep = []
            for link in f.payload.get("links", ()):
                if targets is None:
                    lost = str(link.get("from", "")).startswith("agent")  # agent-to-agent hop
                else:
                    lost = link.get("scope") in targets
                if not lost:
                    keep.append(dict(link))
            if keep:
                out.append(_payload(f, links=keep))
            else:
                emptied.append(f.fragment_id)
                out.append(f)
        return remove_fragments(out, emptied)

    if mode == 3:
        if boundary is None or not 0 < boundary <= len(frs):
            raise ValueError("mode 3 needs a stack-boundary position inside the scenario")
        return remove_fragments(frs, [f.fragment_id for f in frs[boundary:]])

    if mode == 4:
        out = []
        for f in frs:
            if f.family == "tool_call_payload" and hit(f) and f.payload.get("result") is not None:
                out.append(_payload(f, result=None))
                twin = Fragment(
                    fragment_id=f"{f.fragment_id}.reemit",
                    scenario_id=f.scenario_id,
                    family="tool_call_payload",
                    regime=f.regime,
                    payload={"tool": f.payload["tool"], "args": f.payload.get("inputs"),
                             "output": f.payload["result"]},
                    ts=None if f.ts is None else f.ts + 1,
                    causal_parents=(f.fragment_id,),
                    actor_id=f.actor_id,
                    principal_id=f.principal_id,
                    well_formed=False,
                )
                out.append(twin)
            elif f.family == "post_condition_state" and hit(f):
                out.append(replace(
                    f,
                    payload={"resource_name": f.payload.get("resource"),
                             "delta": f.payload.get("delta_magnitude")},
                    well_formed=False,
                ))
            else:
                out.append(f)
        return out

    if mode in (5, 6):
        snapshots = [f.fragment_id for f in frs if f.family == "policy_snapshot"]
        out = remove_fragments(frs, snapshots)
        if mode == 6:
            for i, f in enumerate(out):
                if f.family == "decision_event_log":
                    detail = dict(f.payload.get("detail") or {})
                    detail["policy_text"] = POLICY_TEXT
                    out[i] = _payload(f, detail=detail)
                    break
        return out

    # mode 7: an agent step recorded under the approver's identity
    approver = next(
        (f.actor_id for f in frs
         if f.family == "decision_event_log" and f.payload.get("kind") == "human_approval"),
        None,
    )
    if approver is None:
        raise InapplicableMode("no human approval on record to share an identity with")
    calls = [f for f in frs if f.family == "tool_call_payload" and f.well_formed and hit(f)]
    if not calls:
        raise ValueError("mode 7 needs a target tool call")
    victim = calls[0].fragment_id
    return [replace(f, actor_id=approver) if f.fragment_id == victim else f for f in frs]
