"""Small fragment builders shared by the tests."""

from __future__ import annotations

from typing import Any

from tracerecon.adapters import Fragment, get_descriptor

REGIME = get_descriptor("generic_jsonl").regime
NON_COOPERATIVE = get_descriptor("postmortem_prose").regime


def frag(fid: str, family: str, payload: dict[str, Any] | None = None, *, ts: int | None = None,
         parents: tuple[str, ...] = (), actor: str | None = "agent-1", principal: str | None = None,
         well_formed: bool = True, regime=REGIME) -> Fragment:
    return Fragment(fid, "s", family, regime, payload or {}, ts, parents, actor, principal, well_formed)


def call(fid: str, tool: str = "t", *, inputs: Any = "in", result: Any = "out", **kw) -> Fragment:
    return frag(fid, "tool_call_payload", {"tool": tool, "inputs": inputs, "result": result}, **kw)


def event(fid: str, kind: str = "step", detail: Any = None, **kw) -> Fragment:
    return frag(fid, "decision_event_log", {"kind": kind, "detail": detail or {}}, **kw)


def snapshot(fid: str, scopes=("t",), valid_from: int = 0, **kw) -> Fragment:
    kw.setdefault("actor", None)
    return frag(fid, "policy_snapshot", {"policy_id": "p", "scopes": list(scopes), "valid_from_ts": valid_from}, **kw)


def links(fid: str, *triples: tuple[str, str, Any], **kw) -> Fragment:
    kw.setdefault("actor", None)
    return frag(fid, "authorization_chain",
                {"links": [{"from": a, "to": b, "scope": s} for a, b, s in triples]}, **kw)


def state(fid: str, delta: float = 0.5, resource: str = "r", **kw) -> Fragment:
    return frag(fid, "post_condition_state", {"resource": resource, "delta_magnitude": delta}, **kw)


def full_trace() -> list[Fragment]:
    """One principal, one snapshot, one link, two covered calls with results and states."""
    return [
        event("e0", ts=1, principal="user-1", detail={"text": "open"}),
        snapshot("p0", scopes=("t1", "t2"), ts=2, parents=("e0",)),
        links("a0", ("user-1", "agent-1", "t1"), ("user-1", "agent-1", "t2"), ts=3, parents=("e0",)),
        call("c1", "t1", ts=4, parents=("e0",)),
        state("s1", ts=5, parents=("c1",)),
        call("c2", "t2", ts=6, parents=("s1",)),
        state("s2", ts=7, parents=("c2",)),
    ]
