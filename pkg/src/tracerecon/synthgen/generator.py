"""Build one scenario: a pristine trace, then the failure modes its profile calls for.

The profile (pattern, tool-call count, partial-confidence knobs, decision
layout) comes from the committed library; the per-scenario seed only decides
cosmetic and placement choices (which calls lose inputs, tool names,
timestamp gaps, write order). Verdict counts therefore do not depend on the
master seed, while the bytes do.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field
from typing import Any, Mapping

from ..adapters import Fragment, get_descriptor
from ..core import IMPLEMENTATION_ROWS, MatrixCell
from .modes import inject_mode

REGIME = get_descriptor("generic_jsonl").regime
TOOL_VERBS = ("read_file", "query_db", "http_get", "write_file", "send_email",
              "run_tests", "search_docs", "update_ticket", "call_api", "render_report")
RESOURCES = ("orders", "tickets", "repo", "inbox", "wiki", "ledger", "cache", "queue")

ACTOR_ROW = "actor_identity_principal_authority"
SHORT_ROWS = {"inputs": "I", "policy_basis": "P", ACTOR_ROW: "A",
              "output_action": "O", "post_condition_state": "S"}


def derive_seed(master_seed: int, scenario_id: str) -> int:
    """Per-scenario seed: first 8 bytes of sha256("<master>:<scenario_id>"), big-endian."""
    digest = hashlib.sha256(f"{master_seed}:{scenario_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass
class _Layout:
    scenario_id: str
    rng: random.Random
    fragments: list[Fragment] = field(default_factory=list)
    ts: int = 0
    counter: int = 0

    def add(self, family: str, payload: Mapping[str, Any], actor: str | None = None,
            parents: tuple[str, ...] = (), principal: str | None = None) -> str:
        self.counter += 1
        self.ts += self.rng.randint(5, 15)  # gaps leave room for re-emitted twins
        fid = f"{self.scenario_id}/f{self.counter:03d}"
        self.fragments.append(Fragment(
            fragment_id=fid, scenario_id=self.scenario_id, family=family, regime=REGIME,
            payload=payload, ts=self.ts, causal_parents=parents, actor_id=actor,
            principal_id=principal,
        ))
        return fid


@dataclass(frozen=True)
class BuiltScenario:
    fragments: tuple[Fragment, ...]  # final evidence in causal (timestamp) order
    truth_boundaries: tuple[int, ...]
    injected: tuple[tuple[int, str], ...]  # (mode, row) tags
    boundary_position: int | None  # stack boundary before mode 3, cross-stack only
    pristine_size: int


def _split(rng: random.Random, n: int, parts: int) -> list[int]:
    """Random composition of n into ``parts`` positive sizes."""
    cuts = sorted(rng.sample(range(1, n), parts - 1)) if parts > 1 else []
    edges = [0] + cuts + [n]
    return [b - a for a, b in zip(edges, edges[1:])]


def build_scenario(cell: MatrixCell, scenario_id: str, seed: int, entry: Mapping[str, Any]) -> BuiltScenario:
    rng = random.Random(seed)
    pattern = {SHORT_ROWS[r]: tag for r, tag in entry["pattern"].items()}
    params = entry.get("params", {})
    n = entry["calls"]
    cross = cell.stack_coverage == "cross_stack"
    arch = cell.architecture

    # -- actors ---------------------------------------------------------
    principal_name = "operator-1" if cell.is_baseline else "user-1"
    human = "human-1" if arch == "hitl" else None
    if arch == "multi_agent":
        hops = rng.randint(2, 4)
        workers = [f"agent-{k}" for k in range(1, hops + 1)]
        main = "agent-0"
        call_actor = [rng.choice(workers) for _ in range(n)]
        delegator = {w: f"agent-{int(w.split('-')[1]) - 1}" for w in workers}
    else:
        main = "svc-1" if cell.is_baseline else "agent-1"
        call_actor = [main] * n
        delegator = {main: principal_name}

    start = rng.randrange(len(TOOL_VERBS))
    tools = [f"{TOOL_VERBS[(start + i) % len(TOOL_VERBS)]}_{i + 1}" for i in range(n)]

    # -- which calls keep which evidence --------------------------------
    def kept(tag: str, key: str, default_full: int, pool: list[int]) -> set[int]:
        if tag == "F":
            return set(pool)
        if tag == "U":
            return set()
        return set(rng.sample(pool, params[key]))

    everyone = list(range(n))
    inputs_kept = kept(pattern["I"], "inputs_kept", n, everyone)
    results_kept = set(everyone) if pattern["O"] == "F" else set()
    states_kept = kept(pattern["S"], "states_kept", n, everyone)
    victim = rng.randrange(n) if human else None
    others = [i for i in everyone if i != victim]
    if pattern["A"] == "F":
        covered = set(everyone)
    elif pattern["A"] == "U":
        covered = set()
    else:
        covered = set(rng.sample(others, params["links_kept"]))
    session_principal = params.get("session_principal", pattern["A"] != "U")

    # -- decisions --------------------------------------------------------
    m, misses, approvals = entry["decisions"], entry["misses"], entry["approvals"]
    if m == n:
        groups = [[i] for i in everyone]
    else:
        sizes = _split(rng, n, m)
        groups, at = [], 0
        for size in sizes:
            groups.append(list(range(at, at + size)))
            at += size
    order = list(range(len(groups)))
    approved = set(rng.sample(order, approvals))
    missed = set(rng.sample([d for d in order if d not in approved], misses))

    # -- pristine layout -------------------------------------------------
    lay = _Layout(scenario_id, rng)
    session = lay.add(
        "decision_event_log",
        {"kind": "step", "detail": {"text": "session opened", "permissions": sorted(tools)}},
        actor=main, principal=principal_name if session_principal else None,
    )
    policy = {"policy_id": f"pol-{rng.randint(100, 999)}", "scopes": sorted(tools), "valid_from_ts": 0}
    policy_external = cross and pattern["P"] == "U"
    if not policy_external:
        lay.add("policy_snapshot", policy, parents=(session,))

    links = []
    if arch == "multi_agent":
        links.append((principal_name, main, "*", None))
    for i in everyone:
        links.append((delegator[call_actor[i]], call_actor[i], tools[i], i))
    external_links = [l for l in links if cross and l[3] is not None and l[3] not in covered]
    internal_links = [l for l in links if l not in external_links]
    if internal_links:
        lay.add("authorization_chain",
                {"links": [{"from": f, "to": t, "scope": s} for f, t, s, _ in internal_links]},
                parents=(session,))

    truth_ids = []
    call_ids: dict[int, str] = {}
    state_ids: dict[int, str] = {}
    last = session
    for d, group in enumerate(groups):
        actor = call_actor[group[0]]
        if d in approved:
            lead = ["approval"]
        elif d in missed:
            lead = ["step", "step"]
        else:
            lead = rng.choice([[], ["step"]])
        first = None
        for kind in lead:
            if kind == "approval":
                last = lay.add("decision_event_log",
                               {"kind": "human_approval", "detail": {"text": "approved next action"}},
                               actor=human, parents=(last,))
            else:
                last = lay.add("decision_event_log",
                               {"kind": "step", "detail": {"text": "plan next step"}},
                               actor=actor, parents=(last,))
            first = first or last
        for i in group:
            inputs_here = i in inputs_kept or not cross
            result_here = i in results_kept or not cross
            payload = {
                "tool": tools[i],
                "inputs": {"query": f"{tools[i]} request {rng.randint(1, 99)}"} if inputs_here else None,
                "result": {"status": "ok", "items": rng.randint(0, 20)} if result_here else None,
            }
            call = lay.add("tool_call_payload", payload, actor=call_actor[i], parents=(last,))
            call_ids[i] = call
            first = first or call
            last = call
            if i in states_kept or not cross:
                state_ids[i] = lay.add(
                    "post_condition_state",
                    {"resource": rng.choice(RESOURCES), "delta_magnitude": round(rng.uniform(0.1, 0.9), 2)},
                    actor=call_actor[i], parents=(call,),
                )
        truth_ids.append(first)
        last = lay.add("decision_event_log", {"kind": "step", "detail": {"text": "observe outcome"}},
                       actor=actor, parents=(last,))

    boundary = None
    if cross:
        marker = lay.add(
            "decision_event_log",
            {"kind": "step", "detail": {"text": "hand-off to external runtime", "stack_exit": True}},
            actor=main, parents=(last,),
        )
        boundary = len(lay.fragments)
        if policy_external:
            lay.add("policy_snapshot", policy, parents=(marker,))
        if external_links:
            lay.add("authorization_chain",
                    {"links": [{"from": f, "to": t, "scope": s} for f, t, s, _ in external_links]},
                    parents=(marker,))
        for i in everyone:
            lost_inputs, lost_result = i not in inputs_kept, i not in results_kept
            if lost_inputs or lost_result:
                lay.add("tool_call_payload", {
                    "tool": tools[i],
                    "inputs": {"query": f"{tools[i]} request"} if lost_inputs else None,
                    "result": {"status": "ok"} if lost_result else None,
                }, actor=call_actor[i], parents=(call_ids[i],))
            if i not in states_kept:
                lay.add("post_condition_state",
                        {"resource": rng.choice(RESOURCES), "delta_magnitude": 0.5},
                        actor=call_actor[i], parents=(call_ids[i],))

    pristine = list(lay.fragments)
    frs = list(pristine)
    injected: list[tuple[int, str]] = []
    modes = {r: m for r, m in entry.get("modes", {}).items()}

    def tag(mode: int, *rows: str) -> None:
        for row in rows:
            if modes.get(row) == mode:
                injected.append((mode, row))

    if cross:
        frs = inject_mode(frs, 3, cell, boundary=boundary)
        tag(3, *modes)
    else:
        if pattern["I"] != "F":
            frs = inject_mode(frs, 1, cell, {call_ids[i] for i in everyone if i not in inputs_kept})
            tag(1, "inputs")
        dropped_links = {tools[i] for i in everyone if i not in covered and i != victim}
        if dropped_links:
            hop_only = arch == "multi_agent" and pattern["A"] == "U"
            frs = inject_mode(frs, 2, cell, None if hop_only else dropped_links)
            tag(2, ACTOR_ROW)
        broken = set()
        if pattern["O"] == "U":
            broken |= set(call_ids.values())
        broken |= {state_ids[i] for i in everyone if i not in states_kept}
        if broken:
            frs = inject_mode(frs, 4, cell, broken)
            tag(4, "output_action", "post_condition_state")
        if pattern["P"] == "U":
            mode = modes["policy_basis"]
            frs = inject_mode(frs, mode, cell)
            tag(mode, "policy_basis")
    if human is not None:
        frs = inject_mode(frs, 7, cell, {call_ids[victim]})
        tag(7, ACTOR_ROW)

    frs.sort(key=lambda f: f.ts)
    position = {f.fragment_id: k for k, f in enumerate(frs)}
    return BuiltScenario(
        fragments=tuple(frs),
        truth_boundaries=tuple(position[t] for t in truth_ids),
        injected=tuple(sorted(set(injected))),
        boundary_position=boundary,
        pristine_size=len(pristine),
    )


def expected_profile(entry: Mapping[str, Any]) -> dict[str, dict[str, Any]]:
    """Row -> expected tag and weight, straight from the library entry."""
    profile = {}
    tags = {"F": "fully_fillable", "P": "partially_fillable", "U": "structurally_unfillable"}
    for row in IMPLEMENTATION_ROWS:
        if row == "reasoning_trace":
            profile[row] = {"confidence": 1.0, "tag": "opaque"}
        elif row == "action_boundary_config_envelope":
            profile[row] = {"confidence": 1.0, "tag": "fully_fillable"}
        else:
            t = entry["pattern"][row]
            conf = {"F": 1.0, "U": 0.0}.get(t, entry["confidences"].get(row))
            profile[row] = {"confidence": conf, "tag": tags[t]}
    return profile
