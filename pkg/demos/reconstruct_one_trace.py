"""
Reconstructing one decision trace
=================================

Build a small agent trace by hand, run the six-stage pipeline over it and
read the per-row verdicts. Then degrade the trace under two failure modes
and watch the verdicts and the completeness score move.
"""

from tracerecon.adapters import Fragment, get_descriptor
from tracerecon.core import IMPLEMENTATION_ROWS, MatrixCell
from tracerecon.pipeline import reconstruct_fragments
from tracerecon.synthgen import inject_mode

regime = get_descriptor("generic_jsonl").regime


def fragment(fid, family, payload, ts, parents=(), actor="agent-1", principal=None):
    return Fragment(fid, "demo", family, regime, payload, ts, parents, actor, principal, True)


# A user opens a session, a policy snapshot and a delegation are on record,
# and the agent makes two tool calls, each followed by a state change.
trace = [
    fragment("e0", "decision_event_log", {"kind": "session_start", "detail": {}}, 1, principal="user-1"),
    fragment("p0", "policy_snapshot", {"policy_id": "p", "scopes": ["read_file", "write_file"],
                                       "valid_from_ts": 0}, 2, ("e0",), actor=None),
    fragment("a0", "authorization_chain", {"links": [{"from": "user-1", "to": "agent-1", "scope": "*"}]},
             3, ("e0",), actor=None),
    fragment("c1", "tool_call_payload", {"tool": "read_file", "inputs": {"path": "a"}, "result": "ok"}, 4, ("e0",)),
    fragment("s1", "post_condition_state", {"resource": "a", "delta_magnitude": 0.2}, 5, ("c1",)),
    fragment("c2", "tool_call_payload", {"tool": "write_file", "inputs": {"path": "b"}, "result": "ok"}, 6, ("s1",)),
    fragment("s2", "post_condition_state", {"resource": "b", "delta_magnitude": 2.0}, 7, ("c2",)),
]


def show(title, fragments):
    [report] = reconstruct_fragments(fragments, scenario_id="demo")
    print(f"\n{title}: completeness {100 * report.completeness:.1f}%")
    for row in IMPLEMENTATION_ROWS:
        print(f"  {row:38s} {report.verdicts[row].tag}")
    print("  gate log:", ", ".join(f"{g.stage}:{g.verdict}" for g in report.gate_log))
    for rec in report.recommendations:
        print(f"  {rec.kind:20s} {rec.row} -> {rec.recommended_regime}")
    return report


# The complete trace fills every row. Reasoning stays opaque by design and is
# replaced by an envelope of what the agent could see and do.
report = show("complete trace", trace)
print("  envelope:", report.verdicts["reasoning_trace"].envelope)

# Policy snapshot absence: the snapshot never made it to storage.
cell = MatrixCell("single_agent", "within_stack")
show("without the policy snapshot", inject_mode(trace, 5, cell))

# Schema mismatch: results were re-emitted under a foreign schema.
show("results under a foreign schema", inject_mode(trace, 4, cell))
