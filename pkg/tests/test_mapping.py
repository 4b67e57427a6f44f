from __future__ import annotations

from dataclasses import replace

from tracerecon.adapters import get_descriptor
from tracerecon.core import FullyFillable, Opaque, PartiallyFillable, StructurallyUnfillable
from tracerecon.pipeline import all_unfillable, map_to_schema

from .builders import call, event, full_trace, links, snapshot, state

ACTOR = "actor_identity_principal_authority"
BOUNDARY = "action_boundary_config_envelope"


def tags(verdicts):
    return {row: v.tag for row, v in verdicts.items()}


def test_full_trace_fills_every_row_but_reasoning():
    verdicts = map_to_schema(full_trace())
    assert all(isinstance(v, FullyFillable) for r, v in verdicts.items() if r != "reasoning_trace")
    assert isinstance(verdicts["reasoning_trace"], Opaque)


def test_reasoning_envelope_lists_inputs_constraints_and_scopes():
    envelope = map_to_schema(full_trace())["reasoning_trace"].envelope
    assert envelope.inputs_available == ("c1", "c2")
    assert "policy:p" in envelope.constraints_active
    assert set(envelope.outputs_possible) == {"t1", "t2"}


def test_missing_inputs_on_half_the_calls_is_partial():
    frs = [replace(f, payload={**f.payload, "inputs": None}) if f.fragment_id == "c2" else f
           for f in full_trace()]
    v = map_to_schema(frs)["inputs"]
    assert isinstance(v, PartiallyFillable) and v.confidence == 0.5


def test_no_calls_means_inputs_and_output_unfillable():
    v = map_to_schema([event("e", ts=1)])
    assert v["inputs"].tag == v["output_action"].tag == "structurally_unfillable"
    assert v["post_condition_state"].reason == "never_persisted"


def test_late_snapshot_is_not_in_force():
    frs = [event("e", ts=1), call("c", ts=2), snapshot("p", valid_from=5, ts=6)]
    v = map_to_schema(frs)["policy_basis"]
    assert isinstance(v, StructurallyUnfillable)
    assert "after the decision started" in v.note


def test_embedded_policy_text_does_not_count():
    frs = [event("e", ts=1, detail={"policy_text": "be careful"}), call("c", ts=2)]
    v = map_to_schema(frs)["policy_basis"]
    assert isinstance(v, StructurallyUnfillable) and "embedded" in v.note


def test_session_principal_without_links_is_partial_half():
    frs = [event("e", ts=1, principal="u"), call("c", ts=2)]
    v = map_to_schema(frs)[ACTOR]
    assert isinstance(v, PartiallyFillable) and v.confidence == 0.5


def test_shared_approver_identity_breaks_coverage():
    frs = [event("e", ts=1, principal="u"), links("l", ("u", "agent-1", "t"), ts=2),
           event("h", "human_approval", ts=3), call("c", "t", ts=4)]
    assert map_to_schema(frs)[ACTOR].tag == "partially_fillable"
    frs[2] = replace(frs[2], actor_id="human-1")
    assert map_to_schema(frs)[ACTOR].tag == "fully_fillable"


def test_permission_set_fills_the_boundary_row():
    frs = [event("e", ts=1, detail={"permissions": ["t"]}), call("c", ts=2)]
    assert map_to_schema(frs)[BOUNDARY].value["scopes"] == ("t",)
    assert map_to_schema([call("c", ts=2)])[BOUNDARY].tag == "structurally_unfillable"


def test_post_condition_needs_a_directly_attached_state():
    frs = [call("c1", "t1", ts=1), call("c2", "t2", ts=2, parents=("c1",)), state("s", ts=3, parents=("c2",))]
    v = map_to_schema(frs)["post_condition_state"]
    # c2 observed, c1 inferred from its result: (1 + 0.5) / 2
    assert isinstance(v, PartiallyFillable) and v.confidence == 0.75


def test_post_condition_inferred_from_results_only():
    v = map_to_schema([call("c", ts=1)])["post_condition_state"]
    assert v.confidence == 0.5
    v = map_to_schema([call("c", ts=1, result=None)])["post_condition_state"]
    assert v.tag == "structurally_unfillable"


def test_postmortem_mask_caps_at_partial():
    mask = get_descriptor("postmortem_prose").fillability_mask
    verdicts = map_to_schema(full_trace(), [mask])
    for row, level in mask.items():
        if row == "reasoning_trace":
            continue
        if level == "can_partially_fill":
            assert verdicts[row].tag == "partially_fillable"
        if level == "cannot_fill":
            assert verdicts[row].tag == "structurally_unfillable"


def test_loose_order_degrades_order_sensitive_rows_only():
    verdicts = map_to_schema(full_trace(), order_confidence=0.5)
    assert verdicts["inputs"].confidence == 0.5
    assert verdicts["post_condition_state"].confidence == 0.5
    assert verdicts["output_action"].tag == "fully_fillable"


def test_all_unfillable_covers_reasoning():
    assert set(tags(all_unfillable("x")).values()) == {"structurally_unfillable"}
