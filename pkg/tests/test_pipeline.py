from __future__ import annotations

import json

import pytest

from tracerecon.adapters import write_jsonl
from tracerecon.pipeline import (
    GateContractError,
    GateLogEntry,
    PipelineConfig,
    emit_report,
    reconstruct,
    reconstruct_fragments,
    report_from_document,
)
from tracerecon.pipeline.mapping import all_unfillable

from .builders import call, event, full_trace
from .properties import check_gate_log_complete


def verdicts_of(report):
    return [g.verdict for g in report.gate_log]


def test_clean_trace_passes_every_gate():
    [report] = reconstruct_fragments(full_trace())
    assert verdicts_of(report) == ["passed"] * 6 + ["report_emitted"]
    assert report.completeness == 1.0


def test_unknown_regime_fails_at_stage_zero():
    [report] = reconstruct([{}], "nope", scenario_id="x")
    assert verdicts_of(report)[:6] == ["regime_unsupported"] * 6
    assert report.gate_log[-1].verdict == "report_emitted"
    assert report.completeness == 0.0
    assert report.normalize_failed


def test_empty_input_fails_at_stage_one():
    [report] = reconstruct([], "generic_jsonl")
    assert verdicts_of(report)[0] == "passed"
    assert verdicts_of(report)[1:6] == ["no_fragments_recovered"] * 5


def test_unattributed_fragments_are_rejected_but_chain_survives():
    frs = full_trace() + [event("orphan", ts=9, actor=None)]
    [report] = reconstruct_fragments(frs)
    assert report.gate_log[3].verdict == "unattributed_evidence_rejected"
    assert report.gate_log[3].affected_fragment_ids == ("orphan",)


def test_nothing_attributed():
    [report] = reconstruct_fragments([event("a", ts=1, actor=None)])
    assert verdicts_of(report)[3:6] == ["unattributed_evidence_rejected", "boundary_unrecoverable",
                                        "property_unfillable_mapped"]


def test_tied_timestamps_log_unordered():
    frs = [event("a", ts=1), call("b", ts=1)]
    [report] = reconstruct_fragments(frs)
    assert report.gate_log[2].verdict == "unordered_fragments"


def test_one_report_per_chain():
    frs = [call("a", ts=1, actor="x"), call("b", ts=2, actor="y")]
    reports = reconstruct_fragments(frs)
    assert len(reports) == 2
    assert {r.chain_id for r in reports} == {"chain-0", "chain-1"}


def test_gate_contract_enforced():
    with pytest.raises(GateContractError):
        emit_report("s", None, (), all_unfillable("x"), [GateLogEntry(0, "passed")])


def test_report_document_round_trip():
    [report] = reconstruct_fragments(full_trace())
    again = report_from_document(json.loads(report.dumps()))
    assert again == report
    assert again.dumps() == report.dumps()


def test_raw_records_match_normalized_fragments(tmp_path):
    path = tmp_path / "t.jsonl"
    write_jsonl(path, full_trace())
    lines = path.read_text().splitlines()
    assert reconstruct(lines)[0].dumps() == reconstruct_fragments(full_trace())[0].dumps()


def test_theta_is_passed_through():
    frs = full_trace()
    strict = reconstruct_fragments(frs, config=PipelineConfig(theta=0.9))[0]
    assert len(strict.predicted_boundaries) <= len(reconstruct_fragments(frs)[0].predicted_boundaries)


def test_gate_log_property():
    check_gate_log_complete()
