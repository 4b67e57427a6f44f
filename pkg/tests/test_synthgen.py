from __future__ import annotations

from dataclasses import replace

import pytest

from tracerecon.core import ALL_CELLS, IMPLEMENTATION_ROWS, MatrixCell
from tracerecon.pipeline import map_to_schema
from tracerecon.synthgen import (
    FAILURE_MODES,
    PER_CELL,
    InapplicableMode,
    derive_seed,
    generate_scenario,
    generate_suite,
    inject_mode,
    read_suite,
    suite_digest,
    validate_calibration,
    write_suite,
)
from tracerecon.synthgen.modes import remove_fragments

from .builders import call, event, full_trace, snapshot

SW = MatrixCell("single_agent", "within_stack")
SX = MatrixCell("single_agent", "cross_stack")
HW = MatrixCell("hitl", "within_stack")
BASE = MatrixCell("non_agentic_baseline", "not_applicable")


def test_seed_derivation_is_stable_and_distinct():
    assert derive_seed(42, "a") == derive_seed(42, "a")
    assert derive_seed(42, "a") != derive_seed(42, "b")
    assert derive_seed(42, "a") != derive_seed(43, "a")


def test_twenty_scenarios_per_cell(suite):
    groups = suite.by_cell()
    assert set(groups) == set(ALL_CELLS)
    assert all(len(g) == PER_CELL for g in groups.values())
    assert len({s.scenario_id for s in suite.scenarios}) == 140


def test_generation_is_deterministic(suite):
    again = generate_scenario(42, SW, 3)
    assert again == suite.by_cell()[SW][3]


def test_other_seed_changes_fragments_but_not_profiles(suite):
    other = generate_scenario(7, SW, 3)
    mine = suite.by_cell()[SW][3]
    assert other.fragments != mine.fragments
    assert other.manifest.expected_profile == mine.manifest.expected_profile


def test_manifest_invariants(suite):
    for s in suite.scenarios:
        m = s.manifest
        assert set(m.expected_profile) == set(IMPLEMENTATION_ROWS)
        assert m.expected_profile["reasoning_trace"]["tag"] == "opaque"
        assert all(0 < b < len(s.fragments) for b in m.ground_truth_boundaries) or s.cell.is_baseline
        assert (m.stack_boundary is not None) == (s.cell.stack_coverage == "cross_stack")
        assert s.cell.is_baseline == (m.expected_f1 is None)
        assert all(mode in FAILURE_MODES for mode, _ in m.injected_modes)


def test_calibration_passes_on_the_committed_library(suite):
    assert validate_calibration(suite.manifests).passed


def _swap_tag(manifest, row, tag, confidence):
    profile = {r: dict(v) for r, v in manifest.expected_profile.items()}
    profile[row] = {"tag": tag, "confidence": confidence}
    return replace(manifest, expected_profile=profile)


def test_calibration_reports_row_count_drift(suite):
    manifests = suite.manifests
    k = next(i for i, m in enumerate(manifests) if m.expected_profile["inputs"]["tag"] == "fully_fillable")
    manifests[k] = _swap_tag(manifests[k], "inputs", "structurally_unfillable", 0.0)
    result = validate_calibration(manifests)
    assert result.failed("C1")
    assert "C1 violated: inputs unfillable count 2 ≠ 1" in result.lines()


def test_calibration_reports_untagged_unfillable_rows(suite):
    manifests = suite.manifests
    k = next(i for i, m in enumerate(manifests)
             if any(p["tag"] == "structurally_unfillable" for p in m.expected_profile.values()))
    manifests[k] = replace(manifests[k], injected_modes=())
    assert validate_calibration(manifests).failed("C5")


def test_calibration_reports_missing_containers(suite):
    manifests = suite.manifests
    manifests[0] = replace(manifests[0], container_flags={"aer": False})
    assert validate_calibration(manifests).failed("C6")


def test_mode_five_removes_snapshots():
    out = inject_mode(full_trace(), 5, SW)
    assert not [f for f in out if f.family == "policy_snapshot"]
    v = map_to_schema(out)["policy_basis"]
    assert v.tag == "structurally_unfillable" and v.reason == "never_persisted"


def test_mode_six_embeds_policy_text():
    out = inject_mode(full_trace(), 6, SW)
    assert "embedded" in map_to_schema(out)["policy_basis"].note


def test_mode_three_truncates_at_the_boundary():
    frs = [event("e0", ts=0)] + [call(f"c{i}", f"t{i}", ts=i, parents=(f"c{i-1}",) if i > 1 else ("e0",))
                                 for i in range(1, 10)]
    assert len(frs) == 10
    out = inject_mode(frs, 3, SX, boundary=6)
    assert [f.fragment_id for f in out] == [f.fragment_id for f in frs[:6]]
    with pytest.raises(ValueError):
        inject_mode(frs, 3, SX)


def test_mode_one_strips_inputs():
    out = inject_mode(full_trace(), 1, SW, targets={"c1"})
    assert map_to_schema(out)["inputs"].confidence == 0.5


def test_mode_four_reemits_under_a_foreign_schema():
    out = inject_mode(full_trace(), 4, SW)
    twins = [f for f in out if f.fragment_id.endswith(".reemit")]
    assert len(twins) == 2 and not any(t.well_formed for t in twins)
    assert map_to_schema(out)["output_action"].tag == "structurally_unfillable"


def test_mode_seven_makes_the_actor_partial():
    frs = full_trace()
    frs.insert(3, event("h", "human_approval", ts=3, actor="human-1", parents=("e0",)))
    assert map_to_schema(frs)["actor_identity_principal_authority"].tag == "fully_fillable"
    out = inject_mode(frs, 7, MatrixCell("hitl", "within_stack"))
    assert map_to_schema(out)["actor_identity_principal_authority"].tag == "partially_fillable"


@pytest.mark.parametrize("mode, cell", [(3, SW), (7, SW), (1, BASE), (9, SW)])
def test_inapplicable_modes(mode, cell):
    with pytest.raises(InapplicableMode):
        inject_mode(full_trace(), mode, cell)


def test_removed_fragments_are_bridged():
    out = remove_fragments(full_trace(), ["s1"])
    c2 = next(f for f in out if f.fragment_id == "c2")
    assert c2.causal_parents == ("c1",)


def test_write_read_round_trip(suite, tmp_path):
    write_suite(suite, tmp_path / "a")
    back = read_suite(tmp_path / "a")
    assert back.master_seed == 42
    assert [s.manifest for s in back.scenarios] == suite.manifests
    assert [s.fragments for s in back.scenarios] == [s.fragments for s in suite.scenarios]


def test_digest_depends_only_on_content(suite, tmp_path):
    write_suite(suite, tmp_path / "a")
    write_suite(generate_suite(42), tmp_path / "b")
    (tmp_path / "b" / "run_config.json").write_text("{}")
    assert suite_digest(tmp_path / "a") == suite_digest(tmp_path / "b")
    write_suite(generate_suite(43), tmp_path / "c")
    assert suite_digest(tmp_path / "c") != suite_digest(tmp_path / "a")


def test_pipeline_recovers_every_expected_profile(evaluation):
    for r in evaluation.scenarios:
        got = {row: v.tag for row, v in r.report.verdicts.items()}
        want = {row: p["tag"] for row, p in r.scenario.manifest.expected_profile.items()}
        assert got == want, r.scenario.scenario_id
        if r.f1 is not None:
            assert abs(r.f1 - r.scenario.manifest.expected_f1) < 1e-5, r.scenario.scenario_id
