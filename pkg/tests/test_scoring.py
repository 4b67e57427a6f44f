from __future__ import annotations

import pytest

from tracerecon.core import (
    IMPLEMENTATION_ROWS,
    AuthorizationEnvelope,
    Conflicting,
    FullyFillable,
    MatrixCell,
    Opaque,
    PartiallyFillable,
    StructurallyUnfillable,
    UnscoredCategoryError,
)
from tracerecon.scoring import (
    CONTAINERS,
    EXECUTION_CONTRACT,
    FORENSIC,
    OPTIONAL_ENRICHMENT,
    QUALITATIVE_ONLY,
    REASONING_ENRICHMENT,
    RUNTIME_FIREWALL,
    TRACE_CONTEXT,
    DeclaredProcess,
    build_tensor,
    completeness,
    container_baseline,
    maturity_rate,
    recommend,
)

from .properties import check_completeness_monotone, check_maturity_min, check_weight_monotone

FULL = FullyFillable({})
OPAQUE = Opaque(AuthorizationEnvelope())
GONE = StructurallyUnfillable("never_persisted")


def profile(**overrides):
    base = {row: FULL for row in IMPLEMENTATION_ROWS}
    base["reasoning_trace"] = OPAQUE
    base.update(overrides)
    return base


def test_completeness_examples():
    assert completeness(profile()) == 1.0
    four = profile(policy_basis=GONE, action_boundary_config_envelope=GONE,
                   inputs=PartiallyFillable({}, "g", 0.5), post_condition_state=PartiallyFillable({}, "g", 0.5))
    assert round(100 * completeness(four), 2) == 57.14


def test_completeness_rejects_missing_rows_and_conflicts():
    with pytest.raises(ValueError):
        completeness({"inputs": FULL})
    with pytest.raises(UnscoredCategoryError):
        completeness(profile(inputs=Conflicting((1, 2), ("a", "b"))))


def test_monotonicity_properties():
    check_weight_monotone()
    check_completeness_monotone()


@pytest.mark.parametrize("row, verdict, regime, expected", [
    ("policy_basis", GONE, "cooperative", EXECUTION_CONTRACT),
    ("output_action", GONE, "cooperative", RUNTIME_FIREWALL),
    ("inputs", PartiallyFillable({}, "g", 0.5), "cooperative", RUNTIME_FIREWALL),
    ("inputs", StructurallyUnfillable("cross_stack_boundary"), "cooperative", TRACE_CONTEXT),
    ("inputs", GONE, "non_cooperative", FORENSIC),
    ("reasoning_trace", OPAQUE, "non_cooperative", REASONING_ENRICHMENT),
])
def test_recommendation_routing(row, verdict, regime, expected):
    assert recommend(row, verdict, None, regime).recommended_regime == expected


def test_opaque_is_optional_and_full_is_refused():
    assert recommend("reasoning_trace", OPAQUE).kind == OPTIONAL_ENRICHMENT
    with pytest.raises(ValueError):
        recommend("inputs", FULL)


def test_maturity_examples():
    history = {"inputs": [FULL, FULL], "policy_basis": ["structurally_unfillable"],
               "output_action": ["partially_fillable"]}
    assert maturity_rate(history, ["inputs"]).aggregate_level == 5
    assert maturity_rate(history, ["inputs", "output_action"]).aggregate_level == 3
    assert maturity_rate(history, ["policy_basis"]).aggregate_level == 2
    assert maturity_rate(history, ["post_condition_state"]).aggregate_level == 1
    assert maturity_rate(history, ["inputs"], DeclaredProcess(row_levels={"inputs": 2})).aggregate_level == 2
    with pytest.raises(ValueError):
        maturity_rate(history, [])


def test_maturity_is_min_over_tested_rows():
    check_maturity_min()


def test_container_baseline_arithmetic():
    flags = [{c: True for c in CONTAINERS}] * 4
    tallies = {row: {"fully_fillable": 1, "structurally_unfillable": 3} for row in IMPLEMENTATION_ROWS}
    out = container_baseline(flags, tallies)
    assert out["aer"] == 75.0
    assert out["openclaw"] == QUALITATIVE_ONLY
    with pytest.raises(ValueError):
        container_baseline(flags[:2], tallies)


def test_tensor_marginals():
    a = MatrixCell("single_agent", "within_stack")
    b = MatrixCell("hitl", "cross_stack")
    tensor = build_tensor([(a, "generic_jsonl", profile()), (a, "generic_jsonl", profile(inputs=GONE)),
                           (b, "otel_genai", profile())])
    assert tensor.row_tally("inputs") == {"fully_fillable": 2, "partially_fillable": 0,
                                          "structurally_unfillable": 1, "opaque": 0, "conflicting": 0}
    assert tensor.scenario_count(a) == 2
    assert tensor.row_tally("reasoning_trace", b)["opaque"] == 1
    total = sum(e["count"] for e in tensor.to_document()["cells"])
    assert total == 3 * len(IMPLEMENTATION_ROWS)
