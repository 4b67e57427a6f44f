from __future__ import annotations

import pytest

from tracerecon.core import (
    ALL_CELLS,
    IMPLEMENTATION_ROWS,
    AuthorizationEnvelope,
    Conflicting,
    EvidenceRegimeCoordinate,
    FullyFillable,
    MatrixCell,
    Opaque,
    PartiallyFillable,
    StructurallyUnfillable,
    UnscoredCategoryError,
    as_row,
    category_from_dict,
    category_to_dict,
    weight,
)


def test_seven_rows_and_seven_cells():
    assert len(IMPLEMENTATION_ROWS) == 7
    assert len(ALL_CELLS) == 7
    assert sum(c.is_baseline for c in ALL_CELLS) == 1


def test_weights_per_category():
    assert weight(FullyFillable({})) == 1.0
    assert weight(Opaque(AuthorizationEnvelope())) == 1.0
    assert weight(PartiallyFillable({}, "gap", 0.3)) == 0.3
    assert weight(StructurallyUnfillable("state_lost")) == 0.0


def test_conflicting_is_unscored():
    with pytest.raises(UnscoredCategoryError):
        weight(Conflicting(("a", "b"), ("x", "y")))


def test_partial_needs_gap_and_valid_confidence():
    with pytest.raises(ValueError):
        PartiallyFillable({}, "", 0.5)
    with pytest.raises(ValueError):
        PartiallyFillable({}, "gap", 1.5)


def test_unfillable_reason_is_closed_set():
    with pytest.raises(ValueError):
        StructurallyUnfillable("because")


@pytest.mark.parametrize("category", [
    FullyFillable({"a": [1, 2]}),
    PartiallyFillable({"ids": ["x"]}, "one missing", 0.25),
    StructurallyUnfillable("cross_stack_boundary", "gone"),
    Opaque(AuthorizationEnvelope(("i",), ("c",), ("o",))),
    Conflicting((1, 2), ("r1", "r2")),
])
def test_category_round_trip(category):
    assert category_from_dict(category_to_dict(category)) == category


def test_matrix_cell_pairing_rules():
    assert MatrixCell.from_key("hitl/cross_stack").key == "hitl/cross_stack"
    with pytest.raises(ValueError):
        MatrixCell("non_agentic_baseline", "within_stack")
    with pytest.raises(ValueError):
        MatrixCell("single_agent", "not_applicable")


def test_regime_round_trip():
    regime = EvidenceRegimeCoordinate("platform_runtime", "contemporaneous", "cooperative", "committed_schema")
    assert EvidenceRegimeCoordinate.from_dict(regime.to_dict()) == regime


def test_row_names_accept_rows():
    for row in IMPLEMENTATION_ROWS:
        assert as_row(row) == row
