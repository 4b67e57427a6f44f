from __future__ import annotations

from tracerecon.pipeline import BoundaryConfig, Chain, boundary_placements, detect_boundaries, predicted_boundaries
from tracerecon.pipeline.boundaries import H1, H2, H3, H4

from .builders import call, event, state
from .properties import check_boundary_partition


def test_partition_invariant():
    check_boundary_partition()


def test_heuristic_confidences():
    frs = [event("e", ts=0), call("c", ts=1), event("h", "human_approval", ts=2),
           event("k", "constraint_fired", ts=3), state("s", delta=2.0, ts=4), event("z", ts=5)]
    placed = boundary_placements(frs)
    assert placed[1] == (0.8, (H2,))
    assert placed[2] == (1.0, (H3,))
    assert placed[3] == (0.7, (H4,))
    assert placed[5] == (0.6, (H1,))


def test_completion_record_is_not_a_new_call():
    frs = [call("c", "t", ts=1), call("d", "t", ts=2, parents=("c",)), call("e", "u", ts=3, parents=("d",))]
    assert predicted_boundaries(frs) == [2]


def test_theta_filters_weak_signals():
    frs = [event("e", ts=0), event("k", "constraint_fired", ts=1), call("c", ts=2)]
    assert predicted_boundaries(frs, BoundaryConfig(theta=0.75)) == [2]
    assert predicted_boundaries(frs, BoundaryConfig(theta=0.5)) == [1, 2]


def test_no_signal_is_unrecoverable():
    chain = Chain("chain-0", (event("a", ts=0), event("b", ts=1)))
    units, recovered = detect_boundaries(chain)
    assert not recovered
    assert len(units) == 1 and units[0].boundary_confidence == 0.0


def test_units_carry_their_cut_confidence():
    chain = Chain("chain-0", (event("a", ts=0), call("c", ts=1), event("h", "human_approval", ts=2)))
    units, recovered = detect_boundaries(chain)
    assert recovered
    assert [u.fragment_ids for u in units] == [("a",), ("c",), ("h",)]
    assert [u.boundary_confidence for u in units] == [0.0, 0.8, 1.0]
