from __future__ import annotations

from tracerecon.pipeline import assemble_chains, collect_fragments, order_fragments
from tracerecon.pipeline.manifest import NoFragmentsRecovered

import pytest

from .builders import event, full_trace
from .properties import check_order_sound


def test_order_sound_against_brute_force():
    check_order_sound()


def test_total_order_on_distinct_timestamps():
    ordered = order_fragments(collect_fragments(list(reversed(full_trace()))))
    assert ordered.ids == tuple(f.fragment_id for f in full_trace())
    assert ordered.min_confidence == 1.0


def test_equal_timestamps_are_tie_broken_with_lower_confidence():
    frs = [event("b", ts=1), event("a", ts=1), event("c", ts=2)]
    ordered = order_fragments(collect_fragments(frs))
    assert ordered.ids == ("a", "b", "c")
    assert ordered.confidence["a"] == ordered.confidence["b"] == 0.5
    assert ordered.confidence["c"] == 1.0
    assert ordered.confidence_within(["a", "c"]) == 1.0


def test_cycle_is_reported():
    frs = [event("a", ts=2, parents=("b",)), event("b", ts=1, parents=("a",))]
    ordered = order_fragments(collect_fragments(frs))
    assert set(ordered.cycle_ids) == {"a", "b"}
    assert ordered.confidence_within(["a"]) == 0.0


def test_empty_manifest_raises():
    with pytest.raises(NoFragmentsRecovered):
        collect_fragments([])


def test_duplicate_ids_are_renamed_and_flagged():
    manifest = collect_fragments([event("a", ts=1), event("a", ts=2)])
    assert len(manifest) == 2
    assert len(set(manifest.ids)) == 2
    assert manifest.flagged


def brute_components(fragments):
    """Connected components by repeated relaxation: the union-find oracle."""
    label = {f.fragment_id: f.fragment_id for f in fragments}
    edges = []
    by_actor = {}
    for f in fragments:
        if f.actor_id:
            by_actor.setdefault(f.actor_id, []).append(f.fragment_id)
        edges += [(p, f.fragment_id) for p in f.causal_parents if p in label]
    for ids in by_actor.values():
        edges += list(zip(ids, ids[1:]))
    changed = True
    while changed:
        changed = False
        for a, b in edges:
            low = min(label[a], label[b])
            if label[a] != low or label[b] != low:
                label[a] = label[b] = low
                changed = True
    groups = {}
    for fid, lab in label.items():
        groups.setdefault(lab, set()).add(fid)
    return {frozenset(g) for g in groups.values()}


def test_chains_match_component_oracle():
    frs = [
        event("a1", ts=1, actor="x"), event("a2", ts=2, actor="x"),
        event("b1", ts=3, actor="y"), event("b2", ts=4, actor=None, parents=("b1",)),
        event("c1", ts=5, actor=None), event("c2", ts=6, actor=None, parents=("c1",)),
        event("d1", ts=7, actor="z", parents=("a2",)),
    ]
    assembly = assemble_chains(order_fragments(collect_fragments(frs)))
    got = {frozenset(c.ids) for c in assembly.chains} | {frozenset(assembly.rejected)}
    assert got == brute_components(frs)
    assert set(assembly.rejected) == {"c1", "c2"}
