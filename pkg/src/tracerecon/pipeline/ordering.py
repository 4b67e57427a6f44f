"""Stage 2: logical-clock ordering over timestamps and causal edges."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import networkx as nx

from ..adapters import Fragment
from .manifest import Manifest


@dataclass(frozen=True)
class OrderedFragments:
    fragments: tuple[Fragment, ...]
    confidence: Mapping[str, float]
    cycle_ids: tuple[str, ...]
    reach: Mapping[str, frozenset[str]]  # fragment id -> ids it must precede

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(f.fragment_id for f in self.fragments)

    @property
    def min_confidence(self) -> float:
        return min(self.confidence.values(), default=1.0)

    def comparable(self, a: str, b: str) -> bool:
        return a == b or b in self.reach[a] or a in self.reach[b]

    def confidence_within(self, ids: Iterable[str]) -> float:
        """Order confidence restricted to a subset, such as one chain.

        1.0 when every pair in the subset is forced by the constraints, 0.0
        when any member sits on a cycle, 0.5 otherwise.
        """
        ids = list(ids)
        if any(i in self._cycle_set for i in ids):
            return 0.0
        for i, a in enumerate(ids):
            for b in ids[i + 1:]:
                if not self.comparable(a, b):
                    return 0.5
        return 1.0

    @property
    def _cycle_set(self) -> frozenset[str]:
        return frozenset(self.cycle_ids)


def constraint_graph(fragments: Iterable[Fragment]) -> nx.DiGraph:
    """Edges a -> b whenever a must precede b.

    Causal parents give one edge each; timestamps give edges between every
    pair of adjacent timestamp groups, so equal timestamps stay unordered.
    """
    fragments = list(fragments)
    graph = nx.DiGraph()
    graph.add_nodes_from(f.fragment_id for f in fragments)
    for f in fragments:
        for parent in f.causal_parents:
            if parent in graph:
                graph.add_edge(parent, f.fragment_id)
    groups: dict[int, list[str]] = {}
    for f in fragments:
        if f.ts is not None:
            groups.setdefault(f.ts, []).append(f.fragment_id)
    stamps = sorted(groups)
    for earlier, later in zip(stamps, stamps[1:]):
        for a in groups[earlier]:
            for b in groups[later]:
                graph.add_edge(a, b)
    return graph


def _causal_depth(fragments: list[Fragment], members: Mapping[str, int]) -> dict[str, int]:
    causal = nx.DiGraph()
    causal.add_nodes_from(set(members.values()))
    for f in fragments:
        for parent in f.causal_parents:
            if parent in members and members[parent] != members[f.fragment_id]:
                causal.add_edge(members[parent], members[f.fragment_id])
    depth: dict[int, int] = {}
    for node in nx.topological_sort(causal):
        depth[node] = max((depth[p] + 1 for p in causal.predecessors(node)), default=0)
    return {fid: depth[scc] for fid, scc in members.items()}


def order_fragments(manifest: Manifest) -> OrderedFragments:
    fragments = [manifest.resolve(fid) for fid in manifest.ids]
    graph = constraint_graph(fragments)
    condensed = nx.condensation(graph)
    members: dict[str, int] = condensed.graph["mapping"]

    cycles = set()
    for scc, data in condensed.nodes(data=True):
        group = data["members"]
        if len(group) > 1 or any(graph.has_edge(n, n) for n in group):
            cycles.update(group)

    depth = _causal_depth(fragments, members)
    sort_key = {fid: (depth[fid], fid) for fid in members}

    order: list[str] = []
    for scc in nx.lexicographical_topological_sort(
        condensed, key=lambda n: min(sort_key[m] for m in condensed.nodes[n]["members"])
    ):
        order.extend(sorted(condensed.nodes[scc]["members"], key=sort_key.__getitem__))

    reach: dict[str, frozenset[str]] = {}
    below = {scc: nx.descendants(condensed, scc) for scc in condensed}
    for fid, scc in members.items():
        later = set()
        for d in below[scc]:
            later.update(condensed.nodes[d]["members"])
        reach[fid] = frozenset(later)

    total = len(order)
    confidence = {}
    for fid in order:
        if fid in cycles:
            confidence[fid] = 0.0
            continue
        before = sum(1 for other in order if fid in reach[other])
        confidence[fid] = 1.0 if before + len(reach[fid]) == total - 1 else 0.5

    by_id = {f.fragment_id: f for f in fragments}
    return OrderedFragments(
        fragments=tuple(by_id[fid] for fid in order),
        confidence=confidence,
        cycle_ids=tuple(sorted(cycles)),
        reach=reach,
    )
