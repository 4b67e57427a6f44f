"""Stage 3: group ordered fragments into attributed candidate chains."""

from __future__ import annotations

from dataclasses import dataclass

from networkx.utils import UnionFind

from ..adapters import Fragment
from .ordering import OrderedFragments


@dataclass(frozen=True)
class Chain:
    chain_id: str
    fragments: tuple[Fragment, ...]

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(f.fragment_id for f in self.fragments)

    @property
    def actors(self) -> tuple[str, ...]:
        return tuple(sorted({f.actor_id for f in self.fragments if f.actor_id}))

    def __len__(self) -> int:
        return len(self.fragments)


@dataclass(frozen=True)
class ChainAssembly:
    chains: tuple[Chain, ...]
    rejected: tuple[str, ...]  # ids with no attribution reachable


def assemble_chains(ordered: OrderedFragments) -> ChainAssembly:
    """Connect fragments sharing an actor or a causal edge.

    A component becomes a chain when at least one member carries an
    actor_id; wholly unattributed components are rejected.
    """
    ids = ordered.ids
    components = UnionFind(ids)
    first_by_actor: dict[str, str] = {}
    for f in ordered.fragments:
        if f.actor_id:
            anchor = first_by_actor.setdefault(f.actor_id, f.fragment_id)
            components.union(anchor, f.fragment_id)
        for parent in f.causal_parents:
            if parent in components.parents:
                components.union(parent, f.fragment_id)

    groups: dict[str, list[Fragment]] = {}
    for f in ordered.fragments:  # preserves the emitted order within each group
        groups.setdefault(components[f.fragment_id], []).append(f)

    chains, rejected = [], []
    for members in sorted(groups.values(), key=lambda g: ids.index(g[0].fragment_id)):
        if any(f.actor_id for f in members):
            chains.append(Chain(f"chain-{len(chains)}", tuple(members)))
        else:
            rejected.extend(f.fragment_id for f in members)
    return ChainAssembly(tuple(chains), tuple(rejected))
