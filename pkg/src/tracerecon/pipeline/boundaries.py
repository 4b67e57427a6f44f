"""Stage 4: decision-boundary heuristics and unit partitioning."""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Sequence

from ..adapters import Fragment
from .chains import Chain

H1 = "H1_state_magnitude"
H2 = "H2_tool_call"
H3 = "H3_human_intervention"
H4 = "H4_policy_activation"
HEURISTICS = (H1, H2, H3, H4)

HEURISTIC_CONFIDENCE = MappingProxyType({H3: 1.0, H2: 0.8, H4: 0.7, H1: 0.6})


@dataclass(frozen=True)
class BoundaryConfig:
    delta: float = 1.0  # minimum state delta that marks a boundary after it
    theta: float = 0.5  # minimum confidence for a placement to cut a unit


@dataclass(frozen=True)
class DecisionUnit:
    unit_id: str
    fragment_ids: tuple[str, ...]
    boundary_confidence: float
    fired_heuristics: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if (self.boundary_confidence > 0) != bool(self.fired_heuristics):
            raise ValueError("boundary confidence is positive exactly when a heuristic fired")

    def to_dict(self) -> dict:
        return {
            "confidence": self.boundary_confidence,
            "fragment_ids": list(self.fragment_ids),
            "heuristics": list(self.fired_heuristics),
            "unit_id": self.unit_id,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "DecisionUnit":
        return cls(
            data["unit_id"], tuple(data["fragment_ids"]), data["confidence"],
            tuple(data["heuristics"]),
        )


def is_invocation(fragment: Fragment, by_id: Mapping[str, Fragment]) -> bool:
    """A well-formed tool call that is not the completion record of its parent."""
    if fragment.family != "tool_call_payload" or not fragment.well_formed:
        return False
    tool = fragment.payload.get("tool")
    for parent_id in fragment.causal_parents:
        parent = by_id.get(parent_id)
        if (
            parent is not None
            and parent.family == "tool_call_payload"
            and parent.payload.get("tool") == tool
        ):
            return False
    return True


def boundary_placements(
    fragments: Sequence[Fragment], config: BoundaryConfig = BoundaryConfig()
) -> dict[int, tuple[float, tuple[str, ...]]]:
    """Position -> (combined confidence, heuristics); the boundary sits before the position."""
    by_id = {f.fragment_id: f for f in fragments}
    fired: dict[int, set[str]] = {}
    for pos, f in enumerate(fragments):
        if is_invocation(f, by_id):
            fired.setdefault(pos, set()).add(H2)
        elif f.family == "decision_event_log" and f.well_formed:
            kind = f.payload.get("kind")
            if kind == "human_approval":
                fired.setdefault(pos, set()).add(H3)
            elif kind == "constraint_fired":
                fired.setdefault(pos, set()).add(H4)
        elif f.family == "post_condition_state" and f.well_formed:
            if f.payload.get("delta_magnitude", 0) >= config.delta and pos + 1 < len(fragments):
                fired.setdefault(pos + 1, set()).add(H1)
    return {
        pos: (max(HEURISTIC_CONFIDENCE[h] for h in hs), tuple(sorted(hs)))
        for pos, hs in sorted(fired.items())
    }


def predicted_boundaries(
    fragments: Sequence[Fragment], config: BoundaryConfig = BoundaryConfig()
) -> list[int]:
    """Accepted cut positions; position 0 never counts as a cut."""
    return [
        pos
        for pos, (conf, _) in boundary_placements(fragments, config).items()
        if pos >= 1 and conf >= config.theta
    ]


def detect_boundaries(
    chain: Chain, config: BoundaryConfig = BoundaryConfig()
) -> tuple[list[DecisionUnit], bool]:
    """Partition the chain; the flag is False when no placement was accepted."""
    fragments = chain.fragments
    ids = chain.ids
    accepted = {
        pos: placed
        for pos, placed in boundary_placements(fragments, config).items()
        if placed[0] >= config.theta
    }
    if not accepted:
        return [DecisionUnit(f"{chain.chain_id}/u0", ids, 0.0, ())], False

    starts = [0] + [p for p in accepted if p >= 1]
    units = []
    for k, start in enumerate(starts):
        end = starts[k + 1] if k + 1 < len(starts) else len(ids)
        conf, heuristics = accepted.get(start, (0.0, ()))
        units.append(
            DecisionUnit(f"{chain.chain_id}/u{k}", ids[start:end], conf, heuristics)
        )
    return units, True
