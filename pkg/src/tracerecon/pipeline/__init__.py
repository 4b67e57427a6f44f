"""The six-stage reconstruction pipeline with per-stage feasibility gates.

:func:`reconstruct` runs Stage 0 (adapter normalization) through Stage 6
(report emission) and returns one report per attributed chain. Every stage
logs exactly one gate verdict; a fatal failure propagates its verdict to the
stages that could not run, so the log is always complete.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

from ..adapters import AdapterDescriptor, Fragment, RegimeUnsupported, get_descriptor, normalize
from ..core import StructurallyUnfillable
from ..scoring import recommendations_for
from .boundaries import (
    BoundaryConfig,
    DecisionUnit,
    HEURISTIC_CONFIDENCE,
    HEURISTICS,
    boundary_placements,
    detect_boundaries,
    is_invocation,
    predicted_boundaries,
)
from .chains import Chain, ChainAssembly, assemble_chains
from .manifest import Manifest, NoFragmentsRecovered, collect_fragments
from .mapping import all_unfillable, map_to_schema
from .ordering import OrderedFragments, constraint_graph, order_fragments
from .report import (
    GATE_VERDICTS,
    FeasibilityReport,
    GateContractError,
    GateLogEntry,
    emit_report,
    report_from_document,
)

__all__ = [
    "BoundaryConfig", "Chain", "ChainAssembly", "DecisionUnit", "FeasibilityReport",
    "GATE_VERDICTS", "GateContractError", "GateLogEntry", "HEURISTICS", "HEURISTIC_CONFIDENCE",
    "Manifest", "NoFragmentsRecovered", "OrderedFragments", "PipelineConfig",
    "all_unfillable", "assemble_chains", "boundary_placements", "collect_fragments",
    "constraint_graph", "detect_boundaries", "emit_report", "is_invocation", "map_to_schema",
    "order_fragments", "predicted_boundaries", "reconstruct", "reconstruct_fragments",
    "report_from_document",
]


@dataclass(frozen=True)
class PipelineConfig:
    delta: float = 1.0
    theta: float = 0.5
    order_threshold: float = 1.0

    @property
    def boundary(self) -> BoundaryConfig:
        return BoundaryConfig(self.delta, self.theta)


def _failed_report(
    scenario_id: str, log: list[GateLogEntry], verdict: str, note: str
) -> FeasibilityReport:
    # stages that could not run inherit the failure verdict
    for stage in range(len(log), 6):
        log.append(GateLogEntry(stage, verdict, f"skipped: {note}"))
    verdicts = all_unfillable(note)
    return emit_report(scenario_id, None, (), verdicts, log, recommendations_for(verdicts))


def reconstruct(
    records: Sequence[Any],
    descriptor: AdapterDescriptor | str = "generic_jsonl",
    *,
    scenario_id: str | None = None,
    config: PipelineConfig = PipelineConfig(),
) -> list[FeasibilityReport]:
    """Run all stages over regime-native records."""
    if isinstance(descriptor, str):
        try:
            descriptor = get_descriptor(descriptor)
        except RegimeUnsupported as exc:
            return [_failed_report(scenario_id or "", [GateLogEntry(0, "regime_unsupported", str(exc))],
                                   "regime_unsupported", str(exc))]
    try:
        fragments = normalize(records, descriptor)
    except RegimeUnsupported as exc:
        log = [GateLogEntry(0, "regime_unsupported", str(exc))]
        return [_failed_report(scenario_id or "", log, "regime_unsupported", str(exc))]
    return reconstruct_fragments(
        fragments, descriptor, scenario_id=scenario_id, config=config,
    )


def reconstruct_fragments(
    fragments: Sequence[Fragment],
    descriptor: AdapterDescriptor | str = "generic_jsonl",
    *,
    scenario_id: str | None = None,
    config: PipelineConfig = PipelineConfig(),
) -> list[FeasibilityReport]:
    """Stages 1-6 over already-normalized fragments."""
    if isinstance(descriptor, str):
        descriptor = get_descriptor(descriptor)
    if scenario_id is None:
        scenario_id = next((f.scenario_id for f in fragments if f.scenario_id), "")
    flagged = [f.fragment_id for f in fragments if not f.well_formed]
    log = [GateLogEntry(
        0, "passed",
        f"{descriptor.regime_class}: {len(fragments)} fragments, {len(flagged)} malformed",
        flagged,
    )]

    try:
        manifest = collect_fragments(fragments)
    except NoFragmentsRecovered as exc:
        log.append(GateLogEntry(1, "no_fragments_recovered", str(exc)))
        return [_failed_report(scenario_id, log, "no_fragments_recovered", str(exc))]
    log.append(GateLogEntry(1, "passed", f"{len(manifest)} pointers", manifest.flagged))

    ordered = order_fragments(manifest)
    if ordered.cycle_ids:
        log.append(GateLogEntry(2, "unordered_fragments", "causal cycle", ordered.cycle_ids))
    elif ordered.min_confidence < config.order_threshold:
        loose = tuple(i for i in ordered.ids if ordered.confidence[i] < config.order_threshold)
        log.append(GateLogEntry(2, "unordered_fragments", "order resolved by tie-break", loose))
    else:
        log.append(GateLogEntry(2, "passed", "total order"))

    assembly = assemble_chains(ordered)
    if assembly.rejected:
        log.append(GateLogEntry(
            3, "unattributed_evidence_rejected",
            f"{len(assembly.rejected)} fragments without attribution", assembly.rejected,
        ))
    else:
        log.append(GateLogEntry(3, "passed", f"{len(assembly.chains)} chains"))
    if not assembly.chains:
        log.append(GateLogEntry(4, "boundary_unrecoverable", "no attributed chain to segment"))
        log.append(GateLogEntry(5, "property_unfillable_mapped", "no attributed chain to map"))
        verdicts = all_unfillable("no attributed chain")
        return [emit_report(scenario_id, None, (), verdicts, log, recommendations_for(verdicts))]

    reports = []
    for chain in assembly.chains:
        chain_log = list(log)
        units, recovered = detect_boundaries(chain, config.boundary)
        predicted = predicted_boundaries(chain.fragments, config.boundary)
        if recovered:
            chain_log.append(GateLogEntry(4, "passed", f"{len(units)} units"))
        else:
            chain_log.append(GateLogEntry(4, "boundary_unrecoverable", "no heuristic fired", chain.ids))

        order_conf = ordered.confidence_within(chain.ids)
        verdicts = map_to_schema(
            chain.fragments,
            [descriptor.fillability_mask],
            order_confidence=order_conf,
            order_threshold=config.order_threshold,
        )
        unfillable = sorted(r for r, v in verdicts.items() if isinstance(v, StructurallyUnfillable))
        if unfillable:
            chain_log.append(GateLogEntry(5, "property_unfillable_mapped", ", ".join(unfillable)))
        else:
            chain_log.append(GateLogEntry(5, "passed", "all rows mapped"))

        cooperation = (
            "non_cooperative"
            if any(f.regime.cooperation == "non_cooperative" for f in chain.fragments)
            else "cooperative"
        )
        reports.append(emit_report(
            scenario_id, chain.chain_id, units, verdicts, chain_log,
            recommendations_for(verdicts, None, cooperation), predicted,
        ))
    return reports
