"""Run the pipeline over the suite and the incidents, then reduce to cell summaries."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from ..core import ALL_CELLS, IMPLEMENTATION_ROWS, MatrixCell
from ..pipeline import FeasibilityReport, PipelineConfig, reconstruct_fragments
from ..scoring import Tensor, build_tensor
from ..synthgen import Scenario, Suite, generate_suite, validate_calibration
from ..synthgen.calibration import CalibrationResult, check_row_counts
from ..synthgen.suite import DECLARED_BREAK
from .incidents import NamedIncidentFixture, load_incidents, run_incident
from .metrics import BOOTSTRAP_RESAMPLES, ModeDominance, bootstrap_ci, boundary_f1, mode_dominance

NOT_APPLICABLE = "not_applicable"
UNFILLABLE = "structurally_unfillable"


class CalibrationFailure(RuntimeError):
    """The suite does not satisfy the pinned calibration constraints."""

    def __init__(self, result: CalibrationResult):
        self.result = result
        super().__init__("; ".join(result.lines()))


@dataclass(frozen=True)
class EvalConfig:
    pipeline: PipelineConfig = PipelineConfig()
    resamples: int = BOOTSTRAP_RESAMPLES
    bootstrap_seed: int = 0


@dataclass(frozen=True)
class ScenarioResult:
    scenario: Scenario
    report: FeasibilityReport
    f1: float | None

    @property
    def completeness(self) -> float:
        return self.report.completeness

    def unfillable_tags(self) -> list[int | None]:
        """One entry per unfillable row: the manifest's mode tag for it, or None."""
        modes = self.scenario.manifest.row_modes()
        return [modes.get(r) for r in IMPLEMENTATION_ROWS if self.report.verdicts[r].tag == UNFILLABLE]


@dataclass(frozen=True)
class CellSummary:
    cell: MatrixCell
    n: int
    mean_completeness: float  # percent
    ci_low: float
    ci_high: float
    f1: float | None  # None = not applicable
    dominance: ModeDominance | None  # None for the baseline

    def __post_init__(self) -> None:
        if not self.ci_low - 1e-9 <= self.mean_completeness <= self.ci_high + 1e-9:
            raise ValueError("bootstrap interval does not contain the mean")


@dataclass(frozen=True)
class IncidentResult:
    fixture: NamedIncidentFixture
    report: FeasibilityReport

    @property
    def completeness(self) -> float:
        return self.report.completeness

    def counts(self) -> dict[str, int]:
        tally = {"fully_fillable": 0, "partially_fillable": 0, UNFILLABLE: 0, "opaque": 0}
        for v in self.report.verdicts.values():
            tally[v.tag] = tally.get(v.tag, 0) + 1
        return tally


@dataclass(frozen=True)
class Evaluation:
    master_seed: int
    config: EvalConfig
    scenarios: tuple[ScenarioResult, ...]
    cells: Mapping[MatrixCell, CellSummary]
    incidents: tuple[IncidentResult, ...]
    tensor: Tensor
    calibration: CalibrationResult
    extra: Mapping[str, Any] = field(default_factory=dict)

    def row_tallies(self) -> dict[str, dict[str, int]]:
        return {row: self.tensor.row_tally(row) for row in IMPLEMENTATION_ROWS}

    @property
    def incident_mean(self) -> float:
        return 100 * sum(i.completeness for i in self.incidents) / len(self.incidents)

    @property
    def premium(self) -> float:
        """Single-agent cross-stack mean minus the incident mean, from one-decimal means."""
        synthetic = self.cells[MatrixCell("single_agent", "cross_stack")].mean_completeness
        return round(round(synthetic, 1) - round(self.incident_mean, 1), 1)

    @property
    def agentic_deficit(self) -> float:
        agentic = [s.mean_completeness for c, s in self.cells.items() if not c.is_baseline]
        baseline = next(s.mean_completeness for c, s in self.cells.items() if c.is_baseline)
        return baseline - sum(agentic) / len(agentic)

    def pipeline_count_violations(self) -> list[str]:
        return [str(v) for v in check_row_counts(self.row_tallies())]


def primary_report(reports: Sequence[FeasibilityReport]) -> FeasibilityReport:
    """The scenario's main chain: the one covering most decision units, then first."""
    return max(reports, key=lambda r: sum(len(u.fragment_ids) for u in r.boundary_units))


def run_scenario(scenario: Scenario, config: PipelineConfig = PipelineConfig()) -> ScenarioResult:
    reports = reconstruct_fragments(list(scenario.fragments), "generic_jsonl",
                                    scenario_id=scenario.scenario_id, config=config)
    report = primary_report(reports)
    f1 = None
    if not scenario.cell.is_baseline:
        f1 = boundary_f1(report.predicted_boundaries, scenario.manifest.ground_truth_boundaries)
    return ScenarioResult(scenario, report, f1)


def summarize_cell(cell: MatrixCell, results: Sequence[ScenarioResult], config: EvalConfig) -> CellSummary:
    values = [100 * r.completeness for r in results]
    interval = bootstrap_ci(values, seed=config.bootstrap_seed, resamples=config.resamples)
    if cell.is_baseline:
        return CellSummary(cell, len(results), interval.mean, interval.low, interval.high, None, None)
    f1 = sum(r.f1 for r in results) / len(results)
    tags = [t for r in results for t in r.unfillable_tags()]
    return CellSummary(cell, len(results), interval.mean, interval.low, interval.high, f1,
                       mode_dominance(tags, DECLARED_BREAK[cell.architecture]))


def evaluate(suite: Suite, config: EvalConfig = EvalConfig(), *, check_calibration: bool = True) -> Evaluation:
    """Run everything; refuses with :class:`CalibrationFailure` on an uncalibrated suite."""
    calibration = validate_calibration(suite.manifests)
    if check_calibration and not calibration.passed:
        raise CalibrationFailure(calibration)
    results = tuple(run_scenario(s, config.pipeline) for s in suite.scenarios)
    grouped: dict[MatrixCell, list[ScenarioResult]] = {c: [] for c in ALL_CELLS}
    for r in results:
        grouped[r.scenario.cell].append(r)
    cells = {c: summarize_cell(c, rs, config) for c, rs in grouped.items() if rs}
    tensor = build_tensor((r.scenario.cell, "generic_jsonl", r.report.verdicts) for r in results)
    incidents = tuple(IncidentResult(f, run_incident(f, config.pipeline)) for f in load_incidents())
    return Evaluation(suite.master_seed, config, results, cells, incidents, tensor, calibration)


def run_all(master_seed: int = 42, config: EvalConfig = EvalConfig()) -> Evaluation:
    return evaluate(generate_suite(master_seed), config)
