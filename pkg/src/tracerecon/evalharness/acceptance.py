"""Pass/fail checks of an evaluation against the published values and bands."""

from __future__ import annotations

from dataclasses import dataclass

from ..core import AGENTIC_CELLS, BASELINE_CELL, MatrixCell
from ..synthgen.calibration import CELL_MEAN_TARGETS, F1_TARGETS, MODAL_MODE_TARGETS
from .harness import Evaluation
from .tables import overclaim_table

INCIDENT_COMPLETENESS = 57.14
INCIDENT_TOLERANCE = 0.01
PREMIUM = 14.0
PREMIUM_TOLERANCE = 0.1
AGENTIC_DEFICIT = 24.9
DEFICIT_TOLERANCE = 0.1
F1_BAND = 0.10
F1_COLLAPSE_CEILING = 0.25
F1_SINGLE_WITHIN_FLOOR = 0.75
MODE6_SHARE, MODE6_TOLERANCE = 0.53, 0.02
OVERCLAIM_TARGETS = (80.7, 27.1, 23.6, 23.6, 45.7, 45.7)
INCIDENT_ROWS = {
    "fully_fillable": {"actor_identity_principal_authority", "output_action"},
    "partially_fillable": {"inputs", "post_condition_state"},
    "structurally_unfillable": {"policy_basis", "action_boundary_config_envelope"},
    "opaque": {"reasoning_trace"},
}


@dataclass(frozen=True)
class Check:
    key: str
    label: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{self.key}: {'PASS' if self.passed else 'FAIL'} ({self.detail})"


def _cell(arch: str, cov: str) -> MatrixCell:
    return MatrixCell(arch, cov)


def check_incidents(ev: Evaluation) -> Check:
    problems = []
    for inc in ev.incidents:
        pct = 100 * inc.completeness
        if abs(pct - INCIDENT_COMPLETENESS) > INCIDENT_TOLERANCE:
            problems.append(f"{inc.fixture.incident_id} at {pct:.2f}%")
        for tag, rows in INCIDENT_ROWS.items():
            got = {r for r, v in inc.report.verdicts.items() if v.tag == tag}
            if got != rows:
                problems.append(f"{inc.fixture.incident_id} {tag} rows {sorted(got)}")
    if abs(ev.premium - PREMIUM) > PREMIUM_TOLERANCE:
        problems.append(f"premium {ev.premium}")
    detail = "; ".join(problems) or f"3 incidents at 57.1%, premium {ev.premium} pp"
    return Check("incidents", "named-incident arithmetic", not problems, detail)


def check_baseline(ev: Evaluation) -> Check:
    s = ev.cells[BASELINE_CELL]
    values = [r.completeness for r in ev.scenarios if r.scenario.cell == BASELINE_CELL]
    ok = all(v == 1.0 for v in values) and (s.ci_low, s.ci_high) == (100.0, 100.0)
    return Check("baseline", "baseline ceiling", ok,
                 f"mean {s.mean_completeness:.1f} [{s.ci_low:.1f}, {s.ci_high:.1f}]")


def check_counts(ev: Evaluation) -> Check:
    problems = ev.pipeline_count_violations()
    return Check("T7", "row tallies", not problems, "; ".join(problems) or "counts exact")


def check_means(ev: Evaluation) -> Check:
    problems = []
    for cell, target in CELL_MEAN_TARGETS.items():
        mean = round(ev.cells[cell].mean_completeness, 1)
        if mean != target:
            problems.append(f"{cell.key} {mean} ≠ {target}")
    hw = ev.cells[_cell("hitl", "within_stack")]
    if (round(hw.ci_low, 1), round(hw.ci_high, 1)) != (94.3, 94.3):
        problems.append(f"hitl/within_stack CI [{hw.ci_low:.1f}, {hw.ci_high:.1f}]")
    if abs(ev.agentic_deficit - AGENTIC_DEFICIT) > DEFICIT_TOLERANCE:
        problems.append(f"agentic deficit {ev.agentic_deficit:.2f}")
    return Check("T3", "cell means", not problems,
                 "; ".join(problems) or f"7 means to one decimal, deficit {ev.agentic_deficit:.1f} pp")


def check_orderings(ev: Evaluation) -> Check:
    mean = {c: ev.cells[c].mean_completeness for c in AGENTIC_CELLS}
    problems = []
    for cov in ("within_stack", "cross_stack"):
        h, s, m = (mean[_cell(a, cov)] for a in ("hitl", "single_agent", "multi_agent"))
        if not h > s > m:
            problems.append(f"{cov}: hitl {h:.1f}, single {s:.1f}, multi {m:.1f}")
    for arch in ("single_agent", "multi_agent", "hitl"):
        if not mean[_cell(arch, "within_stack")] > mean[_cell(arch, "cross_stack")]:
            problems.append(f"{arch} within ≤ cross")
    return Check("orderings", "architecture and tier orderings", not problems,
                 "; ".join(problems) or "hitl > single > multi; within > cross")


def check_overclaim(ev: Evaluation) -> Check:
    rows = overclaim_table(ev)
    got = tuple(r["indicator_pp"] for r in rows[:6])
    ok = got == OVERCLAIM_TARGETS and rows[6]["indicator_pp"] == "qualitative_only" and all(v > 0 for v in got)
    return Check("T8", "overclaim indicators", ok,
                 ", ".join(f"+{v}" for v in got) + f", {rows[6]['indicator_pp']}")


def check_dominance(ev: Evaluation) -> Check:
    problems = []
    for cell, target in MODAL_MODE_TARGETS.items():
        d = ev.cells[cell].dominance
        if d.modal_mode != target:
            problems.append(f"{cell.key} modal {d.modal_mode} ≠ {target}")
    mw = ev.cells[_cell("multi_agent", "within_stack")].dominance
    if mw.share is None or abs(mw.share - MODE6_SHARE) > MODE6_TOLERANCE:
        problems.append(f"mode-6 share {mw.share}")
    hw = [r for r in ev.scenarios if r.scenario.cell == _cell("hitl", "within_stack")]
    if any(r.unfillable_tags() for r in hw):
        problems.append("hitl/within_stack has unfillable rows")
    return Check("T5", "modal failure modes", not problems,
                 "; ".join(problems) or f"modal modes 4, 3, 6, 3, n/a, 3; mode-6 share {mw.share:.2f}")


def check_f1(ev: Evaluation) -> Check:
    f1 = {c: ev.cells[c].f1 for c in AGENTIC_CELLS}
    problems = [f"{c.key} {f1[c]:.2f} outside {t} ± {F1_BAND}"
                for c, t in F1_TARGETS.items() if abs(f1[c] - t) > F1_BAND]
    mw = _cell("multi_agent", "within_stack")
    if min(f1, key=f1.get) != mw or f1[mw] >= F1_COLLAPSE_CEILING:
        problems.append("multi-agent within-stack is not the sub-0.25 minimum")
    if f1[_cell("single_agent", "within_stack")] <= F1_SINGLE_WITHIN_FLOOR:
        problems.append("single-agent within-stack F1 not above 0.75")
    if ev.cells[BASELINE_CELL].f1 is not None:
        problems.append("baseline F1 should be not applicable")
    return Check("T4", "boundary F1", not problems,
                 "; ".join(problems) or ", ".join(f"{f1[c]:.2f}" for c in F1_TARGETS))


def check_no_conflicting(ev: Evaluation) -> Check:
    reports = [r.report for r in ev.scenarios] + [i.report for i in ev.incidents]
    conflicting = sum(1 for rep in reports for v in rep.verdicts.values() if v.tag == "conflicting")
    return Check("nulls", "no conflicting verdicts", conflicting == 0,
                 f"{conflicting} conflicting verdicts across {len(reports)} runs")


def acceptance_checks(ev: Evaluation) -> list[Check]:
    return [
        check_incidents(ev), check_baseline(ev), check_counts(ev), check_means(ev),
        check_orderings(ev), check_overclaim(ev), check_dominance(ev), check_f1(ev),
        check_no_conflicting(ev),
    ]
