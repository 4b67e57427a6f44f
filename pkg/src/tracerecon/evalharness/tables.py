"""Golden result tables (T3, T4, T5, T7, T8) as tab-separated text and one JSON document."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from ..core import AGENTIC_CELLS, ALL_CELLS, IMPLEMENTATION_ROWS
from ..scoring import CONTAINER_ROWS, CONTAINERS, QUALITATIVE_ONLY, container_baseline
from ..synthgen.modes import FAILURE_MODES
from .harness import NOT_APPLICABLE, Evaluation

TABLE_IDS = ("T3", "T4", "T5", "T7", "T8")
TAGS = ("fully_fillable", "partially_fillable", "structurally_unfillable", "opaque")


def pct(value: float) -> float:
    """One-decimal percentage, with -0.0 folded to 0.0."""
    return round(value, 1) + 0.0


def completeness_table(ev: Evaluation) -> list[dict[str, Any]]:
    rows = []
    for cell in ALL_CELLS:
        s = ev.cells[cell]
        rows.append({
            "architecture": cell.architecture, "stack_coverage": cell.stack_coverage,
            "n": s.n, "mean": pct(s.mean_completeness),
            "ci_low": pct(s.ci_low), "ci_high": pct(s.ci_high),
        })
    return rows


def f1_table(ev: Evaluation) -> list[dict[str, Any]]:
    rows = []
    for cell in ALL_CELLS:
        f1 = ev.cells[cell].f1
        rows.append({"architecture": cell.architecture, "stack_coverage": cell.stack_coverage,
                     "f1": NOT_APPLICABLE if f1 is None else round(f1, 2)})
    for incident in ev.incidents:
        rows.append({"architecture": incident.fixture.incident_id, "stack_coverage": "named_incident",
                     "f1": NOT_APPLICABLE})
    return rows


def dominance_table(ev: Evaluation) -> list[dict[str, Any]]:
    rows = []
    for cell in AGENTIC_CELLS:
        d = ev.cells[cell].dominance
        rows.append({
            "architecture": cell.architecture, "stack_coverage": cell.stack_coverage,
            "modal_mode": NOT_APPLICABLE if d.modal_mode is None else d.modal_mode,
            "mode_name": NOT_APPLICABLE if d.modal_mode is None else FAILURE_MODES[d.modal_mode].name,
            "share": NOT_APPLICABLE if d.share is None else round(d.share, 2),
            "dominant_break": d.dominant_break,
        })
    return rows


def row_table(ev: Evaluation) -> list[dict[str, Any]]:
    tallies = ev.row_tallies()
    total = len(ev.scenarios)
    rows = []
    for row in IMPLEMENTATION_ROWS:
        entry: dict[str, Any] = {"row": row}
        for tag in TAGS:
            entry[f"{tag}_count"] = tallies[row][tag]
            entry[f"{tag}_pct"] = pct(100 * tallies[row][tag] / total)
        rows.append(entry)
    return rows


def overclaim_table(ev: Evaluation) -> list[dict[str, Any]]:
    tallies = ev.row_tallies()
    flags = [r.scenario.manifest.container_flags for r in ev.scenarios]
    indicators = container_baseline(flags, tallies)
    total = len(ev.scenarios)
    rows = []
    for k, container in enumerate(CONTAINERS, start=1):
        row = CONTAINER_ROWS[container]
        indicator = indicators[container]
        if indicator == QUALITATIVE_ONLY:
            rows.append({"n": k, "container": container, "tested_row": QUALITATIVE_ONLY,
                         "baseline_pct": QUALITATIVE_ONLY, "comparator_full_pct": QUALITATIVE_ONLY,
                         "indicator_pp": QUALITATIVE_ONLY})
            continue
        present = sum(1 for f in flags if f.get(container, False))
        rows.append({
            "n": k, "container": container, "tested_row": row,
            "baseline_pct": pct(100 * present / total),
            "comparator_full_pct": pct(100 * tallies[row]["fully_fillable"] / total),
            "indicator_pp": indicator,
        })
    return rows


def build_tables(ev: Evaluation) -> dict[str, list[dict[str, Any]]]:
    return {
        "T3": completeness_table(ev),
        "T4": f1_table(ev),
        "T5": dominance_table(ev),
        "T7": row_table(ev),
        "T8": overclaim_table(ev),
    }


def incident_rows(ev: Evaluation) -> list[dict[str, Any]]:
    rows = []
    for incident in ev.incidents:
        counts = incident.counts()
        rows.append({
            "incident_id": incident.fixture.incident_id,
            "completeness": pct(100 * incident.completeness),
            **{tag: counts[tag] for tag in TAGS},
        })
    return rows


def results_document(ev: Evaluation) -> dict[str, Any]:
    return {
        "master_seed": ev.master_seed,
        "bootstrap": {"resamples": ev.config.resamples, "seed": ev.config.bootstrap_seed},
        "thresholds": {"delta": ev.config.pipeline.delta, "theta": ev.config.pipeline.theta},
        "tables": build_tables(ev),
        "incidents": incident_rows(ev),
        "incident_mean": pct(ev.incident_mean),
        "premium": ev.premium,
        "agentic_deficit": pct(ev.agentic_deficit),
    }


def to_tsv(rows: list[dict[str, Any]]) -> str:
    if not rows:
        return ""
    header = list(rows[0])
    lines = ["\t".join(header)]
    for row in rows:
        lines.append("\t".join(str(row[h]) for h in header))
    return "\n".join(lines) + "\n"


def dumps(document: Any) -> str:
    return json.dumps(document, sort_keys=True, indent=2) + "\n"


def write_tables(ev: Evaluation, out_dir: str | Path) -> list[Path]:
    """Write T*.tsv, incidents.tsv and results.json; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    doc = results_document(ev)
    written = []
    for tid, rows in doc["tables"].items():
        path = out / f"{tid}.tsv"
        path.write_text(to_tsv(rows))
        written.append(path)
    path = out / "incidents.tsv"
    path.write_text(to_tsv(doc["incidents"]))
    written.append(path)
    path = out / "results.json"
    path.write_text(dumps(doc))
    written.append(path)
    return written
