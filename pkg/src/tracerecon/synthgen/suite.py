"""The 140-scenario suite: manifests, generation, on-disk layout and digest."""

from __future__ import annotations

import hashlib
import json
import random
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from ..adapters import Fragment, normalize, read_jsonl, write_jsonl
from ..core import ALL_CELLS, MatrixCell
from ..scoring import CONTAINERS
from .generator import build_scenario, derive_seed, expected_profile
from .modes import AMBIGUITY, DIFFUSION, FRAGMENTATION

PER_CELL = 20
RUN_SNAPSHOT = "run_config.json"  # written beside outputs; names paths, so not content
DECLARED_BREAK = {
    "single_agent": FRAGMENTATION,
    "multi_agent": DIFFUSION,
    "hitl": AMBIGUITY,
    "non_agentic_baseline": None,
}


@lru_cache(maxsize=1)
def load_profiles() -> dict[str, Any]:
    """The committed calibration library (see tools/calibrate_profiles.py)."""
    text = resources.files(__package__).joinpath("profiles.json").read_text(encoding="utf-8")
    return json.loads(text)


@dataclass(frozen=True)
class ScenarioManifest:
    scenario_id: str
    seed: int
    cell: MatrixCell
    ground_truth_boundaries: tuple[int, ...]
    expected_profile: Mapping[str, Mapping[str, Any]]
    injected_modes: tuple[tuple[int, str], ...]  # (mode, row)
    container_flags: Mapping[str, bool] = field(
        default_factory=lambda: {c: True for c in CONTAINERS}
    )
    declared_break: str | None = None
    expected_f1: float | None = None
    stack_boundary: int | None = None

    def row_modes(self) -> dict[str, int]:
        return {row: mode for mode, row in self.injected_modes}

    @property
    def modal_mode(self) -> int | None:
        unfillable = [r for r, p in self.expected_profile.items()
                      if p["tag"] == "structurally_unfillable"]
        modes = Counter(self.row_modes()[r] for r in unfillable if r in self.row_modes())
        if not modes:
            return None
        return min(modes, key=lambda m: (-modes[m], m))

    def to_dict(self) -> dict[str, Any]:
        return {
            "cell": self.cell.key,
            "container_flags": dict(sorted(self.container_flags.items())),
            "declared_break": self.declared_break,
            "expected_f1": self.expected_f1,
            "expected_profile": {r: dict(v) for r, v in sorted(self.expected_profile.items())},
            "ground_truth_boundaries": list(self.ground_truth_boundaries),
            "injected_modes": [{"mode": m, "row": r} for m, r in self.injected_modes],
            "modal_mode": self.modal_mode,
            "scenario_id": self.scenario_id,
            "seed": self.seed,
            "stack_boundary": self.stack_boundary,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ScenarioManifest":
        return cls(
            scenario_id=data["scenario_id"],
            seed=data["seed"],
            cell=MatrixCell.from_key(data["cell"]),
            ground_truth_boundaries=tuple(data["ground_truth_boundaries"]),
            expected_profile={r: dict(v) for r, v in data["expected_profile"].items()},
            injected_modes=tuple((d["mode"], d["row"]) for d in data["injected_modes"]),
            container_flags=dict(data["container_flags"]),
            declared_break=data.get("declared_break"),
            expected_f1=data.get("expected_f1"),
            stack_boundary=data.get("stack_boundary"),
        )


@dataclass(frozen=True)
class Scenario:
    manifest: ScenarioManifest
    fragments: tuple[Fragment, ...]  # in write order (shuffled)

    @property
    def scenario_id(self) -> str:
        return self.manifest.scenario_id

    @property
    def cell(self) -> MatrixCell:
        return self.manifest.cell


@dataclass(frozen=True)
class Suite:
    master_seed: int
    scenarios: tuple[Scenario, ...]

    def by_cell(self) -> dict[MatrixCell, list[Scenario]]:
        out: dict[MatrixCell, list[Scenario]] = {c: [] for c in ALL_CELLS}
        for s in self.scenarios:
            out[s.cell].append(s)
        return out

    @property
    def manifests(self) -> list[ScenarioManifest]:
        return [s.manifest for s in self.scenarios]


def cell_dirname(cell: MatrixCell) -> str:
    return f"{cell.architecture}__{cell.stack_coverage}"


def scenario_id_for(cell: MatrixCell, index: int) -> str:
    return f"{cell.architecture}.{cell.stack_coverage}.{index:02d}"


def generate_scenario(master_seed: int, cell: MatrixCell, index: int,
                      library: Mapping[str, Any] | None = None) -> Scenario:
    library = library or load_profiles()
    entry = library["cells"][cell.key][index]
    sid = scenario_id_for(cell, index)
    seed = derive_seed(master_seed, sid)
    built = build_scenario(cell, sid, seed, entry)
    write_order = list(built.fragments)
    random.Random(seed ^ 0x5EED).shuffle(write_order)
    manifest = ScenarioManifest(
        scenario_id=sid,
        seed=seed,
        cell=cell,
        ground_truth_boundaries=built.truth_boundaries,
        expected_profile=expected_profile(entry),
        injected_modes=built.injected,
        declared_break=DECLARED_BREAK[cell.architecture],
        expected_f1=None if cell.is_baseline else entry["expected_f1"],
        stack_boundary=built.boundary_position,
    )
    return Scenario(manifest, tuple(write_order))


def generate_suite(master_seed: int = 42, library: Mapping[str, Any] | None = None) -> Suite:
    """20 scenarios for each of the six agentic cells plus 20 baseline scenarios."""
    library = library or load_profiles()
    scenarios = [
        generate_scenario(master_seed, cell, i, library)
        for cell in ALL_CELLS
        for i in range(PER_CELL)
    ]
    return Suite(master_seed, tuple(scenarios))


# ---------------------------------------------------------------------------
# Disk layout
# ---------------------------------------------------------------------------

def _dump(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def write_suite(suite: Suite, out_dir: str | Path) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    index = []
    for s in suite.scenarios:
        folder = out / cell_dirname(s.cell)
        folder.mkdir(exist_ok=True)
        write_jsonl(folder / f"{s.scenario_id}.fragments.jsonl", s.fragments)
        (folder / f"{s.scenario_id}.manifest.json").write_text(_dump(s.manifest.to_dict()))
        index.append({"cell": s.cell.key, "dir": cell_dirname(s.cell),
                      "scenario_id": s.scenario_id, "seed": s.manifest.seed})
    (out / "index.json").write_text(_dump({"master_seed": suite.master_seed, "scenarios": index}))
    return out


def read_index(suite_dir: str | Path) -> dict[str, Any]:
    return json.loads((Path(suite_dir) / "index.json").read_text())


def read_suite(suite_dir: str | Path) -> Suite:
    """Load manifests and normalized fragments back from disk."""
    root = Path(suite_dir)
    index = read_index(root)
    scenarios = []
    for item in index["scenarios"]:
        folder = root / item["dir"]
        manifest = ScenarioManifest.from_dict(
            json.loads((folder / f"{item['scenario_id']}.manifest.json").read_text())
        )
        lines = read_jsonl(folder / f"{item['scenario_id']}.fragments.jsonl")
        scenarios.append(Scenario(manifest, tuple(normalize(lines, "generic_jsonl"))))
    return Suite(index["master_seed"], tuple(scenarios))


def suite_digest(suite_dir: str | Path) -> str:
    """sha256 over every suite file's relative path and bytes, in sorted path order.

    The run-config snapshot is left out: it records where the suite was
    written, which is not part of its content.
    """
    root = Path(suite_dir)
    h = hashlib.sha256()
    for path in sorted(p for p in root.rglob("*") if p.is_file() and p.name != RUN_SNAPSHOT):
        h.update(path.relative_to(root).as_posix().encode())
        h.update(b"\0")
        h.update(path.read_bytes())
    return h.hexdigest()


def scenario_fragments_in_order(scenario: Scenario) -> list[Fragment]:
    return sorted(scenario.fragments, key=lambda f: (f.ts is None, f.ts))


def iter_cells(suite: Suite, cells: Iterable[MatrixCell] = ALL_CELLS) -> Iterable[tuple[MatrixCell, Sequence[Scenario]]]:
    groups = suite.by_cell()
    for cell in cells:
        yield cell, groups[cell]
