"""Boundary F1, bootstrap intervals and failure-mode dominance."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..synthgen.modes import FAILURE_MODES

BOOTSTRAP_RESAMPLES = 1000


def match_boundaries(predicted: Iterable[int], truth: Iterable[int], tolerance: int = 1) -> list[tuple[int, int]]:
    """Greedy one-to-one matching, nearest pairs first, ties to the earlier truth.

    Returns (predicted, truth) pairs within ``tolerance`` positions.
    """
    pred, true = sorted(set(predicted)), sorted(set(truth))
    candidates = sorted(
        (abs(p - t), t, p) for p in pred for t in true if abs(p - t) <= tolerance
    )
    used_p, used_t, pairs = set(), set(), []
    for _, t, p in candidates:
        if p in used_p or t in used_t:
            continue
        used_p.add(p)
        used_t.add(t)
        pairs.append((p, t))
    return sorted(pairs, key=lambda pt: pt[1])


def boundary_f1(predicted: Iterable[int], truth: Iterable[int], tolerance: int = 1) -> float:
    pred, true = set(predicted), set(truth)
    if not pred and not true:
        return 1.0
    if not pred or not true:
        return 0.0
    tp = len(match_boundaries(pred, true, tolerance))
    return 2 * tp / (len(pred) + len(true))


@dataclass(frozen=True)
class Interval:
    mean: float
    low: float
    high: float

    def to_dict(self) -> dict[str, float]:
        return {"high": self.high, "low": self.low, "mean": self.mean}


def bootstrap_ci(values: Sequence[float], seed: int = 0, resamples: int = BOOTSTRAP_RESAMPLES,
                 level: float = 0.95) -> Interval:
    """Percentile bootstrap interval of the mean."""
    data = np.asarray(values, dtype=float)
    if data.size == 0:
        raise ValueError("bootstrap needs at least one value")
    if np.all(data == data[0]):
        # every resample is the same vector; skip float summation error
        return Interval(float(data[0]), float(data[0]), float(data[0]))
    rng = np.random.default_rng(seed)
    draws = rng.integers(0, data.size, size=(resamples, data.size))
    means = data[draws].mean(axis=1)
    tail = (1 - level) / 2 * 100
    low, high = np.percentile(means, [tail, 100 - tail])
    return Interval(float(data.mean()), float(low), float(high))


@dataclass(frozen=True)
class ModeDominance:
    modal_mode: int | None
    share: float | None
    counts: Mapping[int, int]
    dominant_break: str | None

    def to_dict(self) -> dict[str, object]:
        return {
            "counts": {str(k): v for k, v in sorted(self.counts.items())},
            "dominant_break": self.dominant_break,
            "modal_mode": self.modal_mode,
            "share": self.share,
        }


def mode_dominance(unfillable_tags: Sequence[int | None], declared_break: str | None = None) -> ModeDominance:
    """Modal mode over a cell's unfillable rows (one entry per row, None if untagged).

    share = rows carrying the modal mode / all unfillable rows; ties go to the
    lower mode id. With no unfillable rows the mode and share are not
    applicable and the dominant break is the cell's declared one.
    """
    counts = Counter(t for t in unfillable_tags if t is not None)
    if not unfillable_tags or not counts:
        return ModeDominance(None, None, dict(counts), declared_break)
    modal = min(counts, key=lambda m: (-counts[m], m))
    share = counts[modal] / len(unfillable_tags)
    return ModeDominance(modal, share, dict(counts), FAILURE_MODES[modal].break_group)
