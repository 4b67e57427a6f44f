from __future__ import annotations

import numpy as np
import pytest
from scipy import stats

from tracerecon.evalharness import bootstrap_ci, boundary_f1, match_boundaries, mode_dominance
from tracerecon.synthgen import AMBIGUITY, DIFFUSION, FRAGMENTATION

from .properties import check_bootstrap_degenerate, check_f1_bounds, check_f1_edges


def test_f1_edges():
    assert boundary_f1([], []) == 1.0
    assert boundary_f1([3], []) == 0.0
    assert boundary_f1([], [3]) == 0.0
    assert boundary_f1([3, 7], [3, 7]) == 1.0


def test_f1_tolerance_of_one_position():
    assert boundary_f1([4], [3]) == 1.0
    assert boundary_f1([5], [3]) == 0.0
    assert boundary_f1([2, 4], [3]) == pytest.approx(2 / 3)


def test_matching_is_one_to_one_and_nearest_first():
    assert match_boundaries([3, 4], [4]) == [(4, 4)]
    assert match_boundaries([4], [3, 5]) == [(4, 3)]


def test_f1_properties():
    check_f1_edges()
    check_f1_bounds()


def test_bootstrap_is_seeded_and_contains_the_mean():
    values = [50.0, 60.0, 70.0, 80.0, 90.0, 65.0]
    a = bootstrap_ci(values, seed=1)
    assert a == bootstrap_ci(values, seed=1)
    assert a.low < a.mean < a.high
    assert a.mean == pytest.approx(np.mean(values))


def test_bootstrap_agrees_with_scipy_percentile_interval():
    rng = np.random.default_rng(5)
    values = rng.normal(70, 10, size=20)
    ours = bootstrap_ci(values, seed=3, resamples=4000)
    ref = stats.bootstrap((values,), np.mean, n_resamples=4000, method="percentile",
                          random_state=np.random.default_rng(3)).confidence_interval
    assert ours.low == pytest.approx(ref.low, abs=1.0)
    assert ours.high == pytest.approx(ref.high, abs=1.0)


def test_bootstrap_degenerate_and_empty():
    assert bootstrap_ci([94.3] * 20).low == 94.3
    check_bootstrap_degenerate()
    with pytest.raises(ValueError):
        bootstrap_ci([])


def test_mode_dominance_examples():
    d = mode_dominance([6, 6, 5, None], DIFFUSION)
    assert (d.modal_mode, d.share, d.dominant_break) == (6, 0.5, DIFFUSION)
    d = mode_dominance([3, 4, 4, 3], FRAGMENTATION)
    assert d.modal_mode == 3 and d.dominant_break == FRAGMENTATION
    d = mode_dominance([], AMBIGUITY)
    assert (d.modal_mode, d.share, d.dominant_break) == (None, None, AMBIGUITY)
