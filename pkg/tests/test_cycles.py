"""Trajectory classification on hand-built signals."""

import math

import numpy as np
import pytest

from hpaxis import CycleReport, Trajectory, detect_cycle


def synthetic(t, x3, x1=None, x2=None, x4=None):
    """Trajectory whose cortisol channel is the given signal."""
    n = len(t)
    cols = [
        x1 if x1 is not None else np.full(n, 7.0),
        x2 if x2 is not None else np.full(n, 21.0),
        np.asarray(x3, dtype=float),
        x4 if x4 is not None else np.full(n, 0.1),
    ]
    return Trajectory(t=np.asarray(t, dtype=float), x=np.column_stack(cols), events=(), scenario=None)


def test_pure_sine_is_limit_cycle():
    t = np.arange(0.0, 2000.0 + 0.5, 0.5)
    tr = synthetic(t, 3.0 + 0.5 * np.sin(2.0 * math.pi * t / 100.0))
    rep = detect_cycle(tr, transient_fraction=0.5)
    assert rep.classification == "limit-cycle"
    assert rep.period == pytest.approx(100.0, rel=1e-3)
    assert rep.peak_cv < 0.01
    assert rep.peak_count >= 9
    lo, hi = rep.channel_ranges[2]
    assert lo == pytest.approx(2.5, abs=1e-3)
    assert hi == pytest.approx(3.5, abs=1e-3)
    # constant channels collapse to zero-width ranges
    c0 = rep.channel_ranges[0]
    assert c0[0] == c0[1] == 7.0


def test_decaying_spiral_converges():
    t = np.arange(0.0, 2000.0 + 0.5, 0.5)
    y = 3.0 + 0.8 * np.exp(-t / 400.0) * np.sin(2.0 * math.pi * t / 100.0)
    rep = detect_cycle(synthetic(t, y), transient_fraction=0.25)
    assert rep.classification == "converged-to-point"
    assert rep.amplitude_trend is not None and rep.amplitude_trend > 1.4
    assert "amplitude decays" in rep.note
    assert rep.limit_point[2] == pytest.approx(3.0, abs=0.01)
    assert rep.matched_label is None


def test_constant_signal_converges():
    t = np.arange(0.0, 500.0 + 0.5, 0.5)
    rep = detect_cycle(synthetic(t, np.full(len(t), 2.75)))
    assert rep.classification == "converged-to-point"
    assert rep.note == "terminal window flat within noise floor"
    assert rep.limit_point == pytest.approx((7.0, 21.0, 2.75, 0.1), rel=1e-12)
    assert rep.peak_count == 0


def test_tiny_ripple_is_convergence_not_cycle():
    # oscillation far below the prominence floor must not count
    t = np.arange(0.0, 2000.0 + 0.5, 0.5)
    y = 3.0 + 1e-9 * np.sin(2.0 * math.pi * t / 100.0)
    rep = detect_cycle(synthetic(t, y))
    assert rep.classification == "converged-to-point"
    assert rep.limit_point[2] == pytest.approx(3.0, abs=1e-6)


def test_short_window_is_undecided():
    # regular peaks, but the window holds fewer than five periods
    t = np.arange(0.0, 1500.0 + 0.5, 0.5)
    y = 3.0 + 0.5 * np.sin(2.0 * math.pi * t / 400.0)
    rep = detect_cycle(synthetic(t, y), transient_fraction=0.0, min_peaks=4)
    assert rep.classification == "undecided"
    assert "periods" in rep.note


def test_irregular_spacing_is_undecided():
    # peaks whose spacing drifts well past the cv gate
    t = np.arange(0.0, 3000.0 + 0.5, 0.5)
    phase = 2.0 * math.pi * (t + 40.0 * np.sin(2.0 * math.pi * t / 900.0)) / 100.0
    y = 3.0 + 0.5 * np.sin(phase)
    rep = detect_cycle(synthetic(t, y), transient_fraction=0.0)
    assert rep.classification == "undecided"
    assert "irregular" in rep.note
    assert rep.peak_cv > 0.05


def test_matched_label_names_nearest_equilibrium(eqset):
    e1 = eqset.by_label("E1")
    t = np.arange(0.0, 500.0 + 0.5, 0.5)
    n = len(t)
    tr = synthetic(
        t,
        np.full(n, e1.x3 * 1.0005),
        x1=np.full(n, e1.x1),
        x2=np.full(n, e1.x2),
        x4=np.full(n, e1.x4),
    )
    rep = detect_cycle(tr, equilibria=eqset)
    assert rep.classification == "converged-to-point"
    assert rep.matched_label == "E1"


def test_transient_fraction_validation():
    t = np.arange(0.0, 100.0 + 0.5, 0.5)
    tr = synthetic(t, np.full(len(t), 3.0))
    with pytest.raises(ValueError, match="transient_fraction"):
        detect_cycle(tr, transient_fraction=1.0)


def test_transient_cut_hides_early_disturbance():
    # a large early excursion must not affect the verdict once discarded
    t = np.arange(0.0, 2000.0 + 0.5, 0.5)
    y = 3.0 + 0.5 * np.sin(2.0 * math.pi * t / 100.0)
    y[: 400] += 10.0 * np.exp(-t[:400] / 20.0)
    rep = detect_cycle(synthetic(t, y), transient_fraction=0.5)
    assert rep.classification == "limit-cycle"
    assert rep.period == pytest.approx(100.0, rel=1e-3)


def test_report_window_reflects_transient_cut():
    t = np.arange(0.0, 1000.0 + 0.5, 0.5)
    rep = detect_cycle(synthetic(t, np.full(len(t), 1.0)), transient_fraction=0.3)
    assert rep.window[0] == pytest.approx(300.0, abs=0.5)
    assert rep.window[1] == 1000.0
