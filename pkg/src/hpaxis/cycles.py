"""Post-hoc classification of a trajectory's long-run behavior.

A run is classified from its cortisol channel after discarding an
initial transient: either it settles to a point, sustains a periodic
orbit, or the window is too short / too ambiguous to say. The decision
works from local maxima and minima of the sampled signal, with a
prominence threshold tied to the channel's own scale so that numerical
ripple around a stable focus never counts as oscillation.

A slowly decaying spiral is the hard case: it shows many regular peaks
long before the amplitude falls under the noise floor. To separate it
from a sustained orbit the classifier compares early against late
peak-to-trough amplitudes inside the analysis window; a clear downward
amplitude trend means the run is heading to a point even though its
terminal window still oscillates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .equilibria import EquilibriumSet
from .simulate import Trajectory

__all__ = ["CycleReport", "detect_cycle"]


@dataclass(frozen=True)
class CycleReport:
    """Outcome of trajectory classification.

    classification: "limit-cycle", "converged-to-point", or "undecided".
    period: mean peak spacing (limit cycles only).
    channel_ranges: per-channel (min, max) over the last few periods
        (limit cycles only).
    limit_point: terminal-window channel means (convergence only).
    matched_label: label of the nearest equilibrium to the limit point,
        when an equilibrium set was supplied.
    peak_count / peak_cv: accepted maxima and the coefficient of
        variation of their spacing.
    amplitude_trend: ratio of early to late peak-to-trough amplitude;
        values well above 1 indicate decay toward a point.
    noise_floor: the absolute prominence threshold used.
    window: (t_start, t_end) of the analysis window.
    note: free-text explanation of edge outcomes.
    """

    classification: str
    period: float | None = None
    channel_ranges: tuple[tuple[float, float], ...] | None = None
    limit_point: tuple[float, float, float, float] | None = None
    matched_label: str | None = None
    peak_count: int = 0
    peak_cv: float | None = None
    amplitude_trend: float | None = None
    noise_floor: float = math.nan
    window: tuple[float, float] = (math.nan, math.nan)
    note: str = ""


def _local_extrema(t: np.ndarray, y: np.ndarray, prominence: float):
    """Alternating peak/trough sequence with sub-sample peak refinement.

    Three-point maxima and minima are merged in time order; runs of
    same-type extrema keep only the most extreme member, and the final
    alternating sequence is pruned until every adjacent peak-trough gap
    clears the prominence threshold. Peak times are refined by fitting a
    parabola through the three samples around each maximum.
    """
    n = len(y)
    raw = []  # (index, +1 peak / -1 trough)
    for i in range(1, n - 1):
        if y[i - 1] < y[i] >= y[i + 1]:
            raw.append((i, +1))
        elif y[i - 1] > y[i] <= y[i + 1]:
            raw.append((i, -1))
    # collapse plateaus / duplicate types, keeping the extreme one
    merged: list[tuple[int, int]] = []
    for idx, kind in raw:
        if merged and merged[-1][1] == kind:
            prev = merged[-1][0]
            better = (y[idx] > y[prev]) if kind > 0 else (y[idx] < y[prev])
            if better:
                merged[-1] = (idx, kind)
        else:
            merged.append((idx, kind))
    # drop adjacent pairs whose vertical separation is below prominence
    changed = True
    while changed and len(merged) >= 2:
        changed = False
        for i in range(len(merged) - 1):
            a, b = merged[i], merged[i + 1]
            if abs(y[a[0]] - y[b[0]]) < prominence:
                del merged[i : i + 2]
                changed = True
                break
    peaks = []
    troughs = []
    for idx, kind in merged:
        if kind > 0:
            tt = t[idx]
            if 0 < idx < n - 1:
                y0, y1, y2 = y[idx - 1], y[idx], y[idx + 1]
                denom = y0 - 2.0 * y1 + y2
                if denom < 0.0:
                    shift = 0.5 * (y0 - y2) / denom
                    tt = t[idx] + shift * (t[idx + 1] - t[idx])
            peaks.append((tt, idx))
        else:
            troughs.append((t[idx], idx))
    return peaks, troughs


def _nearest_label(point, equilibria: EquilibriumSet | None):
    if equilibria is None or len(equilibria) == 0:
        return None
    best = None
    best_d = math.inf
    for eq in equilibria:
        d = 0.0
        for v, e in zip(point, eq.state()):
            scale = max(abs(e), 1e-12)
            d += ((v - e) / scale) ** 2
        if d < best_d:
            best_d = d
            best = eq.label
    return best


def detect_cycle(
    trajectory: Trajectory,
    transient_fraction: float = 0.5,
    equilibria: EquilibriumSet | None = None,
    noise_floor_factor: float = 1e-4,
    peak_cv_max: float = 0.05,
    min_peaks: int = 4,
    min_periods: float = 5.0,
    decay_trend_ratio: float = 1.4,
    range_periods: float = 3.0,
) -> CycleReport:
    """Classify the long-run behavior of a trajectory.

    The first ``transient_fraction`` of the run is discarded. A
    limit-cycle verdict requires at least ``min_peaks`` prominent
    cortisol maxima with spacing coefficient of variation below
    ``peak_cv_max``, an analysis window at least ``min_periods`` periods
    long, and no decaying amplitude trend. Convergence is declared when
    the terminal tenth of the window stays inside the noise floor, or
    when regular peaks exist but their amplitudes shrink by more than
    ``decay_trend_ratio`` across the window (a tightening spiral).
    Everything else is undecided.
    """
    t = trajectory.t
    y3 = trajectory.x3
    if not 0.0 <= transient_fraction < 1.0:
        raise ValueError(f"transient_fraction must lie in [0, 1), got {transient_fraction}")
    t_cut = t[0] + transient_fraction * (t[-1] - t[0])
    start = int(np.searchsorted(t, t_cut))
    start = min(start, len(t) - 2)
    tw = t[start:]
    yw = y3[start:]
    window = (float(tw[0]), float(tw[-1]))
    floor = noise_floor_factor * float(np.mean(np.abs(yw)))
    if floor == 0.0:
        floor = noise_floor_factor

    peaks, troughs = _local_extrema(tw, yw, floor)

    def terminal_report(note: str) -> CycleReport:
        tail = max(2, len(tw) // 10)
        xs = trajectory.x[start:][-tail:]
        point = tuple(float(v) for v in xs.mean(axis=0))
        return CycleReport(
            classification="converged-to-point",
            limit_point=point,
            matched_label=_nearest_label(point, equilibria),
            peak_count=len(peaks),
            noise_floor=floor,
            window=window,
            note=note,
        )

    if len(peaks) >= min_peaks:
        times = np.array([p[0] for p in peaks])
        gaps = np.diff(times)
        cv = float(np.std(gaps) / np.mean(gaps)) if np.mean(gaps) > 0 else math.inf
        period = float(np.mean(gaps))
        # peak-to-preceding-trough amplitudes, early vs late
        amps = []
        ti = 0
        for pt, pidx in peaks:
            prev = None
            while ti < len(troughs) and troughs[ti][1] < pidx:
                prev = troughs[ti]
                ti += 1
            ti = max(0, ti - 1)
            if prev is not None:
                amps.append(yw[pidx] - yw[prev[1]])
        trend = None
        if len(amps) >= 4:
            k = max(1, min(3, len(amps) // 3))
            early = float(np.mean(amps[:k]))
            late = float(np.mean(amps[-k:]))
            if late > 0.0:
                trend = early / late
        if cv <= peak_cv_max:
            if trend is not None and trend > decay_trend_ratio:
                rep = terminal_report(
                    f"regular peaks but amplitude decays (early/late = {trend:.2f})"
                )
                return CycleReport(
                    classification=rep.classification,
                    limit_point=rep.limit_point,
                    matched_label=rep.matched_label,
                    peak_count=len(peaks),
                    peak_cv=cv,
                    amplitude_trend=trend,
                    noise_floor=floor,
                    window=window,
                    note=rep.note,
                )
            span = window[1] - window[0]
            if span < min_periods * period:
                return CycleReport(
                    classification="undecided",
                    period=period,
                    peak_count=len(peaks),
                    peak_cv=cv,
                    amplitude_trend=trend,
                    noise_floor=floor,
                    window=window,
                    note=f"window covers only {span / period:.1f} periods",
                )
            t_tail = window[1] - range_periods * period
            sel = tw >= t_tail
            xs = trajectory.x[start:][sel]
            ranges = tuple(
                (float(xs[:, j].min()), float(xs[:, j].max())) for j in range(4)
            )
            return CycleReport(
                classification="limit-cycle",
                period=period,
                channel_ranges=ranges,
                peak_count=len(peaks),
                peak_cv=cv,
                amplitude_trend=trend,
                noise_floor=floor,
                window=window,
            )
        # irregular spacing: fall through to the terminal-window check
        if float(yw[-max(2, len(tw) // 10):].max() - yw[-max(2, len(tw) // 10):].min()) < floor:
            return terminal_report("irregular peaks died out")
        return CycleReport(
            classification="undecided",
            peak_count=len(peaks),
            peak_cv=cv,
            amplitude_trend=trend,
            noise_floor=floor,
            window=window,
            note=f"peak spacing too irregular (cv = {cv:.3f})",
        )

    tail = max(2, len(tw) // 10)
    if float(yw[-tail:].max() - yw[-tail:].min()) < floor:
        return terminal_report("terminal window flat within noise floor")
    return CycleReport(
        classification="undecided",
        peak_count=len(peaks),
        noise_floor=floor,
        window=window,
        note="no sustained oscillation and no settling within the window",
    )
