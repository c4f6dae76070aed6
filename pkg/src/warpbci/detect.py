"""Threshold-based artifact detection and overlap-scored F1 evaluation.

The detector thresholds the smoothed mean-energy signature at
mean + eta * sigma. Epoched detection reports one onset/completion window;
continuous detection emits every above-threshold run, merging runs that are
separated by less than a small gap so one physical artifact is not counted
twice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signal import Annotation, ArtifactSignal, EegTrial, artifact_signal

# eta values the continuous-detection sweep walks by default
DEFAULT_ETA_GRID = tuple(round(-0.1 + 0.1 * i, 1) for i in range(16))


@dataclass(frozen=True)
class ThresholdSpec:
    """Threshold = mean + eta * sigma of the artifact signal."""

    eta: float

    EPOCHED_DEFAULT = -1.0
    CONTINUOUS_DEFAULT = 0.8

    def __post_init__(self):
        if not np.isfinite(self.eta):
            raise ValueError("eta must be finite")


@dataclass(frozen=True)
class DetectedEvent:
    """Inclusive [onset, offset] sample window of one detected artifact.

    A single-sample crossing yields onset == offset.
    """

    onset: int
    offset: int
    peak_energy: float
    trial_id: str = ""

    def __post_init__(self):
        if self.onset > self.offset or self.onset < 0:
            raise ValueError(f"bad event window [{self.onset}, {self.offset}]")


def threshold(sig: ArtifactSignal, spec: ThresholdSpec) -> float:
    """mean + eta * population sigma of the signature."""
    if len(sig) == 0:
        raise ValueError("empty artifact signal")
    samples = sig.samples
    return float(samples.mean() + spec.eta * samples.std())


def detect_in_epoch(
    sig: ArtifactSignal, spec: ThresholdSpec | None = None, trial_id: str = ""
) -> DetectedEvent | None:
    """First/last sample strictly above threshold, or None if none is."""
    spec = spec or ThresholdSpec(ThresholdSpec.EPOCHED_DEFAULT)
    thr = threshold(sig, spec)
    above = sig.samples > thr
    if not above.any():
        return None
    onset = int(np.argmax(above))
    offset = int(len(above) - 1 - np.argmax(above[::-1]))
    peak = float(sig.samples[onset : offset + 1].max())
    return DetectedEvent(onset, offset, peak, trial_id)


def _above_runs(above: np.ndarray) -> list[tuple[int, int]]:
    """Maximal [start, end] inclusive runs of True."""
    idx = np.flatnonzero(above)
    if len(idx) == 0:
        return []
    splits = np.flatnonzero(np.diff(idx) > 1)
    starts = np.concatenate(([idx[0]], idx[splits + 1]))
    ends = np.concatenate((idx[splits], [idx[-1]]))
    return list(zip(starts.tolist(), ends.tolist()))


def detect_continuous(
    trial: EegTrial,
    spec: ThresholdSpec | None = None,
    smooth_len: int | None = None,
    merge_gap_s: float = 0.2,
) -> list[DetectedEvent]:
    """All above-threshold runs over the whole recording, gap-merged.

    Events come back disjoint and sorted by onset.
    """
    spec = spec or ThresholdSpec(ThresholdSpec.CONTINUOUS_DEFAULT)
    sig = artifact_signal(trial, smooth_len)
    return _detect_in_signal(sig, spec, merge_gap_s, trial.trial_id)


def _detect_in_signal(
    sig: ArtifactSignal, spec: ThresholdSpec, merge_gap_s: float, trial_id: str
) -> list[DetectedEvent]:
    thr = threshold(sig, spec)
    runs = _above_runs(sig.samples > thr)
    gap = int(round(merge_gap_s * sig.sample_rate))
    merged: list[list[int]] = []
    for start, end in runs:
        if merged and start - merged[-1][1] - 1 < gap:
            merged[-1][1] = end
        else:
            merged.append([start, end])
    return [
        DetectedEvent(s, e, float(sig.samples[s : e + 1].max()), trial_id)
        for s, e in merged
    ]


def match_events(
    detected: list[DetectedEvent],
    truth: tuple[Annotation, ...] | list[Annotation],
    overlap_min: float = 0.6,
) -> tuple[int, int, int]:
    """Count (tp, fp, fn) under one-to-one greedy matching.

    A detection claims the earliest unmatched truth window it covers by at
    least ``overlap_min`` of the truth's length.
    """
    if not (0.0 < overlap_min <= 1.0):
        raise ValueError("overlap_min must lie in (0, 1]")
    taken = [False] * len(truth)
    tp = 0
    for ev in sorted(detected, key=lambda e: (e.onset, e.offset)):
        for t_idx, ann in enumerate(truth):
            if taken[t_idx]:
                continue
            inter = min(ev.offset + 1, ann.end) - max(ev.onset, ann.start)
            if inter > 0 and inter / (ann.end - ann.start) >= overlap_min:
                taken[t_idx] = True
                tp += 1
                break
    fp = len(detected) - tp
    fn = len(truth) - tp
    return tp, fp, fn


def f1_sweep(
    trials: list[EegTrial],
    etas=DEFAULT_ETA_GRID,
    smooth_len: int | None = None,
    merge_gap_s: float = 0.2,
    overlap_min: float = 0.6,
) -> list[tuple[float, float]]:
    """F1 per eta, aggregated over all annotated trials, sorted by eta."""
    if not trials:
        raise ValueError("no trials to sweep")
    signatures = [(artifact_signal(t, smooth_len), t.annotations, t.trial_id) for t in trials]
    table = []
    for eta in sorted(etas):
        spec = ThresholdSpec(eta)
        tp = fp = fn = 0
        for sig, annotations, trial_id in signatures:
            events = _detect_in_signal(sig, spec, merge_gap_s, trial_id)
            a, b, c = match_events(events, annotations, overlap_min)
            tp, fp, fn = tp + a, fp + b, fn + c
        f1 = 2.0 * tp / (2.0 * tp + fp + fn) if (2 * tp + fp + fn) else 0.0
        table.append((float(eta), f1))
    return table
