"""Streaming real-time engine for blink and jaw-clench driven input.

The engine smooths incoming samples with a trailing moving average, spends
the first stretch of the stream calibrating a personalized threshold
P_t = mu + 2*sigma, and then counts upward threshold crossings. Each
crossing resets a 1000 ms window; when the window lapses the accumulated
count is delivered as one event. In blink_and_jaw mode each crossing also
captures a 500 ms chunk from the crossing onset and classifies it against
reference templates with normalized DTW, so blinks and jaw clenches are
counted separately.

All timing is derived from sample counts, never the wall clock, so replays
are bit-reproducible.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .signal import ArtifactClass, EegTrial, moving_average
from .warp import Series, WarpVariant, dtw_distance


@dataclass(frozen=True)
class StreamConfig:
    """Defaults follow the single-electrode setup; four-electrode streams
    use 500 Hz and mode blink_and_jaw."""

    sample_rate: float = 512.0
    smoothing_m: int = 50
    calibration_s: float = 20.0
    blink_window_ms: float = 1000.0
    chunk_ms: float = 500.0
    sigma_mult: float = 2.0

    def __post_init__(self):
        if min(self.sample_rate, self.smoothing_m, self.calibration_s,
               self.blink_window_ms, self.chunk_ms, self.sigma_mult) <= 0:
            raise ValueError("all stream parameters must be positive")
        if int(round(self.chunk_ms / 1000.0 * self.sample_rate)) < 1:
            raise ValueError("chunk_ms must cover at least one sample")

    @property
    def calibration_samples(self) -> int:
        return int(round(self.calibration_s * self.sample_rate))

    @property
    def window_samples(self) -> int:
        return int(round(self.blink_window_ms / 1000.0 * self.sample_rate))

    @property
    def chunk_samples(self) -> int:
        return int(round(self.chunk_ms / 1000.0 * self.sample_rate))


@dataclass(frozen=True)
class CalibrationState:
    """Moments of the smoothed calibration stretch and the threshold."""

    mu: float
    sigma: float
    p_t: float
    samples_seen: int

    @classmethod
    def from_moments(cls, mu, sigma, samples_seen, sigma_mult=2.0):
        return cls(mu, sigma, mu + sigma_mult * sigma, samples_seen)


@dataclass(frozen=True)
class ArtifactEvent:
    """One delivered gesture event; kind is Blink, JawClench, or Unknown."""

    kind: str
    count: int
    t_ms: float
    confidence: float | None = None

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("event count must be >= 1")

    def to_dict(self) -> dict:
        out = {"t_ms": self.t_ms, "kind": self.kind, "count": self.count}
        if self.confidence is not None:
            out["confidence"] = self.confidence
        return out


@dataclass(frozen=True)
class TemplateBank:
    """Reference gesture waveforms for chunk classification."""

    entries: tuple[tuple[Series, ArtifactClass], ...]

    def __post_init__(self):
        if not self.entries:
            raise ValueError("template bank must not be empty")

    def classes(self) -> set[ArtifactClass]:
        return {cls for _, cls in self.entries}


_KIND_BY_CLASS = {
    ArtifactClass.EYE_BLINK: "Blink",
    ArtifactClass.JAW_MOVEMENT: "JawClench",
}


def calibrate_offline(samples, config: StreamConfig | None = None) -> CalibrationState:
    """Moments of the smoothed sample sequence; P_t = mu + 2*sigma."""
    config = config or StreamConfig()
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 1 or len(samples) < 2:
        raise ValueError("calibration needs at least two samples")
    smoothed = moving_average(samples, config.smoothing_m)
    mu = float(smoothed.mean())
    sigma = float(smoothed.std())
    return CalibrationState.from_moments(mu, sigma, len(samples), config.sigma_mult)


def classify_chunk(chunk: Series, bank: TemplateBank) -> tuple[ArtifactClass, float | None]:
    """Nearest template under normalized DTW; returns (class, margin).

    The margin is the distance gap to the nearest template of a different
    class (None when the bank has only one class).
    """
    scored = sorted(
        (dtw_distance(chunk, template, WarpVariant.NORMALIZED_DTW).distance, idx)
        for idx, (template, _) in enumerate(bank.entries)
    )
    best_dist, best_idx = scored[0]
    best_cls = bank.entries[best_idx][1]
    margin = None
    for dist, idx in scored[1:]:
        if bank.entries[idx][1] is not best_cls:
            margin = dist - best_dist
            break
    return best_cls, margin


class OnlineEngine:
    """Single-owner streaming state machine; feed samples, collect events.

    Modes: "blink_only" counts every crossing as a blink; "blink_and_jaw"
    classifies a 500 ms chunk per crossing against the template bank and
    counts per gesture class.
    """

    def __init__(self, config: StreamConfig | None = None, mode: str = "blink_only",
                 templates: TemplateBank | None = None):
        if mode not in ("blink_only", "blink_and_jaw"):
            raise ValueError(f"unknown mode {mode!r}")
        if mode == "blink_and_jaw":
            if templates is None:
                raise ValueError("blink_and_jaw mode needs a template bank")
            have = {_KIND_BY_CLASS.get(cls) for cls in templates.classes()}
            if not {"Blink", "JawClench"} <= have:
                raise ValueError("bank needs at least one blink and one jaw template")
        self.config = config or StreamConfig()
        self.mode = mode
        self.templates = templates
        self._window = deque(maxlen=self.config.smoothing_m)
        self._window_sum = 0.0
        self._index = 0  # samples consumed so far
        self._calib_sum = 0.0
        self._calib_sumsq = 0.0
        self.calibration: CalibrationState | None = None
        self._prev_smoothed: float | None = None
        self._pending: dict[str, list] = {}  # kind -> [count, confidence]
        self._deadline: int | None = None
        self._chunk: list[float] | None = None

    @property
    def calibrated(self) -> bool:
        return self.calibration is not None

    def _detector_value(self, frame) -> tuple[float, float]:
        """(detector sample, raw chunk sample) for one input frame.

        Single-channel streams threshold the raw amplitude; multi-channel
        streams threshold the mean energy across channels. The chunk signal
        is the channel mean either way.
        """
        arr = np.atleast_1d(np.asarray(frame, dtype=np.float64))
        if arr.size == 1:
            v = float(arr[0])
            return v, v
        return float((arr * arr).mean()), float(arr.mean())

    def _smooth(self, value: float) -> float:
        if len(self._window) == self._window.maxlen:
            self._window_sum -= self._window[0]
        self._window.append(value)
        self._window_sum += value
        return self._window_sum / len(self._window)

    def _ms(self, sample_index: int) -> float:
        return sample_index * 1000.0 / self.config.sample_rate

    def _emit_pending(self, at_index: int) -> list[ArtifactEvent]:
        events = []
        for kind in ("Blink", "JawClench", "Unknown"):
            if kind in self._pending:
                count, confidence = self._pending[kind]
                events.append(ArtifactEvent(kind, count, self._ms(at_index), confidence))
        self._pending.clear()
        self._deadline = None
        return events

    def _finish_chunk(self) -> None:
        chunk = Series(np.asarray(self._chunk))
        self._chunk = None
        cls, margin = classify_chunk(chunk, self.templates)
        kind = _KIND_BY_CLASS.get(cls, "Unknown")
        bucket = self._pending.setdefault(kind, [0, margin])
        bucket[0] += 1
        bucket[1] = margin

    def feed(self, frame) -> list[ArtifactEvent]:
        """Consume one sample frame; returns any events that became due."""
        detector, raw = self._detector_value(frame)
        smoothed = self._smooth(detector)
        index = self._index
        self._index += 1

        if self.calibration is None:
            self._calib_sum += smoothed
            self._calib_sumsq += smoothed * smoothed
            if self._index >= self.config.calibration_samples:
                n = self._index
                mu = self._calib_sum / n
                var = max(self._calib_sumsq / n - mu * mu, 0.0)
                self.calibration = CalibrationState.from_moments(
                    mu, var ** 0.5, n, self.config.sigma_mult
                )
                self._prev_smoothed = smoothed
            return []

        events: list[ArtifactEvent] = []
        if self._deadline is not None and index >= self._deadline:
            events.extend(self._emit_pending(self._deadline))

        if self._chunk is not None:
            self._chunk.append(raw)
            if len(self._chunk) >= self.config.chunk_samples:
                self._finish_chunk()
        else:
            p_t = self.calibration.p_t
            crossing = self._prev_smoothed <= p_t < smoothed
            if crossing:
                self._deadline = index + self.config.window_samples
                if self.mode == "blink_only":
                    bucket = self._pending.setdefault("Blink", [0, None])
                    bucket[0] += 1
                else:
                    self._chunk = [raw]

        self._prev_smoothed = smoothed
        return events

    def flush(self) -> list[ArtifactEvent]:
        """Deliver whatever is still pending at end of stream.

        An in-flight chunk is zero-padded to full length before it is
        classified, so a terminal gesture is not dropped.
        """
        if self._chunk is not None:
            self._chunk.extend([0.0] * (self.config.chunk_samples - len(self._chunk)))
            self._finish_chunk()
        if not self._pending:
            return []
        at = self._deadline if self._deadline is not None else self._index
        return self._emit_pending(at)


def replay(trial: EegTrial, engine: OnlineEngine) -> list[ArtifactEvent]:
    """Feed a recorded trial through the engine sample by sample."""
    events: list[ArtifactEvent] = []
    for frame in trial.data.T:
        events.extend(engine.feed(frame if trial.channels > 1 else float(frame[0])))
    events.extend(engine.flush())
    return events
