"""Synthetic EEG generator: labeled artifact trials, continuous streams,
and canonical gesture templates.

Waveform families are chosen so the four classes leave distinct energy
signatures: a short biphasic pulse (blink), a sustained high-frequency
burst (jaw), one slow swell (head nod), and two slow opposite swells
(head turn). Channel gains vary per class so multichannel features also
separate. Generation is fully determined by the seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import OverlapError
from .online import TemplateBank
from .signal import Annotation, ArtifactClass, EegTrial
from .warp import Series


@dataclass(frozen=True)
class ClassShape:
    """Duration/amplitude ranges one artifact class is drawn from."""

    duration_ms: tuple[float, float]
    amplitude: tuple[float, float]


DEFAULT_SHAPES = {
    ArtifactClass.EYE_BLINK: ClassShape((180.0, 320.0), (20.0, 28.0)),
    ArtifactClass.JAW_MOVEMENT: ClassShape((900.0, 1200.0), (12.0, 18.0)),
    ArtifactClass.HEAD_NOD: ClassShape((1200.0, 1800.0), (10.0, 15.0)),
    ArtifactClass.HEAD_TURN: ClassShape((1600.0, 2200.0), (10.0, 15.0)),
}

# per-class channel gain patterns, cycled over the available channels
_CHANNEL_GAINS = {
    ArtifactClass.EYE_BLINK: (1.2, 1.2, 0.4, 0.4),
    ArtifactClass.JAW_MOVEMENT: (0.9, 1.1, 0.9, 1.1),
    ArtifactClass.HEAD_NOD: (1.0, 1.0, 1.0, 1.0),
    ArtifactClass.HEAD_TURN: (0.6, 1.4, 0.6, 1.4),
}


@dataclass(frozen=True)
class GenSpec:
    sample_rate: float = 250.0
    channels: int = 4
    noise_sigma: float = 1.0
    drift_mult: float = 2.0  # slow baseline wander, in units of noise_sigma
    shapes: dict = field(default_factory=lambda: dict(DEFAULT_SHAPES))
    seed: int = 0

    def __post_init__(self):
        for cls, shape in self.shapes.items():
            lo, hi = shape.duration_ms
            if not (0 < lo <= hi):
                raise ValueError(f"bad duration range for {cls}")


def _waveform(cls: ArtifactClass, n: int, amplitude: float, rate: float) -> np.ndarray:
    """Class waveforms leave distinct energy-lobe patterns that unconstrained
    warping cannot erase: one narrow lobe (blink), two lobes of fast tremor
    (jaw clench/release), one wide swell (nod), three alternating swells
    (turn left-right-left)."""
    t = np.linspace(0.0, 1.0, n)
    if cls is ArtifactClass.EYE_BLINK:
        # biphasic: sharp positive lobe then negative rebound
        return amplitude * np.sin(np.pi * t) * np.sin(2.0 * np.pi * t)
    if cls is ArtifactClass.JAW_MOVEMENT:
        carrier = np.sin(2.0 * np.pi * 30.0 * (n / rate) * t)
        return amplitude * carrier * np.abs(np.sin(2.0 * np.pi * t))
    if cls is ArtifactClass.HEAD_NOD:
        return amplitude * np.sin(np.pi * t)
    if cls is ArtifactClass.HEAD_TURN:
        return amplitude * np.sin(3.0 * np.pi * t)
    raise ValueError(f"no waveform for {cls}")


def _render_burst(cls, shape, rng, rate, channels):
    """Draw one jittered burst: (channels, n) block to add into a stream."""
    dur_ms = rng.uniform(*shape.duration_ms)
    amp = rng.uniform(*shape.amplitude)
    n = max(2, int(round(dur_ms / 1000.0 * rate)))
    wave = _waveform(cls, n, amp, rate)
    gains = np.array(
        [_CHANNEL_GAINS[cls][c % len(_CHANNEL_GAINS[cls])] for c in range(channels)]
    )
    return gains[:, None] * wave[None, :]


def _background(spec: GenSpec, rng, n: int) -> np.ndarray:
    """White noise plus a slow correlated baseline wander (EEG-like).

    The wander amplitude scales with noise_sigma, so noise-free generation
    stays exactly zero outside bursts.
    """
    data = rng.normal(0.0, spec.noise_sigma, size=(spec.channels, n))
    amp = spec.drift_mult * spec.noise_sigma
    if amp > 0.0:
        t = np.arange(n) / spec.sample_rate
        freq = rng.uniform(0.2, 0.5)
        # independent phases per channel: burst-drift cross terms partially
        # cancel in the mean energy, as they would across scattered electrodes
        phases = rng.uniform(0.0, 2.0 * np.pi, size=spec.channels)
        gains = rng.uniform(0.8, 1.2, size=spec.channels)
        data += (gains[:, None]
                 * np.sin(2.0 * np.pi * freq * t[None, :] + phases[:, None]) * amp)
    return data


def gen_trials(
    spec: GenSpec,
    per_class: int,
    classes=None,
    subjects: int = 1,
    sessions: int = 1,
    epoch_s: float = 3.0,
) -> list[EegTrial]:
    """Labeled 3 s epochs, one embedded artifact each, annotated.

    With multiple subjects/sessions, each (subject, session) block gets
    ``per_class`` trials per class, for the split-based protocols.
    """
    if per_class < 1:
        raise ValueError("per_class must be >= 1")
    classes = tuple(classes or DEFAULT_SHAPES.keys())
    rng = np.random.default_rng(spec.seed)
    n = int(round(epoch_s * spec.sample_rate))
    margin = int(round(0.1 * spec.sample_rate))
    # the trailing 0.4 s energy smoothing smears bursts rightward; keep the
    # whole smeared signature inside the epoch
    end_margin = margin + int(round(0.4 * spec.sample_rate))
    trials = []
    for si in range(subjects):
        for se in range(sessions):
            for cls in classes:
                shape = spec.shapes[cls]
                for _ in range(per_class):
                    data = _background(spec, rng, n)
                    burst = _render_burst(cls, shape, rng, spec.sample_rate, spec.channels)
                    width = burst.shape[1]
                    start = int(rng.integers(margin, n - width - end_margin))
                    data[:, start : start + width] += burst
                    trials.append(
                        EegTrial(
                            data=data,
                            sample_rate=spec.sample_rate,
                            label=cls,
                            subject_id=f"s{si:02d}",
                            session_id=f"sess{se:02d}",
                            annotations=(Annotation(start, start + width, cls),),
                        )
                    )
    return trials


def gen_stream(spec: GenSpec, duration_s: float, events) -> EegTrial:
    """Continuous noise stream with artifact bursts at requested times.

    ``events`` is a list of (time_s, ArtifactClass); drawn burst windows
    must fit the stream and must not overlap each other.
    """
    rng = np.random.default_rng(spec.seed)
    n = int(round(duration_s * spec.sample_rate))
    data = _background(spec, rng, n)
    placed: list[tuple[int, int]] = []
    annotations = []
    for time_s, cls in events:
        burst = _render_burst(cls, spec.shapes[cls], rng, spec.sample_rate, spec.channels)
        start = int(round(time_s * spec.sample_rate))
        end = start + burst.shape[1]
        if start < 0 or end > n:
            raise OverlapError(f"event at {time_s}s does not fit the stream")
        for s, e in placed:
            if start < e and s < end:
                raise OverlapError(f"event at {time_s}s overlaps another event")
        placed.append((start, end))
        data[:, start:end] += burst
        annotations.append(Annotation(start, end, cls))
    annotations.sort(key=lambda a: a.start)
    return EegTrial(
        data=data,
        sample_rate=spec.sample_rate,
        subject_id="synth",
        session_id="stream",
        annotations=tuple(annotations),
    )


def gen_templates(spec: GenSpec) -> TemplateBank:
    """Noise-free canonical blink and jaw-clench waveforms at spec rate."""
    entries = []
    for cls in (ArtifactClass.EYE_BLINK, ArtifactClass.JAW_CLENCH):
        shape = spec.shapes[cls]
        dur_ms = (shape.duration_ms[0] + shape.duration_ms[1]) / 2.0
        amp = (shape.amplitude[0] + shape.amplitude[1]) / 2.0
        n = max(2, int(round(dur_ms / 1000.0 * spec.sample_rate)))
        entries.append((Series(_waveform(cls, n, amp, spec.sample_rate)), cls))
    return TemplateBank(tuple(entries))
