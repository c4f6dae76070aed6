"""Core trial types, file I/O, and the preprocessing chain.

The chain mirrors the acquisition pipeline: bandpass + notch filtering
(zero phase, so artifact onsets keep their timing), mean-centering,
epoch extraction, and the smoothed mean-energy "artifact signal" that
detection and classification consume.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy.signal import butter, filtfilt, iirnotch, sosfiltfilt

from .errors import FormatError, SpecError


class ArtifactClass(Enum):
    """Muscular artifact categories. JAW_CLENCH is the four-electrode name
    for the same gesture family as JAW_MOVEMENT and aliases it."""

    JAW_MOVEMENT = "jaw_movement"
    JAW_CLENCH = "jaw_movement"  # noqa: PIE796 - deliberate alias
    HEAD_NOD = "head_nod"
    HEAD_TURN = "head_turn"
    EYE_BLINK = "eye_blink"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "ArtifactClass":
        key = text.strip().lower().replace("-", "_").replace(" ", "_")
        if key in ("jaw_clench", "jawclench"):
            return cls.JAW_CLENCH
        for member in cls:
            if member.value == key or member.name.lower() == key:
                return member
        raise ValueError(f"unknown artifact class: {text!r}")


CLASS_ORDER = (
    ArtifactClass.JAW_MOVEMENT,
    ArtifactClass.HEAD_NOD,
    ArtifactClass.HEAD_TURN,
    ArtifactClass.EYE_BLINK,
)


class Annotation(NamedTuple):
    """Ground-truth artifact window [start, end) in samples."""

    start: int
    end: int
    label: ArtifactClass


@dataclass(frozen=True)
class EegTrial:
    """Multi-channel sampled potentials, shape (channels, samples)."""

    data: np.ndarray
    sample_rate: float
    label: ArtifactClass | None = None
    subject_id: str = ""
    session_id: str = ""
    annotations: tuple[Annotation, ...] = ()

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[None, :]
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"trial data must be (channels>=1, samples>=1), got {arr.shape}")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")
        for ann in self.annotations:
            if not (0 <= ann.start < ann.end <= arr.shape[1]):
                raise ValueError(f"annotation {ann} outside trial of length {arr.shape[1]}")
        object.__setattr__(self, "data", arr)
        object.__setattr__(self, "annotations", tuple(self.annotations))

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def n_samples(self) -> int:
        return self.data.shape[1]

    @property
    def trial_id(self) -> str:
        return f"{self.subject_id}/{self.session_id}"


@dataclass(frozen=True)
class ArtifactSignal:
    """Smoothed mean-energy signature of a trial window (all samples >= 0)."""

    samples: np.ndarray
    sample_rate: float
    source_window: tuple[int, int]

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        start, end = self.source_window
        if arr.ndim != 1 or len(arr) != end - start:
            raise ValueError("artifact signal length must equal its source window")
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return len(self.samples)


@dataclass(frozen=True)
class FilterSpec:
    """Bandpass edges plus an optional in-band notch, all in Hz."""

    band_low: float = 0.3
    band_high: float = 60.0
    notch: float | None = 50.0
    order: int = 4

    def validate(self, sample_rate: float) -> None:
        nyquist = sample_rate / 2.0
        if not (0.0 < self.band_low < self.band_high < nyquist):
            raise SpecError(
                f"band ({self.band_low}, {self.band_high}) must lie inside (0, {nyquist})"
            )
        if self.notch is not None and not (self.band_low < self.notch < self.band_high):
            raise SpecError(f"notch {self.notch} must lie inside the passband")
        if self.order < 1:
            raise SpecError("filter order must be >= 1")


# ---------------------------------------------------------------------------
# file I/O

_HEADER_PREFIX = "# "


def _format_float(x: float) -> str:
    return repr(float(x))


def _trial_header(trial: EegTrial) -> str:
    label = trial.label.value if trial.label is not None else "none"
    for ident in (trial.subject_id, trial.session_id):
        if any(c.isspace() for c in ident):
            raise ValueError(f"identifier {ident!r} must not contain whitespace")
    return (
        f"# rate={_format_float(trial.sample_rate)} channels={trial.channels} "
        f"label={label} subject={trial.subject_id} session={trial.session_id}"
    )


def _parse_header(line: str, lineno: int) -> dict:
    fields = {}
    for token in line[1:].split():
        if "=" not in token:
            raise FormatError(f"bad header token {token!r}", lineno)
        key, _, value = token.partition("=")
        fields[key] = value
    for required in ("rate", "channels"):
        if required not in fields:
            raise FormatError(f"header missing {required!r}", lineno)
    return fields


def _finish_trial(fields, rows, annotations, lineno):
    if not rows:
        raise FormatError("trial has no sample rows", lineno)
    try:
        rate = float(fields["rate"])
        channels = int(fields["channels"])
    except ValueError as exc:
        raise FormatError(f"bad header value: {exc}", lineno) from exc
    data = np.asarray(rows, dtype=np.float64).T
    if data.shape[0] != channels:
        raise FormatError(
            f"header says {channels} channels but rows have {data.shape[0]}", lineno
        )
    label_text = fields.get("label", "none")
    label = None if label_text == "none" else ArtifactClass.parse(label_text)
    return EegTrial(
        data=data,
        sample_rate=rate,
        label=label,
        subject_id=fields.get("subject", ""),
        session_id=fields.get("session", ""),
        annotations=tuple(annotations),
    )


def load_trials(path: str | Path, format: str | None = None) -> list[EegTrial]:
    """Load trials from a CSV or JSONL file (format inferred from the suffix
    when not given). Raises FormatError naming the offending line."""
    path = Path(path)
    fmt = format or ("jsonl" if path.suffix.lower() in (".jsonl", ".json") else "csv")
    text = path.read_text(encoding="utf-8")
    if fmt == "jsonl":
        return _load_jsonl(text)
    if fmt == "csv":
        return _load_csv(text)
    raise ValueError(f"unknown format {fmt!r}")


def _load_csv(text: str) -> list[EegTrial]:
    trials: list[EegTrial] = []
    fields = None
    rows: list[list[float]] = []
    annotations: list[Annotation] = []
    width = None
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if fields is not None:
                trials.append(_finish_trial(fields, rows, annotations, lineno))
            fields = _parse_header(line, lineno)
            rows, annotations, width = [], [], None
        elif line.startswith("@"):
            if fields is None:
                raise FormatError("annotation before any trial header", lineno)
            parts = [p.strip() for p in line[1:].split(",")]
            if len(parts) != 3:
                raise FormatError("annotation needs start,end,class", lineno)
            try:
                annotations.append(
                    Annotation(int(parts[0]), int(parts[1]), ArtifactClass.parse(parts[2]))
                )
            except ValueError as exc:
                raise FormatError(f"bad annotation: {exc}", lineno) from exc
        else:
            if fields is None:
                raise FormatError("sample row before any trial header", lineno)
            try:
                row = [float(v) for v in line.split(",")]
            except ValueError as exc:
                raise FormatError(f"bad sample value: {exc}", lineno) from exc
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise FormatError(
                    f"ragged row: expected {width} values, got {len(row)}", lineno
                )
            rows.append(row)
    if fields is None:
        raise FormatError("file contains no trials", lineno or None)
    trials.append(_finish_trial(fields, rows, annotations, lineno))
    return trials


def _load_jsonl(text: str) -> list[EegTrial]:
    trials = []
    seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        seen = True
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"bad JSON: {exc}", lineno) from exc
        try:
            label = None if obj.get("label") in (None, "none") else ArtifactClass.parse(obj["label"])
            annotations = tuple(
                Annotation(int(s), int(e), ArtifactClass.parse(c))
                for s, e, c in obj.get("annotations", [])
            )
            trials.append(
                EegTrial(
                    data=np.asarray(obj["data"], dtype=np.float64),
                    sample_rate=float(obj["rate"]),
                    label=label,
                    subject_id=str(obj.get("subject", "")),
                    session_id=str(obj.get("session", "")),
                    annotations=annotations,
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad trial object: {exc}", lineno) from exc
    if not seen:
        raise FormatError("file contains no trials", None)
    return trials


def save_trials(trials, path: str | Path, format: str | None = None) -> None:
    """Write trials so that load_trials round-trips them bit-exactly."""
    path = Path(path)
    fmt = format or ("jsonl" if path.suffix.lower() in (".jsonl", ".json") else "csv")
    if fmt == "csv":
        chunks = []
        for trial in trials:
            chunks.append(_trial_header(trial))
            for row in trial.data.T:
                chunks.append(",".join(_format_float(v) for v in row))
            for ann in trial.annotations:
                chunks.append(f"@ {ann.start},{ann.end},{ann.label.value}")
        path.write_text("\n".join(chunks) + "\n", encoding="utf-8")
    elif fmt == "jsonl":
        lines = []
        for trial in trials:
            obj = {
                "rate": trial.sample_rate,
                "channels": trial.channels,
                "label": trial.label.value if trial.label else "none",
                "subject": trial.subject_id,
                "session": trial.session_id,
                "data": [[float(v) for v in ch] for ch in trial.data],
                "annotations": [[a.start, a.end, a.label.value] for a in trial.annotations],
            }
            lines.append(json.dumps(obj, separators=(",", ":")))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    else:
        raise ValueError(f"unknown format {fmt!r}")


# ---------------------------------------------------------------------------
# preprocessing

def bandpass_notch(trial: EegTrial, spec: FilterSpec | None = None) -> EegTrial:
    """Zero-phase bandpass plus optional notch, applied per channel.

    Forward-backward application keeps artifact onsets where they are,
    which the threshold detector depends on.
    """
    spec = spec or FilterSpec()
    spec.validate(trial.sample_rate)
    sos = butter(
        spec.order,
        [spec.band_low, spec.band_high],
        btype="bandpass",
        fs=trial.sample_rate,
        output="sos",
    )
    out = sosfiltfilt(sos, trial.data, axis=1)
    if spec.notch is not None:
        b, a = iirnotch(spec.notch, Q=30.0, fs=trial.sample_rate)
        out = filtfilt(b, a, out, axis=1)
    return replace(trial, data=out)


def mean_center(trial: EegTrial) -> EegTrial:
    """Subtract each channel's sample mean."""
    return replace(trial, data=trial.data - trial.data.mean(axis=1, keepdims=True))


def epoch(trial: EegTrial, start_sample: int, duration_s: float) -> EegTrial:
    """Cut a fixed-duration window; annotations inside it are re-based."""
    length = int(round(duration_s * trial.sample_rate))
    if length < 1:
        raise ValueError(f"epoch duration {duration_s}s yields no samples")
    end = start_sample + length
    if start_sample < 0 or end > trial.n_samples:
        raise ValueError(
            f"epoch [{start_sample}, {end}) outside trial of length {trial.n_samples}"
        )
    kept = tuple(
        Annotation(a.start - start_sample, a.end - start_sample, a.label)
        for a in trial.annotations
        if a.start >= start_sample and a.end <= end
    )
    return replace(trial, data=trial.data[:, start_sample:end], annotations=kept)


def moving_average(samples, m: int) -> np.ndarray:
    """Trailing (causal) moving average of length m.

    The first m-1 outputs average over the available prefix so the output
    keeps the input length without a startup spike.
    """
    if m < 1:
        raise ValueError("moving-average window must be >= 1")
    x = np.asarray(samples, dtype=np.float64)
    n = len(x)
    c = np.cumsum(x)
    out = np.empty(n)
    k = min(m, n)
    out[:k] = c[:k] / np.arange(1, k + 1)
    if n > m:
        out[m:] = (c[m:] - c[:-m]) / m
    return out


def default_smooth_len(sample_rate: float) -> int:
    """Smoothing window equivalent to 0.4 s (100 samples at 250 Hz)."""
    return max(1, int(round(0.4 * sample_rate)))


def artifact_signal(trial: EegTrial, smooth_len: int | None = None) -> ArtifactSignal:
    """Per-sample energy, averaged across channels, then smoothed.

    Energy is the squared amplitude, so the signature is invariant under a
    global sign flip of the input.
    """
    if smooth_len is None:
        smooth_len = default_smooth_len(trial.sample_rate)
    energy = (trial.data * trial.data).mean(axis=0)
    smoothed = moving_average(energy, smooth_len)
    return ArtifactSignal(smoothed, trial.sample_rate, (0, trial.n_samples))
