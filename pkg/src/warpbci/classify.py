"""Distance-based kNN artifact classification and evaluation protocols.

Classification scores a query feature against every reference with the
chosen warping distance and takes a majority vote over the k nearest.
Evaluation reproduces the three study designs: intra-session (stratified
50/50 split), inter-session (train on one session, test on another), and
inter-subject (disjoint subject groups).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .detect import ThresholdSpec, detect_in_epoch
from .errors import ProtocolError
from .signal import CLASS_ORDER, ArtifactClass, EegTrial, artifact_signal
from .warp import Series, WarpVariant, dtw_distance


class Protocol(str, Enum):
    INTRA_SESSION = "intra"
    INTER_SESSION = "inter-session"
    INTER_SUBJECT = "inter-subject"


@dataclass(frozen=True)
class RefEntry:
    feature: Series
    label: ArtifactClass
    subject_id: str = ""
    session_id: str = ""


@dataclass(frozen=True)
class ReferenceSet:
    entries: tuple[RefEntry, ...]

    def __post_init__(self):
        if not self.entries:
            raise ValueError("reference set must not be empty")

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class EvalReport:
    """Per-class and overall accuracy plus the full confusion matrix.

    Confusion rows are true classes, columns predicted, both in CLASS_ORDER.
    """

    protocol: Protocol
    k: int
    variant: WarpVariant
    classes: tuple[ArtifactClass, ...]
    confusion: np.ndarray
    n_reference: int
    n_test: int

    @property
    def per_class_accuracy(self) -> dict[ArtifactClass, float]:
        out = {}
        for idx, cls in enumerate(self.classes):
            row_total = self.confusion[idx].sum()
            out[cls] = float(self.confusion[idx, idx] / row_total) if row_total else float("nan")
        return out

    @property
    def overall_accuracy(self) -> float:
        total = self.confusion.sum()
        return float(np.trace(self.confusion) / total) if total else float("nan")

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol.value,
            "k": self.k,
            "variant": self.variant.value,
            "classes": [c.value for c in self.classes],
            "confusion": self.confusion.tolist(),
            "per_class_accuracy": {c.value: a for c, a in self.per_class_accuracy.items()},
            "overall_accuracy": self.overall_accuracy,
            "n_reference": self.n_reference,
            "n_test": self.n_test,
        }


def featurize(
    trial: EegTrial,
    mode: str = "energy1d",
    eta: float = ThresholdSpec.EPOCHED_DEFAULT,
    smooth_len: int | None = None,
) -> Series:
    """Feature series for one epoch, cut to the detected artifact window.

    energy1d uses the smoothed mean-energy signature; multichannel keeps
    per-sample frames of the raw channel values. When nothing crosses the
    threshold the whole epoch is the feature.
    """
    sig = artifact_signal(trial, smooth_len)
    event = detect_in_epoch(sig, ThresholdSpec(eta))
    lo, hi = (event.onset, event.offset + 1) if event else (0, len(sig))
    if mode == "energy1d":
        return Series(sig.samples[lo:hi])
    if mode == "multichannel":
        return Series(trial.data[:, lo:hi].T)
    raise ValueError(f"unknown feature mode {mode!r}")


def _class_rank(cls: ArtifactClass) -> int:
    return CLASS_ORDER.index(cls)


def knn_classify(
    query: Series,
    refs: ReferenceSet,
    k: int = 1,
    variant: WarpVariant = WarpVariant.NORMALIZED_DTW,
) -> tuple[ArtifactClass, list[float]]:
    """Majority label among the k nearest references.

    Sorting is by (distance, class order), so the result does not depend on
    reference order. Vote ties break by smaller summed distance, then by
    class enumeration order.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > len(refs):
        raise ValueError(f"k={k} exceeds {len(refs)} references")
    scored = [
        (dtw_distance(query, entry.feature, variant).distance, _class_rank(entry.label))
        for entry in refs.entries
    ]
    scored.sort()
    nearest = scored[:k]
    votes: dict[int, list] = {}
    for dist, rank in nearest:
        bucket = votes.setdefault(rank, [0, 0.0])
        bucket[0] += 1
        bucket[1] += dist
    best_rank = min(votes, key=lambda r: (-votes[r][0], votes[r][1], r))
    return CLASS_ORDER[best_rank], [dist for dist, _ in scored]


def _require_labeled(trials):
    for trial in trials:
        if trial.label is None:
            raise ProtocolError("every trial must be labeled for evaluation")


def _split_intra(trials, rng):
    """Stratified 50/50: within each class, half reference, half test."""
    by_class: dict[ArtifactClass, list[int]] = {}
    for idx, trial in enumerate(trials):
        by_class.setdefault(trial.label, []).append(idx)
    ref_idx, test_idx = [], []
    for cls in sorted(by_class, key=_class_rank):
        indices = by_class[cls]
        rng.shuffle(indices)
        half = (len(indices) + 1) // 2
        ref_idx.extend(indices[:half])
        test_idx.extend(indices[half:])
    if not ref_idx or not test_idx:
        raise ProtocolError("too few trials for a 50/50 split")
    return ref_idx, test_idx


def _split_inter_session(trials, rng):
    """Per subject: one random session is reference, another is test."""
    sessions: dict[str, dict[str, list[int]]] = {}
    for idx, trial in enumerate(trials):
        sessions.setdefault(trial.subject_id, {}).setdefault(trial.session_id, []).append(idx)
    ref_idx, test_idx = [], []
    for subject in sorted(sessions):
        named = sessions[subject]
        if len(named) < 2:
            continue
        picked = rng.sample(sorted(named), 2)
        ref_idx.extend(named[picked[0]])
        test_idx.extend(named[picked[1]])
    if not ref_idx or not test_idx:
        raise ProtocolError("inter-session needs a subject with >= 2 sessions")
    return ref_idx, test_idx


def _split_inter_subject(trials, rng):
    """Disjoint subject groups: half reference subjects, half test."""
    subjects: dict[str, list[int]] = {}
    for idx, trial in enumerate(trials):
        subjects.setdefault(trial.subject_id, []).append(idx)
    names = sorted(subjects)
    if len(names) < 2:
        raise ProtocolError("inter-subject needs >= 2 subjects")
    rng.shuffle(names)
    n_ref = max(1, len(names) // 2)
    ref_idx = [i for name in names[:n_ref] for i in subjects[name]]
    test_idx = [i for name in names[n_ref:] for i in subjects[name]]
    return ref_idx, test_idx


_SPLITTERS = {
    Protocol.INTRA_SESSION: _split_intra,
    Protocol.INTER_SESSION: _split_inter_session,
    Protocol.INTER_SUBJECT: _split_inter_subject,
}


def evaluate(
    trials: list[EegTrial],
    protocol: Protocol = Protocol.INTRA_SESSION,
    ks=(1, 3, 5, 7),
    variant: WarpVariant = WarpVariant.NORMALIZED_DTW,
    seed: int = 0,
    mode: str = "energy1d",
) -> list[EvalReport]:
    """One EvalReport per k, deterministic for a given seed."""
    _require_labeled(trials)
    rng = random.Random(seed)
    ref_idx, test_idx = _SPLITTERS[Protocol(protocol)](list(trials), rng)
    features = {idx: featurize(trials[idx], mode) for idx in ref_idx + test_idx}
    refs = ReferenceSet(
        tuple(
            RefEntry(features[i], trials[i].label, trials[i].subject_id, trials[i].session_id)
            for i in ref_idx
        )
    )
    classes = tuple(c for c in CLASS_ORDER if any(t.label is c for t in trials))
    index_of = {cls: i for i, cls in enumerate(classes)}
    reports = []
    for k in ks:
        if k > len(refs):
            raise ProtocolError(f"k={k} exceeds the {len(refs)} reference trials")
        confusion = np.zeros((len(classes), len(classes)), dtype=np.int64)
        for i in test_idx:
            predicted, _ = knn_classify(features[i], refs, k, variant)
            confusion[index_of[trials[i].label], index_of[predicted]] += 1
        reports.append(
            EvalReport(
                protocol=Protocol(protocol),
                k=k,
                variant=variant,
                classes=classes,
                confusion=confusion,
                n_reference=len(ref_idx),
                n_test=len(test_idx),
            )
        )
    return reports
