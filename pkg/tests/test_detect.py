import numpy as np
import pytest

from warpbci.detect import (
    DEFAULT_ETA_GRID,
    DetectedEvent,
    ThresholdSpec,
    detect_continuous,
    detect_in_epoch,
    f1_sweep,
    match_events,
    threshold,
)
from warpbci.signal import Annotation, ArtifactClass, ArtifactSignal, EegTrial

from oracles import two_pass_mean_std


def sig(values, rate=250.0):
    values = np.asarray(values, dtype=float)
    return ArtifactSignal(values, rate, (0, len(values)))


class TestThreshold:
    def test_given_moments(self):
        # mean 10, population sigma 2
        s = sig([8.0, 12.0, 8.0, 12.0])
        assert threshold(s, ThresholdSpec(-1.0)) == pytest.approx(8.0, abs=1e-12)

    def test_constant_signal(self):
        s = sig([7.0] * 5)
        for eta in (-1.0, 0.0, 2.0):
            assert threshold(s, ThresholdSpec(eta)) == pytest.approx(7.0, abs=1e-12)

    def test_eta_zero_is_mean(self):
        rng = np.random.default_rng(0)
        vals = rng.uniform(0, 50, size=64).tolist()
        mean, _ = two_pass_mean_std(vals)
        assert threshold(sig(vals), ThresholdSpec(0.0)) == pytest.approx(mean, rel=1e-12)

    def test_monotone_in_eta(self):
        rng = np.random.default_rng(1)
        s = sig(rng.uniform(0, 10, size=40))
        values = [threshold(s, ThresholdSpec(e)) for e in (-1.0, 0.0, 0.5, 1.0, 2.0)]
        assert values == sorted(values)

    def test_nonfinite_eta_rejected(self):
        with pytest.raises(ValueError):
            ThresholdSpec(float("nan"))


class TestDetectInEpoch:
    def test_hand_crossing(self):
        # mean ~2.29, sigma ~2.55: eta chosen so the threshold lands at 3
        s = sig([0.0, 0.0, 5.0, 6.0, 5.0, 0.0, 0.0])
        thr_eta = (3.0 - s.samples.mean()) / s.samples.std()
        ev = detect_in_epoch(s, ThresholdSpec(thr_eta))
        assert (ev.onset, ev.offset) == (2, 4)
        assert ev.peak_energy == 6.0

    def test_all_below_returns_none(self):
        s = sig([1.0, 1.0, 1.0])
        assert detect_in_epoch(s, ThresholdSpec(5.0)) is None

    def test_all_above(self):
        s = sig([5.0, 6.0, 7.0, 8.0])
        ev = detect_in_epoch(s, ThresholdSpec(-10.0))
        assert (ev.onset, ev.offset) == (0, 3)

    def test_event_iff_max_above_threshold(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            s = sig(rng.uniform(0, 5, size=20))
            spec = ThresholdSpec(float(rng.uniform(-1.5, 3.0)))
            ev = detect_in_epoch(s, spec)
            assert (ev is not None) == (s.samples.max() > threshold(s, spec))

    def test_scaling_leaves_indices(self):
        rng = np.random.default_rng(3)
        vals = rng.uniform(0, 5, size=30)
        s1 = sig(vals)
        s2 = sig(vals * 17.0)
        spec = ThresholdSpec(0.5)
        assert threshold(s2, spec) == pytest.approx(17.0 * threshold(s1, spec), rel=1e-12)
        e1, e2 = detect_in_epoch(s1, spec), detect_in_epoch(s2, spec)
        assert (e1.onset, e1.offset) == (e2.onset, e2.offset)


def burst_trial(bursts, n=2500, rate=250.0, amplitude=30.0):
    """Quiet baseline with small jitter plus rectangular bursts."""
    rng = np.random.default_rng(42)
    data = rng.normal(0.0, 0.1, size=(2, n))
    annotations = []
    for start, length in bursts:
        data[:, start : start + length] += amplitude
        annotations.append(Annotation(start, start + length, ArtifactClass.EYE_BLINK))
    return EegTrial(data=data, sample_rate=rate, annotations=tuple(annotations))


class TestDetectContinuous:
    def test_two_bursts(self):
        trial = burst_trial([(400, 200), (1500, 200)])
        events = detect_continuous(trial, smooth_len=25)
        assert len(events) == 2
        for ev, ann in zip(events, trial.annotations):
            inter = min(ev.offset + 1, ann.end) - max(ev.onset, ann.start)
            assert inter / (ann.end - ann.start) >= 0.6

    def test_flat_baseline_no_events(self):
        trial = EegTrial(data=np.zeros((1, 1000)), sample_rate=250.0)
        assert detect_continuous(trial) == []

    def test_single_burst(self):
        trial = burst_trial([(900, 250)])
        events = detect_continuous(trial, smooth_len=25)
        assert len(events) == 1

    def test_events_disjoint_and_sorted(self):
        trial = burst_trial([(200, 150), (800, 150), (1700, 150)])
        events = detect_continuous(trial, smooth_len=25)
        for prev, cur in zip(events, events[1:]):
            assert prev.offset < cur.onset

    def test_nearby_runs_merged(self):
        # two bursts 0.1 s apart merge under the default 0.2 s gap
        trial = burst_trial([(400, 100), (525, 100)])
        merged = detect_continuous(trial, smooth_len=5)
        split = detect_continuous(trial, smooth_len=5, merge_gap_s=0.0)
        assert len(merged) == 1
        assert len(split) >= 2


class TestMatchEvents:
    def ann(self, s, e):
        return Annotation(s, e, ArtifactClass.EYE_BLINK)

    def test_exact_match(self):
        det = [DetectedEvent(10, 19, 1.0)]
        assert match_events(det, [self.ann(10, 20)]) == (1, 0, 0)

    def test_half_overlap_below_cutoff(self):
        det = [DetectedEvent(10, 14, 1.0)]
        assert match_events(det, [self.ann(10, 20)], overlap_min=0.6) == (0, 1, 1)

    def test_one_detection_two_truths(self):
        det = [DetectedEvent(0, 9, 1.0)]
        truths = [self.ann(0, 10), self.ann(50, 60)]
        assert match_events(det, truths) == (1, 0, 1)

    def test_each_truth_matches_once(self):
        det = [DetectedEvent(0, 9, 1.0), DetectedEvent(1, 9, 1.0)]
        assert match_events(det, [self.ann(0, 10)]) == (1, 1, 0)

    def test_bad_overlap_min(self):
        with pytest.raises(ValueError):
            match_events([], [], overlap_min=0.0)


class TestF1Sweep:
    def test_perfect_detection_hits_one(self):
        trials = [burst_trial([(400, 200), (1500, 200)]) for _ in range(3)]
        table = f1_sweep(trials, etas=(0.8,), smooth_len=25)
        assert table == [(0.8, 1.0)]

    def test_huge_eta_gives_zero(self):
        trials = [burst_trial([(400, 200)])]
        table = f1_sweep(trials, etas=(50.0,), smooth_len=25)
        assert table == [(50.0, 0.0)]

    def test_sorted_by_eta(self):
        trials = [burst_trial([(400, 200)])]
        table = f1_sweep(trials, etas=(1.0, -0.1, 0.5), smooth_len=25)
        assert [eta for eta, _ in table] == [-0.1, 0.5, 1.0]

    def test_counts_conserved(self):
        trials = [burst_trial([(400, 200), (1500, 300)])]
        for eta in DEFAULT_ETA_GRID:
            tp = fp = fn = 0
            for t in trials:
                events = detect_continuous(t, ThresholdSpec(eta), smooth_len=25)
                a, b, c = match_events(events, t.annotations)
                tp, fp, fn = tp + a, fp + b, fn + c
            assert tp + fn == sum(len(t.annotations) for t in trials)

    def test_empty_input_rejected(self):
        with pytest.raises(ValueError):
            f1_sweep([])
