"""CLI entry point and the live session service.

The service speaks a small versioned JSON protocol over one WebSocket per
session: clients inject gesture events, switch layouts, start fixture
replays, or (in test-clock mode) drive the dwell clock explicitly; the
server pushes a speller snapshot after every transition and surfaces
SpeakPhrase outputs as ``spoken`` messages. Every CLI flag can also be set
through a ``WARPBCI_``-prefixed environment variable.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from . import __version__
from .classify import Protocol, RefEntry, ReferenceSet, evaluate, featurize, knn_classify
from .detect import DEFAULT_ETA_GRID, ThresholdSpec, detect_continuous, f1_sweep
from .lexicon import Lexicon, bundled_lexicon, load_lexicon
from .online import ArtifactEvent, OnlineEngine, StreamConfig, replay as replay_stream
from .signal import ArtifactClass, EegTrial, load_trials, save_trials
from .speller import (
    LayoutKind,
    SpeakPhrase,
    SpellerState,
    new_speller,
    on_event,
    snapshot,
    tick,
)
from .synth import GenSpec, gen_stream, gen_trials
from .warp import WarpVariant

PROTOCOL_VERSION = 1
EVENT_KINDS = ("Blink", "JawClench", "Unknown")

VARIANTS = {
    "ltw": WarpVariant.LTW,
    "dtw": WarpVariant.VANILLA_DTW,
    "ndtw": WarpVariant.NORMALIZED_DTW,
    "tsdtw": WarpVariant.TIMESYNC_DTW,
}


def _env(name: str, default):
    return os.environ.get(f"WARPBCI_{name.upper()}", default)


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))


# ---------------------------------------------------------------------------
# session protocol

@dataclass
class SessionSettings:
    layout: LayoutKind = LayoutKind.T9
    dwell_ms: int = 3000
    test_clock: bool = False
    tick_ms: int = 100
    lexicon: Lexicon | None = None
    fixtures_dir: Path | None = None


def demo_fixture() -> EegTrial:
    """Built-in replay stream: 20 s calibration, then two double blinks.

    A slow 0.3 Hz drift rides under the noise so the calibrated 2-sigma
    threshold sits well above baseline excursions, as it would over real
    background EEG.
    """
    import numpy as np

    from .synth import DEFAULT_SHAPES, ClassShape

    shapes = dict(DEFAULT_SHAPES)
    shapes[ArtifactClass.EYE_BLINK] = ClassShape((200.0, 300.0), (20.0, 24.0))
    spec = GenSpec(sample_rate=250.0, channels=1, noise_sigma=0.3, seed=20, shapes=shapes)
    times = [21.0, 21.6, 26.0, 26.6]
    trial = gen_stream(spec, 30.0, [(t, ArtifactClass.EYE_BLINK) for t in times])
    t = np.arange(trial.n_samples) / trial.sample_rate
    drift = 2.0 * np.sin(2.0 * np.pi * 0.3 * t)
    return EegTrial(
        data=trial.data + drift,
        sample_rate=trial.sample_rate,
        subject_id=trial.subject_id,
        session_id=trial.session_id,
        annotations=trial.annotations,
    )


@dataclass
class Session:
    """One connection's state machine; pure message-in, messages-out."""

    settings: SessionSettings
    state: SpellerState = field(init=False)

    def __post_init__(self):
        self.lexicon = self.settings.lexicon or bundled_lexicon()
        self.state = new_speller(self.lexicon, self.settings.layout, self.settings.dwell_ms)

    # -- helpers

    def _msg(self, type_: str, **payload) -> dict:
        return {"v": PROTOCOL_VERSION, "type": type_, **payload}

    def _error(self, text: str) -> dict:
        return self._msg("error", text=text)

    def _snapshot_msg(self) -> dict:
        return self._msg("snapshot", snapshot=snapshot(self.state))

    def _apply_outputs(self, outputs) -> list[dict]:
        return [
            self._msg("spoken", words=list(out.words))
            for out in outputs
            if isinstance(out, SpeakPhrase)
        ]

    def hello(self) -> list[dict]:
        return [self._snapshot_msg()]

    def advance_clock(self, ms: int) -> list[dict]:
        self.state, outputs = tick(self.state, ms)
        return self._apply_outputs(outputs) + [self._snapshot_msg()]

    def _load_fixture(self, name: str) -> EegTrial:
        if name == "demo":
            return demo_fixture()
        if self.settings.fixtures_dir is not None:
            for suffix in (".csv", ".jsonl"):
                candidate = self.settings.fixtures_dir / f"{name}{suffix}"
                if candidate.exists():
                    return load_trials(candidate)[0]
        raise FileNotFoundError(f"unknown fixture {name!r}")

    def _run_replay(self, fixture: str) -> list[dict]:
        trial = self._load_fixture(fixture)
        config = StreamConfig(sample_rate=trial.sample_rate)
        events = replay_stream(trial, OnlineEngine(config, mode="blink_only"))
        out: list[dict] = []
        clock = 0.0
        for event in events:
            gap = int(event.t_ms - clock)
            if gap > 0:
                out.extend(self.advance_clock(gap))
                clock += gap
            self.state, outputs = on_event(self.state, event, self.lexicon)
            out.extend(self._apply_outputs(outputs))
            out.append(self._snapshot_msg())
        out.append(self._msg("replay_ended"))
        return out

    # -- entry point

    def handle(self, raw: str, from_client: bool = True) -> list[dict]:
        """Process one incoming text frame; returns messages to send."""
        try:
            msg = json.loads(raw)
        except json.JSONDecodeError:
            return [self._error("malformed JSON")]
        if not isinstance(msg, dict):
            return [self._error("message must be an object")]
        version = msg.get("v", PROTOCOL_VERSION)
        if version != PROTOCOL_VERSION:
            return [self._error(f"unsupported protocol version {version!r}")]
        msg_type = msg.get("type")

        if msg_type == "inject_event":
            event = msg.get("event") or {}
            kind = event.get("kind")
            count = event.get("count", 1)
            if kind not in EVENT_KINDS or not isinstance(count, int) or count < 1:
                return [self._error(f"bad event {event!r}")]
            artifact = ArtifactEvent(kind, count, float(self.state.clock_ms))
            self.state, outputs = on_event(self.state, artifact, self.lexicon)
            return self._apply_outputs(outputs) + [self._snapshot_msg()]

        if msg_type == "set_layout":
            name = str(msg.get("layout", "")).lower()
            try:
                layout = LayoutKind(name)
            except ValueError:
                return [self._error(f"unknown layout {msg.get('layout')!r}")]
            self.state = new_speller(self.lexicon, layout, self.settings.dwell_ms)
            return [self._snapshot_msg()]

        if msg_type == "reset":
            self.state = new_speller(self.lexicon, self.state.layout, self.settings.dwell_ms)
            return [self._snapshot_msg()]

        if msg_type == "start_replay":
            try:
                return self._run_replay(str(msg.get("fixture", "demo")))
            except (FileNotFoundError, ValueError) as exc:
                return [self._error(str(exc))]

        if msg_type == "tick":
            if from_client and not self.settings.test_clock:
                return [self._error("tick injection requires test-clock mode")]
            ms = msg.get("ms", self.settings.tick_ms)
            if not isinstance(ms, int) or ms < 0:
                return [self._error(f"bad tick {msg.get('ms')!r}")]
            return self.advance_clock(ms)

        return [self._error(f"unknown message type {msg_type!r}")]


def build_app(settings: SessionSettings):
    """FastAPI app exposing /health, /session (WebSocket), optional UI."""
    app = FastAPI(title="warpbci session service")

    @app.get("/health")
    def health():
        return {"ok": True}

    @app.websocket("/session")
    async def session_socket(ws: WebSocket):
        await ws.accept()
        session = Session(settings)
        send_lock = asyncio.Lock()

        async def send_all(messages):
            async with send_lock:
                for message in messages:
                    await ws.send_text(_dumps(message))

        ticker_task = None
        if not settings.test_clock:
            async def ticker():
                while True:
                    await asyncio.sleep(settings.tick_ms / 1000.0)
                    await send_all(
                        session.handle(
                            _dumps({"type": "tick", "ms": settings.tick_ms}),
                            from_client=False,
                        )
                    )

            ticker_task = asyncio.create_task(ticker())
        try:
            await send_all(session.hello())
            while True:
                raw = await ws.receive_text()
                await send_all(session.handle(raw))
        except WebSocketDisconnect:
            pass
        finally:
            if ticker_task is not None:
                ticker_task.cancel()

    return app


# ---------------------------------------------------------------------------
# CLI commands

def _parse_classes(text: str | None):
    if not text:
        return None
    return [ArtifactClass.parse(token) for token in text.split(",") if token]


def _cmd_gen(args) -> int:
    spec = GenSpec(
        sample_rate=args.rate, channels=args.channels,
        noise_sigma=args.noise, seed=args.seed,
    )
    if args.kind == "trials":
        trials = gen_trials(
            spec, args.per_class, _parse_classes(args.classes),
            subjects=args.subjects, sessions=args.sessions,
        )
    else:
        events = []
        for token in (args.bursts or "").split(","):
            if token:
                time_s, _, cls = token.partition(":")
                events.append((float(time_s), ArtifactClass.parse(cls)))
        trials = [gen_stream(spec, args.duration, events)]
    save_trials(trials, args.out, args.format)
    print(f"wrote {len(trials)} trial(s) to {args.out}")
    return 0


def _cmd_detect(args) -> int:
    trials = load_trials(args.input)
    spec = ThresholdSpec(args.eta)
    print("trial_id,onset,offset,peak_energy")
    for trial in trials:
        for ev in detect_continuous(trial, spec, merge_gap_s=args.merge_gap):
            print(f"{ev.trial_id},{ev.onset},{ev.offset},{ev.peak_energy!r}")
    if args.sweep:
        annotated = [t for t in trials if t.annotations]
        if not annotated:
            print("no annotated trials; skipping eta sweep", file=sys.stderr)
            return 1
        print("eta,f1")
        for eta, f1 in f1_sweep(annotated, DEFAULT_ETA_GRID, merge_gap_s=args.merge_gap):
            print(f"{eta},{f1:.4f}")
    return 0


def _report_csv(report) -> str:
    header = ["variant", "k"] + [c.value for c in report.classes] + ["model_accuracy"]
    accs = report.per_class_accuracy
    row = [report.variant.value, str(report.k)]
    row += [f"{accs[c]:.3f}" for c in report.classes]
    row += [f"{report.overall_accuracy:.3f}"]
    return ",".join(header) + "\n" + ",".join(row)


def _cmd_evaluate(args) -> int:
    if args.input:
        trials = load_trials(args.input)
    else:
        trials = gen_trials(
            GenSpec(seed=args.seed), args.per_class,
            subjects=args.subjects, sessions=args.sessions,
        )
    ks = [int(k) for k in args.k.split(",")]
    reports = evaluate(
        trials, Protocol(args.protocol), ks, VARIANTS[args.variant], seed=args.seed
    )
    if args.json:
        print(_dumps([r.to_dict() for r in reports]))
    else:
        for report in reports:
            print(_report_csv(report))
    return 0


def _cmd_classify(args) -> int:
    refs_trials = load_trials(args.refs)
    queries = load_trials(args.input)
    refs = ReferenceSet(tuple(
        RefEntry(featurize(t), t.label, t.subject_id, t.session_id)
        for t in refs_trials if t.label is not None
    ))
    variant = VARIANTS[args.variant]
    print("index,subject,session,true,predicted")
    for idx, trial in enumerate(queries):
        label, _ = knn_classify(featurize(trial), refs, args.k, variant)
        true = trial.label.value if trial.label else "none"
        print(f"{idx},{trial.subject_id},{trial.session_id},{true},{label.value}")
    return 0


def _cmd_suggest(args) -> int:
    lexicon = load_lexicon(args.lexicon, args.min_count) if args.lexicon else bundled_lexicon(args.min_count)
    if args.t9 is not None:
        words = lexicon.suggest_t9(args.t9, args.limit)
    elif args.prefix is not None:
        words = lexicon.suggest_prefix(args.prefix, args.limit)
    else:
        print("one of --t9 or --prefix is required", file=sys.stderr)
        return 2
    for word in words:
        print(word)
    return 0


def _cmd_replay(args) -> int:
    trials = load_trials(args.input)
    for trial in trials:
        config = StreamConfig(
            sample_rate=trial.sample_rate, smoothing_m=args.smoothing,
            calibration_s=args.calibration,
        )
        templates = None
        if args.mode == "blink_and_jaw":
            from .synth import gen_templates

            templates = gen_templates(GenSpec(sample_rate=trial.sample_rate))
        engine = OnlineEngine(config, mode=args.mode, templates=templates)
        for event in replay_stream(trial, engine):
            print(_dumps(event.to_dict()))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    settings = SessionSettings(
        layout=LayoutKind(args.layout),
        dwell_ms=args.dwell_ms,
        test_clock=args.test_clock,
        tick_ms=args.tick_ms,
        lexicon=load_lexicon(args.lexicon) if args.lexicon else None,
        fixtures_dir=Path(args.fixtures_dir) if args.fixtures_dir else None,
    )
    app = build_app(settings)
    if args.ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=args.ui_dir, html=True), name="ui")
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="warpbci",
        description="EEG artifact detection, time-warping classification, and the speller service",
    )
    parser.add_argument("--version", action="version", version=f"warpbci {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write synthetic trial/stream fixtures")
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "jsonl"), default=None)
    p.add_argument("--kind", choices=("trials", "stream"), default="trials")
    p.add_argument("--per-class", type=int, default=int(_env("per_class", 5)))
    p.add_argument("--classes", default=None, help="comma-separated class names")
    p.add_argument("--subjects", type=int, default=1)
    p.add_argument("--sessions", type=int, default=1)
    p.add_argument("--rate", type=float, default=250.0)
    p.add_argument("--channels", type=int, default=4)
    p.add_argument("--noise", type=float, default=1.0)
    p.add_argument("--duration", type=float, default=60.0)
    p.add_argument("--bursts", default=None, help="stream bursts as time:class,...")
    p.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("detect", help="detect artifact events in recorded trials")
    p.add_argument("input")
    p.add_argument("--eta", type=float, default=float(_env("eta", ThresholdSpec.CONTINUOUS_DEFAULT)))
    p.add_argument("--merge-gap", type=float, default=0.2)
    p.add_argument("--sweep", action="store_true", help="also print the eta-F1 table")
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("evaluate", help="run a classification protocol and report accuracy")
    p.add_argument("--input", default=None, help="trial file; default generates synthetic trials")
    p.add_argument("--protocol", choices=[pr.value for pr in Protocol], default="intra")
    p.add_argument("--variant", choices=sorted(VARIANTS), default="ndtw")
    p.add_argument("--k", default="1,3,5,7")
    p.add_argument("--per-class", type=int, default=10)
    p.add_argument("--subjects", type=int, default=2)
    p.add_argument("--sessions", type=int, default=2)
    p.add_argument("--seed", type=int, default=int(_env("seed", 0)))
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("classify", help="label query trials against a reference file")
    p.add_argument("--refs", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--variant", choices=sorted(VARIANTS), default="ndtw")
    p.add_argument("--k", type=int, default=1)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("suggest", help="query the word dictionary")
    p.add_argument("--t9", default=None)
    p.add_argument("--prefix", default=None)
    p.add_argument("--limit", type=int, default=5)
    p.add_argument("--lexicon", default=_env("lexicon", None))
    p.add_argument("--min-count", type=int, default=1)
    p.set_defaults(func=_cmd_suggest)

    p = sub.add_parser("replay", help="stream a trial file through the online engine")
    p.add_argument("input")
    p.add_argument("--mode", choices=("blink_only", "blink_and_jaw"), default="blink_only")
    p.add_argument("--smoothing", type=int, default=50)
    p.add_argument("--calibration", type=float, default=20.0)
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("serve", help="start the live session service")
    p.add_argument("--host", default=_env("host", "127.0.0.1"))
    p.add_argument("--port", type=int, default=int(_env("port", 8375)))
    p.add_argument("--layout", choices=("t9", "abc"), default=_env("layout", "t9"))
    p.add_argument("--dwell-ms", type=int, default=int(_env("dwell_ms", 3000)))
    p.add_argument("--tick-ms", type=int, default=int(_env("tick_ms", 100)))
    p.add_argument("--test-clock", action="store_true",
                   default=_env("test_clock", "") not in ("", "0", "false"))
    p.add_argument("--lexicon", default=_env("lexicon", None))
    p.add_argument("--fixtures-dir", default=_env("fixtures_dir", None))
    p.add_argument("--ui-dir", default=_env("ui_dir", None))
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 0
    except Exception as exc:  # surface a clean diagnostic, nonzero exit
        print(f"warpbci: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
