import json

import pytest
from starlette.testclient import TestClient

from warpbci.gateway import (
    Session,
    SessionSettings,
    build_app,
    build_parser,
    main,
)
from warpbci.lexicon import Lexicon


@pytest.fixture(scope="module")
def lex():
    return Lexicon.from_pairs([
        ("good", 500), ("home", 400), ("gone", 300), ("hood", 200), ("the", 900),
    ])


def send(session, **msg):
    return session.handle(json.dumps(msg))


class TestSession:
    def test_hello_snapshot(self, lex):
        session = Session(SessionSettings(test_clock=True, lexicon=lex))
        msgs = session.hello()
        assert msgs[0]["type"] == "snapshot"
        assert msgs[0]["v"] == 1
        assert msgs[0]["snapshot"]["region"] == "keypad"

    def test_inject_blink_appends(self, lex):
        session = Session(SessionSettings(test_clock=True, lexicon=lex))
        msgs = send(session, type="inject_event", event={"kind": "Blink", "count": 2})
        assert msgs[-1]["snapshot"]["current_word"] == "2"

    def test_jaw_clench_speaks(self, lex):
        session = Session(SessionSettings(test_clock=True, lexicon=lex))
        # type "4663" is too slow here; commit a word through the suggestion region
        send(session, type="tick", ms=6000)
        send(session, type="inject_event", event={"kind": "Blink", "count": 2})
        send(session, type="tick", ms=3000 * 8)  # walk into suggestions
        send(session, type="inject_event", event={"kind": "Blink", "count": 2})
        msgs = send(session, type="inject_event", event={"kind": "JawClench", "count": 2})
        spoken = [m for m in msgs if m["type"] == "spoken"]
        assert len(spoken) == 1 and len(spoken[0]["words"]) == 1

    def test_malformed_json(self, lex):
        session = Session(SessionSettings(test_clock=True, lexicon=lex))
        msgs = session.handle("{not json")
        assert msgs == [{"v": 1, "type": "error", "text": "malformed JSON"}]

    def test_unknown_type(self, lex):
        session = Session(SessionSettings(test_clock=True, lexicon=lex))
        msgs = send(session, type="frobnicate")
        assert msgs[0]["type"] == "error"

    def test_higher_version_rejected(self, lex):
        session = Session(SessionSettings(test_clock=True, lexicon=lex))
        msgs = send(session, v=2, type="reset")
        assert msgs[0]["type"] == "error"
        assert "version" in msgs[0]["text"]

    def test_set_layout(self, lex):
        session = Session(SessionSettings(test_clock=True, lexicon=lex))
        msgs = send(session, type="set_layout", layout="abc")
        assert msgs[0]["snapshot"]["layout"] == "abc"
        assert msgs[0]["snapshot"]["keypad"][0] == "a"

    def test_reset_clears(self, lex):
        session = Session(SessionSettings(test_clock=True, lexicon=lex))
        send(session, type="inject_event", event={"kind": "Blink", "count": 2})
        msgs = send(session, type="reset")
        assert msgs[0]["snapshot"]["current_word"] == ""

    def test_tick_rejected_in_live_mode(self, lex):
        session = Session(SessionSettings(test_clock=False, lexicon=lex))
        msgs = send(session, type="tick", ms=100)
        assert msgs[0]["type"] == "error"
        # the server's own clock may still drive ticks
        msgs = session.handle(json.dumps({"type": "tick", "ms": 100}), from_client=False)
        assert msgs[-1]["type"] == "snapshot"

    def test_bad_event_rejected(self, lex):
        session = Session(SessionSettings(test_clock=True, lexicon=lex))
        msgs = send(session, type="inject_event", event={"kind": "Sneeze", "count": 2})
        assert msgs[0]["type"] == "error"

    def test_replay_demo(self, lex):
        session = Session(SessionSettings(test_clock=True, lexicon=lex))
        msgs = send(session, type="start_replay", fixture="demo")
        assert msgs[-1]["type"] == "replay_ended"
        assert any(m["type"] == "snapshot" for m in msgs)
        # two double blinks arrived: two selections happened
        words = [m["snapshot"]["current_word"] for m in msgs if m["type"] == "snapshot"]
        assert words[-1] != ""

    def test_replay_unknown_fixture(self, lex):
        session = Session(SessionSettings(test_clock=True, lexicon=lex))
        msgs = send(session, type="start_replay", fixture="nope")
        assert msgs[0]["type"] == "error"

    def test_sessions_isolated(self, lex):
        settings = SessionSettings(test_clock=True, lexicon=lex)
        a, b = Session(settings), Session(settings)
        send(a, type="inject_event", event={"kind": "Blink", "count": 2})
        assert a.state.current_word == "2"
        assert b.state.current_word == ""


class TestWebSocket:
    @pytest.fixture()
    def client(self, lex):
        app = build_app(SessionSettings(test_clock=True, lexicon=lex))
        with TestClient(app) as client:
            yield client

    def test_health(self, client):
        response = client.get("/health")
        assert response.status_code == 200
        assert response.json() == {"ok": True}

    def test_snapshot_on_connect(self, client):
        with client.websocket_connect("/session") as ws:
            msg = json.loads(ws.receive_text())
            assert msg["type"] == "snapshot"

    def test_scripted_spelling(self, client):
        with client.websocket_connect("/session") as ws:
            ws.receive_text()  # hello snapshot
            def rpc(**msg):
                ws.send_text(json.dumps(msg))
                out = [json.loads(ws.receive_text())]
                while out[-1]["type"] not in ("snapshot", "error", "replay_ended"):
                    out.append(json.loads(ws.receive_text()))
                return out

            rpc(type="set_layout", layout="t9")
            rpc(type="tick", ms=6000)  # highlight "4 ghi"
            msgs = rpc(type="inject_event", event={"kind": "Blink", "count": 2})
            assert msgs[-1]["snapshot"]["current_word"] == "4"

    def test_error_keeps_connection_open(self, client):
        with client.websocket_connect("/session") as ws:
            ws.receive_text()
            ws.send_text("{broken")
            assert json.loads(ws.receive_text())["type"] == "error"
            ws.send_text(json.dumps({"type": "reset"}))
            assert json.loads(ws.receive_text())["type"] == "snapshot"


class TestCli:
    def test_parser_builds(self):
        parser = build_parser()
        args = parser.parse_args(["suggest", "--t9", "4663"])
        assert args.t9 == "4663"

    def test_suggest_requires_query(self, capsys):
        assert main(["suggest"]) == 2

    def test_gen_detect_round_trip(self, tmp_path, capsys):
        out = tmp_path / "trials.csv"
        assert main(["gen", "--out", str(out), "--per-class", "2", "--seed", "3"]) == 0
        capsys.readouterr()
        assert main(["detect", str(out), "--eta", "0.8"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "trial_id,onset,offset,peak_energy"
        assert len(lines) > 1

    def test_suggest_t9(self, capsys):
        assert main(["suggest", "--t9", "4663"]) == 0
        words = capsys.readouterr().out.split()
        assert words[:4] == ["good", "home", "gone", "hood"]

    def test_replay_prints_jsonl(self, tmp_path, capsys):
        from warpbci.gateway import demo_fixture
        from warpbci.signal import save_trials

        path = tmp_path / "demo.csv"
        save_trials([demo_fixture()], path)
        assert main(["replay", str(path)]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        events = [json.loads(line) for line in lines]
        assert [(e["kind"], e["count"]) for e in events] == [("Blink", 2), ("Blink", 2)]

    def test_evaluate_synthetic(self, capsys):
        assert main([
            "evaluate", "--protocol", "intra", "--variant", "ndtw",
            "--k", "1", "--per-class", "3", "--subjects", "1", "--sessions", "1",
        ]) == 0
        out = capsys.readouterr().out
        assert "model_accuracy" in out

    def test_classify_command(self, tmp_path, capsys):
        refs = tmp_path / "refs.csv"
        queries = tmp_path / "queries.csv"
        assert main(["gen", "--out", str(refs), "--per-class", "2", "--seed", "1"]) == 0
        assert main(["gen", "--out", str(queries), "--per-class", "1", "--seed", "2"]) == 0
        capsys.readouterr()
        assert main(["classify", "--refs", str(refs), "--input", str(queries)]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "index,subject,session,true,predicted"
        assert len(lines) == 5

    def test_missing_file_exits_nonzero(self, capsys):
        assert main(["detect", "/nonexistent/file.csv"]) == 1
        assert "error" in capsys.readouterr().err
