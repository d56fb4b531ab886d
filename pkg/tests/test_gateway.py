import asyncio
import json

import websockets

from hsisim.gateway import serve_session
from tests.conftest import make_config

_NEXT_PORT = [8931]


def next_port():
    _NEXT_PORT[0] += 1
    return _NEXT_PORT[0]


async def scripted_console(uri, mark_during_pause=False,
                           answer_out_of_order=False, mark_free_cells=0,
                           mark_on_welcome=False, disconnect_at_tick=None,
                           ratings=None):
    """Minimal console: answers everything, records every received frame."""
    trace = []
    marks_sent = []
    sent_bogus = False
    free_cells = []
    async with websockets.connect(uri) as ws:
        await ws.send(json.dumps({"type": "Hello", "version": 1}))
        async for raw in ws:
            trace.append(raw)
            msg = json.loads(raw)
            mtype = msg["type"]
            if mtype == "Welcome":
                blocked = {tuple(c) for c in msg["obstacles"]}
                width = msg["grid"]["width"]
                free_cells = [(c, 0) for c in range(width)
                              if (c, 0) not in blocked]
                if mark_on_welcome and mark_free_cells:
                    for cell in free_cells[:mark_free_cells]:
                        await ws.send(json.dumps({"type": "Mark",
                                                  "cell": list(cell)}))
                        marks_sent.append(cell)
            elif mtype == "Snapshot":
                if (disconnect_at_tick is not None
                        and msg["t"] >= disconnect_at_tick):
                    return trace
            elif mtype == "PauseEnd":
                # the engine blocks on answers, so this is the one moment a
                # fast unpaced run is synchronized with the console
                if mark_free_cells and not marks_sent:
                    for cell in free_cells[:mark_free_cells]:
                        await ws.send(json.dumps({"type": "Mark",
                                                  "cell": list(cell)}))
                        marks_sent.append(cell)
            elif mtype == "PauseBegin" and mark_during_pause:
                await ws.send(json.dumps({"type": "Mark", "cell": [1, 1]}))
            elif mtype == "QueryPrompt":
                q = msg["query"]
                if answer_out_of_order and not sent_bogus:
                    await ws.send(json.dumps(
                        {"type": "SagatAnswer", "query_id": "not-this-one",
                         "answer": {"idk": True}}))
                    sent_bogus = True
                answer = ({"idk": True} if q["kind"] == "MCQ"
                          else {"na": True})
                await ws.send(json.dumps({"type": "SagatAnswer",
                                          "query_id": q["id"],
                                          "answer": answer}))
            elif mtype == "SartForm":
                await ws.send(json.dumps({"type": "SartSubmit",
                                          "ratings": ratings or [4] * 10}))
            elif mtype == "SessionEnd":
                return trace
    return trace


async def run_pair(config, port, **console_kwargs):
    ready = asyncio.Event()
    server = asyncio.create_task(
        serve_session(config, "127.0.0.1", port, realtime=False,
                      ready_event=ready))
    await asyncio.wait_for(ready.wait(), 10)
    trace = await asyncio.wait_for(
        scripted_console(f"ws://127.0.0.1:{port}", **console_kwargs), 120)
    result = await asyncio.wait_for(server, 120)
    return trace, result


def gateway_config(**overrides):
    overrides.setdefault("seed", 23)
    overrides.setdefault("task_duration_s", 120.0)
    return make_config(**overrides)


def types_of(trace):
    return [json.loads(raw)["type"] for raw in trace]


class TestProtocol:
    def test_full_session_message_sequence(self):
        trace, result = asyncio.run(run_pair(gateway_config(), next_port()))
        kinds = types_of(trace)
        assert kinds.count("PauseBegin") == 2
        assert kinds.count("PauseEnd") == 2
        assert kinds.count("QueryPrompt") == 28
        assert kinds.count("SartForm") == 1
        assert kinds[-1] == "SessionEnd"
        assert result.report["completed"]
        # per pause: exactly 14 prompts between begin and end
        begin = kinds.index("PauseBegin")
        end = kinds.index("PauseEnd")
        assert kinds[begin:end + 1].count("QueryPrompt") == 14

    def test_no_snapshots_during_pause(self):
        trace, _ = asyncio.run(run_pair(gateway_config(), next_port()))
        depth = 0
        for raw in trace:
            msg = json.loads(raw)
            if msg["type"] == "PauseBegin":
                depth += 1
            elif msg["type"] == "PauseEnd":
                depth -= 1
            elif msg["type"] == "Snapshot":
                assert depth == 0, "snapshot streamed while screen hidden"

    def test_mark_during_pause_rejected(self):
        trace, result = asyncio.run(run_pair(gateway_config(), next_port(),
                                             mark_during_pause=True))
        rejections = [json.loads(raw) for raw in trace
                      if json.loads(raw)["type"] == "Rejection"]
        assert any(r["reason"] == "paused" for r in rejections)
        assert result.report["counts"]["marks"] == 0

    def test_out_of_order_answer_rejected(self):
        trace, result = asyncio.run(run_pair(gateway_config(), next_port(),
                                             answer_out_of_order=True))
        rejections = [json.loads(raw) for raw in trace
                      if json.loads(raw)["type"] == "Rejection"]
        assert any(r["reason"] == "out of order" for r in rejections)
        assert result.report["completed"]

    def test_marks_echoed_in_snapshots(self, tmp_path):
        # a live-paced miniature task: the console has real time to act
        bank = {
            "near_radius": 5.0, "converge_radius": 2.0,
            "queries": [
                {"id": "t1", "tag": "Dim1.1", "level": "L1", "dimension": 1,
                 "kind": "CMQ", "pause": 1, "prompt": "robots?",
                 "extractor": "active_robot_cells"},
                {"id": "t2", "tag": "Dim4.2", "level": "L1", "dimension": 4,
                 "kind": "CMQ", "pause": 2, "prompt": "marked?",
                 "extractor": "marked_cells"},
            ],
        }
        bank_path = tmp_path / "mini_bank.json"
        bank_path.write_text(json.dumps(bank))
        config = gateway_config(
            task_duration_s=8.0, bank_path=str(bank_path),
            pauses={"windows": [[0.3, 0.35], [0.7, 0.75]], "min_gap_s": 1.0})

        async def scenario():
            port = next_port()
            ready = asyncio.Event()
            server = asyncio.create_task(
                serve_session(config, "127.0.0.1", port, realtime=True,
                              ready_event=ready))
            await asyncio.wait_for(ready.wait(), 10)
            trace = await asyncio.wait_for(
                scripted_console(f"ws://127.0.0.1:{port}", mark_free_cells=2,
                                 mark_on_welcome=True), 120)
            result = await asyncio.wait_for(server, 120)
            return trace, result

        trace, result = asyncio.run(scenario())
        marked_seen = set()
        for raw in trace:
            msg = json.loads(raw)
            if msg["type"] == "Snapshot":
                marked_seen |= {tuple(c) for c in msg["marked"]}
        assert len(marked_seen) == 2
        assert result.report["counts"]["marks"] == 2

    def test_disconnect_aborts_session(self):
        trace, result = asyncio.run(run_pair(
            gateway_config(), next_port(), disconnect_at_tick=300))
        assert not result.report["completed"]

    def test_second_console_refused(self):
        async def scenario():
            port = next_port()
            config = gateway_config()
            ready = asyncio.Event()
            server = asyncio.create_task(
                serve_session(config, "127.0.0.1", port, realtime=False,
                              ready_event=ready))
            await asyncio.wait_for(ready.wait(), 10)
            uri = f"ws://127.0.0.1:{port}"

            refused = {}

            async def late_console():
                await asyncio.sleep(0.1)
                async with websockets.connect(uri) as ws2:
                    raw = await asyncio.wait_for(ws2.recv(), 10)
                    refused["msg"] = json.loads(raw)

            trace, _ = await asyncio.gather(
                asyncio.wait_for(scripted_console(uri), 120), late_console())
            await asyncio.wait_for(server, 120)
            return refused["msg"]

        msg = asyncio.run(scenario())
        assert msg["type"] == "Rejection"
        assert "another console" in msg["reason"]

    def test_bad_hello_rejected(self):
        async def scenario():
            port = next_port()
            ready = asyncio.Event()
            server = asyncio.create_task(
                serve_session(gateway_config(), "127.0.0.1", port,
                              realtime=False, ready_event=ready))
            await asyncio.wait_for(ready.wait(), 10)
            uri = f"ws://127.0.0.1:{port}"
            async with websockets.connect(uri) as ws:
                await ws.send(json.dumps({"type": "Hello", "version": 99}))
                raw = await asyncio.wait_for(ws.recv(), 10)
                bad = json.loads(raw)
            # the slot is freed; a well-behaved console completes the session
            await asyncio.wait_for(scripted_console(uri), 120)
            await asyncio.wait_for(server, 120)
            return bad

        msg = asyncio.run(scenario())
        assert msg["type"] == "Rejection"
        assert "Hello" in msg["reason"]


class TestInformationBarrier:
    def test_snapshots_never_carry_hazard_cells(self):
        config = gateway_config(seed=31)
        trace, result = asyncio.run(run_pair(config, next_port()))
        # ground truth from the session's own log records
        truth_cells = set()
        for rec in result.log.records:
            if rec.get("type") == "HazardEvent":
                truth_cells |= {tuple(c) for c in rec["activated"]}
        assert truth_cells, "test needs a hazard that actually fired"
        for raw in trace:
            msg = json.loads(raw)
            if msg["type"] in ("Alert",):
                continue
            for cell in truth_cells:
                token = f"[{cell[0]},{cell[1]}]"
                assert token not in raw, (msg["type"], cell)
