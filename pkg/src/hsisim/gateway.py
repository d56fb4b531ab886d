"""Live operator gateway: one session, one console, one message stream.

WebSocket transport; every frame is one canonical JSON object using the
same payload schema as the session log. The protocol enforces the study
rules at the wire level: no world snapshots during a pause, actions
rejected while paused, strictly sequential query answering with no back
navigation, and hazard ground truth never leaves the engine except inside
alert messages.
"""

from __future__ import annotations

import asyncio
import json
import queue
import threading
import time

import websockets

from .config import SessionConfig
from .operators import OperatorDisconnected, OperatorSource
from .intervention import Mark, Swipe, Unmark
from .sagat import option_labels
from .sessionlog import canonical
from .session import run_session

WIRE_VERSION = 1
SNAPSHOT_QUEUE_SIZE = 256
ANSWER_POLL_S = 0.1

SART_CONSTRUCT_LABELS = (
    "Instability of the situation", "Complexity of the situation",
    "Variability of the situation", "Arousal", "Concentration of attention",
    "Division of attention", "Spare mental capacity", "Information quantity",
    "Information quality", "Familiarity with the situation",
)


class GatewayOperator(OperatorSource):
    """Session-side half of the bridge; runs inside the session thread."""

    def __init__(self, render_every: int = 1, realtime: bool = False,
                 dt: float = 0.1):
        self.render_every = max(1, render_every)
        self.realtime = realtime
        self.dt = dt
        self.outbound: queue.Queue = queue.Queue()
        self.inbound_actions: queue.Queue = queue.Queue()
        self.answers: queue.Queue = queue.Queue()
        self.sart: queue.Queue = queue.Queue()
        self.disconnected = threading.Event()
        self.in_pause = threading.Event()
        self.awaiting_sart = threading.Event()
        self.pending_query_id: str | None = None
        self._snapshot_backlog = 0
        self._next_deadline: float | None = None

    # -- engine -> console -------------------------------------------------

    def _send(self, message: dict) -> None:
        self.outbound.put(canonical(message))

    def begin(self, task_info: dict) -> None:
        self._send({"type": "Welcome", "wire_version": WIRE_VERSION,
                    **task_info})

    def _send_snapshot(self, message: dict) -> None:
        # snapshots are droppable under backpressure; nothing else is
        if self.outbound.qsize() >= SNAPSHOT_QUEUE_SIZE:
            return
        self.outbound.put(canonical(message))

    def notify(self, view, new_alerts) -> None:
        if self.disconnected.is_set():
            raise OperatorDisconnected("console disconnected")
        for alert in new_alerts:
            self._send({"type": "Alert", "t": alert.tick,
                        "hazard_kind": alert.hazard_kind,
                        "cells": [list(c) for c in alert.cells],
                        "text": alert.text})
        if view.tick % self.render_every == 0:
            self._send_snapshot({
                "type": "Snapshot", "t": view.tick,
                "remaining_s": view.remaining_s,
                "robots": [[rid, x, y, status]
                           for rid, x, y, status in view.robots],
                "marked": [list(c) for c in sorted(view.marked)],
            })
        if self.realtime:
            now = time.monotonic()
            if self._next_deadline is None:
                self._next_deadline = now
            self._next_deadline += self.dt
            delay = self._next_deadline - now
            if delay > 0:
                time.sleep(delay)

    # -- console -> engine ---------------------------------------------------

    def poll_actions(self, view) -> list:
        if self.disconnected.is_set():
            raise OperatorDisconnected("console disconnected")
        actions = []
        while True:
            try:
                actions.append(self.inbound_actions.get_nowait())
            except queue.Empty:
                return actions

    def pause_begin(self, pause_index: int, queries) -> None:
        self.in_pause.set()
        self._next_deadline = None
        self._send({"type": "PauseBegin", "pause": pause_index,
                    "n_queries": len(queries),
                    "query_ids": [q.id for q in queries]})

    def answer_query(self, query, index: int, truth: dict):
        # the wire prompt never includes the extractor or the ground truth
        prompt = {"type": "QueryPrompt", "index": index,
                  "query": {"id": query.id, "kind": query.kind,
                            "prompt": query.prompt}}
        if query.kind == "MCQ":
            prompt["query"]["options"] = option_labels(query)
        self.pending_query_id = query.id
        self._send(prompt)
        started = time.monotonic()
        while True:
            if self.disconnected.is_set():
                raise OperatorDisconnected("console disconnected during pause")
            try:
                answer, console_latency = self.answers.get(timeout=ANSWER_POLL_S)
            except queue.Empty:
                continue
            self.pending_query_id = None
            # prefer the console's own measurement; fall back to engine-side
            latency_ms = (console_latency if console_latency is not None
                          else int((time.monotonic() - started) * 1000))
            return answer, latency_ms

    def pause_end(self, pause_index: int) -> None:
        self.in_pause.clear()
        self._send({"type": "PauseEnd", "pause": pause_index})

    def collect_sart(self):
        self.awaiting_sart.set()
        self._send({"type": "SartForm",
                    "constructs": list(SART_CONSTRUCT_LABELS)})
        while True:
            if self.disconnected.is_set():
                raise OperatorDisconnected("console disconnected before SART")
            try:
                ratings = self.sart.get(timeout=ANSWER_POLL_S)
            except queue.Empty:
                continue
            self.awaiting_sart.clear()
            return ratings

    def session_end(self, report: dict) -> None:
        self._send({"type": "SessionEnd", "report": report})
        self.outbound.put(None)  # writer shutdown sentinel


def _route_message(gw: GatewayOperator, msg: dict):
    """Validate one console message; returns a rejection reason or None."""
    mtype = msg.get("type")
    if mtype in ("Mark", "Unmark", "Swipe"):
        if gw.in_pause.is_set() or gw.awaiting_sart.is_set():
            return "paused"
        try:
            if mtype == "Mark":
                action = Mark(tuple(msg["cell"]))
            elif mtype == "Unmark":
                action = Unmark(tuple(msg["cell"]))
            else:
                action = Swipe(tuple(msg["origin"]), tuple(msg["direction"]),
                               float(msg["magnitude"]))
        except (KeyError, TypeError, ValueError) as exc:
            return f"malformed {mtype}: {exc}"
        gw.inbound_actions.put(action)
        return None
    if mtype == "SagatAnswer":
        if not gw.in_pause.is_set():
            return "no pause active"
        if msg.get("query_id") != gw.pending_query_id:
            return "out of order"
        answer = msg.get("answer")
        if not isinstance(answer, dict):
            return "malformed answer"
        latency = msg.get("latency_ms")
        gw.answers.put((answer, latency if isinstance(latency, int) else None))
        return None
    if mtype == "SartSubmit":
        if not gw.awaiting_sart.is_set():
            return "no SART form pending"
        ratings = msg.get("ratings")
        if (not isinstance(ratings, list) or len(ratings) != 10
                or not all(isinstance(r, int) and 1 <= r <= 7 for r in ratings)):
            return "malformed SART ratings"
        gw.sart.put(ratings)
        return None
    return f"unknown message type {mtype!r}"


async def serve_session(config: SessionConfig, host: str, port: int,
                        out_path: str | None = None, realtime: bool = True,
                        render_hz: float = 10.0, ready_event=None):
    """Serve exactly one session to exactly one console; returns its result."""
    loop = asyncio.get_running_loop()
    result_box: dict = {}
    done = asyncio.Event()
    busy = False

    render_every = max(1, int(round(1.0 / (render_hz * config.swarm.dt))))

    async def handler(ws):
        nonlocal busy
        if busy:
            await ws.send(canonical({"type": "Rejection",
                                     "reason": "another console is connected"}))
            await ws.close()
            return
        busy = True
        started = False
        try:
            raw = await ws.recv()
            hello = _parse(raw)
            if (not hello or hello.get("type") != "Hello"
                    or hello.get("version") != WIRE_VERSION):
                await ws.send(canonical({"type": "Rejection",
                                         "reason": "bad or missing Hello"}))
                await ws.close()
                return
            started = True
        except websockets.ConnectionClosed:
            return
        finally:
            if not started:
                busy = False   # a failed handshake frees the slot

        gw = GatewayOperator(render_every=render_every, realtime=realtime,
                             dt=config.swarm.dt)
        session_future = loop.run_in_executor(
            None, lambda: run_session(config, gw, out_path))

        async def writer():
            while True:
                item = await loop.run_in_executor(None, gw.outbound.get)
                if item is None:
                    break
                try:
                    await ws.send(item)
                except websockets.ConnectionClosed:
                    gw.disconnected.set()
                    break

        async def reader():
            try:
                async for raw_msg in ws:
                    msg = _parse(raw_msg)
                    if msg is None:
                        gw.outbound.put(canonical(
                            {"type": "Rejection", "reason": "malformed message"}))
                        continue
                    reason = _route_message(gw, msg)
                    if reason is not None:
                        gw.outbound.put(canonical(
                            {"type": "Rejection", "reason": reason}))
            except websockets.ConnectionClosed:
                pass
            gw.disconnected.set()

        writer_task = asyncio.create_task(writer())
        reader_task = asyncio.create_task(reader())
        try:
            result_box["result"] = await session_future
            await writer_task          # drains through the SessionEnd sentinel
            try:
                await ws.close()
            except websockets.ConnectionClosed:
                pass
            await reader_task
        finally:
            done.set()

    async with websockets.serve(handler, host, port):
        if ready_event is not None:
            ready_event.set()
        await done.wait()
    return result_box.get("result")


def _parse(raw):
    try:
        msg = json.loads(raw)
    except (json.JSONDecodeError, TypeError):
        return None
    return msg if isinstance(msg, dict) else None


def serve_forever(config: SessionConfig, host: str, port: int,
                  out_path: str | None = None, realtime: bool = True) -> None:
    result = asyncio.run(serve_session(config, host, port, out_path, realtime))
    if result is not None and result.path:
        print(f"session complete; log at {result.path}")
