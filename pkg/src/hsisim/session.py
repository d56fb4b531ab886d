"""Session runtime: tick loop, pauses, logging, replay and rescoring.

A session is fully determined by (config, seed, operator input stream):
the loop owns all mutable state, every event lands in the log, and the log
alone is enough to rebuild the report or re-execute the run bit-exactly.
Sim time excludes pauses; the tick counter never advances while the
operator answers queries.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .config import SessionConfig, config_from_dict
from .engine import EngineState, step_engine
from .hazards import make_hazard_field
from .intervention import MarkedSet
from .metrics import compute_metrics
from .operators import (LogOperator, OperatorDisconnected, OperatorSource,
                        action_payload, scripted_operator_from_config)
from .rng import session_streams
from .sagat import (ConfigError, ExtractionContext, QueryBank, ScoringConfig,
                    aggregate_sagat, extract_ground_truth, load_bank,
                    schedule_pauses, score_response)
from .sart import score_sart
from .sessionlog import (IntegrityError, LogBuilder, header_record, read_log,
                         verify_checksum)
from .swarm import spawn_swarm
from .world import generate_world


def state_hash(state: EngineState) -> str:
    token = state.state_token().encode("utf-8")
    return hashlib.blake2b(token, digest_size=8).hexdigest()


def build_state(config: SessionConfig, streams: dict) -> EngineState:
    w = config.world
    world = generate_world(w.width, w.height, w.cell_size, w.obstacle_fraction,
                           w.spawn, streams["world"], target_cell=w.target_cell,
                           min_target_dist_frac=w.min_target_dist_frac)
    robots = spawn_swarm(config.swarm, world, w.spawn, streams["swarm"])
    hazard = make_hazard_field(config.hazard_kind, config.hazards, world,
                               streams["hazards"])
    return EngineState(
        world=world, params=config.swarm, robots=robots, hazard=hazard,
        marked=MarkedSet(), swarm_stream=streams["swarm"],
        duration_ticks=config.duration_ticks,
        alert_latency_ticks=config.alert_latency_ticks,
        swipe_radius=config.swipe_radius, k_impulse=config.k_impulse)


@dataclass
class SessionResult:
    report: dict
    log: LogBuilder
    path: str | None


def task_info(state: EngineState, config: SessionConfig) -> dict:
    """Static, operator-visible task description (the on-screen map)."""
    w = state.world
    return {
        "grid": {"width": w.width, "height": w.height,
                 "cell_size": w.cell_size},
        "obstacles": [list(c) for c in sorted(w.static_obstacles)],
        "target": [w.target[0], w.target[1]],
        "duration_s": config.task_duration_s,
        "n_robots": config.swarm.n_robots,
    }


def run_session(config: SessionConfig, operator: OperatorSource | None = None,
                out_path: str | None = None) -> SessionResult:
    """Execute one full task and return its report plus the complete log."""
    streams = session_streams(config.seed)
    if config.operator_stream_seed is not None:
        op_streams = session_streams(config.operator_stream_seed)
        streams["policy"] = op_streams["policy"]
        streams["respondent"] = op_streams["respondent"]
    if operator is None:
        operator = scripted_operator_from_config(config.operator, streams)
    state = build_state(config, streams)
    bank = load_bank(config.bank_path)
    pause_ticks = schedule_pauses(config.task_duration_s, config.swarm.dt,
                                  streams["pauses"], config.pauses.windows,
                                  config.pauses.min_gap_s)
    if bank.n_pauses != len(pause_ticks):
        raise ConfigError(
            f"bank spans {bank.n_pauses} pauses but {len(pause_ticks)} are scheduled")
    pause_of_tick = {t: i + 1 for i, t in enumerate(pause_ticks)}

    log = LogBuilder()
    log.add(header_record(config.to_dict()))
    _log_telemetry(log, state, config, force=True)

    reason, incomplete = "completed", False
    operator.begin(task_info(state, config))
    view = state.operator_view()
    try:
        for _ in range(config.duration_ticks):
            actions = operator.poll_actions(view)
            result = step_engine(state, actions)
            t = state.tick
            for action in result.applied_actions:
                log.add({"t": t, "type": "Action",
                         "action": action_payload(action), "rejected": None})
            for action, why in result.rejections:
                log.add({"t": t, "type": "Action",
                         "action": action_payload(action), "rejected": why})
            for ev in result.hazard_events:
                log.add({"t": t, "type": "HazardEvent", "kind": ev.kind,
                         "activated": [list(c) for c in ev.activated],
                         "deactivated": [list(c) for c in ev.deactivated],
                         "exhausted": ev.exhausted})
            for alert in result.alerts:
                log.add({"t": t, "type": "Alert", "hazard_kind": alert.hazard_kind,
                         "cells": [list(c) for c in alert.cells],
                         "text": alert.text})
            if result.deactivated:
                log.add({"t": t, "type": "Deactivation", "ids": result.deactivated})
            _log_telemetry(log, state, config, force=(t == config.duration_ticks))
            view = state.operator_view(new_alerts=result.alerts)
            operator.notify(view, result.alerts)
            if t in pause_of_tick:
                _run_pause(pause_of_tick[t], state, bank, operator, log)
        ratings = operator.collect_sart()
        if ratings is not None:
            score_sart(ratings)  # validates range before logging
            log.add({"t": state.tick, "type": "SartSubmission",
                     "ratings": list(ratings)})
    except OperatorDisconnected as exc:
        reason, incomplete = f"aborted: {exc}", True

    log.finalize(state.tick, reason, incomplete)
    report = build_report(log.records)
    operator.session_end(report)
    if out_path:
        log.write(out_path)
    return SessionResult(report, log, out_path)


def _log_telemetry(log: LogBuilder, state: EngineState, config: SessionConfig,
                   force: bool) -> None:
    t = state.tick
    lc = config.logging
    if force or t % lc.metric_every == 0:
        trapped = state.trapped_ids()
        sample = compute_metrics(state.robots, state.world, t, len(trapped),
                                 config.naq_mode)
        log.add({"t": t, "type": "MetricSample", "ca": sample.ca,
                 "na": sample.na, "naq1": sample.naq1, "naq2": sample.naq2,
                 "active_count": sample.active_count,
                 "deactivated_count": sample.deactivated_count,
                 "trapped_count": sample.trapped_count,
                 "all_deactivated": sample.all_deactivated})
    if force or t % lc.snapshot_every == 0:
        log.add({"t": t, "type": "RobotSnapshot",
                 "robots": [[r.id, r.pos[0], r.pos[1], r.status]
                            for r in state.robots],
                 "marked": [list(c) for c in sorted(state.marked.cells)]})
    if force or t % lc.hash_every == 0:
        log.add({"t": t, "type": "StateHash", "hash": state_hash(state)})


def _run_pause(pause_index: int, state: EngineState, bank: QueryBank,
               operator: OperatorSource, log: LogBuilder) -> None:
    """Freeze the sim, run this pause's queries sequentially, resume."""
    queries = bank.for_pause(pause_index)
    log.add({"t": state.tick, "type": "PauseBegin", "pause": pause_index,
             "query_ids": [q.id for q in queries]})
    operator.pause_begin(pause_index, queries)
    ctx = ExtractionContext(state, bank)
    for index, query in enumerate(queries, start=1):
        truth = extract_ground_truth(query, ctx)
        answer, latency_ms = operator.answer_query(query, index, truth)
        _validate_answer(query, answer)
        log.add({"t": state.tick, "type": "SagatAnswer", "pause": pause_index,
                 "query_id": query.id, "answer": answer, "truth": truth,
                 "latency_ms": latency_ms})
    operator.pause_end(pause_index)
    log.add({"t": state.tick, "type": "PauseEnd", "pause": pause_index})


def _validate_answer(query, answer: dict) -> None:
    if not isinstance(answer, dict):
        raise OperatorDisconnected(f"malformed answer for {query.id}")
    keys = set(answer)
    mcq_ok = keys in ({"option"}, {"idk"})
    cmq_ok = keys in ({"cells"}, {"na"})
    if (query.kind == "MCQ" and not mcq_ok) or (query.kind == "CMQ" and not cmq_ok):
        raise OperatorDisconnected(
            f"answer type does not match {query.kind} query {query.id}")


# -- report building (shared by live runs and offline rescoring) --------------


def build_report(records, scoring: ScoringConfig | None = None,
                 naq_mode: str | None = None) -> dict:
    """Derive the session report purely from log records.

    `records` must start with the header record. Passing a different
    scoring config or NAQ mode rescoring the same log is the supported way
    to study alternative rubrics without re-running the session.
    """
    if not records or records[0].get("type") != "Header":
        raise IntegrityError("records do not start with a header")
    config = config_from_dict(records[0]["config"])
    scoring = scoring if scoring is not None else config.scoring
    naq_mode = naq_mode if naq_mode is not None else config.naq_mode
    bank = load_bank(config.bank_path)
    body = records[1:]

    end = next((r for r in body if r["type"] == "SessionEnd"), None)
    snapshots = [r for r in body if r["type"] == "RobotSnapshot"]
    samples = [r for r in body if r["type"] == "MetricSample"]
    answers = [r for r in body if r["type"] == "SagatAnswer"]
    sart_rec = next((r for r in body if r["type"] == "SartSubmission"), None)

    final_metrics = None
    if snapshots and samples:
        streams = session_streams(config.seed)
        w = config.world
        world = generate_world(w.width, w.height, w.cell_size,
                               w.obstacle_fraction, w.spawn, streams["world"],
                               target_cell=w.target_cell,
                               min_target_dist_frac=w.min_target_dist_frac)
        snap = snapshots[-1]
        robots = [_SnapRobot(rid, (x, y), status)
                  for rid, x, y, status in snap["robots"]]
        sample = compute_metrics(robots, world, snap["t"],
                                 samples[-1]["trapped_count"], naq_mode)
        final_metrics = {
            "tick": sample.tick, "ca": sample.ca, "na": sample.na,
            "naq1": sample.naq1, "naq2": sample.naq2,
            "active_count": sample.active_count,
            "deactivated_count": sample.deactivated_count,
            "trapped_count": sample.trapped_count,
            "all_deactivated": sample.all_deactivated,
        }

    sagat_report = None
    if answers:
        scored = []
        for rec in answers:
            query = bank.by_id(rec["query_id"])
            scored.append((query, score_response(query, rec["answer"],
                                                 rec["truth"], scoring)))
        if any(s is not None for _, s in scored):
            agg = aggregate_sagat(scored)
            sagat_report = {
                "overall": agg.overall,
                "levels": agg.level_means,
                "dimensions": {str(k): v for k, v in agg.dimension_means.items()},
                "per_question": agg.per_question,
                "n_scored": agg.n_scored,
            }

    sart_report = None
    if sart_rec is not None:
        s = score_sart(sart_rec["ratings"])
        sart_report = {"ratings": list(s.ratings), "demand": s.demand,
                       "supply": s.supply, "understanding": s.understanding,
                       "total": s.total, "mean_rating": s.mean_rating}

    action_recs = [r for r in body if r["type"] == "Action"]
    counts = {
        "marks": sum(1 for r in action_recs
                     if r["action"]["kind"] == "mark" and r["rejected"] is None),
        "unmarks": sum(1 for r in action_recs if r["action"]["kind"] == "unmark"),
        "swipes": sum(1 for r in action_recs if r["action"]["kind"] == "swipe"),
        "rejected_actions": sum(1 for r in action_recs if r["rejected"]),
        "alerts": sum(1 for r in body if r["type"] == "Alert"),
        "deactivations": sum(len(r["ids"]) for r in body
                             if r["type"] == "Deactivation"),
    }

    return {
        "participant_id": config.participant_id,
        "hazard_kind": config.hazard_kind,
        "attempt": config.attempt,
        "seed": config.seed,
        "task_duration_s": config.task_duration_s,
        "completed": bool(end) and not end.get("incomplete", False),
        "final_metrics": final_metrics,
        "sagat": sagat_report,
        "sart": sart_report,
        "counts": counts,
    }


class _SnapRobot:
    """Robot view reconstructed from a snapshot record (metrics only)."""

    __slots__ = ("id", "pos", "status")

    def __init__(self, rid, pos, status):
        self.id = rid
        self.pos = pos
        self.status = status


# -- replay and rescore --------------------------------------------------------


@dataclass
class ReplayResult:
    ok: bool
    final_hash: str | None
    ticks_replayed: int
    incomplete: bool
    error: str | None = None
    first_divergent_tick: int | None = None


def replay(path: str) -> ReplayResult:
    """Re-execute a log and verify it byte for byte.

    Checks the end-record checksum over the raw bytes, then re-runs the
    session feeding the recorded operator inputs and compares every
    regenerated line with the original. Any flipped byte fails one of the
    two checks. Aborted logs replay up to the abort point.
    """
    header, body, lines = read_log(path)
    config = config_from_dict(header["config"])
    end = body[-1] if body and body[-1].get("type") == "SessionEnd" else None
    if end is not None and not verify_checksum(body, lines):
        raise IntegrityError("log checksum mismatch: file was modified",
                             tick=end.get("t"))
    incomplete = end is None or bool(end.get("incomplete"))

    operator = LogOperator(body)
    result = run_session(config, operator)
    new_lines = result.log.lines

    # the regenerated SessionEnd of an aborted log may carry a different
    # abort reason; everything before it must match exactly
    compare_to = len(lines) - 1 if incomplete and end is not None else len(lines)
    if len(new_lines) < compare_to:
        raise IntegrityError("replay produced fewer records than the log")
    for i in range(compare_to):
        if lines[i] != new_lines[i]:
            tick = _tick_of_line(lines[i])
            raise IntegrityError(
                f"replay diverged on line {i + 1} (tick {tick})", tick=tick)
    if not incomplete and len(lines) != len(new_lines):
        raise IntegrityError("replay produced a different record count")

    hashes = [r["hash"] for r in body if r.get("type") == "StateHash"]
    return ReplayResult(ok=True, final_hash=hashes[-1] if hashes else None,
                        ticks_replayed=result.log.records[-1]["t"],
                        incomplete=incomplete)


def _tick_of_line(line: str):
    try:
        return json.loads(line).get("t")
    except json.JSONDecodeError:
        return None


def rescore(path: str, scoring: ScoringConfig | None = None,
            naq_mode: str | None = None) -> dict:
    """Recompute a session report from its log under an alternative rubric."""
    header, body, _ = read_log(path)
    return build_report([header] + body, scoring=scoring, naq_mode=naq_mode)
