"""Operator sources: scripted policies and replayed logs behind one interface.

The session loop talks to exactly one OperatorSource. Scripted operators
wrap an intervention policy plus a query respondent; the log operator
re-feeds recorded inputs for replay. The live gateway provides a third
implementation over a socket (see gateway module).
"""

from __future__ import annotations

from .config import OperatorConfig
from .intervention import Mark, OperatorView, Swipe, Unmark, make_policy
from .rng import RandomStream
from .sagat import SagatQuery


class OperatorDisconnected(Exception):
    pass


class OperatorSource:
    """Interface the session loop drives; default implementation is inert."""

    def begin(self, task_info: dict) -> None:
        """Static task description (grid, obstacles, target, duration)."""

    def poll_actions(self, view: OperatorView) -> list:
        return []

    def notify(self, view: OperatorView, new_alerts) -> None:
        pass

    def pause_begin(self, pause_index: int, queries) -> None:
        pass

    def answer_query(self, query: SagatQuery, index: int, truth: dict):
        """Returns (answer dict, latency_ms)."""
        raise NotImplementedError

    def pause_end(self, pause_index: int) -> None:
        pass

    def collect_sart(self):
        """Ten 1..7 ratings, or None when no form was submitted."""
        return None

    def session_end(self, report: dict) -> None:
        pass


# -- scripted respondents ----------------------------------------------------


def _correct_answer(query: SagatQuery, truth: dict) -> dict:
    if query.kind == "MCQ":
        opt = truth.get("option")
        return {"idk": True} if opt is None else {"option": opt}
    cells = truth.get("cells", [])
    return {"na": True} if not cells else {"cells": cells}


def _wrong_answer(query: SagatQuery, truth: dict, stream: RandomStream) -> dict:
    if query.kind == "MCQ":
        opt = truth.get("option")
        if opt is None:
            return {"option": stream.randrange(5)}
        others = [i for i in range(5) if i != opt]
        return {"option": others[stream.randrange(len(others))]}
    if truth.get("cells"):
        return {"na": True}
    return {"cells": [[0, 0]]}


class IdkRespondent:
    """Answers "I don't know" / "Not applicable" to everything."""

    def answer(self, query, truth, stream):
        return {"idk": True} if query.kind == "MCQ" else {"na": True}


class OracleRespondent:
    """Always answers with the extracted ground truth."""

    def answer(self, query, truth, stream):
        return _correct_answer(query, truth)


class NoisyRespondent:
    """Correct with a fixed probability, otherwise definitely wrong."""

    def __init__(self, accuracy: float):
        if not (0.0 <= accuracy <= 1.0):
            raise ValueError("respondent accuracy must be in [0, 1]")
        self.accuracy = accuracy

    def answer(self, query, truth, stream):
        if stream.u01() < self.accuracy:
            return _correct_answer(query, truth)
        return _wrong_answer(query, truth, stream)


RESPONDENTS = {"idk": IdkRespondent, "oracle": OracleRespondent,
               "noisy": NoisyRespondent}


class ScriptedOperator(OperatorSource):
    """Headless operator: an intervention policy plus a query respondent."""

    def __init__(self, policy, respondent, policy_stream: RandomStream,
                 respondent_stream: RandomStream, sart_ratings=None):
        self.policy = policy
        self.respondent = respondent
        self.policy_stream = policy_stream
        self.respondent_stream = respondent_stream
        self._sart = sart_ratings

    def poll_actions(self, view: OperatorView) -> list:
        return self.policy.act(view, self.policy_stream)

    def answer_query(self, query, index, truth):
        answer = self.respondent.answer(query, truth, self.respondent_stream)
        return answer, 0

    def collect_sart(self):
        if self._sart is not None:
            return list(self._sart)
        # deterministic mid-scale form so reports always carry a SART block
        return [4] * 10


def scripted_operator_from_config(op_cfg: OperatorConfig, streams: dict
                                  ) -> ScriptedOperator:
    kwargs = {}
    if op_cfg.policy == "noisy-marker":
        kwargs = {"accuracy": op_cfg.accuracy, "delay_ticks": op_cfg.delay_ticks}
    elif op_cfg.policy == "random-swiper":
        kwargs = {"interval_ticks": op_cfg.swipe_interval_ticks}
    policy = make_policy(op_cfg.policy, **kwargs)
    if op_cfg.respondent == "noisy":
        acc = (op_cfg.respondent_accuracy if op_cfg.respondent_accuracy
               is not None else op_cfg.accuracy)
        respondent = NoisyRespondent(acc)
    else:
        respondent = RESPONDENTS[op_cfg.respondent]()
    return ScriptedOperator(policy, respondent, streams["policy"],
                            streams["respondent"])


class LogOperator(OperatorSource):
    """Re-feeds the recorded inputs of a session log, for replay."""

    def __init__(self, records):
        self.actions_by_tick: dict = {}
        self.answers: dict = {}
        self.sart = None
        for rec in records:
            rtype = rec.get("type")
            if rtype == "Action":
                self.actions_by_tick.setdefault(rec["t"], []).append(
                    _action_from_payload(rec["action"]))
            elif rtype == "SagatAnswer":
                self.answers[(rec["pause"], rec["query_id"])] = (
                    rec["answer"], rec["latency_ms"])
            elif rtype == "SartSubmission":
                self.sart = rec["ratings"]
        self._pause = None

    def poll_actions(self, view: OperatorView) -> list:
        # actions logged at tick t were drained at the start of tick t
        return self.actions_by_tick.get(view.tick + 1, [])

    def pause_begin(self, pause_index, queries):
        self._pause = pause_index

    def answer_query(self, query, index, truth):
        try:
            return self.answers[(self._pause, query.id)]
        except KeyError:
            raise OperatorDisconnected(
                f"log has no answer for {query.id} in pause {self._pause}")

    def collect_sart(self):
        return self.sart


def _action_from_payload(payload: dict):
    kind = payload["kind"]
    if kind == "mark":
        return Mark(tuple(payload["cell"]))
    if kind == "unmark":
        return Unmark(tuple(payload["cell"]))
    if kind == "swipe":
        return Swipe(tuple(payload["origin"]), tuple(payload["direction"]),
                     payload["magnitude"])
    raise ValueError(f"unknown action kind {kind!r}")


def action_payload(action) -> dict:
    if action.kind in ("mark", "unmark"):
        return {"kind": action.kind, "cell": list(action.cell)}
    return {"kind": "swipe", "origin": list(action.origin),
            "direction": list(action.direction),
            "magnitude": action.magnitude}
