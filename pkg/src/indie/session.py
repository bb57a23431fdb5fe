"""Line-delimited JSON session protocol for interactive clients.

One command per input line; each command produces one or more events ending
in a terminal event (``ack``, ``goals``, ``closed`` never terminates a
command on its own, ``error`` does).  State history is retained, so ``undo``
restores the previous tactic state exactly.  Replaying a command sequence is
deterministic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO

from .kernel.env import KernelError
from .loader import Library, standard_library
from .parser import ConvError, ParseError, parse_file, parse_tactic_text, SLemma
from .printer import Printer, goal_scope, pretty_goal
from .proofstate import Goal, TacticError, TacticState


@dataclass
class Session:
    lib: Library = field(default_factory=standard_library)
    lemma: str | None = None
    history: list[TacticState] = field(default_factory=list)

    # -- queries ---------------------------------------------------------------

    @property
    def state(self) -> TacticState | None:
        return self.history[-1] if self.history else None

    def goal_payload(self, goal: Goal) -> dict:
        pr = Printer(self.lib.env, annotate=False)
        scope = goal_scope(goal)
        return {
            "goalId": goal.meta,
            "caseTag": goal.case_tag,
            "pretty": pretty_goal(self.lib.env, goal),
            "hypotheses": [
                {"stableId": h.id, "name": scope[h.id], "type": pr.expr(h.type, scope)}
                for h in goal.hyps
            ],
            "target": pr.expr(goal.target, scope),
        }

    def goals_event(self) -> dict:
        state = self.state
        goals = [self.goal_payload(g) for g in state.goals] if state else []
        return {"event": "goals", "lemma": self.lemma, "goals": goals}

    # -- commands ---------------------------------------------------------------

    def handle(self, command: dict) -> list[dict]:
        cmd = command.get("cmd")
        try:
            if cmd == "load":
                return self._load(command)
            if cmd == "getGoals":
                return [self.goals_event()]
            if cmd == "applyTactic":
                return self._apply(command)
            if cmd == "undo":
                if len(self.history) <= 1:
                    return [{"event": "error", "stage": "undo", "message": "nothing to undo"}]
                self.history.pop()
                return [self.goals_event()]
            if cmd == "info":
                name = command.get("name", "")
                resolved = self.lib.env.resolve(name)
                if resolved is None:
                    return [{"event": "error", "stage": "info", "message": f"unknown {name!r}"}]
                decl = self.lib.env.get(resolved)
                pr = Printer(self.lib.env, annotate=False)
                return [
                    {"event": "ack", "name": resolved, "type": pr.expr(decl.type)}
                ]
            return [{"event": "error", "stage": "command", "message": f"unknown command {cmd!r}"}]
        except (TacticError, KernelError, ParseError, ConvError, OSError) as exc:
            return [{"event": "error", "stage": str(cmd), "message": str(exc)}]

    def _load(self, command: dict) -> list[dict]:
        if "source" in command:
            text = command["source"]
        else:
            with open(command["file"], "r", encoding="utf-8") as fh:
                text = fh.read()
        sf = parse_file(text)
        self.lib = standard_library()
        self.lemma = None
        self.history = []
        for item in sf.items:
            if not isinstance(item, SLemma):
                self.lib.load_file(type(sf)((item,)))
                continue
            # run the lemma's script; the first one that does not finish
            # becomes the session's active proof
            state = self.lib.start_lemma(item.type)
            stopped = False
            for tac in item.tactics or ():
                if tac.name == "sorry":
                    stopped = True
                    break
                state = self.lib.run_tactic(state, tac)
            if item.term is None and (stopped or state.goals):
                self.lemma = item.name
                self.history = [state]
                break
            result = self.lib.run_lemma(item)
            if result.status != "proved":
                return [
                    {"event": "error", "stage": "load", "message": f"{item.name}: {result.message}"}
                ]
        return [{"event": "ack", "lemma": self.lemma}]

    def _apply(self, command: dict) -> list[dict]:
        state = self.state
        if state is None:
            return [{"event": "error", "stage": "applyTactic", "message": "no active proof"}]
        goal_id = command.get("goalId")
        if goal_id is not None and goal_id not in [g.meta for g in state.goals]:
            return [
                {"event": "error", "stage": "applyTactic", "message": f"no goal {goal_id}"}
            ]
        tac = parse_tactic_text(command["text"])
        if tac.name == "sorry":
            return [{"event": "error", "stage": "applyTactic", "message": "sorry is not allowed here"}]
        new_state = self.lib.run_tactic(state, tac, goal_id)
        self.history.append(new_state)
        events: list[dict] = []
        # closed events only for net closures (a tactic replacing one goal by
        # its case goals closes nothing)
        if len(new_state.goals) < len(state.goals):
            new_ids = {g.meta for g in new_state.goals}
            for g in state.goals:
                if g.meta not in new_ids:
                    events.append({"event": "closed", "goalId": g.meta, "caseTag": g.case_tag})
        events.append(self.goals_event())
        return events


def serve_session(inp: IO[str], out: IO[str]) -> None:
    """Run the protocol until EOF: one JSON command per line in, one or more
    JSON events per command out, the last one terminal."""
    session = Session()
    for line in inp:
        line = line.strip()
        if not line:
            continue
        try:
            command = json.loads(line)
        except json.JSONDecodeError as exc:
            events = [{"event": "error", "stage": "parse", "message": str(exc)}]
        else:
            events = session.handle(command)
        for ev in events:
            out.write(json.dumps(ev, ensure_ascii=False) + "\n")
        out.flush()
