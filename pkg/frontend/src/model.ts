// The session view as a pure state machine over the event stream.
//
// The view never mutates proof state locally: every transition is an event
// from the server, so replaying the same events reproduces the same view.

import {
  Command,
  GoalPayload,
  SessionEvent,
  isTerminal,
} from "./protocol.js";

export type Highlight = "new" | "changed" | null;

export interface HypothesisView {
  stableId: number;
  name: string;
  type: string;
  highlight: Highlight;
}

export interface GoalPanel {
  goalId: number;
  caseTag: string | null;
  pretty: string;
  hypotheses: HypothesisView[];
  target: string;
}

export interface SessionView {
  lemma: string | null;
  goals: GoalPanel[];
  /** mirror of the server's undo stack: snapshots to return to */
  undoStack: GoalPanel[][];
  /** case tags of goals the tactics closed, in order */
  breadcrumbs: string[];
  pending: Command | null;
  error: { stage: string; message: string } | null;
  history: string[]; // tactic input history
}

export function initialView(): SessionView {
  return {
    lemma: null,
    goals: [],
    undoStack: [],
    breadcrumbs: [],
    pending: null,
    error: null,
    history: [],
  };
}

function diffGoals(previous: GoalPanel[], incoming: GoalPayload[]): GoalPanel[] {
  const before = new Map<number, string>();
  for (const g of previous) {
    for (const h of g.hypotheses) {
      before.set(h.stableId, h.type);
    }
  }
  return incoming.map((g) => ({
    goalId: g.goalId,
    caseTag: g.caseTag,
    pretty: g.pretty,
    target: g.target,
    hypotheses: g.hypotheses.map((h) => {
      let highlight: Highlight = null;
      if (!before.has(h.stableId)) {
        highlight = "new";
      } else if (before.get(h.stableId) !== h.type) {
        highlight = "changed";
      }
      return { ...h, highlight };
    }),
  }));
}

/** Record that a command was sent; the input stays disabled until the
 * terminal event arrives. */
export function commandSent(view: SessionView, cmd: Command): SessionView {
  const history =
    cmd.cmd === "applyTactic" ? [...view.history, cmd.text] : view.history;
  return { ...view, pending: cmd, error: null, history };
}

export function applyEvent(view: SessionView, ev: SessionEvent): SessionView {
  const pending = isTerminal(ev) ? null : view.pending;
  switch (ev.event) {
    case "ack":
      return {
        ...view,
        pending,
        lemma: ev.lemma !== undefined ? ev.lemma : view.lemma,
      };
    case "closed": {
      const tag = ev.caseTag ?? `goal ${ev.goalId}`;
      return { ...view, pending, breadcrumbs: [...view.breadcrumbs, tag] };
    }
    case "goals": {
      const wasUndo = view.pending?.cmd === "undo";
      const wasTactic = view.pending?.cmd === "applyTactic";
      let undoStack = view.undoStack;
      let goals: GoalPanel[];
      if (wasUndo) {
        // the restored panel comes from the event stream; no highlights
        undoStack = undoStack.slice(0, -1);
        goals = ev.goals.map((g) => ({
          ...g,
          hypotheses: g.hypotheses.map((h) => ({ ...h, highlight: null as Highlight })),
        }));
      } else {
        if (wasTactic) {
          undoStack = [...undoStack, view.goals];
        }
        goals = diffGoals(view.goals, ev.goals);
      }
      return { ...view, pending, lemma: ev.lemma, goals, undoStack };
    }
    case "error":
      return {
        ...view,
        pending,
        error: { stage: ev.stage, message: ev.message },
      };
  }
}

export function replay(events: { command?: Command; events: SessionEvent[] }[]): SessionView {
  let view = initialView();
  for (const step of events) {
    if (step.command) {
      view = commandSent(view, step.command);
    }
    for (const ev of step.events) {
      view = applyEvent(view, ev);
    }
  }
  return view;
}
