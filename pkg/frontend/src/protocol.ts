// Wire types for the session protocol: newline-delimited JSON, one command
// per line, one or more events per command ending in a terminal event.

export type Command =
  | { cmd: "load"; file?: string; source?: string }
  | { cmd: "getGoals" }
  | { cmd: "applyTactic"; goalId?: number; text: string }
  | { cmd: "undo" }
  | { cmd: "info"; name: string };

export interface HypothesisPayload {
  stableId: number;
  name: string;
  type: string;
}

export interface GoalPayload {
  goalId: number;
  caseTag: string | null;
  pretty: string;
  hypotheses: HypothesisPayload[];
  target: string;
}

export type SessionEvent =
  | { event: "ack"; lemma?: string | null; name?: string; type?: string }
  | { event: "goals"; lemma: string | null; goals: GoalPayload[] }
  | { event: "closed"; goalId: number; caseTag: string | null }
  | { event: "error"; stage: string; message: string };

export function isTerminal(ev: SessionEvent): boolean {
  return ev.event === "ack" || ev.event === "goals" || ev.event === "error";
}

export function parseEvent(line: string): SessionEvent {
  const raw = JSON.parse(line);
  if (typeof raw !== "object" || raw === null || typeof raw.event !== "string") {
    throw new Error(`malformed event: ${line}`);
  }
  return raw as SessionEvent;
}

export function encodeCommand(cmd: Command): string {
  return JSON.stringify(cmd);
}
