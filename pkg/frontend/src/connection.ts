// Connections carry commands to a serveSession process and deliver its
// events back.  The client code only sees this interface; tests inject a
// scripted connection that replays a recorded transcript.

import { Command, SessionEvent, encodeCommand, parseEvent } from "./protocol.js";

export interface Connection {
  send(cmd: Command): void;
  onEvent(cb: (ev: SessionEvent) => void): void;
}

/** Replays a pre-recorded transcript: each send must match the next recorded
 * command, and its recorded events are delivered synchronously. */
export class ScriptedConnection implements Connection {
  private steps: { command: Command; events: SessionEvent[] }[];
  private cursor = 0;
  private listener: ((ev: SessionEvent) => void) | null = null;

  constructor(steps: { command: Command; events: SessionEvent[] }[]) {
    this.steps = steps;
  }

  onEvent(cb: (ev: SessionEvent) => void): void {
    this.listener = cb;
  }

  send(cmd: Command): void {
    const step = this.steps[this.cursor];
    if (!step) {
      throw new Error(`scripted connection exhausted at ${encodeCommand(cmd)}`);
    }
    if (JSON.stringify(step.command) !== JSON.stringify(cmd)) {
      throw new Error(
        `command mismatch:\n  expected ${JSON.stringify(step.command)}\n  got      ${JSON.stringify(cmd)}`
      );
    }
    this.cursor += 1;
    for (const ev of step.events) {
      this.listener?.(ev);
    }
  }

  get exhausted(): boolean {
    return this.cursor === this.steps.length;
  }
}

/** Newline-delimited JSON over arbitrary text transports (the node bridge
 * feeds child-process stdout in here; a future websocket would too). */
export class LineConnection implements Connection {
  private listener: ((ev: SessionEvent) => void) | null = null;
  private buffer = "";

  constructor(private writeLine: (line: string) => void) {}

  onEvent(cb: (ev: SessionEvent) => void): void {
    this.listener = cb;
  }

  send(cmd: Command): void {
    this.writeLine(encodeCommand(cmd));
  }

  /** Feed raw transport chunks; emits one event per complete line. */
  feed(chunk: string): void {
    this.buffer += chunk;
    for (;;) {
      const nl = this.buffer.indexOf("\n");
      if (nl < 0) {
        return;
      }
      const line = this.buffer.slice(0, nl).trim();
      this.buffer = this.buffer.slice(nl + 1);
      if (line) {
        this.listener?.(parseEvent(line));
      }
    }
  }
}
