// Ties a connection to the view model: commands out, events reduced in.
// The client refuses to send while a command is in flight (the input is
// disabled until the terminal event arrives).

import { Connection } from "./connection.js";
import { SessionView, applyEvent, commandSent, initialView } from "./model.js";
import { Command } from "./protocol.js";

export class SessionClient {
  view: SessionView = initialView();
  private subscribers: ((view: SessionView) => void)[] = [];

  constructor(private connection: Connection) {
    connection.onEvent((ev) => {
      this.view = applyEvent(this.view, ev);
      this.notify();
    });
  }

  subscribe(cb: (view: SessionView) => void): void {
    this.subscribers.push(cb);
  }

  private notify(): void {
    for (const cb of this.subscribers) {
      cb(this.view);
    }
  }

  send(cmd: Command): void {
    if (this.view.pending) {
      throw new Error("a command is already in flight");
    }
    this.view = commandSent(this.view, cmd);
    this.notify();
    this.connection.send(cmd);
  }

  loadFile(file: string): void {
    this.send({ cmd: "load", file });
  }

  loadSource(source: string): void {
    this.send({ cmd: "load", source });
  }

  getGoals(): void {
    this.send({ cmd: "getGoals" });
  }

  submitTactic(text: string, goalId?: number): void {
    this.send(
      goalId === undefined
        ? { cmd: "applyTactic", text }
        : { cmd: "applyTactic", goalId, text }
    );
  }

  undo(): void {
    this.send({ cmd: "undo" });
  }
}
