// Browser entry point: keyboard-first single-page app over the bridge
// (POST /cmd sends a command line, /events streams the NDJSON back).

import { LineConnection } from "./connection.js";
import { SessionClient } from "./client.js";
import { render } from "./render.js";

function main(): void {
  const goalsEl = document.getElementById("goals")!;
  const inputEl = document.getElementById("tactic") as HTMLInputElement;
  const fileEl = document.getElementById("file") as HTMLInputElement;

  const connection = new LineConnection((line) => {
    void fetch("/cmd", { method: "POST", body: line });
  });
  const events = new EventSource("/events");
  events.onmessage = (msg) => connection.feed(msg.data + "\n");

  const client = new SessionClient(connection);
  let historyCursor = -1;

  client.subscribe((view) => {
    goalsEl.innerHTML = render(view);
    inputEl.disabled = view.pending !== null;
    if (!inputEl.disabled) {
      inputEl.focus();
    }
  });

  inputEl.addEventListener("keydown", (ev) => {
    const history = client.view.history;
    if (ev.key === "Enter" && inputEl.value.trim()) {
      const text = inputEl.value.trim();
      inputEl.value = "";
      historyCursor = -1;
      if (text === "undo") {
        client.undo();
      } else {
        client.submitTactic(text);
      }
    } else if (ev.key === "ArrowUp" && history.length) {
      historyCursor = historyCursor < 0 ? history.length - 1 : Math.max(0, historyCursor - 1);
      inputEl.value = history[historyCursor];
      ev.preventDefault();
    } else if (ev.key === "ArrowDown" && historyCursor >= 0) {
      historyCursor = Math.min(history.length - 1, historyCursor + 1);
      inputEl.value = history[historyCursor];
      ev.preventDefault();
    } else if (ev.key === "Escape") {
      inputEl.value = "";
      historyCursor = -1;
    }
  });

  fileEl.addEventListener("keydown", (ev) => {
    if (ev.key === "Enter" && fileEl.value.trim()) {
      client.loadFile(fileEl.value.trim());
      inputEl.focus();
    }
  });
}

main();
