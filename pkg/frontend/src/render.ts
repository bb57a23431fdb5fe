// Pure HTML rendering of the session view (string-level, so tests need no
// browser).  The app layer swaps the output into the page wholesale.

import { GoalPanel, SessionView } from "./model.js";

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderGoal(goal: GoalPanel): string {
  const rows = goal.hypotheses
    .map((h) => {
      const cls = h.highlight ? ` class="hyp hyp-${h.highlight}"` : ' class="hyp"';
      return `<div${cls} data-stable-id="${h.stableId}"><span class="hyp-name">${esc(
        h.name
      )}</span> : <span class="hyp-type">${esc(h.type)}</span></div>`;
    })
    .join("");
  const tag = goal.caseTag
    ? `<header class="case-tag">case ${esc(goal.caseTag)}</header>`
    : "";
  return (
    `<section class="goal" data-goal-id="${goal.goalId}">${tag}${rows}` +
    `<div class="target">⊢ <span class="target-type">${esc(goal.target)}</span></div></section>`
  );
}

export function renderGoals(view: SessionView): string {
  if (!view.goals.length) {
    return view.lemma ? `<p class="no-goals">no goals 🎉</p>` : `<p class="no-goals">no active proof</p>`;
  }
  return view.goals.map(renderGoal).join("\n");
}

export function renderBreadcrumbs(view: SessionView): string {
  if (!view.breadcrumbs.length) {
    return "";
  }
  const items = view.breadcrumbs.map((b) => `<li>${esc(b)}</li>`).join("");
  return `<ul class="breadcrumbs">${items}</ul>`;
}

export function renderError(view: SessionView): string {
  if (!view.error) {
    return "";
  }
  return `<div class="error" role="alert">${esc(view.error.stage)}: ${esc(
    view.error.message
  )}</div>`;
}

export function renderStatus(view: SessionView): string {
  const lemma = view.lemma ? `proving <b>${esc(view.lemma)}</b>` : "no lemma loaded";
  const depth = ` · undo depth ${view.undoStack.length}`;
  const busy = view.pending ? " · waiting…" : "";
  return `<div class="status">${lemma}${depth}${busy}</div>`;
}

export function render(view: SessionView): string {
  return [
    renderStatus(view),
    renderBreadcrumbs(view),
    renderGoals(view),
    renderError(view),
  ]
    .filter(Boolean)
    .join("\n");
}
