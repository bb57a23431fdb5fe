"""Byte-stable text rendering of batch-check reports (the golden-test
surface for the CLI)."""

from __future__ import annotations

from .loader import Report


def format_report(report: Report, golden: bool = False) -> str:
    lines: list[str] = []
    for r in report.results:
        lines.append(f"== lemma {r.name}")
        if golden:
            for dump in r.dumps:
                lines.append(f"-- after {dump.tactic}")
                if not dump.goals:
                    lines.append("no goals")
                    lines.append("")
                for tag, pretty in dump.goals:
                    if tag:
                        lines.append(f"case {tag}:")
                    lines.append(pretty)
                    lines.append("")
        status = f"== status {r.name}: {r.status}"
        if r.message:
            status += f" ({r.message})"
        lines.append(status)
        lines.append("")
    return "\n".join(lines)
