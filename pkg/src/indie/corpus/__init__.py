"""The worked-example corpus: checked source files the acceptance tests run.

``corpus_manifest`` lists every case with its expected case tags and the path
of its frozen golden goal dump.
"""

from __future__ import annotations

import importlib.resources
from dataclasses import dataclass, field
from pathlib import Path


@dataclass(frozen=True)
class CorpusCase:
    name: str
    filename: str
    expected_tags: dict[str, tuple[str, ...]] = field(default_factory=dict)
    # lemma name -> case tags expected to SURVIVE each induction'/cases' step


def corpus_dir() -> Path:
    return Path(importlib.resources.files("indie.corpus"))  # type: ignore[arg-type]


def prelude_path() -> Path:
    return Path(importlib.resources.files("indie")) / "prelude.ind"  # type: ignore[arg-type]


def corpus_manifest() -> list[CorpusCase]:
    return [
        CorpusCase("fin0", "fin0.ind", {"fin_zero_elim_cases": (), "fin_zero_elim_induction": ()}),
        CorpusCase("tc_trans", "tc_trans.ind", {"tc_trans": ("base", "step")}),
        CorpusCase("big_step", "big_step.ind", {"infinite_loop": ("while_true",)}),
        CorpusCase("injectivity", "injectivity.ind", {"add_self_inj": ("zero", "succ")}),
        CorpusCase("commutativity", "commutativity.ind", {"add_comm": ("zero", "succ")}),
        CorpusCase("conflict", "conflict.ind", {"skip_ne_while": ()}),
        CorpusCase("cycle", "cycle.ind", {"succ_cycle_elim": ()}),
    ]


def case_source(case: CorpusCase) -> str:
    return (corpus_dir() / case.filename).read_text(encoding="utf-8")
