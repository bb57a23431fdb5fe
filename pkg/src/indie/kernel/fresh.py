"""Scratch free-variable ids for kernel-internal binder opening.

Goal hypotheses use non-negative stable ids allocated by the proof state;
kernel internals (defeq, typechecking, validation) open binders with negative
ids so the two spaces never collide.
"""

from __future__ import annotations

import threading

_counter = -1
_lock = threading.Lock()


def scratch_id() -> int:
    global _counter
    with _lock:
        v = _counter
        _counter -= 1
    return v
