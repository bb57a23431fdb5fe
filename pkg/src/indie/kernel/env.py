"""Append-only declaration environment.

Concurrent readers are safe; writers take a lock.  Declarations are immutable
once added, so handing out references never races.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from .decl import Declaration, InductiveDecl, Constructor
from .expr import Expr


class KernelError(Exception):
    """Base class for kernel-level failures."""


class TypeError_(KernelError):
    """An expression failed to typecheck; carries the offending subterm."""

    def __init__(self, msg: str, subterm: Expr | None = None):
        super().__init__(msg)
        self.subterm = subterm


class UnknownDeclaration(KernelError):
    pass


@dataclass
class RecursorInfo:
    """Shape data for a generated recursor, used by iota reduction."""

    inductive: str
    num_params: int
    num_minors: int
    num_indices: int

    @property
    def major_index(self) -> int:
        # params, motive, minors, indices, major
        return self.num_params + 1 + self.num_minors + self.num_indices


@dataclass
class Environment:
    decls: dict[str, Declaration] = field(default_factory=dict)
    inductives: dict[str, InductiveDecl] = field(default_factory=dict)
    constructor_of: dict[str, str] = field(default_factory=dict)  # ctor name -> inductive name
    recursors: dict[str, RecursorInfo] = field(default_factory=dict)
    sizeof_done: set[str] = field(default_factory=set)
    # surface-level name-hint registry (the variable_names mechanism)
    hint_lists: dict[str, tuple[str, ...]] = field(default_factory=dict)
    hint_containers: set[str] = field(default_factory=set)
    # user-written declarations in source order, for serialization
    source_items: list = field(default_factory=list)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def add(self, decl: Declaration) -> None:
        with self._lock:
            if decl.name in self.decls:
                raise KernelError(f"duplicate declaration: {decl.name}")
            self.decls[decl.name] = decl

    def get(self, name: str) -> Declaration:
        try:
            return self.decls[name]
        except KeyError:
            raise UnknownDeclaration(name) from None

    def has(self, name: str) -> bool:
        return name in self.decls

    def inductive(self, name: str) -> InductiveDecl:
        try:
            return self.inductives[name]
        except KeyError:
            raise UnknownDeclaration(name) from None

    def is_constructor(self, name: str) -> bool:
        return name in self.constructor_of

    def constructor_decl(self, name: str) -> Constructor:
        ind = self.inductive(self.constructor_of[name])
        for c in ind.constructors:
            if c.name == name:
                return c
        raise UnknownDeclaration(name)

    def resolve(self, short: str) -> str | None:
        """Resolve a possibly-unqualified name: exact match wins, otherwise a
        unique ``*.short`` suffix match."""
        if short in self.decls:
            return short
        hits = [n for n in self.decls if n.endswith("." + short)]
        if len(hits) == 1:
            return hits[0]
        return None

    def display_name(self, name: str) -> str:
        """Shortest suffix of ``name`` that resolves back to it."""
        if "." in name:
            short = name.rsplit(".", 1)[-1]
            if self.resolve(short) == name:
                return short
        return name
