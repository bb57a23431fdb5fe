"""Declarations, telescopes and inductive type descriptions."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .expr import Expr, Pi, Lambda, instantiate


class Transparency(enum.IntEnum):
    """Unfolding policy for definitional equality.

    Two levels only: ``REDUCIBLE`` unfolds definitions marked reducible,
    ``ALL`` unfolds every definition with a body.  Every defeq call site
    passes one explicitly.
    """

    REDUCIBLE = 0
    ALL = 1


@dataclass(frozen=True)
class Declaration:
    """A named constant: axiom, definition, lemma, constructor or recursor.

    ``body`` is absent for axioms, constructors and recursors.  ``reducible``
    declarations unfold already at ``Transparency.REDUCIBLE``; everything with
    a body unfolds at ``ALL``.
    """

    name: str
    type: Expr
    body: Expr | None = None
    reducible: bool = False


@dataclass(frozen=True)
class TelescopeEntry:
    name: str = field(compare=False)
    type: Expr
    named: bool = field(default=False, compare=False)  # wrote a binder name in the source
    is_recursive: bool = False


Telescope = tuple[TelescopeEntry, ...]


def telescope_pis(tel: Telescope, body: Expr) -> Expr:
    """Wrap ``body`` in Pi binders for the telescope (entry types are already
    expressed with de Bruijn references to earlier entries)."""
    for entry in reversed(tel):
        body = Pi(entry.name, entry.type, body)
    return body


def telescope_lams(tel: Telescope, body: Expr) -> Expr:
    for entry in reversed(tel):
        body = Lambda(entry.name, entry.type, body)
    return body


def instantiate_telescope(tel: Telescope, args: list[Expr]) -> list[Expr]:
    """Types of the telescope entries with the given (locally closed) values
    substituted for all earlier entries.  Entry ``i``'s type sees entry
    ``i-1`` as ``BoundVar(0)``; substituting innermost-first keeps indices
    aligned.  Produces one type per entry up to ``len(args) + 1`` entries."""
    out: list[Expr] = []
    for i in range(len(tel)):
        if i > len(args):
            break
        t = tel[i].type
        for j in reversed(range(i)):
            t = instantiate(t, args[j])
        out.append(t)
    return out


@dataclass(frozen=True)
class Constructor:
    """One constructor of an inductive family.

    ``args`` is a telescope in the context (params ++ earlier args); entries
    flagged ``is_recursive`` have the inductive itself (fully applied) as type.
    ``index_insts`` are the index expressions of the return type, in the
    context (params ++ args).
    """

    name: str
    args: Telescope
    index_insts: tuple[Expr, ...]


@dataclass(frozen=True)
class InductiveDecl:
    """An indexed inductive family: parameters, indices, constructors."""

    name: str
    params: Telescope
    indices: Telescope
    constructors: tuple[Constructor, ...]

    @property
    def num_params(self) -> int:
        return len(self.params)

    @property
    def num_indices(self) -> int:
        return len(self.indices)

    def constructor(self, name: str) -> Constructor:
        for c in self.constructors:
            if c.name == name or c.name.rsplit(".", 1)[-1] == name:
                return c
        raise KeyError(name)
