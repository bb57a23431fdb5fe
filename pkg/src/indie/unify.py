"""First-order unification with metavariables over kernel expressions.

Orientation is fixed by the caller: metas occur only in the right-hand
expression.  Heads are compared after weak-head normalisation at the
caller-supplied transparency.  Outcomes distinguish a definite clash of
distinct constructors (``FAILURE``) from "no unique solution": rigid heads
that merely differ (a variable against a constructor application may still be
propositionally equal) or metas left unconstrained.

``NO_UNIQUE_SOLUTION`` still carries the partial assignment found: induction
hypothesis simplification instantiates what it can and keeps the rest.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .kernel.decl import Transparency
from .kernel.env import Environment
from .kernel.expr import (
    App,
    Expr,
    Const,
    FreeVar,
    Lambda,
    Meta,
    Pi,
    fvars,
    instantiate,
    unfold_app,
)
from .kernel.fresh import scratch_id
from .kernel.reduce import whnf


class UnifyResult(enum.Enum):
    SOLVED = "solved"
    NO_UNIQUE_SOLUTION = "no_unique_solution"
    FAILURE = "failure"


@dataclass(frozen=True)
class UnifyOutcome:
    kind: UnifyResult
    assignment: dict[int, Expr] = field(default_factory=dict)
    # a rigid-rigid mismatch was seen (as opposed to metas merely being left
    # unconstrained); both classify as NO_UNIQUE_SOLUTION
    mismatched: bool = False

    @property
    def solved(self) -> bool:
        return self.kind is UnifyResult.SOLVED


class _Clash(Exception):
    """Definite constructor clash somewhere in the problem."""


def unify(
    env: Environment,
    a: Expr,
    b: Expr,
    metas: set[int],
    t: Transparency,
) -> UnifyOutcome:
    """Structural first-order descent of ``a`` against ``b`` (metas in ``b``
    only).  See the module docstring for the outcome classification."""
    state = _Unifier(env, metas, t)
    try:
        state.go(a, b, frozenset())
    except _Clash:
        return UnifyOutcome(UnifyResult.FAILURE, {}, mismatched=True)
    if state.not_unique or any(m not in state.assignment for m in metas):
        return UnifyOutcome(
            UnifyResult.NO_UNIQUE_SOLUTION, dict(state.assignment), state.not_unique
        )
    return UnifyOutcome(UnifyResult.SOLVED, dict(state.assignment))


class _Unifier:
    def __init__(self, env: Environment, metas: set[int], t: Transparency):
        self.env = env
        self.metas = metas
        self.t = t
        self.assignment: dict[int, Expr] = {}
        self.not_unique = False

    def _is_ctor_headed(self, e: Expr) -> bool:
        head, _ = unfold_app(e)
        return isinstance(head, Const) and self.env.is_constructor(head.name)

    def go(self, a: Expr, b: Expr, locals_: frozenset[int]) -> None:
        a = whnf(self.env, a, self.t)
        b = self._resolve(b)
        if isinstance(b, Meta) and b.id in self.metas:
            if fvars(a) & locals_:
                self.not_unique = True  # solution would escape a local binder
                return
            self.assignment[b.id] = a
            return
        b = whnf(self.env, b, self.t)
        if a == b:
            return
        if isinstance(a, Pi) and isinstance(b, Pi) or isinstance(a, Lambda) and isinstance(b, Lambda):
            self.go(a.binder_type, b.binder_type, locals_)
            fv = scratch_id()
            self.go(
                instantiate(a.body, FreeVar(fv)),
                instantiate(b.body, FreeVar(fv)),
                locals_ | {fv},
            )
            return
        ha, aa = unfold_app(a)
        hb, ab = unfold_app(b)
        if isinstance(hb, Meta) and hb.id in self.metas and ab:
            self.not_unique = True  # higher-order pattern; out of scope
            return
        if self._heads_match(ha, hb) and len(aa) == len(ab):
            for x, y in zip(aa, ab):
                self.go(x, y, locals_)
            return
        if self._is_ctor_headed(a) and self._is_ctor_headed(b):
            raise _Clash
        self.not_unique = True

    def _resolve(self, b: Expr) -> Expr:
        while isinstance(b, Meta) and b.id in self.assignment:
            b = self.assignment[b.id]
        return b

    def _heads_match(self, ha: Expr, hb: Expr) -> bool:
        hb = self._resolve(hb)
        match ha, hb:
            case Const(name=n1), Const(name=n2):
                return n1 == n2
            case FreeVar(id=i1), FreeVar(id=i2):
                return i1 == i2
            case Meta(id=i1), Meta(id=i2):
                return i1 == i2
            case _:
                return type(ha) is type(hb) and ha == hb


def instantiate_metas(e: Expr, assignment: dict[int, Expr]) -> Expr:
    """Substitute assigned metas, resolving chains fully.  Assignment values
    are locally closed, so substitution cannot capture."""
    if not assignment:
        return e

    cache: dict[int, Expr] = {}

    def resolve(mid: int, seen: frozenset[int]) -> Expr:
        if mid in cache:
            return cache[mid]
        if mid in seen:
            raise ValueError(f"cyclic metavariable assignment through ?m{mid}")
        value = walk(assignment[mid], seen | {mid})
        cache[mid] = value
        return value

    def walk(x: Expr, seen: frozenset[int]) -> Expr:
        match x:
            case Meta(id=i) if i in assignment:
                return resolve(i, seen)
            case App(fn=f, arg=a):
                return App(walk(f, seen), walk(a, seen))
            case Lambda(hint=h, binder_type=ty, body=b):
                return Lambda(h, walk(ty, seen), walk(b, seen))
            case Pi(hint=h, binder_type=ty, body=b):
                return Pi(h, walk(ty, seen), walk(b, seen))
            case _:
                return x

    return walk(e, frozenset())
