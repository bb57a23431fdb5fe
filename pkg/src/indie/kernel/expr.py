"""Locally nameless expressions of the object theory.

Bound variables are de Bruijn indices; opened binders become FreeVars that
point at hypotheses by stable id.  Expressions are immutable values, so they
can be shared freely (including across threads).  Binder display hints do not
participate in equality: structural equality is alpha-equivalence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator


class Expr:
    """Base class for expressions. Use the variant dataclasses below."""

    __slots__ = ()


@dataclass(frozen=True)
class Sort(Expr):
    """The single universe (Sort : Sort by design)."""

    def __repr__(self):
        return "Sort"


@dataclass(frozen=True)
class Const(Expr):
    """Reference to a declaration in the environment, e.g. ``nat.succ``."""

    name: str

    def __repr__(self):
        return f"Const({self.name})"


@dataclass(frozen=True)
class BoundVar(Expr):
    """De Bruijn index relative to the enclosing binders."""

    index: int

    def __repr__(self):
        return f"#{self.index}"


@dataclass(frozen=True)
class FreeVar(Expr):
    """Reference to a hypothesis by its stable id."""

    id: int

    def __repr__(self):
        return f"fv{self.id}"


@dataclass(frozen=True)
class Meta(Expr):
    """Metavariable, standing for an open goal or a unification unknown."""

    id: int

    def __repr__(self):
        return f"?m{self.id}"


@dataclass(frozen=True)
class App(Expr):
    fn: Expr
    arg: Expr

    def __repr__(self):
        return f"({self.fn!r} {self.arg!r})"


@dataclass(frozen=True)
class Lambda(Expr):
    hint: str = field(compare=False)
    binder_type: Expr
    body: Expr

    def __repr__(self):
        return f"(λ{self.hint}:{self.binder_type!r}. {self.body!r})"


@dataclass(frozen=True)
class Pi(Expr):
    hint: str = field(compare=False)
    binder_type: Expr
    body: Expr

    def __repr__(self):
        return f"(Π{self.hint}:{self.binder_type!r}. {self.body!r})"


SORT = Sort()


def mk_app(fn: Expr, *args: Expr) -> Expr:
    for a in args:
        fn = App(fn, a)
    return fn


def unfold_app(e: Expr) -> tuple[Expr, list[Expr]]:
    """Split ``f a1 ... an`` into ``(f, [a1, ..., an])``."""
    args: list[Expr] = []
    while isinstance(e, App):
        args.append(e.arg)
        e = e.fn
    args.reverse()
    return e, args


def beta_head(e: Expr) -> Expr:
    """Contract top-level beta redexes only (no delta or iota): the shape a
    motive application has after a recursor is applied."""
    while True:
        head, args = unfold_app(e)
        if isinstance(head, Lambda) and args:
            e = mk_app(instantiate(head.body, args[0]), *args[1:])
            continue
        return e


def lift(e: Expr, amount: int, cutoff: int = 0) -> Expr:
    """Shift loose bound variables >= cutoff by amount."""
    if amount == 0:
        return e
    match e:
        case BoundVar(index=i):
            return BoundVar(i + amount) if i >= cutoff else e
        case App(fn=f, arg=a):
            return App(lift(f, amount, cutoff), lift(a, amount, cutoff))
        case Lambda(hint=h, binder_type=t, body=b):
            return Lambda(h, lift(t, amount, cutoff), lift(b, amount, cutoff + 1))
        case Pi(hint=h, binder_type=t, body=b):
            return Pi(h, lift(t, amount, cutoff), lift(b, amount, cutoff + 1))
        case _:
            return e


def instantiate(body: Expr, value: Expr, depth: int = 0) -> Expr:
    """Substitute the binder opened at ``depth`` with ``value``.

    Standard locally nameless opening: ``Pi(h, t, b)`` applied to ``v`` is
    ``instantiate(b, v)``.
    """
    match body:
        case BoundVar(index=i):
            if i == depth:
                return lift(value, depth)
            if i > depth:
                return BoundVar(i - 1)
            return body
        case App(fn=f, arg=a):
            return App(instantiate(f, value, depth), instantiate(a, value, depth))
        case Lambda(hint=h, binder_type=t, body=b):
            return Lambda(h, instantiate(t, value, depth), instantiate(b, value, depth + 1))
        case Pi(hint=h, binder_type=t, body=b):
            return Pi(h, instantiate(t, value, depth), instantiate(b, value, depth + 1))
        case _:
            return body


def instantiate_all(e: Expr, values: list[Expr]) -> Expr:
    """Open an expression whose loose binders cover a whole telescope:
    ``BoundVar(0)`` is the last entry, so substitution runs innermost-first."""
    for v in reversed(values):
        e = instantiate(e, v)
    return e


def abstract_fvar(e: Expr, fvar_id: int, depth: int = 0) -> Expr:
    """Turn occurrences of a free variable into the bound variable ``depth``.

    The inverse of opening: abstracting a locally closed expression yields a
    body suitable for wrapping in one new binder.
    """
    match e:
        case FreeVar(id=i) if i == fvar_id:
            return BoundVar(depth)
        case BoundVar(index=i):
            return BoundVar(i + 1) if i >= depth else e
        case App(fn=f, arg=a):
            return App(abstract_fvar(f, fvar_id, depth), abstract_fvar(a, fvar_id, depth))
        case Lambda(hint=h, binder_type=t, body=b):
            return Lambda(h, abstract_fvar(t, fvar_id, depth), abstract_fvar(b, fvar_id, depth + 1))
        case Pi(hint=h, binder_type=t, body=b):
            return Pi(h, abstract_fvar(t, fvar_id, depth), abstract_fvar(b, fvar_id, depth + 1))
        case _:
            return e


def subst_fvar(e: Expr, fvar_id: int, value: Expr) -> Expr:
    """Replace a free variable with a locally closed value."""
    match e:
        case FreeVar(id=i) if i == fvar_id:
            return value
        case App(fn=f, arg=a):
            return App(subst_fvar(f, fvar_id, value), subst_fvar(a, fvar_id, value))
        case Lambda(hint=h, binder_type=t, body=b):
            return Lambda(h, subst_fvar(t, fvar_id, value), subst_fvar(b, fvar_id, value))
        case Pi(hint=h, binder_type=t, body=b):
            return Pi(h, subst_fvar(t, fvar_id, value), subst_fvar(b, fvar_id, value))
        case _:
            return e


def subst_fvars(e: Expr, mapping: dict[int, Expr]) -> Expr:
    if not mapping:
        return e
    match e:
        case FreeVar(id=i) if i in mapping:
            return mapping[i]
        case App(fn=f, arg=a):
            return App(subst_fvars(f, mapping), subst_fvars(a, mapping))
        case Lambda(hint=h, binder_type=t, body=b):
            return Lambda(h, subst_fvars(t, mapping), subst_fvars(b, mapping))
        case Pi(hint=h, binder_type=t, body=b):
            return Pi(h, subst_fvars(t, mapping), subst_fvars(b, mapping))
        case _:
            return e


def subst_metas(e: Expr, mapping: dict[int, "Expr"]) -> Expr:
    """One-pass metavariable substitution (no chain resolution; values are
    locally closed, so no capture)."""
    if not mapping:
        return e
    match e:
        case Meta(id=i) if i in mapping:
            return mapping[i]
        case App(fn=f, arg=a):
            return App(subst_metas(f, mapping), subst_metas(a, mapping))
        case Lambda(hint=h, binder_type=t, body=b):
            return Lambda(h, subst_metas(t, mapping), subst_metas(b, mapping))
        case Pi(hint=h, binder_type=t, body=b):
            return Pi(h, subst_metas(t, mapping), subst_metas(b, mapping))
        case _:
            return e


def replace_subterm(e: Expr, old: Expr, new: Expr) -> Expr:
    """Replace every occurrence of a locally closed subterm.

    Only matches at positions with no enclosing loose binders capturing parts
    of ``old`` (we compare structurally, and ``old`` is locally closed, so a
    structural match under binders is still a genuine occurrence).
    """
    if e == old:
        return new
    match e:
        case App(fn=f, arg=a):
            return App(replace_subterm(f, old, new), replace_subterm(a, old, new))
        case Lambda(hint=h, binder_type=t, body=b):
            return Lambda(h, replace_subterm(t, old, new), replace_subterm(b, old, new))
        case Pi(hint=h, binder_type=t, body=b):
            return Pi(h, replace_subterm(t, old, new), replace_subterm(b, old, new))
        case _:
            return e


def iter_subterms(e: Expr) -> Iterator[Expr]:
    yield e
    match e:
        case App(fn=f, arg=a):
            yield from iter_subterms(f)
            yield from iter_subterms(a)
        case Lambda(binder_type=t, body=b) | Pi(binder_type=t, body=b):
            yield from iter_subterms(t)
            yield from iter_subterms(b)


def fvars(e: Expr) -> set[int]:
    out: set[int] = set()
    for sub in iter_subterms(e):
        if isinstance(sub, FreeVar):
            out.add(sub.id)
    return out


def has_fvar(e: Expr, fvar_id: int) -> bool:
    return any(isinstance(s, FreeVar) and s.id == fvar_id for s in iter_subterms(e))


def metas(e: Expr) -> set[int]:
    out: set[int] = set()
    for sub in iter_subterms(e):
        if isinstance(sub, Meta):
            out.add(sub.id)
    return out


def has_meta(e: Expr) -> bool:
    return any(isinstance(s, Meta) for s in iter_subterms(e))


def locally_closed(e: Expr, depth: int = 0) -> bool:
    """True iff every bound variable points at an enclosing binder."""
    match e:
        case BoundVar(index=i):
            return i < depth
        case App(fn=f, arg=a):
            return locally_closed(f, depth) and locally_closed(a, depth)
        case Lambda(binder_type=t, body=b) | Pi(binder_type=t, body=b):
            return locally_closed(t, depth) and locally_closed(b, depth + 1)
        case _:
            return True
