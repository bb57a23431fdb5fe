"""Type inference for kernel expressions.

``infer_type`` is checking as it goes: applications verify the argument
against the Pi domain (at ``Transparency.ALL``), binder types are checked to
be sorts.  The single universe gives ``Sort : Sort``.
"""

from __future__ import annotations

from .decl import Transparency
from .env import Environment, TypeError_
from .expr import (
    App,
    BoundVar,
    Const,
    Expr,
    FreeVar,
    Lambda,
    Meta,
    Pi,
    Sort,
    SORT,
    abstract_fvar,
    instantiate,
)
from .fresh import scratch_id
from .reduce import is_def_eq, whnf


LocalTypes = dict[int, Expr]


def infer_type(env: Environment, ctx: LocalTypes, e: Expr) -> Expr:
    match e:
        case Sort():
            return SORT
        case Const(name=n):
            return env.get(n).type
        case FreeVar(id=i):
            if i not in ctx:
                raise TypeError_(f"unresolvable free variable {i}", e)
            return ctx[i]
        case Meta():
            raise TypeError_("metavariable in kernel term", e)
        case BoundVar():
            raise TypeError_("loose bound variable (expression not locally closed)", e)
        case App(fn=f, arg=a):
            fn_type = whnf(env, infer_type(env, ctx, f), Transparency.ALL)
            if not isinstance(fn_type, Pi):
                raise TypeError_("application head is not a function", e)
            arg_type = infer_type(env, ctx, a)
            if not is_def_eq(env, arg_type, fn_type.binder_type, Transparency.ALL):
                raise TypeError_("argument type mismatch", e)
            return instantiate(fn_type.body, a)
        case Lambda(hint=h, binder_type=t, body=b):
            _check_is_sort(env, ctx, t, e)
            fv = scratch_id()
            body_ty = infer_type(env, {**ctx, fv: t}, instantiate(b, FreeVar(fv)))
            return Pi(h, t, abstract_fvar(body_ty, fv))
        case Pi(binder_type=t, body=b):
            _check_is_sort(env, ctx, t, e)
            fv = scratch_id()
            _check_is_sort(env, {**ctx, fv: t}, instantiate(b, FreeVar(fv)), e)
            return SORT
        case _:
            raise TypeError_(f"unknown expression {e!r}", e)


def _check_is_sort(env: Environment, ctx: LocalTypes, t: Expr, parent: Expr) -> None:
    ty = infer_type(env, ctx, t)
    if not is_def_eq(env, ty, SORT, Transparency.ALL):
        raise TypeError_("binder type is not a sort", parent)


def check_type(env: Environment, ctx: LocalTypes, e: Expr, expected: Expr) -> None:
    actual = infer_type(env, ctx, e)
    if not is_def_eq(env, actual, expected, Transparency.ALL):
        raise TypeError_("type mismatch", e)


def check_declaration(env: Environment, name: str, type_: Expr, body: Expr | None) -> None:
    """Kernel gate for new declarations: the type is a sort-typed expression
    and the body (if any) has that type."""
    ty_of_ty = infer_type(env, {}, type_)
    if not is_def_eq(env, ty_of_ty, SORT, Transparency.ALL):
        raise TypeError_(f"declaration {name}: type is not a sort", type_)
    if body is not None:
        check_type(env, {}, body, type_)
