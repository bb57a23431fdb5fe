"""Weak head normalisation and definitional equality.

Reduction is beta + iota (recursor applied to a constructor) + delta
restricted by the transparency argument.  Every defeq entry point takes an
explicit ``Transparency``; there is no hidden default.
"""

from __future__ import annotations

from typing import Callable, Optional

from .decl import Transparency, instantiate_telescope
from .env import Environment
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
    FreeVar as FV,
    instantiate,
    mk_app,
    unfold_app,
)
from .fresh import scratch_id

# Optional observer invoked with the transparency of every top-level defeq
# call (the CLI's --transparency-log hooks in here).
DEFEQ_OBSERVER: Optional[Callable[[Transparency], None]] = None


def _unfoldable(env: Environment, name: str, t: Transparency) -> Expr | None:
    decl = env.decls.get(name)
    if decl is None or decl.body is None:
        return None
    if t >= Transparency.ALL or decl.reducible:
        return decl.body
    return None


def _iota(env: Environment, rec_name: str, args: list[Expr], t: Transparency) -> Expr | None:
    """Reduce ``T.rec params motive minors indices major`` when the major
    premise is a fully applied constructor application."""
    info = env.recursors.get(rec_name)
    if info is None or len(args) < info.major_index + 1:
        return None
    major = whnf(env, args[info.major_index], t)
    head, cargs = unfold_app(major)
    if not isinstance(head, Const) or env.constructor_of.get(head.name) != info.inductive:
        return None
    ind = env.inductive(info.inductive)
    ctor = env.constructor_decl(head.name)
    if len(cargs) != ind.num_params + len(ctor.args):
        return None
    ctor_args = cargs[ind.num_params :]
    rec_prefix = args[: info.num_params + 1 + info.num_minors]  # params, motive, minors
    minor = args[info.num_params + 1 + list(c.name for c in ind.constructors).index(head.name)]
    result = minor
    # constructor arg types live under (params ++ earlier args)
    arg_types = instantiate_telescope(ind.params + ctor.args, cargs)[ind.num_params :]
    for i, entry in enumerate(ctor.args):
        result = App(result, ctor_args[i])
        if entry.is_recursive:
            _, targs = unfold_app(arg_types[i])
            rec_indices = targs[ind.num_params :]
            rec_call = mk_app(Const(rec_name), *rec_prefix, *rec_indices, ctor_args[i])
            result = App(result, rec_call)
    rest = args[info.major_index + 1 :]
    return mk_app(result, *rest)


def whnf(env: Environment, e: Expr, t: Transparency) -> Expr:
    """Weak head normal form under beta/iota/delta(t)."""
    while True:
        head, args = unfold_app(e)
        if isinstance(head, Lambda) and args:
            body = instantiate(head.body, args[0])
            e = mk_app(body, *args[1:])
            continue
        if isinstance(head, Const):
            reduced = _iota(env, head.name, args, t)
            if reduced is not None:
                e = reduced
                continue
            body = _unfoldable(env, head.name, t)
            if body is not None:
                e = mk_app(body, *args)
                continue
        return e


def is_def_eq(env: Environment, a: Expr, b: Expr, t: Transparency) -> bool:
    """Interconvertibility under beta/iota/delta(t) and alpha."""
    if DEFEQ_OBSERVER is not None:
        DEFEQ_OBSERVER(t)
    return _def_eq(env, a, b, t)


def _def_eq(env: Environment, a: Expr, b: Expr, t: Transparency) -> bool:
    if a == b:
        return True
    a = whnf(env, a, t)
    b = whnf(env, b, t)
    if a == b:
        return True
    if isinstance(a, Sort) and isinstance(b, Sort):
        return True
    if isinstance(a, Pi) and isinstance(b, Pi) or isinstance(a, Lambda) and isinstance(b, Lambda):
        if not _def_eq(env, a.binder_type, b.binder_type, t):
            return False
        fv = FV(scratch_id())
        return _def_eq(env, instantiate(a.body, fv), instantiate(b.body, fv), t)
    ha, aa = unfold_app(a)
    hb, ab = unfold_app(b)
    if len(aa) != len(ab):
        return False
    if not _head_eq(ha, hb):
        return False
    return all(_def_eq(env, x, y, t) for x, y in zip(aa, ab))


def _head_eq(ha: Expr, hb: Expr) -> bool:
    match ha, hb:
        case Const(name=n1), Const(name=n2):
            return n1 == n2
        case FreeVar(id=i1), FreeVar(id=i2):
            return i1 == i2
        case Meta(id=i1), Meta(id=i2):
            return i1 == i2
        case BoundVar(index=i1), BoundVar(index=i2):
            return i1 == i2
        case Sort(), Sort():
            return True
        case _:
            return False
