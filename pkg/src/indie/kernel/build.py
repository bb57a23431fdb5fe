"""Helpers for building locally closed expressions via temporary free
variables: open binders with scratch fvars, construct, then abstract."""

from __future__ import annotations

from .decl import Telescope
from .expr import Expr, FreeVar, Lambda, Pi, abstract_fvar, instantiate_all
from .fresh import scratch_id


class Binders:
    """Accumulates (fvar, hint, type) binders; ``pis``/``lams`` close a body
    over them, innermost last."""

    def __init__(self) -> None:
        self.entries: list[tuple[int, str, Expr]] = []

    def add(self, hint: str, type_: Expr) -> FreeVar:
        fid = scratch_id()
        self.entries.append((fid, hint, type_))
        return FreeVar(fid)

    def types(self) -> dict[int, Expr]:
        return {fid: ty for fid, _h, ty in self.entries}

    def pis(self, body: Expr) -> Expr:
        for fid, hint, ty in reversed(self.entries):
            body = Pi(hint, ty, abstract_fvar(body, fid))
        return body

    def lams(self, body: Expr) -> Expr:
        for fid, hint, ty in reversed(self.entries):
            body = Lambda(hint, ty, abstract_fvar(body, fid))
        return body


def open_telescope(b: Binders, tel: Telescope, prefix: list[Expr]) -> list[FreeVar]:
    """Open a telescope whose entry types live under ``prefix ++ earlier
    entries`` (all as de Bruijn binders); returns the new free variables."""
    fvs: list[Expr] = []
    out: list[FreeVar] = []
    for entry in tel:
        ty = instantiate_all(entry.type, prefix + fvs)
        fv = b.add(entry.name, ty)
        fvs.append(fv)
        out.append(fv)
    return out
