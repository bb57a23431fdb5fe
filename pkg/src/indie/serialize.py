"""Serialization of the declaration environment back to the surface-language
file format.  Only user-written items round-trip (generated machinery is
regenerated on load); ``parse(serialize(env))`` reproduces the same
declarations."""

from __future__ import annotations

from .kernel.decl import Telescope
from .kernel.env import Environment
from .kernel.expr import lift
from .printer import Printer


def env_to_source(env: Environment) -> str:
    pr = Printer(env, annotate=True)
    parts: list[str] = []
    for item in env.source_items:
        kind = item[0]
        if kind == "constant":
            name = item[1]
            parts.append(f"constant {name} : {pr.expr(env.get(name).type)}")
        elif kind == "def":
            name = item[1]
            decl = env.get(name)
            prefix = "" if decl.reducible else "irreducible "
            parts.append(f"{prefix}def {name} : {pr.expr(decl.type)} := {pr.expr(decl.body)}")
        elif kind == "lemma":
            name = item[1]
            decl = env.get(name)
            parts.append(f"lemma {name} : {pr.expr(decl.type)} := {pr.expr(decl.body)}")
        elif kind == "inductive":
            parts.append(_inductive_source(env, pr, item[1]))
        elif kind == "hints":
            _k, head, names, container = item
            if container:
                parts.append(f"name_hints_container {head} := pluralize")
            else:
                parts.append(f"name_hints {head} := {' '.join(names)}")
    return "\n\n".join(parts) + "\n"


def _inductive_source(env: Environment, pr: Printer, name: str) -> str:
    d = env.inductive(name)
    # parameter groups
    names: list[str] = []  # innermost-first for the printer
    groups: list[str] = []
    i = 0
    params = list(d.params)
    while i < len(params):
        j = i
        while j + 1 < len(params) and params[j + 1].type == lift(params[i].type, j + 1 - i):
            j += 1
        ty = pr.expr_under(params[i].type, names)
        group_names = [e.name for e in params[i : j + 1]]
        groups.append(f"({' '.join(group_names)} : {ty})")
        names = list(reversed(group_names)) + names
        i = j + 1
    header = f"inductive {name}"
    if groups:
        header += " " + " ".join(groups)
    arity = _telescope_arrow(env, pr, d.indices, names, "Type")
    header += f" : {arity}"
    lines = [header]
    for ctor in d.constructors:
        short = ctor.name.rsplit(".", 1)[-1]
        body = _ctor_source(env, pr, d, ctor, names)
        lines.append(f"| {short} : {body}")
    return "\n".join(lines)


def _telescope_arrow(env, pr: Printer, tel: Telescope, outer_names: list[str], concl: str) -> str:
    """Telescope printed as arrows/foralls ending in ``concl``; named entries
    keep their binder (so the named-arguments naming rule survives a
    round-trip), unnamed ones print as arrows."""
    if not tel:
        return concl
    entries = list(tel)
    out: list[str] = []
    names = list(outer_names)
    i = 0
    while i < len(entries):
        e = entries[i]
        if e.named:
            j = i
            while (
                j + 1 < len(entries)
                and entries[j + 1].named
                and entries[j + 1].type == lift(entries[i].type, j + 1 - i)
            ):
                j += 1
            group = [x.name for x in entries[i : j + 1]]
            ty = pr.expr_under(e.type, names)
            rest = _telescope_tail(env, pr, entries[j + 1 :], list(reversed(group)) + names, concl)
            out.append(f"∀ ({' '.join(group)} : {ty}), {rest}")
            return "".join(out)
        ty = pr.expr_under(e.type, names, arrow_operand=True)
        out.append(f"{ty} → ")
        names = [e.name] + names
        i += 1
    return "".join(out) + concl


def _telescope_tail(env, pr, entries, names, concl) -> str:
    return _telescope_arrow(env, pr, tuple(entries), names, concl)


def _ctor_source(env, pr: Printer, d, ctor, param_names: list[str]) -> str:
    total = len(d.params) + len(ctor.args)
    from .kernel.expr import BoundVar, Const, mk_app

    concl_expr = mk_app(
        Const(d.name),
        *[BoundVar(total - 1 - j) for j in range(len(d.params))],
        *ctor.index_insts,
    )
    arg_names = [e.name for e in ctor.args]
    concl = pr.expr_under(concl_expr, list(reversed(arg_names)) + param_names)
    return _telescope_arrow(env, pr, ctor.args, param_names, concl)
