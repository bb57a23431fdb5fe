"""Hypothesis naming: the tactic's final pass.

Constructor arguments are named by five ordered rules (recursion, index
association, declared argument names, type-based hints, fallback), induction
hypotheses after the argument they apply to, leftover index machinery by a
numbered scheme, and everything is made collision-free at the end, when the
set of surviving hypotheses is known.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

from .kernel.decl import Transparency
from .kernel.env import Environment
from .kernel.expr import Const, Expr, FreeVar, unfold_app
from .kernel.reduce import is_def_eq, whnf
from .proofstate import Goal, Hypothesis, TacticState


class NamingError(Exception):
    pass


class UserNameCountMismatch(NamingError):
    pass


# Optional trace for golden tables: called with
# (constructor name, argument position, rule label, chosen name).
NAMING_TRACE = None


@dataclass
class NameHintRegistry:
    """Type-head constants mapped to preferred variable names; container
    heads (like ``list``) pluralize the element type's hints.  Later
    registrations shadow earlier ones."""

    env: Environment

    def register(self, head: str, names: list[str] | tuple[str, ...]) -> None:
        self.env.hint_lists[head] = tuple(names)

    def register_container(self, head: str) -> None:
        self.env.hint_containers.add(head)

    def candidates(self, type_: Expr) -> list[str]:
        head, args = unfold_app(whnf(self.env, type_, Transparency.REDUCIBLE))
        if not isinstance(head, Const):
            return []
        if head.name in self.env.hint_lists:
            return list(self.env.hint_lists[head.name])
        if head.name in self.env.hint_containers and args:
            # one level deep: pluralize the element type's hints
            inner_head, _ = unfold_app(whnf(self.env, args[0], Transparency.REDUCIBLE))
            if isinstance(inner_head, Const) and inner_head.name in self.env.hint_lists:
                return [h + "s" for h in self.env.hint_lists[inner_head.name]]
        return []

    def lookup(self, type_: Expr, used: set[str]) -> str | None:
        for cand in self.candidates(type_):
            if cand not in used:
                return cand
        return None


class HypKind(enum.Enum):
    CTOR_ARG = "arg"
    IH = "ih"
    INDEX_PLACEHOLDER = "index"
    INDEX_EQUATION = "equation"


@dataclass(frozen=True)
class NewHypInfo:
    """What the induction pipeline knows about one introduced hypothesis."""

    hyp_id: int
    kind: HypKind
    arg_pos: int = -1  # constructor argument position (CTOR_ARG / IH)
    rec_arg_id: int = -1  # for an IH: the hypothesis id of its recursive argument


@dataclass
class NamingContext:
    """Data the naming rules consult, captured before the pipeline mutates
    anything: the major premise's display name and its index arguments (with
    the hypothesis name when an index was a bare hypothesis)."""

    env: Environment
    registry: NameHintRegistry
    major_name: str
    index_args: list[Expr]  # the kᵢ, as they stood before generalisation
    index_hyp_names: dict[int, str]  # fvar id -> display name at tactic start
    index_hyp_types: dict[int, Expr]
    ctor_name: str = ""
    ih_count: int = 0


def is_proposition_like(env: Environment, type_: Expr) -> bool:
    """Fallback-rule approximation of propositionhood: equations, falsity, or
    a validated inductive family with at least one index."""
    head, _ = unfold_app(whnf(env, type_, Transparency.REDUCIBLE))
    if not isinstance(head, Const):
        return False
    if head.name in ("eq", "heq", "false"):
        return True
    ind = env.inductives.get(head.name)
    return ind is not None and ind.num_indices >= 1


def name_constructor_arg(
    nc: NamingContext,
    goal: Goal,
    hyp: Hypothesis,
    arg_pos: int,
    inst_index_insts: list[Expr],
    is_recursive: bool,
    declared_name: str,
    declared: bool,
    used: set[str],
) -> str:
    """Apply the five rules in order, stopping at the first that gives a
    name.  ``inst_index_insts`` are the constructor's index instantiations
    with this case's argument hypotheses substituted in."""

    def chosen(rule: str, name: str) -> str:
        if NAMING_TRACE is not None:
            NAMING_TRACE(nc.ctor_name, arg_pos, rule, name)
        return name

    # 1. recursion: recursive arguments take the major premise's name
    if is_recursive:
        return chosen("recursion", nc.major_name)
    # 2. index association
    assoc = [
        i
        for i, inst in enumerate(inst_index_insts)
        if _occurs_fvar(inst, hyp.id)
    ]
    if assoc:
        ks = [nc.index_args[i] for i in assoc]
        first = ks[0]
        if (
            isinstance(first, FreeVar)
            and all(k == first for k in ks)
            and first.id in nc.index_hyp_names
        ):
            h_type = nc.index_hyp_types[first.id]
            if is_def_eq(nc.env, h_type, hyp.type, Transparency.REDUCIBLE):
                return chosen("index-association", nc.index_hyp_names[first.id])
    # 3. named arguments
    if declared:
        return chosen("named-argument", declared_name)
    # 4. type-based
    hinted = nc.registry.lookup(hyp.type, used)
    if hinted is not None:
        return chosen("type-based", hinted)
    # 5. fallback
    return chosen(
        "fallback", "h" if is_proposition_like(nc.env, hyp.type) else "x"
    )


def name_ih(nc: NamingContext, rec_arg_name: str, total_ih_count: int) -> str:
    return "ih" if total_ih_count == 1 else f"ih_{rec_arg_name}"


def _occurs_fvar(e: Expr, fvar_id: int) -> bool:
    from .kernel.expr import has_fvar

    return has_fvar(e, fvar_id)


def resolve_collision(name: str, used: set[str]) -> str:
    if name not in used:
        return name
    k = 1
    while f"{name}_{k}" in used:
        k += 1
    return f"{name}_{k}"


def finalize_names(
    state: TacticState,
    goal: Goal,
    user_names: list[str] | None,
    nc: NamingContext,
    infos: dict[int, NewHypInfo],
    case_index_insts: list[Expr],
    arg_meta: dict[int, tuple[str, bool, bool]],  # hyp id -> (declared name, declared?, recursive?)
) -> TacticState:
    """Assign final display names to every temporary hypothesis of the goal,
    consuming user-supplied names positionally first."""
    temps = [h for h in goal.hyps if h.temporary]
    if user_names and len(user_names) > len(temps):
        raise UserNameCountMismatch(
            f"case {goal.case_tag or '?'}: {len(user_names)} names given "
            f"for {len(temps)} hypotheses"
        )
    used: set[str] = {h.name for h in goal.hyps if not h.temporary}
    assigned: dict[int, str] = {}
    eq_counter = 0
    idx_counter = 0
    total_ihs = sum(1 for h in temps if infos.get(h.id, None) and infos[h.id].kind is HypKind.IH)
    names: dict[int, str] = {}
    consumed = 0
    for h in temps:
        if user_names and consumed < len(user_names):
            name = resolve_collision(user_names[consumed], used)
            consumed += 1
        else:
            info = infos.get(h.id)
            kind = info.kind if info else None
            if kind is HypKind.IH:
                rec_name = assigned.get(info.rec_arg_id)
                if rec_name is None:
                    rec_hyp = goal.find(info.rec_arg_id) if goal.has_id(info.rec_arg_id) else None
                    rec_name = rec_hyp.name if rec_hyp else nc.major_name
                name = name_ih(nc, rec_name, total_ihs)
            elif kind is HypKind.INDEX_EQUATION:
                eq_counter += 1
                name = f"induction_eq_{eq_counter}"
            elif kind is HypKind.INDEX_PLACEHOLDER:
                idx_counter += 1
                name = f"index_{idx_counter}"
            elif kind is HypKind.CTOR_ARG:
                declared_name, declared, recursive = arg_meta[h.id]
                name = name_constructor_arg(
                    nc,
                    goal,
                    h,
                    info.arg_pos,
                    case_index_insts,
                    recursive,
                    declared_name,
                    declared,
                    used,
                )
            else:
                # unexpected leftover: name by type hints, then fallback
                name = nc.registry.lookup(h.type, used) or (
                    "h" if is_proposition_like(nc.env, h.type) else "x"
                )
            name = resolve_collision(name, used)
        used.add(name)
        assigned[h.id] = name
        names[h.id] = name
    new_hyps = tuple(
        replace(h, name=names[h.id], temporary=False) if h.id in names else h
        for h in goal.hyps
    )
    return state.update_goal(replace(goal, hyps=new_hyps))
