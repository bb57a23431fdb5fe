"""Goals, local contexts with stable hypothesis identity, and the primitive
tactics the induction pipeline composes.

A goal's metavariable stands for the *closed* proof ``λ hyps, target-proof``;
tactic steps record, in ``assignments``, how each solved metavariable's proof
is built from the remaining ones.  Completing every goal and instantiating the
skeleton therefore yields a kernel-checkable proof term: no tactic step is
trusted.

States are immutable snapshots; every tactic returns a new state, which gives
the session protocol exact undo for free.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .kernel.build import Binders
from .kernel.decl import Declaration, Transparency
from .kernel.env import Environment, KernelError, TypeError_
from .kernel.expr import (
    App,
    Const,
    Expr,
    FreeVar,
    Lambda,
    Meta,
    Pi,
    abstract_fvar,
    beta_head,
    fvars,
    has_meta,
    instantiate,
    mk_app,
    subst_fvar,
    unfold_app,
)
from .kernel.reduce import is_def_eq, whnf
from .kernel.typecheck import check_declaration, infer_type
from .unify import instantiate_metas, unify, UnifyResult


class TacticError(Exception):
    pass


class NotAPi(TacticError):
    pass


class UnknownHypothesis(TacticError):
    pass


class UnificationFailure(TacticError):
    pass


class OccursCheck(TacticError):
    pass


class DependencyError(TacticError):
    pass


class NoGoals(TacticError):
    pass


@dataclass(frozen=True)
class Hypothesis:
    id: int  # stable identity, never changes across type rewrites
    name: str  # display name, possibly shadowed
    type: Expr
    value: Expr | None = None  # local definitions; unused in v1
    temporary: bool = False  # pending a final name from the naming pass


@dataclass(frozen=True)
class Goal:
    meta: int
    hyps: tuple[Hypothesis, ...]
    target: Expr
    case_tag: str | None = None

    def find(self, hyp_id: int) -> Hypothesis:
        for h in self.hyps:
            if h.id == hyp_id:
                return h
        raise UnknownHypothesis(f"no hypothesis with id {hyp_id}")

    def has_id(self, hyp_id: int) -> bool:
        return any(h.id == hyp_id for h in self.hyps)

    def by_name(self, name: str) -> Hypothesis:
        for h in reversed(self.hyps):
            if h.name == name:
                return h
        raise UnknownHypothesis(f"no hypothesis named {name}")

    def index_of(self, hyp_id: int) -> int:
        for i, h in enumerate(self.hyps):
            if h.id == hyp_id:
                return i
        raise UnknownHypothesis(f"no hypothesis with id {hyp_id}")

    def ctx_types(self) -> dict[int, Expr]:
        return {h.id: h.type for h in self.hyps}


def goal_proof(goal: Goal) -> Expr:
    """The goal's proof as seen from inside its own context."""
    return mk_app(Meta(goal.meta), *[FreeVar(h.id) for h in goal.hyps])


def close_lambda(hyps: tuple[Hypothesis, ...] | list[Hypothesis], e: Expr) -> Expr:
    for h in reversed(list(hyps)):
        e = Lambda(h.name, h.type, abstract_fvar(e, h.id))
    return e


def close_pi(hyps: tuple[Hypothesis, ...] | list[Hypothesis], e: Expr) -> Expr:
    for h in reversed(list(hyps)):
        e = Pi(h.name, h.type, abstract_fvar(e, h.id))
    return e


def goal_type(goal: Goal) -> Expr:
    return close_pi(goal.hyps, goal.target)


@dataclass(frozen=True)
class TacticState:
    env: Environment
    statement: Expr
    skeleton: Expr  # the proof with metas standing for open goals
    assignments: dict[int, Expr] = field(default_factory=dict)
    goals: tuple[Goal, ...] = ()
    next_id: int = 0
    next_meta: int = 1

    # -- bookkeeping --------------------------------------------------------

    def goal(self, meta: int | None = None) -> Goal:
        if not self.goals:
            raise NoGoals("no goals")
        if meta is None:
            return self.goals[0]
        for g in self.goals:
            if g.meta == meta:
                return g
        raise NoGoals(f"no goal with id {meta}")

    def _fresh_ids(self, n: int) -> tuple["TacticState", list[int]]:
        ids = list(range(self.next_id, self.next_id + n))
        return replace(self, next_id=self.next_id + n), ids

    def _fresh_metas(self, n: int) -> tuple["TacticState", list[int]]:
        ids = list(range(self.next_meta, self.next_meta + n))
        return replace(self, next_meta=self.next_meta + n), ids

    def _commit(
        self,
        old: Goal,
        new_goals: list[Goal],
        assignment: Expr | None,
    ) -> "TacticState":
        """Replace ``old`` by ``new_goals`` (at its position), recording how to
        prove ``old`` from them."""
        idx = [g.meta for g in self.goals].index(old.meta)
        goals = self.goals[:idx] + tuple(new_goals) + self.goals[idx + 1 :]
        assignments = dict(self.assignments)
        if assignment is not None:
            assignments[old.meta] = assignment
        return replace(self, goals=goals, assignments=assignments)

    def update_goal(self, new_goal: Goal) -> "TacticState":
        """Swap in a display-level variant of a goal (same meta, same closed
        type up to binder hints): rename, case tags, temporary flags."""
        idx = [g.meta for g in self.goals].index(new_goal.meta)
        return replace(self, goals=self.goals[:idx] + (new_goal,) + self.goals[idx + 1 :])

    # -- primitive tactics ---------------------------------------------------

    def intro(self, goal: Goal, name: str | None = None, temporary: bool = False) -> "TacticState":
        target = goal.target
        if not isinstance(target, Pi):
            target = whnf(self.env, target, Transparency.ALL)
        if not isinstance(target, Pi):
            raise NotAPi("target is not a function type")
        st, (hid,) = self._fresh_ids(1)
        st, (m,) = st._fresh_metas(1)
        display = name if name is not None else (target.hint or "x")
        if display == "_":
            display = "x"
        hyp = Hypothesis(hid, display, beta_head(target.binder_type), temporary=temporary)
        body = instantiate(target.body, FreeVar(hid))
        g2 = Goal(m, goal.hyps + (hyp,), body, goal.case_tag)
        # closed types coincide: Π ctx, Π x, B  ==  Π (ctx, x), B
        return st._commit(goal, [g2], Meta(m))

    def revert(self, goal: Goal, hyp_id: int) -> tuple["TacticState", int]:
        goal.find(hyp_id)
        moved_ids = self._dependents(goal, {hyp_id})
        moved = [h for h in goal.hyps if h.id in moved_ids]
        kept = [h for h in goal.hyps if h.id not in moved_ids]
        new_target = close_pi(moved, goal.target)
        st, (m,) = self._fresh_metas(1)
        g2 = Goal(m, tuple(kept), new_target, goal.case_tag)
        proof = mk_app(goal_proof(g2), *[FreeVar(h.id) for h in moved])
        return st._commit(goal, [g2], close_lambda(goal.hyps, proof)), len(moved)

    def _dependents(self, goal: Goal, seeds: set[int]) -> set[int]:
        """Seeds plus every later hypothesis depending on them, transitively."""
        out = set(seeds)
        for h in goal.hyps:
            if h.id in out:
                continue
            if fvars(h.type) & out:
                out.add(h.id)
        return out

    def assert_after(
        self,
        goal: Goal,
        anchor_id: int,
        name: str,
        type_: Expr,
        value: Expr,
        temporary: bool = False,
    ) -> tuple["TacticState", int]:
        pos = goal.index_of(anchor_id)
        allowed = {h.id for h in goal.hyps[: pos + 1]}
        if not fvars(type_) <= allowed:
            raise TypeError_("hypothesis type mentions hypotheses after the anchor", type_)
        ctx = goal.ctx_types()
        vt = infer_type(self.env, ctx, value)
        if not is_def_eq(self.env, vt, type_, Transparency.ALL):
            raise TypeError_("asserted value does not have the stated type", value)
        st, (hid,) = self._fresh_ids(1)
        st, (m,) = st._fresh_metas(1)
        hyp = Hypothesis(hid, name, type_, temporary=temporary)
        hyps = goal.hyps[: pos + 1] + (hyp,) + goal.hyps[pos + 1 :]
        g2 = Goal(m, hyps, goal.target, goal.case_tag)
        args = [FreeVar(h.id) if h.id != hid else value for h in hyps]
        proof = mk_app(Meta(m), *args)
        return st._commit(goal, [g2], close_lambda(goal.hyps, proof)), hid

    def exact(self, goal: Goal, e: Expr) -> "TacticState":
        t = infer_type(self.env, goal.ctx_types(), e)
        if not is_def_eq(self.env, t, goal.target, Transparency.ALL):
            raise TypeError_("exact: term type does not match the target", e)
        return self._commit(goal, [], close_lambda(goal.hyps, e))

    def apply_expr(self, goal: Goal, e: Expr) -> tuple["TacticState", list[Goal]]:
        """Apply ``e``, peeling as few Pi binders as make its conclusion unify
        with the target; unsolved argument metas become goals, in order."""
        ty = infer_type(self.env, goal.ctx_types(), e)
        st = self
        meta_ids: list[int] = []
        meta_types: dict[int, Expr] = {}
        concl = ty
        while True:
            outcome = unify(self.env, goal.target, concl, set(meta_ids), Transparency.REDUCIBLE)
            if outcome.kind is not UnifyResult.FAILURE and not outcome.mismatched:
                sub = outcome.assignment
                solved_concl = instantiate_metas(concl, sub)
                unsolved = [m for m in meta_ids if m not in sub]
                ok = not (set(unsolved) & set(_metas_of(solved_concl)))
                goal_types = {}
                if ok:
                    for m in unsolved:
                        mt = instantiate_metas(meta_types[m], sub)
                        if has_meta(mt):
                            ok = False
                            break
                        goal_types[m] = mt
                if ok:
                    new_goals = [
                        Goal(m, goal.hyps, goal_types[m], goal.case_tag) for m in unsolved
                    ]
                    term = mk_app(e, *[Meta(m) for m in meta_ids])
                    term = instantiate_metas(term, sub)
                    for g in new_goals:
                        term = _subst_meta_app(term, g.meta, goal_proof(g))
                    st2 = st._commit(goal, new_goals, close_lambda(goal.hyps, term))
                    return st2, new_goals
            w = whnf(self.env, concl, Transparency.REDUCIBLE)
            if not isinstance(w, Pi):
                raise UnificationFailure("apply: conclusion does not unify with the target")
            st, (m,) = st._fresh_metas(1)
            meta_ids.append(m)
            meta_types[m] = w.binder_type
            concl = instantiate(w.body, Meta(m))

    def clear(self, goal: Goal, hyp_id: int) -> "TacticState":
        h = goal.find(hyp_id)
        for other in goal.hyps:
            if other.id != hyp_id and hyp_id in fvars(other.type):
                raise DependencyError(f"{other.name} depends on {h.name}")
        if hyp_id in fvars(goal.target):
            raise DependencyError(f"target depends on {h.name}")
        st, (m,) = self._fresh_metas(1)
        kept = tuple(x for x in goal.hyps if x.id != hyp_id)
        g2 = Goal(m, kept, goal.target, goal.case_tag)
        return st._commit(goal, [g2], close_lambda(goal.hyps, goal_proof(g2)))

    def rename(self, goal: Goal, hyp_id: int, new_name: str, temporary: bool | None = None) -> "TacticState":
        hyps = tuple(
            replace(h, name=new_name, temporary=h.temporary if temporary is None else temporary)
            if h.id == hyp_id
            else h
            for h in goal.hyps
        )
        if not any(h.id == hyp_id for h in goal.hyps):
            raise UnknownHypothesis(f"no hypothesis with id {hyp_id}")
        return self.update_goal(replace(goal, hyps=hyps))

    def reorder_after(self, goal: Goal, hyp_id: int, after_id: int | None) -> "TacticState":
        """Move a hypothesis to sit right after ``after_id`` (or first).  Only
        moves earlier; everything jumped over was introduced before the moved
        hypothesis and therefore cannot depend on it."""
        h = goal.find(hyp_id)
        rest = [x for x in goal.hyps if x.id != hyp_id]
        if after_id is None:
            pos = 0
        else:
            pos = [x.id for x in rest].index(after_id) + 1
        deps = fvars(h.type)
        if not deps <= {x.id for x in rest[:pos]}:
            raise DependencyError("cannot move hypothesis before its dependencies")
        hyps = rest[:pos] + [h] + rest[pos:]
        st, (m,) = self._fresh_metas(1)
        g2 = Goal(m, tuple(hyps), goal.target, goal.case_tag)
        return st._commit(goal, [g2], close_lambda(goal.hyps, goal_proof(g2)))

    def subst_using(self, goal: Goal, eq_hyp_id: int, elim_lhs: bool) -> "TacticState":
        """Given ``eq : x = t`` (or ``t = x``), delete the variable ``x`` and
        the equation, replacing ``x`` with ``t`` in every later hypothesis and
        the target.  Stable ids of rewritten hypotheses are preserved; the
        step is justified by transport along the equation."""
        eq_hyp = goal.find(eq_hyp_id)
        ty = whnf(self.env, eq_hyp.type, Transparency.REDUCIBLE)
        head, args = unfold_app(ty)
        if not (isinstance(head, Const) and head.name == "eq" and len(args) == 3):
            raise TacticError("subst: hypothesis is not a homogeneous equation")
        a_ty, lhs, rhs = args
        x_expr, t_expr = (lhs, rhs) if elim_lhs else (rhs, lhs)
        if not isinstance(x_expr, FreeVar) or not goal.has_id(x_expr.id):
            raise TacticError("subst: eliminated side is not a local hypothesis")
        if x_expr.id in fvars(t_expr):
            raise OccursCheck("subst: variable occurs in the replacement term")
        x_id = x_expr.id
        x_pos = goal.index_of(x_id)
        before_ids = {h.id for h in goal.hyps[:x_pos]}
        if not fvars(t_expr) <= before_ids:
            raise DependencyError("subst: replacement mentions hypotheses after the variable")
        for h in goal.hyps:
            if h.id not in (x_id, eq_hyp_id) and eq_hyp_id in fvars(h.type):
                raise DependencyError("subst: something depends on the equation itself")
        if eq_hyp_id in fvars(goal.target):
            raise DependencyError("subst: target depends on the equation itself")

        delta = [
            h
            for h in self._dependent_hyps(goal, x_id)
            if h.id not in (x_id, eq_hyp_id)
        ]
        delta_ids = {h.id for h in delta}
        new_hyps = tuple(
            replace(h, type=subst_fvar(h.type, x_id, t_expr)) if h.id in delta_ids else h
            for h in goal.hyps
            if h.id not in (x_id, eq_hyp_id)
        )
        new_target = subst_fvar(goal.target, x_id, t_expr)
        st, (m,) = self._fresh_metas(1)
        g2 = Goal(m, new_hyps, new_target, goal.case_tag)

        # proof of the old goal: transport  Π Δ[x:=y], T[x:=y]  from y := t
        # (where the new goal provides it) back to y := x along eq.
        u = close_pi(delta, goal.target)
        mb = Binders()
        y = mb.add("y", a_ty)
        mb.add("_e", mk_app(Const("eq"), a_ty, t_expr, y))
        motive = mb.lams(subst_fvar(u, x_id, y))
        base_inner = mk_app(Meta(m), *[FreeVar(h.id) for h in new_hyps])
        base = close_lambda(
            [replace(h, type=subst_fvar(h.type, x_id, t_expr)) for h in delta], base_inner
        )
        eq_proof: Expr = FreeVar(eq_hyp_id)
        if elim_lhs:
            eq_proof = mk_app(Const("eq_symm"), a_ty, x_expr, t_expr, eq_proof)
        term = mk_app(
            Const("eq.rec"), a_ty, t_expr, motive, base, x_expr, eq_proof,
            *[FreeVar(h.id) for h in delta],
        )
        return st._commit(goal, [g2], close_lambda(goal.hyps, term))

    def _dependent_hyps(self, goal: Goal, seed: int) -> list[Hypothesis]:
        ids = self._dependents(goal, {seed})
        return [h for h in goal.hyps if h.id in ids]

    # -- whole-proof assembly -----------------------------------------------

    def resolved_skeleton(self) -> Expr:
        return instantiate_metas(self.skeleton, self.assignments)

    def final_proof(self) -> Expr:
        if self.goals:
            raise TacticError("proof is not complete")
        proof = self.resolved_skeleton()
        if has_meta(proof):
            raise TacticError("unassigned metavariable in completed proof")
        return proof

    def validate(self) -> None:
        """Check the core invariant: instantiating the skeleton, with each
        remaining goal's meta read as an opaque constant of the goal's closed
        type, typechecks against the original statement."""
        scratch = Environment(
            decls=dict(self.env.decls),
            inductives=dict(self.env.inductives),
            constructor_of=dict(self.env.constructor_of),
            recursors=dict(self.env.recursors),
        )
        goal_consts: dict[int, Expr] = {}
        for g in self.goals:
            ty = goal_type(g)
            name = f"_goal.{g.meta}"
            check_declaration(scratch, name, ty, None)
            scratch.add(Declaration(name, ty))
            goal_consts[g.meta] = Const(name)
        proof = instantiate_metas(self.skeleton, {**self.assignments, **goal_consts})
        if has_meta(proof):
            raise TacticError("skeleton mentions an unknown metavariable")
        t = infer_type(scratch, {}, proof)
        if not is_def_eq(scratch, t, self.statement, Transparency.ALL):
            raise TypeError_("proof skeleton does not prove the statement", proof)


def _metas_of(e: Expr) -> set[int]:
    from .kernel.expr import metas

    return metas(e)


def _subst_meta_app(e: Expr, meta_id: int, value: Expr) -> Expr:
    from .kernel.expr import subst_metas

    return subst_metas(e, {meta_id: value})


def new_state(env: Environment, statement: Expr) -> TacticState:
    """Fresh proof of ``statement``: one goal with empty context."""
    root = 0
    goal = Goal(root, (), statement)
    return TacticState(env=env, statement=statement, skeleton=Meta(root), goals=(goal,), next_meta=1)
