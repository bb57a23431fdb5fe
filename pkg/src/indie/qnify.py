"""First-order unification of index equations: a queue of equation
hypotheses simplified by six proof-producing rules (deletion, substitution,
injection, conflict, cycle, homogenisation) until none applies.

Rules are attempted in a fixed order chosen to make their premises disjoint:
deletion first (so ``x = x`` never reaches substitution's occurs check), then
substitution, injection, conflict, cycle, homogenisation.  Every firing is
justified by a proof term; nothing is rewritten on trust.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

from .kernel.build import Binders
from .kernel.decl import Transparency
from .kernel.env import Environment
from .kernel.expr import (
    Const,
    Expr,
    FreeVar,
    Lambda,
    Meta,
    fvars,
    instantiate_all,
    iter_subterms,
    lift,
    mk_app,
    unfold_app,
)
from .kernel.inductive import (
    conflict_transport,
    generate_support,
    injection_transport,
    injectivity_name,
    no_confusion_name,
    sizeof_lt_name,
    sizeof_name,
)
from .kernel.reduce import is_def_eq, whnf
from .kernel.typecheck import infer_type
from .proofstate import DependencyError, Goal, Hypothesis, TacticError, TacticState, close_lambda, goal_proof


class RuleFired(enum.Enum):
    SUBSTITUTION = "substitution"
    INJECTION = "injection"
    CONFLICT = "conflict"
    DELETION = "deletion"
    CYCLE = "cycle"
    HOMOGENISATION = "homogenisation"
    STUCK = "stuck"


class SpineNotRecursive(TacticError):
    pass


# Optional observer for tests/golden tables: called after every qnify step
# with (goal_before, queue_before, rule, goal_after, queue_after).
QNIFY_OBSERVER = None


@dataclass(frozen=True)
class Equation:
    heterogeneous: bool
    lhs_type: Expr
    lhs: Expr
    rhs_type: Expr
    rhs: Expr


def parse_equation(env: Environment, type_: Expr) -> Equation | None:
    head, args = unfold_app(whnf(env, type_, Transparency.REDUCIBLE))
    if isinstance(head, Const) and head.name == "eq" and len(args) == 3:
        return Equation(False, args[0], args[1], args[0], args[2])
    if isinstance(head, Const) and head.name == "heq" and len(args) == 4:
        return Equation(True, args[0], args[1], args[2], args[3])
    return None


@dataclass(frozen=True)
class StepResult:
    state: TacticState
    goal: Goal | None  # None when the rule closed the goal
    rule: RuleFired
    children: tuple[int, ...] = ()  # injection: new equation ids, front first


def qnify_step(state: TacticState, goal: Goal, eq_id: int) -> StepResult:
    """Attempt exactly one rule on the given equation hypothesis."""
    hyp = goal.find(eq_id)
    eq = parse_equation(state.env, hyp.type)
    if eq is None:
        raise TacticError(f"hypothesis {hyp.name} is not an equation")
    for attempt in (
        _try_deletion,
        _try_substitution,
        _try_injection,
        _try_conflict,
        _try_cycle,
        _try_homogenisation,
    ):
        result = attempt(state, goal, eq_id, eq)
        if result is not None:
            return result
    return StepResult(state, goal, RuleFired.STUCK)


def qnify_all(
    state: TacticState, goal: Goal, queue: list[int]
) -> tuple[TacticState, Goal | None, list[tuple[int, RuleFired]]]:
    """Repeatedly step the front equation until the queue empties or the goal
    closes.  Stuck equations are dropped from the queue but stay in the
    context; injection children join at the front."""
    log: list[tuple[int, RuleFired]] = []
    queue = list(queue)
    current: Goal | None = goal
    while queue and current is not None:
        front = queue[0]
        if not current.has_id(front):
            queue.pop(0)
            continue
        before_goal, before_queue = current, list(queue)
        res = qnify_step(state, current, front)
        log.append((front, res.rule))
        state, current = res.state, res.goal
        if res.rule is not RuleFired.HOMOGENISATION:
            queue.pop(0)
            if res.rule is RuleFired.INJECTION:
                queue = list(res.children) + queue
        if QNIFY_OBSERVER is not None:
            QNIFY_OBSERVER(state, before_goal, before_queue, res.rule, current, list(queue))
    return state, current, log


def constructor_count(env: Environment, e: Expr) -> int:
    return sum(
        1
        for s in iter_subterms(e)
        if isinstance(s, Const) and env.is_constructor(s.name)
    )


def measure(env: Environment, goal: Goal, queue: list[int]) -> tuple[int, int, int]:
    """Termination measure: (constructor count over queued equation sides,
    heterogeneous equation count, queue length), ordered lexicographically."""
    ctors = 0
    het = 0
    live = [i for i in queue if goal.has_id(i)]
    for i in live:
        eq = parse_equation(env, goal.find(i).type)
        if eq is None:
            continue
        ctors += constructor_count(env, eq.lhs) + constructor_count(env, eq.rhs)
        het += 1 if eq.heterogeneous else 0
    return (ctors, het, len(live))


# ---------------------------------------------------------------------------
# Individual rules
# ---------------------------------------------------------------------------


def _try_deletion(state, goal, eq_id, eq: Equation) -> StepResult | None:
    env = state.env
    if eq.heterogeneous and not is_def_eq(env, eq.lhs_type, eq.rhs_type, Transparency.ALL):
        return None
    if not is_def_eq(env, eq.lhs, eq.rhs, Transparency.ALL):
        return None
    try:
        st = state.clear(goal, eq_id)
    except DependencyError:
        return None
    return StepResult(st, _after(st, state, goal), RuleFired.DELETION)


def _after(state: TacticState, old_state: TacticState, old_goal: Goal) -> Goal:
    """The goal that replaced ``old_goal`` (same position)."""
    idx = [g.meta for g in old_state.goals].index(old_goal.meta)
    return state.goals[idx]


def _try_substitution(state, goal, eq_id, eq: Equation) -> StepResult | None:
    if eq.heterogeneous:
        return None
    candidates = []
    if isinstance(eq.lhs, FreeVar) and goal.has_id(eq.lhs.id) and eq.lhs.id not in fvars(eq.rhs):
        candidates.append((True, eq.lhs.id, eq.rhs))
    if isinstance(eq.rhs, FreeVar) and goal.has_id(eq.rhs.id) and eq.rhs.id not in fvars(eq.lhs):
        candidates.append((False, eq.rhs.id, eq.lhs))
    # prefer eliminating the later hypothesis: the replacement term then only
    # mentions earlier ones, keeping the context well-scoped
    candidates.sort(key=lambda c: goal.index_of(c[1]), reverse=True)
    for elim_lhs, x_id, t in candidates:
        pos = goal.index_of(x_id)
        before = {h.id for h in goal.hyps[:pos]}
        if not fvars(t) <= before:
            continue
        if any(
            h.id not in (x_id, eq_id) and eq_id in fvars(h.type) for h in goal.hyps
        ) or eq_id in fvars(goal.target):
            continue
        st = state.subst_using(goal, eq_id, elim_lhs)
        return StepResult(st, _after(st, state, goal), RuleFired.SUBSTITUTION)
    return None


def _ctor_app(env: Environment, e: Expr):
    w = whnf(env, e, Transparency.REDUCIBLE)
    head, args = unfold_app(w)
    if isinstance(head, Const) and env.is_constructor(head.name):
        ind = env.inductive(env.constructor_of[head.name])
        ctor = env.constructor_decl(head.name)
        if len(args) == ind.num_params + len(ctor.args):
            return head.name, args, ind, ctor
    return None


def _try_injection(state: TacticState, goal: Goal, eq_id, eq: Equation) -> StepResult | None:
    if eq.heterogeneous:
        return None
    env = state.env
    lhs_app = _ctor_app(env, eq.lhs)
    rhs_app = _ctor_app(env, eq.rhs)
    if lhs_app is None or rhs_app is None or lhs_app[0] != rhs_app[0]:
        return None
    cname, largs, ind, ctor = lhs_app
    _, rargs, _, _ = rhs_app
    generate_support(env, ind.name)
    ctx = goal.ctx_types()
    xs = largs[ind.num_params :]
    ys = rargs[ind.num_params :]
    if not xs:
        return None  # nothing to equate; deletion handles the defeq case
    lhs_w = mk_app(Const(cname), *largs)
    rhs_w = mk_app(Const(cname), *rargs)

    child_specs = []  # (heterogeneous?, child_type)
    for x, y in zip(xs, ys):
        tx = infer_type(env, ctx, x)
        ty = infer_type(env, ctx, y)
        if is_def_eq(env, tx, ty, Transparency.REDUCIBLE):
            child_specs.append((False, mk_app(Const("eq"), tx, x, y), tx, x, ty, y))
        else:
            child_specs.append((True, mk_app(Const("heq"), tx, x, ty, y), tx, x, ty, y))

    st, child_ids = state._fresh_ids(len(child_specs))
    st, (m,) = st._fresh_metas(1)
    pos = goal.index_of(eq_id)
    children = tuple(
        Hypothesis(cid, f"_eq{cid}", spec[1], temporary=True)
        for cid, spec in zip(child_ids, child_specs)
    )
    new_hyps = goal.hyps[:pos] + children + goal.hyps[pos + 1 :]
    g2 = Goal(m, new_hyps, goal.target, goal.case_tag)

    # continuation fed to the transport: λ (h₁ : heq x₁ y₁) …, new-goal proof
    cb = Binders()
    ch_fvs = [
        cb.add(f"h{i+1}", mk_app(Const("heq"), s[2], s[3], s[4], s[5]))
        for i, s in enumerate(child_specs)
    ]
    child_values = {
        cid: (
            mk_app(Const("eq_of_heq"), s[2], s[3], s[5], fv)
            if not s[0]
            else fv
        )
        for cid, s, fv in zip(child_ids, child_specs, ch_fvs)
    }
    args = [child_values.get(h.id, FreeVar(h.id)) for h in new_hyps]
    cont = cb.lams(mk_app(Meta(m), *args))

    inj_lemma = injectivity_name(ind.name, cname)
    if ind.num_indices == 0 and env.has(inj_lemma):
        transport = mk_app(
            Const(inj_lemma),
            *largs[: ind.num_params],
            *xs,
            *ys,
            goal.target,
            FreeVar(eq_id),
        )
    else:
        transport = injection_transport(
            env, eq.lhs_type, lhs_w, rhs_w, FreeVar(eq_id), goal.target
        )
    proof = mk_app(transport, cont)
    st2 = st._commit(goal, [g2], close_lambda(goal.hyps, proof))
    return StepResult(st2, g2, RuleFired.INJECTION, tuple(child_ids))


def _try_conflict(state: TacticState, goal: Goal, eq_id, eq: Equation) -> StepResult | None:
    if eq.heterogeneous:
        return None
    env = state.env
    lhs_app = _ctor_app(env, eq.lhs)
    rhs_app = _ctor_app(env, eq.rhs)
    if lhs_app is None or rhs_app is None or lhs_app[0] == rhs_app[0]:
        return None
    cname, largs, ind, _ = lhs_app
    dname, rargs, _, _ = rhs_app
    generate_support(env, ind.name)
    lhs_w = mk_app(Const(cname), *largs)
    rhs_w = mk_app(Const(dname), *rargs)
    lemma = no_confusion_name(ind.name, cname, dname)
    if ind.num_indices == 0 and env.has(lemma):
        false_proof = mk_app(
            Const(lemma),
            *largs[: ind.num_params],
            *largs[ind.num_params :],
            *rargs[ind.num_params :],
            FreeVar(eq_id),
        )
    else:
        false_proof = conflict_transport(env, eq.lhs_type, lhs_w, rhs_w, FreeVar(eq_id))
    term = mk_app(
        Const("false.rec"), Lambda("_f", Const("false"), lift(goal.target, 1)), false_proof
    )
    st = state._commit(goal, [], close_lambda(goal.hyps, term))
    return StepResult(st, None, RuleFired.CONFLICT)


def find_recursive_spine(
    env: Environment, x_id: int, t: Expr
) -> list[tuple[str, int, Expr]] | None:
    """Spine of (constructor, recursive argument position, node term) leading
    from ``t`` down to the free variable, through recursive argument
    positions only."""
    app = _ctor_app(env, t)
    if app is None:
        return None
    cname, args, ind, ctor = app
    for i, entry in enumerate(ctor.args):
        if not entry.is_recursive:
            continue
        child = args[ind.num_params + i]
        if child == FreeVar(x_id):
            return [(cname, i, mk_app(Const(cname), *args))]
        sub = find_recursive_spine(env, x_id, child)
        if sub is not None:
            return [(cname, i, mk_app(Const(cname), *args))] + sub
    return None


def build_cycle_proof(
    state: TacticState, goal: Goal, eq_id: int, x_id: int, oriented_rhs: Expr
) -> Expr:
    """Proof of ``false`` from ``eq : x = t`` with ``x`` under a nonempty
    recursive constructor spine in ``t``: congruence with sizeof, the chained
    strictness lemmas, a rewrite back along the equation, and ``lt_irrefl``."""
    env = state.env
    spine = find_recursive_spine(env, x_id, oriented_rhs)
    if spine is None:
        raise SpineNotRecursive(
            "variable occurs only in non-recursive argument positions"
        )
    hyp = goal.find(eq_id)
    eq = parse_equation(env, hyp.type)
    assert eq is not None and not eq.heterogeneous
    a_ty = eq.lhs_type
    x = FreeVar(x_id)
    t = oriented_rhs
    # orient the hypothesis into  e1 : x = t
    if eq.lhs == x:
        e1: Expr = FreeVar(eq_id)
    else:
        e1 = mk_app(Const("eq_symm"), a_ty, eq.lhs, eq.rhs, FreeVar(eq_id))

    _, ty_args = unfold_app(whnf(env, a_ty, Transparency.REDUCIBLE))
    head_t, _ = unfold_app(whnf(env, t, Transparency.REDUCIBLE))
    assert isinstance(head_t, Const)
    ind = env.inductive(env.constructor_of[head_t.name])
    generate_support(env, ind.name)
    sname = sizeof_name(ind.name)
    params = ty_args[: ind.num_params]
    top_indices = ty_args[ind.num_params :]

    # lt chain along the spine, bottom (x) to top (t)
    def node_size(node_args: list[Expr], pos: int, ctor) -> tuple[Expr, Expr]:
        """(child term, sizeof child) for the recursive argument at pos."""
        child = node_args[ind.num_params + pos]
        child_ty = instantiate_all(ctor.args[pos].type, node_args[: ind.num_params + pos])
        _, cargs = unfold_app(child_ty)
        return child, mk_app(Const(sname), *params, *cargs[ind.num_params :], child)

    sizes: list[Expr] = []  # sizeof of node i (0 = t)
    lemmas: list[Expr] = []  # lemma i proves sizeof(node i+1) < sizeof(node i)
    node_term = t
    sizes.append(mk_app(Const(sname), *params, *top_indices, node_term))
    for cname, pos, node_app in spine:
        _, node_args = unfold_app(node_app)
        ctor = env.constructor_decl(cname)
        child, child_size = node_size(node_args, pos, ctor)
        lemmas.append(
            mk_app(
                Const(sizeof_lt_name(ind.name, cname, pos)),
                *node_args[: ind.num_params],
                *node_args[ind.num_params :],
            )
        )
        sizes.append(child_size)
        node_term = child
    s_x = sizes[-1]
    proof = lemmas[-1]  # lt s_x sizes[-2]
    for i in range(len(lemmas) - 2, -1, -1):
        proof = mk_app(Const("lt_trans"), s_x, sizes[i + 1], sizes[i], proof, lemmas[i])
    # proof : lt s_x (sizeof … t)

    fb = Binders()
    z = fb.add("z", a_ty)
    f = fb.lams(mk_app(Const(sname), *params, *top_indices, z))
    fx = mk_app(Const(sname), *params, *top_indices, x)
    ft = mk_app(Const(sname), *params, *top_indices, t)
    cg = mk_app(Const("congr_arg"), a_ty, Const("nat"), f, x, t, e1)  # eq (f x) (f t)
    sy = mk_app(Const("eq_symm"), Const("nat"), fx, ft, cg)  # eq (f t) (f x)
    mb = Binders()
    y = mb.add("y", Const("nat"))
    mb.add("_e", mk_app(Const("eq"), Const("nat"), ft, y))
    motive = mb.lams(mk_app(Const("lt"), s_x, y))
    transported = mk_app(Const("eq.rec"), Const("nat"), ft, motive, proof, fx, sy)
    return mk_app(Const("lt_irrefl"), fx, transported)


def _try_cycle(state: TacticState, goal: Goal, eq_id, eq: Equation) -> StepResult | None:
    if eq.heterogeneous:
        return None
    env = state.env
    for x_side, t_side in ((eq.lhs, eq.rhs), (eq.rhs, eq.lhs)):
        if not (isinstance(x_side, FreeVar) and goal.has_id(x_side.id)):
            continue
        if find_recursive_spine(env, x_side.id, t_side) is None:
            continue
        false_proof = build_cycle_proof(state, goal, eq_id, x_side.id, t_side)
        term = mk_app(
            Const("false.rec"),
            Lambda("_f", Const("false"), lift(goal.target, 1)),
            false_proof,
        )
        st = state._commit(goal, [], close_lambda(goal.hyps, term))
        return StepResult(st, None, RuleFired.CYCLE)
    return None


def _try_homogenisation(state: TacticState, goal: Goal, eq_id, eq: Equation) -> StepResult | None:
    if not eq.heterogeneous:
        return None
    env = state.env
    if not is_def_eq(env, eq.lhs_type, eq.rhs_type, Transparency.ALL):
        return None
    new_type = mk_app(Const("eq"), eq.lhs_type, eq.lhs, eq.rhs)
    value = mk_app(Const("eq_of_heq"), eq.lhs_type, eq.lhs, eq.rhs, FreeVar(eq_id))
    st, (m,) = state._fresh_metas(1)
    new_hyps = tuple(
        replace(h, type=new_type) if h.id == eq_id else h for h in goal.hyps
    )
    g2 = Goal(m, new_hyps, goal.target, goal.case_tag)
    args = [FreeVar(h.id) if h.id != eq_id else value for h in goal.hyps]
    st2 = st._commit(goal, [g2], close_lambda(goal.hyps, mk_app(Meta(m), *args)))
    return StepResult(st2, g2, RuleFired.HOMOGENISATION)
