"""The induction tactic: generalisation of complex indices, automatic
generalisation of hypotheses, recursor application with a read-off motive,
index-equation unification, induction-hypothesis simplification, and the
naming pass.  ``cases_tactic`` runs the identical pipeline and then drops the
induction hypotheses.

Failure at any stage simply raises: states are immutable values, so the
caller keeps the untouched pre-tactic state (atomicity for free).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .kernel.build import Binders
from .kernel.decl import InductiveDecl, Transparency
from .kernel.env import KernelError, TypeError_
from .kernel.expr import (
    Const,
    Expr,
    FreeVar,
    Meta,
    Pi,
    fvars,
    has_meta,
    instantiate,
    instantiate_all,
    lift,
    mk_app,
    replace_subterm,
    unfold_app,
)
from .kernel.reduce import is_def_eq, whnf
from .kernel.typecheck import infer_type
from .naming import (
    HypKind,
    NameHintRegistry,
    NamingContext,
    NewHypInfo,
    finalize_names,
)
from .proofstate import (
    Goal,
    Hypothesis,
    TacticError,
    TacticState,
    close_lambda,
    close_pi,
    goal_proof,
)
from .qnify import parse_equation, qnify_all
from .unify import UnifyResult, instantiate_metas, unify


class RewriteMadeGoalIllTyped(TacticError):
    pass


class FixedHypothesisConflict(TacticError):
    pass


def replacement_of(new_state: TacticState, old_state: TacticState, old_goal: Goal) -> Goal:
    """After an operation replaced ``old_goal`` by exactly one goal, that goal
    (same position in the goal list)."""
    idx = [g.meta for g in old_state.goals].index(old_goal.meta)
    return new_state.goals[idx]


@dataclass(frozen=True)
class IndexEquationRecord:
    placeholder_id: int
    original_term: Expr
    heterogeneous: bool
    equation_id: int = -1  # the hypothesis id once introduced in a case


@dataclass(frozen=True)
class InductionConfig:
    major: str  # display name of the major premise
    fixing: object = None  # None | "*" | tuple of display names
    user_names: dict[str, list[str]] | None = None  # case tag -> names


@dataclass
class MajorPremiseInfo:
    family: InductiveDecl
    param_args: list[Expr]
    index_args: list[Expr]  # the kᵢ as they stood at tactic start
    dependencies: set[int]  # hypotheses the major premise depends on, transitively
    major_id: int
    major_name: str
    index_hyp_names: dict[int, str]
    index_hyp_types: dict[int, Expr]


def analyze_major_premise(state: TacticState, goal: Goal, major_id: int) -> MajorPremiseInfo:
    h = goal.find(major_id)
    ty = whnf(state.env, h.type, Transparency.REDUCIBLE)
    head, args = unfold_app(ty)
    if not isinstance(head, Const) or head.name not in state.env.inductives:
        raise TacticError(f"{h.name} : not an application of a validated inductive family")
    fam = state.env.inductives[head.name]
    if len(args) != fam.num_params + fam.num_indices:
        raise TacticError(f"{h.name} : inductive family not fully applied")
    deps = _transitive_deps(goal, fvars(ty))
    index_args = args[fam.num_params :]
    names: dict[int, str] = {}
    types: dict[int, Expr] = {}
    for k in index_args:
        if isinstance(k, FreeVar) and goal.has_id(k.id):
            hyp = goal.find(k.id)
            names[k.id] = hyp.name
            types[k.id] = hyp.type
    return MajorPremiseInfo(
        family=fam,
        param_args=args[: fam.num_params],
        index_args=list(index_args),
        dependencies=deps,
        major_id=major_id,
        major_name=h.name,
        index_hyp_names=names,
        index_hyp_types=types,
    )


def _transitive_deps(goal: Goal, seed: set[int]) -> set[int]:
    out: set[int] = set()
    work = list(seed)
    while work:
        i = work.pop()
        if i in out or not goal.has_id(i):
            continue
        out.add(i)
        work.extend(fvars(goal.find(i).type))
    return out


# ---------------------------------------------------------------------------
# Stage 1: generalisation of complex indices
# ---------------------------------------------------------------------------


def generalize_complex_indices(
    state: TacticState, goal: Goal, info: MajorPremiseInfo
) -> tuple[TacticState, Goal, list[IndexEquationRecord]]:
    """Replace complex index arguments of the major premise by fresh
    placeholder hypotheses inserted just before it, rewriting occurrences and
    prepending one (possibly heterogeneous) equation per placeholder to the
    target.  A bare-variable index duplicated among the indices counts as
    complex, so the recursor's index binders stay independent."""
    env = state.env
    fam = info.family
    major = goal.find(info.major_id)
    major_type_deps = fvars(major.type)
    ctx = goal.ctx_types()

    def index_tel_type(i: int, values: list[Expr]) -> Expr:
        return instantiate_all(fam.indices[i].type, list(info.param_args) + values[:i])

    seen_fvar_indices: set[int] = set()
    complex_flags: list[bool] = []
    for k in info.index_args:
        if isinstance(k, FreeVar) and goal.has_id(k.id) and k.id not in seen_fvar_indices:
            seen_fvar_indices.add(k.id)
            complex_flags.append(False)
        else:
            complex_flags.append(True)  # complex, or a duplicated bare variable

    if not any(complex_flags):
        return state, goal, []

    st, new_ids = state._fresh_ids(sum(complex_flags))
    id_iter = iter(new_ids)
    records: list[IndexEquationRecord] = []
    current_values: list[Expr] = []  # placeholder fvar or the original value
    placeholder_hyps: list[Hypothesis] = []
    rewrites: list[tuple[Expr, Expr]] = []  # genuinely complex terms to rewrite
    for i, (k, is_complex) in enumerate(zip(info.index_args, complex_flags)):
        if not is_complex:
            current_values.append(k)
            continue
        hid = next(id_iter)
        ph_type = index_tel_type(i, current_values)
        orig_type = infer_type(env, ctx, k)
        het = not is_def_eq(env, ph_type, orig_type, Transparency.REDUCIBLE)
        records.append(IndexEquationRecord(hid, k, het))
        placeholder_hyps.append(Hypothesis(hid, f"_H{i + 1}", ph_type, temporary=True))
        current_values.append(FreeVar(hid))
        if not isinstance(k, FreeVar):
            rewrites.append((k, FreeVar(hid)))

    new_major_type = mk_app(Const(fam.name), *info.param_args, *current_values)

    def rewrite(e: Expr) -> Expr:
        for old, new in rewrites:
            e = replace_subterm(e, old, new)
        return e

    major_pos = goal.index_of(info.major_id)
    new_hyps: list[Hypothesis] = []
    for pos, h in enumerate(goal.hyps):
        if pos == major_pos:
            new_hyps.extend(placeholder_hyps)
            new_hyps.append(replace(h, type=new_major_type))
        elif h.id in major_type_deps:
            new_hyps.append(h)  # never rewrite inside the major's dependencies
        else:
            new_hyps.append(replace(h, type=rewrite(h.type)))

    new_target = rewrite(goal.target)
    for rec, ph in zip(reversed(records), reversed(placeholder_hyps)):
        if rec.heterogeneous:
            rhs_type = infer_type(env, ctx, rec.original_term)
            eq_ty = mk_app(
                Const("heq"), ph.type, FreeVar(rec.placeholder_id), rhs_type, rec.original_term
            )
        else:
            eq_ty = mk_app(Const("eq"), ph.type, FreeVar(rec.placeholder_id), rec.original_term)
        new_target = Pi("_", eq_ty, lift(new_target, 1))

    st, (m,) = st._fresh_metas(1)
    g2 = Goal(m, tuple(new_hyps), new_target, goal.case_tag)

    # a replacement can itself introduce type errors; re-check and abort
    try:
        ctx2: dict[int, Expr] = {}
        for h in g2.hyps:
            infer_type(env, ctx2, h.type)
            ctx2[h.id] = h.type
        infer_type(env, ctx2, g2.target)
    except (KernelError, TypeError_) as exc:
        raise RewriteMadeGoalIllTyped(str(exc)) from exc

    args: list[Expr] = []
    for h in g2.hyps:
        rec = next((r for r in records if r.placeholder_id == h.id), None)
        args.append(rec.original_term if rec is not None else FreeVar(h.id))
    refls = []
    for rec in records:
        t = infer_type(env, ctx, rec.original_term)
        if rec.heterogeneous:
            refls.append(mk_app(Const("heq.refl"), t, rec.original_term))
        else:
            refls.append(mk_app(Const("eq.refl"), t, rec.original_term))
    proof = mk_app(Meta(m), *args, *refls)
    st2 = st._commit(goal, [g2], close_lambda(goal.hyps, proof))
    return st2, g2, records


# ---------------------------------------------------------------------------
# Stage 2: generalisation of hypotheses
# ---------------------------------------------------------------------------


def generalize_hypotheses(
    state: TacticState,
    goal: Goal,
    cfg: InductionConfig,
    info: MajorPremiseInfo,
    records: list[IndexEquationRecord],
) -> tuple[TacticState, Goal, list[tuple[int, str]]]:
    """Revert every hypothesis that is neither fixed (nor a dependency of a
    fixed one) nor a dependency of the major premise, provided it occurs in
    the target or depends on the major premise or its dependencies."""
    major = goal.find(info.major_id)
    major_deps = _transitive_deps(goal, fvars(major.type)) - {info.major_id}
    index_hyp_ids = {
        v.id for v in _current_index_values(goal, info, records) if isinstance(v, FreeVar)
    }

    if cfg.fixing == "*":
        fixed: set[int] = {h.id for h in goal.hyps}
        explicit: set[int] = set()
    elif cfg.fixing:
        explicit = {goal.by_name(n).id for n in cfg.fixing}
        fixed = set(explicit)
    else:
        explicit = set()
        fixed = set()
    for fid in explicit:
        if fid == info.major_id or fid in index_hyp_ids:
            raise FixedHypothesisConflict(
                f"cannot fix {goal.find(fid).name}: the recursor must revert it"
            )
    fixed_closure = set(fixed)
    for fid in list(fixed):
        fixed_closure |= _transitive_deps(goal, fvars(goal.find(fid).type))

    excluded = fixed_closure | major_deps | {info.major_id} | index_hyp_ids
    target_deps = fvars(goal.target)
    revert_set: set[int] = set()
    changed = True
    while changed:
        changed = False
        for h in goal.hyps:
            if h.id in excluded or h.id in revert_set:
                continue
            crit1 = h.id in target_deps
            crit2 = bool(fvars(h.type) & ({info.major_id} | major_deps | revert_set))
            if crit1 or crit2:
                revert_set.add(h.id)
                changed = True

    reverted: list[tuple[int, str]] = []
    st, cur = state, goal
    for h in reversed([h for h in goal.hyps if h.id in revert_set]):
        if not cur.has_id(h.id):
            continue  # dragged along by an earlier revert
        st2, _n = st.revert(cur, h.id)
        new_cur = replacement_of(st2, st, cur)
        moved = [(x.id, x.name) for x in cur.hyps if not new_cur.has_id(x.id)]
        reverted = moved + reverted
        st, cur = st2, new_cur
    return st, cur, reverted


def _current_index_values(goal: Goal, info: MajorPremiseInfo, records) -> list[Expr]:
    """Index arguments of the major premise after stage 1 (all placeholders or
    bare hypotheses)."""
    values: list[Expr] = []
    it = iter(records)
    seen: set[int] = set()
    for k in info.index_args:
        bare = isinstance(k, FreeVar) and k.id in info.index_hyp_names and k.id not in seen
        if bare:
            seen.add(k.id)
            values.append(k)
        else:
            values.append(FreeVar(next(it).placeholder_id))
    return values


# ---------------------------------------------------------------------------
# Stage 3: recursor application with the read-off motive
# ---------------------------------------------------------------------------


@dataclass
class CaseData:
    goal: Goal
    ctor_name: str
    infos: dict[int, NewHypInfo] = field(default_factory=dict)
    arg_meta: dict[int, tuple[str, bool, bool]] = field(default_factory=dict)
    case_index_insts: list[Expr] = field(default_factory=list)
    queue: list[int] = field(default_factory=list)
    reintro_ids: list[int] = field(default_factory=list)
    n_leading: int = 0
    ih_ids: list[int] = field(default_factory=list)


def apply_recursor_with_motive(
    state: TacticState,
    goal: Goal,
    info: MajorPremiseInfo,
    records: list[IndexEquationRecord],
    reverted: list[tuple[int, str]],
) -> tuple[TacticState, list[CaseData]]:
    """Revert the index hypotheses and the major premise so the target reads
    ``∀ i₁ … iₙ (e : F p* i*), T``, read the motive off as ``λ i* e, T`` (no
    unification), apply the recursor, and set up each constructor case."""
    fam = info.family
    index_values = _current_index_values(goal, info, records)
    for v in index_values:
        if not (isinstance(v, FreeVar) and goal.has_id(v.id)):
            raise TacticError("internal: index argument not a hypothesis after stage 1")
    index_hyps = [goal.find(v.id) for v in index_values]
    major = goal.find(info.major_id)

    consumed = {h.id for h in index_hyps} | {info.major_id}
    drag_closure = _dependents_of(goal, consumed)
    dragged = [h for h in goal.hyps if h.id in drag_closure - consumed]
    remaining = [h for h in goal.hyps if h.id not in drag_closure]

    inner = close_pi(dragged, goal.target)
    reverted_names = [(h.id, h.name) for h in dragged] + reverted
    new_target = close_pi(index_hyps + [major], inner)
    motive = close_lambda(index_hyps + [major], inner)

    st, (m,) = state._fresh_metas(1)
    g2 = Goal(m, tuple(remaining), new_target, goal.case_tag)
    args = (
        [FreeVar(h.id) for h in index_hyps]
        + [FreeVar(info.major_id)]
        + [FreeVar(h.id) for h in dragged]
    )
    st = st._commit(goal, [g2], close_lambda(goal.hyps, mk_app(goal_proof(g2), *args)))

    partial = mk_app(Const(f"{fam.name}.rec"), *info.param_args, motive)
    st, case_goals = st.apply_expr(g2, partial)
    if len(case_goals) != len(fam.constructors):
        raise TacticError("recursor application did not produce one goal per constructor")

    cases: list[CaseData] = []
    for ctor, cg in zip(fam.constructors, case_goals):
        st, data = _prepare_case(st, cg, ctor, info, records, reverted_names)
        cases.append(data)
    return st, cases


def _dependents_of(goal: Goal, seeds: set[int]) -> set[int]:
    out = set(seeds)
    for h in goal.hyps:
        if h.id in out:
            continue
        if fvars(h.type) & out:
            out.add(h.id)
    return out


def _prepare_case(
    st: TacticState,
    case_goal: Goal,
    ctor,
    info: MajorPremiseInfo,
    records: list[IndexEquationRecord],
    reverted_names: list[tuple[int, str]],
) -> tuple[TacticState, CaseData]:
    """Introduce constructor arguments, induction hypotheses, re-generalised
    hypotheses and index equations with temporary names, collecting the
    bookkeeping the later stages consume."""
    env = st.env
    short = ctor.name.rsplit(".", 1)[-1]
    cur = replace(case_goal, case_tag=short)
    st = st.update_goal(cur)
    data = CaseData(goal=cur, ctor_name=ctor.name)

    def do_intro(name: str, temporary: bool) -> int:
        nonlocal st, cur
        st2 = st.intro(cur, name=name, temporary=temporary)
        cur2 = replacement_of(st2, st, cur)
        st, cur = st2, cur2
        return cur.hyps[-1].id

    arg_ids: list[int] = []
    for pos, entry in enumerate(ctor.args):
        hid = do_intro(f"_a{pos}", True)
        arg_ids.append(hid)
        data.infos[hid] = NewHypInfo(hid, HypKind.CTOR_ARG, arg_pos=pos)
        data.arg_meta[hid] = (entry.name, entry.named, entry.is_recursive)
        if entry.is_recursive:
            ih_id = do_intro("_ih", True)
            data.infos[ih_id] = NewHypInfo(ih_id, HypKind.IH, arg_pos=pos, rec_arg_id=hid)
            data.ih_ids.append(ih_id)
    for _rid, rname in reverted_names:
        data.reintro_ids.append(do_intro(rname, False))
    for _rec in records:
        eq_id = do_intro("_ieq", True)
        data.infos[eq_id] = NewHypInfo(eq_id, HypKind.INDEX_EQUATION)
        data.queue.append(eq_id)

    # constructor arguments of equation type join the queue after the index
    # equations; a contradictory side condition then closes the case
    for hid in arg_ids:
        if parse_equation(env, cur.find(hid).type) is not None:
            data.queue.append(hid)

    # with nothing left to introduce, the target may still be the motive
    # applied to the case's indices; show it reduced
    from .kernel.expr import beta_head

    reduced = beta_head(cur.target)
    if reduced is not cur.target:
        cur = replace(cur, target=reduced)
        st = st.update_goal(cur)

    data.case_index_insts = [
        instantiate_all(inst, list(info.param_args) + [FreeVar(i) for i in arg_ids])
        for inst in ctor.index_insts
    ]
    data.n_leading = len(reverted_names)
    data.goal = cur
    return st, data


# ---------------------------------------------------------------------------
# Stage 4: simplification of induction hypotheses
# ---------------------------------------------------------------------------


def simplify_ih(
    state: TacticState,
    goal: Goal,
    ih_id: int,
    records: list[IndexEquationRecord],
    n_leading: int,
) -> tuple[TacticState, Goal]:
    """Replace the IH's leading generalised binders by fresh metavariables,
    unify each index equation's sides, specialise the IH to whatever got a
    unique solution, and drop equation arguments whose sides became
    definitionally equal.  Binders without a unique solution are kept, along
    with the equations depending on them."""
    if not records:
        return state, goal
    env = state.env
    ih = goal.find(ih_id)
    k = len(records)

    st, meta_ids = state._fresh_metas(n_leading)
    cur = ih.type
    for i in range(n_leading):
        cur = whnf(env, cur, Transparency.REDUCIBLE)
        if not isinstance(cur, Pi):
            return state, goal  # unexpected shape; leave the IH alone
        cur = instantiate(cur.body, Meta(meta_ids[i]))
    eq_types: list[Expr] = []
    for _j in range(k):
        cur = whnf(env, cur, Transparency.REDUCIBLE)
        if not isinstance(cur, Pi):
            return state, goal
        eq_types.append(cur.binder_type)
        cur = instantiate(cur.body, Const("unit.star"))  # equations are nondependent

    sigma: dict[int, Expr] = {}
    remaining = set(meta_ids)
    for et in eq_types:
        eq = parse_equation(env, instantiate_metas(et, sigma))
        if eq is None:
            continue
        outcome = unify(env, eq.lhs, eq.rhs, remaining, Transparency.REDUCIBLE)
        if outcome.kind is not UnifyResult.FAILURE:
            sigma.update(outcome.assignment)
            remaining -= set(outcome.assignment)
    if not sigma:
        return state, goal

    b = Binders()
    values: list[Expr] = []
    cur = ih.type
    changed = False
    for i in range(n_leading):
        cur = whnf(env, cur, Transparency.REDUCIBLE)
        assert isinstance(cur, Pi)
        if meta_ids[i] in sigma:
            v: Expr = sigma[meta_ids[i]]
            changed = True
        else:
            v = b.add(cur.hint, cur.binder_type)
        values.append(v)
        cur = instantiate(cur.body, v)
    for _j in range(k):
        cur = whnf(env, cur, Transparency.REDUCIBLE)
        assert isinstance(cur, Pi)
        et = cur.binder_type
        eq = parse_equation(env, et)
        value: Expr | None = None
        if eq is not None and not has_meta(et):
            types_ok = (not eq.heterogeneous) or is_def_eq(
                env, eq.lhs_type, eq.rhs_type, Transparency.ALL
            )
            if types_ok and is_def_eq(env, eq.lhs, eq.rhs, Transparency.ALL):
                value = (
                    mk_app(Const("heq.refl"), eq.lhs_type, eq.lhs)
                    if eq.heterogeneous
                    else mk_app(Const("eq.refl"), eq.lhs_type, eq.lhs)
                )
                changed = True
        if value is None:
            value = b.add("e", et)
        values.append(value)
        cur = instantiate(cur.body, value)
    if not changed:
        return state, goal

    new_type = b.pis(cur)
    new_value = b.lams(mk_app(FreeVar(ih_id), *values))
    st2, (m,) = st._fresh_metas(1)
    new_hyps = tuple(replace(h, type=new_type) if h.id == ih_id else h for h in goal.hyps)
    g2 = Goal(m, new_hyps, goal.target, goal.case_tag)
    args = [FreeVar(h.id) if h.id != ih_id else new_value for h in goal.hyps]
    st3 = st2._commit(goal, [g2], close_lambda(goal.hyps, mk_app(Meta(m), *args)))
    return st3, g2


# ---------------------------------------------------------------------------
# The tactic
# ---------------------------------------------------------------------------


def induction_tactic(
    state: TacticState, cfg: InductionConfig, goal_meta: int | None = None
) -> TacticState:
    return _run_pipeline(state, cfg, goal_meta, drop_ihs=False)


def cases_tactic(
    state: TacticState, cfg: InductionConfig, goal_meta: int | None = None
) -> TacticState:
    """Case splitting: the identical pipeline, then the generated induction
    hypotheses are cleared before naming."""
    return _run_pipeline(state, cfg, goal_meta, drop_ihs=True)


def _run_pipeline(
    state: TacticState, cfg: InductionConfig, goal_meta: int | None, drop_ihs: bool
) -> TacticState:
    goal = state.goal(goal_meta)
    major = goal.by_name(cfg.major)
    info = analyze_major_premise(state, goal, major.id)
    st, cur, records = generalize_complex_indices(state, goal, info)
    st, cur, reverted = generalize_hypotheses(st, cur, cfg, info, records)
    st, cases = apply_recursor_with_motive(st, cur, info, records, reverted)

    registry = NameHintRegistry(st.env)
    for data in cases:
        g: Goal | None = data.goal
        st, g, _log = qnify_all(st, g, list(data.queue))
        if g is None:
            continue  # contradictory index equations: closed, never surfaced
        for ih_id in data.ih_ids:
            if g.has_id(ih_id):
                st, g = simplify_ih(st, g, ih_id, records, data.n_leading)
        if drop_ihs:
            for ih_id in data.ih_ids:
                if g.has_id(ih_id):
                    st2 = st.clear(g, ih_id)
                    g = replacement_of(st2, st, g)
                    st = st2
        st, g = _reposition_reintros(st, g, data.reintro_ids)
        nc = NamingContext(
            env=st.env,
            registry=registry,
            major_name=info.major_name,
            index_args=list(info.index_args),
            index_hyp_names=dict(info.index_hyp_names),
            index_hyp_types=dict(info.index_hyp_types),
            ctor_name=data.ctor_name,
            ih_count=len(data.ih_ids),
        )
        user = None
        if cfg.user_names:
            user = cfg.user_names.get(g.case_tag or "")
        st = finalize_names(st, g, user, nc, data.infos, data.case_index_insts, data.arg_meta)
    return st


def _reposition_reintros(
    state: TacticState, goal: Goal, reintro_ids: list[int]
) -> tuple[TacticState, Goal]:
    """Move each re-introduced hypothesis up to sit right after the last
    earlier hypothesis with the same type, so displays group naturally.  The
    jumped-over hypotheses were introduced later than nothing the moved one
    depends on: they came after it in the minor premise, so the move is always
    scope-safe."""
    st, g = state, goal
    for rid in reintro_ids:
        if not g.has_id(rid):
            continue
        h = g.find(rid)
        pos = g.index_of(rid)
        same = [x for x in g.hyps[:pos] if x.type == h.type]
        if not same:
            continue
        anchor = same[-1]
        if g.index_of(anchor.id) == pos - 1:
            continue
        st2 = st.reorder_after(g, rid, anchor.id)
        g = replacement_of(st2, st, g)
        st = st2
    return st, g
