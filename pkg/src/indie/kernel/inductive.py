"""Validation of inductive declarations and generation of their support
machinery: the recursor with its iota rule, per-constructor discriminators,
injectivity and no-confusion lemmas, and the sizeof measure with its
strictness lemmas (used by the cycle rule).

All generated declarations are kernel-checked before being added to the
environment.
"""

from __future__ import annotations

from .build import Binders, open_telescope
from .decl import (
    Constructor,
    Declaration,
    InductiveDecl,
    TelescopeEntry,
    Transparency,
    telescope_pis,
)
from .env import Environment, KernelError, RecursorInfo
from .expr import (
    BoundVar,
    Const,
    Expr,
    Pi,
    SORT,
    instantiate_all,
    iter_subterms,
    lift,
    mk_app,
    unfold_app,
)
from .reduce import is_def_eq, whnf
from .typecheck import check_declaration, infer_type


class PositivityError(KernelError):
    pass


class ParameterMismatchError(KernelError):
    pass


class NestedOrMutualError(KernelError):
    pass


def _short(name: str) -> str:
    return name.rsplit(".", 1)[-1]


def _occurs(e: Expr, name: str) -> bool:
    return any(isinstance(s, Const) and s.name == name for s in iter_subterms(e))


def validate_inductive(env: Environment, d: InductiveDecl) -> InductiveDecl:
    """Check the inductive-declaration invariants and return the declaration
    with recursive-argument flags computed.  Typechecking of the constituent
    expressions runs against a scratch copy of the environment with the type
    itself added, so a failed validation leaves ``env`` untouched."""
    if env.has(d.name):
        raise KernelError(f"duplicate declaration: {d.name}")
    scratch = Environment(
        decls=dict(env.decls),
        inductives=dict(env.inductives),
        constructor_of=dict(env.constructor_of),
        recursors=dict(env.recursors),
    )
    for entry in list(d.params) + list(d.indices):
        if _occurs(entry.type, d.name):
            raise NestedOrMutualError(f"{d.name} occurs in its own parameter/index types")

    b = Binders()
    param_fvs = open_telescope(b, d.params, [])
    idx_fvs = open_telescope(b, d.indices, list(param_fvs))
    ctx = b.types()
    for fid, _h, ty in b.entries:
        if not is_def_eq(scratch, infer_type(scratch, ctx, ty), SORT, Transparency.ALL):
            raise KernelError(f"{d.name}: telescope entry type is not a sort")

    scratch.add(Declaration(d.name, telescope_pis(d.params + d.indices, SORT)))

    new_ctors: list[Constructor] = []
    for ctor in d.constructors:
        cb = Binders()
        cb_params = open_telescope(cb, d.params, [])
        arg_fvs: list[Expr] = []
        entries: list[TelescopeEntry] = []
        for entry in ctor.args:
            ty = instantiate_all(entry.type, cb_params + arg_fvs)
            is_rec = _classify_arg(d, ty, cb_params)
            entries.append(TelescopeEntry(entry.name, entry.type, entry.named, is_rec))
            arg_fvs.append(cb.add(entry.name, ty))
        if len(ctor.index_insts) != d.num_indices:
            raise KernelError(
                f"{ctor.name}: got {len(ctor.index_insts)} index instantiations, "
                f"expected {d.num_indices}"
            )
        for inst in ctor.index_insts:
            if _occurs(inst, d.name):
                raise PositivityError(f"{ctor.name}: {d.name} occurs in an index instantiation")
        new_ctor = Constructor(ctor.name, tuple(entries), ctor.index_insts)
        check_declaration(scratch, ctor.name, _constructor_type(d, new_ctor), None)
        new_ctors.append(new_ctor)
    return InductiveDecl(d.name, d.params, d.indices, tuple(new_ctors))


def _classify_arg(d: InductiveDecl, ty: Expr, param_fvs: list) -> bool:
    """Returns whether the (opened) constructor argument type is a recursive
    occurrence, raising for every shape we reject."""
    if not _occurs(ty, d.name):
        return False
    if isinstance(ty, Pi):
        raise PositivityError(
            f"{d.name}: recursive constructor arguments may not be function-typed"
        )
    head, targs = unfold_app(ty)
    if isinstance(head, Const) and head.name == d.name:
        if len(targs) != d.num_params + d.num_indices:
            raise PositivityError(f"{d.name}: recursive occurrence is not fully applied")
        for j in range(d.num_params):
            if targs[j] != param_fvs[j]:
                raise ParameterMismatchError(
                    f"{d.name}: parameters must be passed unchanged, in order"
                )
        for idx_arg in targs[d.num_params :]:
            if _occurs(idx_arg, d.name):
                raise PositivityError(f"{d.name}: occurs inside an index of itself")
        return True
    if isinstance(head, Const):
        raise NestedOrMutualError(
            f"{d.name}: nested occurrence under {head.name} (nested/mutual types are out of scope)"
        )
    raise PositivityError(f"{d.name}: non-positive occurrence in constructor argument")


def _constructor_type(d: InductiveDecl, ctor: Constructor) -> Expr:
    total = d.num_params + len(ctor.args)
    concl = mk_app(
        Const(d.name),
        *[BoundVar(total - 1 - j) for j in range(d.num_params)],
        *ctor.index_insts,
    )
    return telescope_pis(d.params + ctor.args, concl)


def generate_recursor(d: InductiveDecl) -> tuple[Declaration, RecursorInfo]:
    """Recursor type per the standard schema: parameters, motive over indices
    and scrutinee, one minor premise per constructor (an induction hypothesis
    immediately after each recursive argument), then indices and major
    premise."""
    b = Binders()
    param_fvs = open_telescope(b, d.params, [])

    mb = Binders()
    m_idx = open_telescope(mb, d.indices, list(param_fvs))
    mb.add("t", mk_app(Const(d.name), *param_fvs, *m_idx))
    motive_ty = mb.pis(SORT)
    M = b.add("M", motive_ty)

    for ctor in d.constructors:
        cb = Binders()
        arg_fvs: list[Expr] = []
        for entry in ctor.args:
            ty = instantiate_all(entry.type, param_fvs + arg_fvs)
            fv = cb.add(entry.name, ty)
            arg_fvs.append(fv)
            if entry.is_recursive:
                _, targs = unfold_app(ty)
                cb.add("ih", mk_app(M, *targs[d.num_params :], fv))
        insts = [instantiate_all(j, param_fvs + arg_fvs) for j in ctor.index_insts]
        concl = mk_app(M, *insts, mk_app(Const(ctor.name), *param_fvs, *arg_fvs))
        short = _short(ctor.name)
        b.add(short[:1].upper() + short[1:], cb.pis(concl))

    idx_fvs = open_telescope(b, d.indices, list(param_fvs))
    major = b.add("t", mk_app(Const(d.name), *param_fvs, *idx_fvs))
    rec_type = b.pis(mk_app(M, *idx_fvs, major))
    info = RecursorInfo(d.name, d.num_params, len(d.constructors), d.num_indices)
    return Declaration(f"{d.name}.rec", rec_type), info


def declare_inductive(env: Environment, d: InductiveDecl) -> InductiveDecl:
    """Validate, then register the type, its constructors and its recursor.
    Support lemmas are generated here too once the prelude is available."""
    vd = validate_inductive(env, d)
    env.add(Declaration(vd.name, telescope_pis(vd.params + vd.indices, SORT)))
    for ctor in vd.constructors:
        env.add(Declaration(ctor.name, _constructor_type(vd, ctor)))
        env.constructor_of[ctor.name] = vd.name
    rec_decl, info = generate_recursor(vd)
    env.inductives[vd.name] = vd
    env.recursors[rec_decl.name] = info
    check_declaration(env, rec_decl.name, rec_decl.type, None)
    env.add(rec_decl)
    generate_support(env, vd.name)
    return vd


# ---------------------------------------------------------------------------
# Generated support machinery
# ---------------------------------------------------------------------------


def _rec_arg_indices(d: InductiveDecl, ctor: Constructor, param_fvs, arg_fvs, pos: int):
    """Index instantiation of the recursive argument at ``pos`` (opened)."""
    ty = instantiate_all(ctor.args[pos].type, list(param_fvs) + list(arg_fvs[:pos]))
    _, targs = unfold_app(ty)
    return targs[d.num_params :]


def _minor_value(
    d: InductiveDecl,
    ctor: Constructor,
    param_fvs: list[Expr],
    motive: Expr,
    body_fn,
) -> Expr:
    """Build ``λ args (and interleaved ihs), body_fn(arg_fvs, ih_fvs)``."""
    cb = Binders()
    arg_fvs: list[Expr] = []
    ih_fvs: list[Expr] = []
    for i, entry in enumerate(ctor.args):
        ty = instantiate_all(entry.type, param_fvs + arg_fvs)
        fv = cb.add(entry.name, ty)
        arg_fvs.append(fv)
        if entry.is_recursive:
            _, targs = unfold_app(ty)
            ih_fvs.append(cb.add("ih", mk_app(motive, *targs[d.num_params :], fv)))
    return cb.lams(body_fn(arg_fvs, ih_fvs))


def _sort_motive(d: InductiveDecl, param_fvs: list[Expr], body: Expr) -> Expr:
    """``λ indices t, body`` with a constant body (a Sort-valued motive)."""
    mb = Binders()
    idx = open_telescope(mb, d.indices, list(param_fvs))
    mb.add("t", mk_app(Const(d.name), *param_fvs, *idx))
    return mb.lams(body)


def generate_support(env: Environment, name: str) -> None:
    """Generate discriminators, no-confusion/injectivity lemmas and sizeof for
    an inductive, as far as the prerequisites (prelude types) exist.  Runs
    idempotently; the prelude loader re-invokes it once the prelude is done."""
    d = env.inductives[name]
    if env.has("unit") and env.has("false"):
        _generate_discriminators(env, d)
        if env.has("eq") and env.has("unit.star"):
            _generate_no_confusion(env, d)
            if env.has("heq") and d.num_indices == 0:
                _generate_injectivity(env, d)
    if env.has("nat") and env.has("add"):
        _generate_sizeof(env, d)
        if all(env.has(n) for n in ("lt", "le_trans", "le_add_left", "le_add_right")):
            _generate_sizeof_lt(env, d)


def _add_checked(env: Environment, decl: Declaration) -> None:
    check_declaration(env, decl.name, decl.type, decl.body)
    env.add(decl)


def discriminator_name(ind: str, ctor: str) -> str:
    return f"{ind}.is_{_short(ctor)}"


def _generate_discriminators(env: Environment, d: InductiveDecl) -> None:
    for target in d.constructors:
        dname = discriminator_name(d.name, target.name)
        if env.has(dname):
            continue
        b = Binders()
        param_fvs = open_telescope(b, d.params, [])
        idx_fvs = open_telescope(b, d.indices, list(param_fvs))
        t = b.add("t", mk_app(Const(d.name), *param_fvs, *idx_fvs))
        motive = _sort_motive(d, param_fvs, SORT)
        minors = [
            _minor_value(
                d,
                c,
                param_fvs,
                motive,
                lambda a, i, hit=(c.name == target.name): Const("unit") if hit else Const("false"),
            )
            for c in d.constructors
        ]
        body = mk_app(Const(f"{d.name}.rec"), *param_fvs, motive, *minors, *idx_fvs, t)
        ty = b.pis(SORT)
        _add_checked(env, Declaration(dname, ty, b.lams(body), reducible=True))


def no_confusion_name(ind: str, c1: str, c2: str) -> str:
    return f"{ind}.no_conf_{_short(c1)}_{_short(c2)}"


def _generate_no_confusion(env: Environment, d: InductiveDecl) -> None:
    """Pairwise ``eq (C ...) (D ...) → false`` lemmas.  Statable only for
    non-indexed families (with indices the two sides have different types);
    the conflict rule falls back to an inline transport for those."""
    if d.num_indices != 0:
        return
    for c1 in d.constructors:
        for c2 in d.constructors:
            if c1.name == c2.name:
                continue
            lname = no_confusion_name(d.name, c1.name, c2.name)
            if env.has(lname):
                continue
            b = Binders()
            param_fvs = open_telescope(b, d.params, [])
            x_fvs = _open_ctor_args(b, d, c1, param_fvs, prefix="x")
            y_fvs = _open_ctor_args(b, d, c2, param_fvs, prefix="y")
            t_applied = mk_app(Const(d.name), *param_fvs)
            lhs = mk_app(Const(c1.name), *param_fvs, *x_fvs)
            rhs = mk_app(Const(c2.name), *param_fvs, *y_fvs)
            e = b.add("e", mk_app(Const("eq"), t_applied, lhs, rhs))
            body = conflict_transport(env, t_applied, lhs, rhs, e)
            _add_checked(env, Declaration(lname, b.pis(Const("false")), b.lams(body)))


def injectivity_name(ind: str, ctor: str) -> str:
    return f"{ind}.inj_{_short(ctor)}"


def _generate_injectivity(env: Environment, d: InductiveDecl) -> None:
    """Per-constructor injectivity in continuation form, for non-indexed
    families: ``eq (C x*) (C y*) → (heq x₁ y₁ → … → V) → V``."""
    for ctor in d.constructors:
        if not ctor.args:
            continue
        lname = injectivity_name(d.name, ctor.name)
        if env.has(lname):
            continue
        b = Binders()
        param_fvs = open_telescope(b, d.params, [])
        x_fvs = _open_ctor_args(b, d, ctor, param_fvs, prefix="x")
        y_fvs = _open_ctor_args(b, d, ctor, param_fvs, prefix="y")
        v = b.add("V", SORT)
        t_applied = mk_app(Const(d.name), *param_fvs)
        lhs = mk_app(Const(ctor.name), *param_fvs, *x_fvs)
        rhs = mk_app(Const(ctor.name), *param_fvs, *y_fvs)
        e = b.add("e", mk_app(Const("eq"), t_applied, lhs, rhs))
        body = injection_transport(env, t_applied, lhs, rhs, e, v)
        chain = _heq_chain_type(env, d, ctor, param_fvs, x_fvs, y_fvs, v)
        ty = b.pis(Pi("f", chain, v))
        _add_checked(env, Declaration(lname, ty, b.lams(body)))


def _open_ctor_args(b: Binders, d: InductiveDecl, ctor: Constructor, param_fvs, prefix: str):
    fvs: list[Expr] = []
    for i, entry in enumerate(ctor.args):
        ty = instantiate_all(entry.type, list(param_fvs) + fvs)
        fvs.append(b.add(f"{prefix}{i + 1}", ty))
    return fvs


def _arg_types(env: Environment, ctx_args: list[Expr], d: InductiveDecl, ctor: Constructor, param_fvs):
    return [
        instantiate_all(entry.type, list(param_fvs) + ctx_args[:i])
        for i, entry in enumerate(ctor.args)
    ]


def _heq_chain_type(env, d, ctor, param_fvs, x_fvs, y_fvs, v: Expr) -> Expr:
    """``heq x₁ y₁ → … → heq xₙ yₙ → v`` (nondependent arrows)."""
    x_tys = _arg_types(env, list(x_fvs), d, ctor, param_fvs)
    y_tys = _arg_types(env, list(y_fvs), d, ctor, param_fvs)
    body = v
    for xt, x, yt, y in reversed(list(zip(x_tys, x_fvs, y_tys, y_fvs))):
        body = Pi("h", mk_app(Const("heq"), xt, x, yt, y), lift_nondep(body))
    return body


def lift_nondep(e: Expr) -> Expr:
    """Body of a nondependent Pi: shift so the new binder is unused."""
    return lift(e, 1)


# -- inline transports (shared by the generated lemmas and the qnify rules) --


def conflict_transport(
    env: Environment,
    type_applied: Expr,
    lhs: Expr,
    rhs: Expr,
    eq_proof: Expr,
) -> Expr:
    """Proof of ``false`` from ``eq_proof : eq A lhs rhs`` where lhs and rhs
    are applications of distinct constructors.  Transports ``unit.star``
    through the lhs-discriminator."""
    head, _ = unfold_app(whnf(env, lhs, Transparency.REDUCIBLE))
    assert isinstance(head, Const)
    ind_name = env.constructor_of[head.name]
    d = env.inductive(ind_name)
    _, type_args = unfold_app(whnf(env, type_applied, Transparency.REDUCIBLE))
    params = type_args[: d.num_params]
    idxs = type_args[d.num_params :]
    disc = Const(discriminator_name(ind_name, head.name))
    mb = Binders()
    z = mb.add("z", type_applied)
    mb.add("e", mk_app(Const("eq"), type_applied, lhs, z))
    motive = mb.lams(mk_app(disc, *params, *idxs, z))
    return mk_app(Const("eq.rec"), type_applied, lhs, motive, Const("unit.star"), rhs, eq_proof)


def injection_transport(
    env: Environment,
    type_applied: Expr,
    lhs: Expr,
    rhs: Expr,
    eq_proof: Expr,
    target: Expr,
) -> Expr:
    """Term of type ``(heq x₁ y₁ → … → heq xₙ yₙ → target) → target`` from
    ``eq_proof : eq A lhs rhs`` with both sides applications of the same
    constructor.  Works for indexed families too (the continuation type uses
    heterogeneous equality throughout)."""
    lhs_w = whnf(env, lhs, Transparency.REDUCIBLE)
    head, largs = unfold_app(lhs_w)
    assert isinstance(head, Const)
    ind_name = env.constructor_of[head.name]
    d = env.inductive(ind_name)
    ctor = env.constructor_decl(head.name)
    _, type_args = unfold_app(whnf(env, type_applied, Transparency.REDUCIBLE))
    params = type_args[: d.num_params]
    x_args = largs[d.num_params :]
    x_tys = _arg_types(env, x_args, d, ctor, params)

    def chain_for(a_fvs: list[Expr], a_tys: list[Expr], v: Expr) -> Expr:
        body = v
        for xt, x, at, a in reversed(list(zip(x_tys, x_args, a_tys, a_fvs))):
            body = Pi("h", mk_app(Const("heq"), xt, x, at, a), lift_nondep(body))
        return body

    # motive: λ z _e, T.rec params (λ i t, Sort) minors idx z
    sort_motive = _sort_motive(d, params, SORT)
    minors = []
    for c in d.constructors:
        if c.name == head.name:

            def body_fn(arg_fvs, ih_fvs):
                a_tys = _arg_types(env, list(arg_fvs), d, ctor, params)
                return Pi("f", chain_for(list(arg_fvs), a_tys, target), lift_nondep(target))

            minors.append(_minor_value(d, c, params, sort_motive, body_fn))
        else:
            minors.append(_minor_value(d, c, params, sort_motive, lambda a, i: target))
    mb = Binders()
    z = mb.add("z", type_applied)
    mb.add("e", mk_app(Const("eq"), type_applied, lhs, z))
    noconfty = mk_app(
        Const(f"{d.name}.rec"),
        *params,
        sort_motive,
        *minors,
        *type_args[d.num_params :],
        z,
    )
    motive = mb.lams(noconfty)
    # mrefl : (heq x₁ x₁ → … → target) → target
    fb = Binders()
    f = fb.add("f", chain_for(x_args, x_tys, target))
    refls = [mk_app(Const("heq.refl"), xt, x) for xt, x in zip(x_tys, x_args)]
    mrefl = fb.lams(mk_app(f, *refls))
    return mk_app(Const("eq.rec"), type_applied, lhs, motive, mrefl, rhs, eq_proof)


# -- sizeof ------------------------------------------------------------------


def sizeof_name(ind: str) -> str:
    return f"{ind}.sizeof"


def sizeof_lt_name(ind: str, ctor: str, pos: int) -> str:
    return f"{ind}.sizeof_lt_{_short(ctor)}_{pos}"


def _generate_sizeof(env: Environment, d: InductiveDecl) -> None:
    sname = sizeof_name(d.name)
    if env.has(sname):
        return
    b = Binders()
    param_fvs = open_telescope(b, d.params, [])
    idx_fvs = open_telescope(b, d.indices, list(param_fvs))
    t = b.add("t", mk_app(Const(d.name), *param_fvs, *idx_fvs))
    motive = _sort_motive(d, param_fvs, Const("nat"))

    def count_body(arg_fvs, ih_fvs):
        acc: Expr = Const("nat.zero")
        for ih in ih_fvs:
            acc = mk_app(Const("add"), acc, ih)
        return mk_app(Const("nat.succ"), acc)

    minors = [_minor_value(d, c, param_fvs, motive, count_body) for c in d.constructors]
    body = mk_app(Const(f"{d.name}.rec"), *param_fvs, motive, *minors, *idx_fvs, t)
    ty = b.pis(Const("nat"))
    _add_checked(env, Declaration(sname, ty, b.lams(body), reducible=True))
    env.sizeof_done.add(d.name)


def _generate_sizeof_lt(env: Environment, d: InductiveDecl) -> None:
    """For each constructor C and recursive argument position r, the lemma
    ``sizeof aᵣ < sizeof (C a₁ … aₙ)``, proved by chaining prelude order
    lemmas along the sum the sizeof minor premise computes."""
    sname = sizeof_name(d.name)
    for ctor in d.constructors:
        rec_positions = [i for i, e in enumerate(ctor.args) if e.is_recursive]
        if not rec_positions:
            continue
        for pos in rec_positions:
            lname = sizeof_lt_name(d.name, ctor.name, pos)
            if env.has(lname):
                continue
            b = Binders()
            param_fvs = open_telescope(b, d.params, [])
            arg_fvs = _open_ctor_args(b, d, ctor, param_fvs, prefix="a")

            def size_of(p: int) -> Expr:
                rec_idx = _rec_arg_indices(d, ctor, param_fvs, arg_fvs, p)
                return mk_app(Const(sname), *param_fvs, *rec_idx, arg_fvs[p])

            sizes = {p: size_of(p) for p in rec_positions}
            accs: list[Expr] = [Const("nat.zero")]
            for p in rec_positions:
                accs.append(mk_app(Const("add"), accs[-1], sizes[p]))
            k = rec_positions.index(pos)
            s = sizes[pos]
            term = mk_app(Const("le_add_left"), accs[k], s)
            for j in range(k + 1, len(rec_positions)):
                step = mk_app(Const("le_add_right"), accs[j], sizes[rec_positions[j]])
                term = mk_app(Const("le_trans"), s, accs[j], accs[j + 1], term, step)
            insts = [instantiate_all(ji, param_fvs + arg_fvs) for ji in ctor.index_insts]
            whole = mk_app(
                Const(sname),
                *param_fvs,
                *insts,
                mk_app(Const(ctor.name), *param_fvs, *arg_fvs),
            )
            stmt = mk_app(Const("lt"), s, whole)
            _add_checked(env, Declaration(lname, b.pis(stmt), b.lams(term)))
