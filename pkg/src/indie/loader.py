"""Turning parsed source files into environment state and running proof
scripts.  ``Library`` owns an environment plus the name-hint registry and
exposes the batch checker the CLI and the session server build on."""

from __future__ import annotations

from dataclasses import dataclass, field

from .induction import InductionConfig, cases_tactic, induction_tactic
from .kernel.decl import (
    Constructor,
    Declaration,
    InductiveDecl,
    TelescopeEntry,
    Transparency,
)
from .kernel.env import Environment, KernelError, TypeError_
from .kernel.expr import (
    Const,
    Expr,
    FreeVar,
    Pi,
    SORT,
    Sort,
    abstract_fvar,
    instantiate,
    unfold_app,
)
from .kernel.fresh import scratch_id
from .kernel.inductive import ParameterMismatchError, declare_inductive
from .kernel.typecheck import check_declaration
from .naming import NameHintRegistry
from .parser import (
    ConvError,
    ParseError,
    Scope,
    SConstant,
    SDef,
    SHints,
    SInductive,
    SLemma,
    SourceFile,
    TacticCall,
    parse_file,
    to_expr,
)
from .printer import pretty_goal
from .proofstate import Goal, TacticError, TacticState, new_state


class LoadError(Exception):
    pass


@dataclass
class GoalDump:
    tactic: str
    goals: list[tuple[str, str]]  # (case tag or "", pretty display)


@dataclass
class LemmaResult:
    name: str
    status: str  # "proved" | "open" | "error"
    message: str = ""
    dumps: list[GoalDump] = field(default_factory=list)


@dataclass
class Report:
    results: list[LemmaResult] = field(default_factory=list)

    @property
    def all_proved(self) -> bool:
        return all(r.status == "proved" for r in self.results)


class Library:
    def __init__(self, env: Environment | None = None):
        self.env = env if env is not None else Environment()
        self.registry = NameHintRegistry(self.env)

    def clone(self) -> "Library":
        """Independent copy sharing no mutable state (cheap: dict copies)."""
        env = Environment(
            decls=dict(self.env.decls),
            inductives=dict(self.env.inductives),
            constructor_of=dict(self.env.constructor_of),
            recursors=dict(self.env.recursors),
            sizeof_done=set(self.env.sizeof_done),
            hint_lists=dict(self.env.hint_lists),
            hint_containers=set(self.env.hint_containers),
            source_items=list(self.env.source_items),
        )
        return Library(env)

    # -- declarations ---------------------------------------------------------

    def _scope(self) -> Scope:
        return Scope(self.env)

    def add_constant(self, name: str, ty_ast) -> None:
        ty = to_expr(ty_ast, self._scope())
        check_declaration(self.env, name, ty, None)
        self.env.add(Declaration(name, ty))
        self.env.source_items.append(("constant", name))

    def add_definition(self, name: str, ty_ast, body_ast, reducible: bool) -> None:
        ty = to_expr(ty_ast, self._scope())
        body = to_expr(body_ast, self._scope())
        check_declaration(self.env, name, ty, body)
        self.env.add(Declaration(name, ty, body, reducible=reducible))
        self.env.source_items.append(("def", name))
        self.generate_all_support()

    def add_inductive(self, item: SInductive) -> None:
        d = self._build_inductive(item)
        declare_inductive(self.env, d)
        self.env.source_items.append(("inductive", item.name))
        self.generate_all_support()

    def generate_all_support(self) -> None:
        """Idempotent sweep: generate whatever support machinery has its
        prerequisites available by now (the prelude declares the types the
        generators compose, so early inductives catch up late)."""
        from .kernel.inductive import generate_support

        for name in list(self.env.inductives):
            generate_support(self.env, name)

    def _build_inductive(self, item: SInductive) -> InductiveDecl:
        scope = self._scope()
        opened: list[tuple[str, FreeVar, Expr, bool]] = []

        def open_binder(name: str, ty: Expr, named: bool) -> FreeVar:
            fv = FreeVar(scratch_id())
            scope.binders.append((name, fv))
            scope.ctx[fv.id] = ty
            opened.append((name, fv, ty, named))
            return fv

        for names, ty_ast in item.params:
            for n in names:
                open_binder(n, to_expr(ty_ast, scope), named=True)
        n_params = len(opened)

        # index telescope from the arity term (binders and arrows up to Type)
        if item.arity is not None:
            arity = to_expr(item.arity, scope)
        else:
            arity = SORT
        while isinstance(arity, Pi):
            named = arity.hint not in ("_", "")
            name = arity.hint if named else "a"
            fv = open_binder(name, arity.binder_type, named)
            arity = instantiate(arity.body, fv)
        if not isinstance(arity, Sort):
            raise LoadError(f"inductive {item.name}: arity must end in Type")

        qualified = item.name
        # constructors see the inductive itself; use a scratch environment
        scratch = Environment(
            decls=dict(self.env.decls),
            inductives=dict(self.env.inductives),
            constructor_of=dict(self.env.constructor_of),
            recursors=dict(self.env.recursors),
        )
        from .kernel.decl import telescope_pis

        params_tel = _telescope_of(opened[:n_params], [])
        indices_tel = _telescope_of(opened[n_params:], [f for _n, f, _t, _x in opened[:n_params]])
        scratch.add(Declaration(qualified, telescope_pis(params_tel + indices_tel, SORT)))

        param_fvs = [fv for _n, fv, _t, _x in opened[:n_params]]
        ctors: list[Constructor] = []
        # constructors see the parameters, but never the index binders
        cscope = Scope(scratch, ctx={fv.id: t for _n, fv, t, _x in opened[:n_params]})
        cscope.binders = [(n, fv) for n, fv, _t, _x in opened[:n_params]]
        for cname, cty_ast in item.ctors:
            cty = to_expr(cty_ast, cscope)
            centries: list[tuple[str, FreeVar, Expr, bool]] = []
            cur = cty
            while isinstance(cur, Pi):
                named = cur.hint not in ("_", "")
                fv = FreeVar(scratch_id())
                centries.append((cur.hint, fv, cur.binder_type, named))
                cur = instantiate(cur.body, fv)
            head, args = unfold_app(cur)
            if not (isinstance(head, Const) and head.name == qualified):
                raise LoadError(
                    f"constructor {cname}: conclusion must be an application of {item.name}"
                )
            if args[: len(param_fvs)] != param_fvs:
                raise ParameterMismatchError(
                    f"constructor {cname}: parameters must be passed unchanged, in order"
                )
            insts = args[len(param_fvs) :]
            all_fvs = param_fvs + [fv for _n, fv, _t, _x in centries]
            args_tel = _telescope_of(centries, param_fvs)
            insts_abs = tuple(_abstract_over(i, all_fvs) for i in insts)
            ctors.append(Constructor(f"{qualified}.{cname}", args_tel, insts_abs))
        return InductiveDecl(qualified, params_tel, indices_tel, tuple(ctors))

    def register_hints(self, item: SHints) -> None:
        head = self.env.resolve(item.head) or item.head
        if item.container:
            self.registry.register_container(head)
        else:
            self.registry.register(head, list(item.names))
        self.env.source_items.append(("hints", item.head, item.names, item.container))

    # -- lemmas and tactic scripts ---------------------------------------------

    def start_lemma(self, ty_ast) -> TacticState:
        ty = to_expr(ty_ast, self._scope())
        check_declaration(self.env, "_goal", ty, None)
        return new_state(self.env, ty)

    def run_tactic(self, state: TacticState, tac: TacticCall, goal_meta: int | None = None) -> TacticState:
        goal = state.goal(goal_meta)
        if tac.name == "intro":
            return state.intro(goal, tac.ident)
        if tac.name == "exact":
            e = to_expr(tac.term, self._goal_scope(goal))
            return state.exact(goal, e)
        if tac.name == "apply":
            e = to_expr(tac.term, self._goal_scope(goal))
            st, _ = state.apply_expr(goal, e)
            return st
        if tac.name == "clear":
            return state.clear(goal, goal.by_name(tac.ident).id)
        if tac.name == "rename":
            return state.rename(goal, goal.by_name(tac.ident).id, tac.ident2)
        if tac.name in ("induction'", "cases'"):
            cfg = InductionConfig(
                major=tac.ident,
                fixing=tac.fixing,
                user_names={t: list(ns) for t, ns in tac.with_names} if tac.with_names else None,
            )
            fn = induction_tactic if tac.name == "induction'" else cases_tactic
            return fn(state, cfg, goal_meta)
        raise TacticError(f"unsupported tactic {tac.name!r}")

    def _goal_scope(self, goal: Goal) -> Scope:
        return Scope(
            self.env,
            fvar_names=[(h.name, h.id) for h in goal.hyps],
            ctx=goal.ctx_types(),
        )

    def run_lemma(self, item: SLemma, golden: bool = False) -> LemmaResult:
        result = LemmaResult(item.name, "error")
        try:
            ty = to_expr(item.type, self._scope())
            check_declaration(self.env, item.name, ty, None)
        except (KernelError, ConvError, ParseError) as exc:
            result.message = f"statement: {exc}"
            return result
        if item.term is not None:
            try:
                body = to_expr(item.term, self._scope())
                check_declaration(self.env, item.name, ty, body)
                self.env.add(Declaration(item.name, ty, body))
                self.env.source_items.append(("lemma", item.name))
                result.status = "proved"
            except (KernelError, ConvError) as exc:
                result.message = str(exc)
            return result
        state = new_state(self.env, ty)
        for tac in item.tactics or ():
            if tac.name == "sorry":
                result.status = "open"
                result.message = "contains sorry"
                if golden:
                    result.dumps.append(self._dump(state, "sorry"))
                return result
            try:
                state = self.run_tactic(state, tac)
            except (TacticError, KernelError, ConvError) as exc:
                result.status = "error"
                result.message = f"{tac.text}: {exc}"
                return result
            if golden:
                result.dumps.append(self._dump(state, tac.text))
        if state.goals:
            result.status = "open"
            result.message = f"{len(state.goals)} open goal(s)"
            return result
        try:
            proof = state.final_proof()
            check_declaration(self.env, item.name, ty, proof)
            self.env.add(Declaration(item.name, ty, proof))
            self.env.source_items.append(("lemma", item.name))
            result.status = "proved"
        except (KernelError, TacticError) as exc:
            result.status = "error"
            result.message = f"assembled proof rejected: {exc}"
        return result

    def _dump(self, state: TacticState, text: str) -> GoalDump:
        return GoalDump(
            text,
            [(g.case_tag or "", pretty_goal(self.env, g)) for g in state.goals],
        )

    # -- whole files ------------------------------------------------------------

    def load_file(self, sf: SourceFile, golden: bool = False) -> Report:
        report = Report()
        for item in sf.items:
            if isinstance(item, SConstant):
                self.add_constant(item.name, item.type)
            elif isinstance(item, SDef):
                self.add_definition(item.name, item.type, item.body, item.reducible)
            elif isinstance(item, SInductive):
                self.add_inductive(item)
            elif isinstance(item, SHints):
                self.register_hints(item)
            elif isinstance(item, SLemma):
                self.generate_all_support()
                report.results.append(self.run_lemma(item, golden=golden))
            else:
                raise LoadError(f"unknown item {item!r}")
        return report

    def load_text(self, text: str, golden: bool = False) -> Report:
        return self.load_file(parse_file(text), golden=golden)


def _telescope_of(entries: list[tuple[str, FreeVar, Expr, bool]], prefix: list[FreeVar]):
    """Abstract opened binders back into a telescope whose entry types see
    ``prefix ++ earlier entries`` as de Bruijn references."""
    tel: list[TelescopeEntry] = []
    for k, (name, _fv, ty, named) in enumerate(entries):
        ids = [f.id for f in prefix] + [e[1].id for e in entries[:k]]
        tel.append(TelescopeEntry(name, _abstract_over(ty, ids), named))
    return tuple(tel)


def _abstract_over(e: Expr, fvs) -> Expr:
    ids = [f.id if isinstance(f, FreeVar) else f for f in fvs]
    for depth, fid in enumerate(reversed(ids)):
        e = abstract_fvar(e, fid, depth)
    return e


def standard_library() -> Library:
    """Fresh library with the prelude loaded, kernel-checked, and all support
    machinery (recursors, sizeof, no-confusion) generated."""
    from .corpus import prelude_path
    from .kernel.inductive import generate_support

    lib = Library()
    report = lib.load_text(prelude_path().read_text(encoding="utf-8"))
    bad = [r for r in report.results if r.status != "proved"]
    if bad:
        raise LoadError(f"prelude failed to check: {bad[0].name}: {bad[0].message}")
    for name in list(lib.env.inductives):
        generate_support(lib.env, name)
    return lib
