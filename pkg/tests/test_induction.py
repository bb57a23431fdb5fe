"""The induction pipeline's stages, exercised one by one and end to end."""

import pytest

from indie.induction import (
    FixedHypothesisConflict,
    InductionConfig,
    analyze_major_premise,
    apply_recursor_with_motive,
    cases_tactic,
    generalize_complex_indices,
    generalize_hypotheses,
    induction_tactic,
    simplify_ih,
)
from indie.kernel import Const, FreeVar, Transparency, is_def_eq
from indie.parser import Scope, parse_term_text, to_expr
from indie.printer import pretty_goal
from indie.proofstate import new_state

STMT_BIG_STEP = (
    "inductive stmt : Type\n"
    "| skip : stmt\n"
    "| assign : string → (state → nat) → stmt\n"
    "| seq : stmt → stmt → stmt\n"
    "| while : (state → bool) → stmt → stmt\n"
    "inductive big_step : prod stmt state → state → Type\n"
    "| skip : ∀ (s : state), big_step (skip, s) s\n"
    "| while_true : ∀ (b : state → bool) (S : stmt) (s t u : state)"
    " (hcond : b s = true) (hbody : big_step (S, s) t)"
    " (hrest : big_step (while b S, t) u), big_step (while b S, s) u\n"
    "| while_false : ∀ (b : state → bool) (S : stmt) (s : state)"
    " (hcond : b s = bool.false), big_step (while b S, s) s"
)

# dependent indices: the second index's type mentions the first
DEP_FAMILY = (
    "inductive fin : nat → Type\n"
    "| zero : ∀ (n : nat), fin (nat.succ n)\n"
    "| succ : ∀ (n : nat), fin n → fin (nat.succ n)\n"
    "inductive G : ∀ (n : nat), fin n → Type\n"
    "| mk : ∀ (n : nat) (f : fin n), G n f"
)


def conv(env, text, goal=None):
    scope = Scope(env)
    if goal is not None:
        scope = Scope(env, fvar_names=[(h.name, h.id) for h in goal.hyps], ctx=goal.ctx_types())
    return to_expr(parse_term_text(text), scope)


def intro_all(lib, statement, names):
    st = new_state(lib.env, conv(lib.env, statement))
    for n in names:
        st = st.intro(st.goal(), n)
    return st


class TestGeneralizeComplexIndices:
    def test_big_step_placeholder_and_equation(self, lib):
        lib.load_text(STMT_BIG_STEP)
        st = intro_all(
            lib,
            "∀ (S : stmt) (s t : state),"
            " big_step (while (λ (_ : state), true) S, s) t → false",
            ["S", "s", "t", "h"],
        )
        g = st.goal()
        info = analyze_major_premise(st, g, g.by_name("h").id)
        st2, g2, records = generalize_complex_indices(st, g, info)
        assert len(records) == 1 and not records[0].heterogeneous
        lines = pretty_goal(lib.env, g2).splitlines()
        assert "_H1 : stmt × state" in lines
        assert "h : big_step _H1 t" in lines
        assert lines[-1] == "⊢ _H1 = (while (λ _, true) S, s) → false"
        st2.validate()

    def test_heterogeneous_second_equation(self, lib):
        """With dependent indices, the second placeholder's equation must be
        heterogeneous: its type mentions the first placeholder."""
        lib.load_text(DEP_FAMILY)
        st = intro_all(
            lib,
            "∀ (h : G (nat.succ 0) (fin.zero 0)), false",
            ["h"],
        )
        g = st.goal()
        info = analyze_major_premise(st, g, g.by_name("h").id)
        st2, g2, records = generalize_complex_indices(st, g, info)
        assert [r.heterogeneous for r in records] == [False, True]
        assert "==" in pretty_goal(lib.env, g2)
        st2.validate()

    def test_bare_distinct_variables_untouched(self, lib):
        lib.load_text(
            "inductive tc (α : Type) (r : α → α → Type) : α → α → Type\n"
            "| base : ∀ (x y : α) (hr : r x y), tc α r x y\n"
            "| step : ∀ (x y z : α) (hr : r x y) (ht : tc α r y z), tc α r x z"
        )
        st = intro_all(
            lib,
            "∀ (α : Type) (r : α → α → Type) (a b : α), tc α r a b → tc α r a b",
            ["α", "r", "a", "b", "h"],
        )
        g = st.goal()
        info = analyze_major_premise(st, g, g.by_name("h").id)
        st2, g2, records = generalize_complex_indices(st, g, info)
        assert records == []
        assert g2 == g

    def test_rewrite_made_goal_ill_typed(self, lib):
        """Replacing a complex index inside an unrelated hypothesis can break
        its typing; the stage detects this and aborts with a diagnostic."""
        from indie.induction import RewriteMadeGoalIllTyped

        lib.load_text(DEP_FAMILY)
        lib.load_text("constant P : fin 1 → Type")
        st = intro_all(
            lib, "∀ (q : P (fin.zero 0)), G 1 (fin.zero 0) → false", ["q", "h"]
        )
        g = st.goal()
        info = analyze_major_premise(st, g, g.by_name("h").id)
        with pytest.raises(RewriteMadeGoalIllTyped):
            generalize_complex_indices(st, g, info)

    def test_duplicate_variable_index_generalized(self, lib):
        lib.load_text(
            "inductive tc (α : Type) (r : α → α → Type) : α → α → Type\n"
            "| base : ∀ (x y : α) (hr : r x y), tc α r x y\n"
            "| step : ∀ (x y z : α) (hr : r x y) (ht : tc α r y z), tc α r x z"
        )
        st = intro_all(
            lib,
            "∀ (α : Type) (r : α → α → Type) (a : α), tc α r a a → false",
            ["α", "r", "a", "h"],
        )
        g = st.goal()
        info = analyze_major_premise(st, g, g.by_name("h").id)
        st2, g2, records = generalize_complex_indices(st, g, info)
        assert len(records) == 1  # the duplicated second occurrence
        st2.validate()


class TestGeneralizeHypotheses:
    def _inj_goal(self, lib):
        return intro_all(lib, "∀ (n m : nat), n + n = m + m → n = m", ["n", "m", "h"])

    def test_injectivity_reverts_m_and_h(self, lib):
        st = self._inj_goal(lib)
        g = st.goal()
        info = analyze_major_premise(st, g, g.by_name("n").id)
        st2, g2, reverted = generalize_hypotheses(st, g, InductionConfig("n"), info, [])
        assert [n for _i, n in reverted] == ["m", "h"]
        assert pretty_goal(lib.env, g2).splitlines()[-1] == "⊢ ∀ m, n + n = m + m → n = m"

    def test_commutativity_keeps_unrelated_x(self, lib):
        lib.load_text("constant X : Type")
        st = intro_all(lib, "∀ (x : X) (n m : nat), n + m = m + n", ["x", "n", "m"])
        g = st.goal()
        info = analyze_major_premise(st, g, g.by_name("n").id)
        st2, g2, reverted = generalize_hypotheses(st, g, InductionConfig("n"), info, [])
        assert [n for _i, n in reverted] == ["m"]
        assert g2.by_name("x")  # x stays

    def test_dependent_property_reverted_by_criterion_2(self, lib):
        st = intro_all(lib, "∀ (n : nat), lt 0 n → n = n", ["n", "h"])
        g = st.goal()
        info = analyze_major_premise(st, g, g.by_name("n").id)
        st2, g2, reverted = generalize_hypotheses(st, g, InductionConfig("n"), info, [])
        assert [n for _i, n in reverted] == ["h"]

    def test_fixing_star_reverts_nothing(self, lib):
        st = self._inj_goal(lib)
        g = st.goal()
        info = analyze_major_premise(st, g, g.by_name("n").id)
        st2, g2, reverted = generalize_hypotheses(st, g, InductionConfig("n", fixing="*"), info, [])
        assert reverted == []

    def test_fixing_a_dependent_of_the_major_is_dragged_not_an_error(self, lib):
        """Fixing only shields hypotheses from the optional generalisation;
        anything depending on the major premise must still be reverted for
        the recursor to apply (exactly what fixing * relies on)."""
        st = intro_all(lib, "∀ (n : nat), lt 0 n → n = n", ["n", "h"])
        out = induction_tactic(st, InductionConfig("n", fixing=("h",)))
        succ = [g for g in out.goals if g.case_tag == "succ"][0]
        assert succ.by_name("h").type == conv(lib.env, "lt 0 (nat.succ n)", succ)

    def test_fixing_an_index_is_a_conflict(self, lib):
        lib.load_text(
            "inductive tc (α : Type) (r : α → α → Type) : α → α → Type\n"
            "| base : ∀ (x y : α) (hr : r x y), tc α r x y\n"
            "| step : ∀ (x y z : α) (hr : r x y) (ht : tc α r y z), tc α r x z"
        )
        st = intro_all(
            lib,
            "∀ (α : Type) (r : α → α → Type) (a b : α), tc α r a b → tc α r a b",
            ["α", "r", "a", "b", "h"],
        )
        g = st.goal()
        info = analyze_major_premise(st, g, g.by_name("h").id)
        with pytest.raises(FixedHypothesisConflict):
            generalize_hypotheses(st, g, InductionConfig("h", fixing=("a",)), info, [])


class TestSimplifyIH:
    def test_fig4_both_hypotheses(self, lib):
        """End to end on the big-step example: one IH collapses to false, the
        other keeps only the unsolved loop-body binder."""
        lib.load_text(STMT_BIG_STEP)
        st = intro_all(
            lib,
            "∀ (S : stmt) (s t : state),"
            " big_step (while (λ (_ : state), true) S, s) t → false",
            ["S", "s", "t", "h"],
        )
        st2 = induction_tactic(st, InductionConfig("h"))
        assert len(st2.goals) == 1
        g = st2.goals[0]
        assert g.case_tag == "while_true"
        lines = pretty_goal(lib.env, g).splitlines()
        assert "ih_h : ∀ S', (S, s) = (while (λ _, true) S', s) → false" in lines
        assert "ih_h_1 : false" in lines
        st2.validate()

    def test_ih_without_placeholders_unchanged(self, lib):
        st = intro_all(lib, "∀ (n m : nat), n + n = m + m → n = m", ["n", "m", "h"])
        st2 = induction_tactic(st, InductionConfig("n"))
        succ = st2.goals[1]
        assert "ih : ∀ m, n + n = m + m → n = m" in pretty_goal(lib.env, succ)


class TestEndToEnd:
    def test_fin0_closes_all_goals(self, lib):
        lib.load_text(
            "inductive fin : nat → Type\n"
            "| zero : ∀ (n : nat), fin (nat.succ n)\n"
            "| succ : ∀ (n : nat), fin n → fin (nat.succ n)"
        )
        st = intro_all(lib, "fin 0 → false", ["h"])
        for tactic in (induction_tactic, cases_tactic):
            out = tactic(st, InductionConfig("h"))
            assert out.goals == ()
            out.final_proof()

    def test_cases_equals_induction_minus_ihs(self, lib):
        lib.load_text(STMT_BIG_STEP)
        st = intro_all(
            lib,
            "∀ (S : stmt) (s t : state),"
            " big_step (while (λ (_ : state), true) S, s) t → false",
            ["S", "s", "t", "h"],
        )
        ind = induction_tactic(st, InductionConfig("h"))
        cas = cases_tactic(st, InductionConfig("h"))
        assert len(ind.goals) == len(cas.goals)
        for gi, gc in zip(ind.goals, cas.goals):
            kept = [h for h in gi.hyps if not h.name.startswith("ih")]
            assert [(h.id, h.name, h.type) for h in kept] == [
                (h.id, h.name, h.type) for h in gc.hyps
            ]
            assert gi.target == gc.target

    def test_goals_tagged_with_constructor(self, lib):
        st = intro_all(lib, "∀ (n : nat), n = n", ["n"])
        out = induction_tactic(st, InductionConfig("n"))
        assert [g.case_tag for g in out.goals] == ["zero", "succ"]

    def test_no_temporary_names_surface(self, lib):
        lib.load_text(STMT_BIG_STEP)
        st = intro_all(
            lib,
            "∀ (S : stmt) (s t : state),"
            " big_step (while (λ (_ : state), true) S, s) t → false",
            ["S", "s", "t", "h"],
        )
        out = induction_tactic(st, InductionConfig("h"))
        for g in out.goals:
            assert all(not h.temporary for h in g.hyps)

    def test_inversion_on_even_predicate(self, lib):
        """Case analysis inverts an inductive predicate: the impossible case
        closes by conflict and the possible one arrives fully substituted."""
        report = lib.load_text(
            "inductive even : nat → Type\n"
            "| z : even 0\n"
            "| ss : ∀ (n : nat) (h : even n), even (nat.succ (nat.succ n))\n"
            "lemma even_inv : ∀ (n : nat), even (nat.succ (nat.succ n)) → even n :=\n"
            "begin intro n, intro h, cases' h, exact h end",
            golden=True,
        )
        assert report.results[0].status == "proved"
        dump = report.results[0].dumps[2]
        assert dump.goals == [("ss", "n : nat\nh : even n\n⊢ even n")]

    def test_user_names_mismatch(self, lib):
        from indie.naming import UserNameCountMismatch

        st = intro_all(lib, "∀ (n : nat), n = n", ["n"])
        cfg = InductionConfig("n", user_names={"zero": ["a", "b", "c"]})
        with pytest.raises(UserNameCountMismatch):
            induction_tactic(st, cfg)

    def test_partial_user_names_fill_with_rules(self, lib):
        st = intro_all(lib, "∀ (n : nat), n = n", ["n"])
        out = induction_tactic(st, InductionConfig("n", user_names={"succ": ["k"]}))
        assert [h.name for h in out.goals[1].hyps] == ["k", "ih"]

    def test_applied_parameters_and_reduced_case_target(self, lib):
        """Inductive parameters may be arbitrary applications, and the case
        target is shown beta-reduced even when nothing was generalised."""
        lib.load_text(
            "inductive tc (α : Type) (r : α → α → Type) : α → α → Type\n"
            "| base : ∀ (x y : α) (hr : r x y), tc α r x y\n"
            "| step : ∀ (x y z : α) (hr : r x y) (ht : tc α r y z), tc α r x z"
        )
        st = intro_all(
            lib,
            "∀ (r : list nat → list nat → Type) (a b : list nat),"
            " tc (list nat) r a b → tc (list nat) r a b",
            ["r", "a", "b", "h"],
        )
        out = induction_tactic(st, InductionConfig("h"))
        step = out.goals[1]
        assert pretty_goal(lib.env, step).splitlines()[-1] == "⊢ tc (list nat) r a b"
        out.validate()

    def test_dependent_heterogeneous_equation_end_to_end(self, lib):
        """Both dependent indices are generalised; qnify homogenises the
        second equation once the first substitution aligns the types, then
        substitutes everything away (the family is inhabited, so the
        remaining goal is the bare target)."""
        lib.load_text(DEP_FAMILY)
        st = intro_all(lib, "G 1 (fin.zero 0) → false", ["h"])
        out = induction_tactic(st, InductionConfig("h"))
        assert [g.case_tag for g in out.goals] == ["mk"]
        assert out.goals[0].hyps == ()
        assert pretty_goal(lib.env, out.goals[0]) == "⊢ false"
        out.validate()
