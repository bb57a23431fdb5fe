"""The naming rules, hint registry and collision handling."""

import pytest

import indie.naming as naming
from indie.induction import InductionConfig, induction_tactic
from indie.kernel import Const, mk_app
from indie.naming import NameHintRegistry, resolve_collision
from indie.parser import Scope, parse_term_text, to_expr
from indie.printer import pretty_goal
from indie.proofstate import new_state

TC = (
    "inductive tc (α : Type) (r : α → α → Type) : α → α → Type\n"
    "| base : ∀ (x y : α) (hr : r x y), tc α r x y\n"
    "| step : ∀ (x y z : α) (hr : r x y) (ht : tc α r y z), tc α r x z"
)


def conv(env, text):
    return to_expr(parse_term_text(text), Scope(env))


def intro_all(lib, statement, names):
    st = new_state(lib.env, conv(lib.env, statement))
    for n in names:
        st = st.intro(st.goal(), n)
    return st


def run_with_trace(lib, statement, names, major):
    events = []
    naming.NAMING_TRACE = lambda ctor, pos, rule, name: events.append((ctor, pos, rule, name))
    try:
        st = intro_all(lib, statement, names)
        out = induction_tactic(st, InductionConfig(major))
    finally:
        naming.NAMING_TRACE = None
    return out, events


class TestRegistry:
    def test_nat_hints(self, lib):
        reg = NameHintRegistry(lib.env)
        assert reg.lookup(Const("nat"), set()) == "n"
        assert reg.lookup(Const("nat"), {"n"}) == "m"
        assert reg.lookup(Const("nat"), {"n", "m"}) is None

    def test_container_pluralization(self, lib):
        reg = NameHintRegistry(lib.env)
        assert reg.lookup(mk_app(Const("list"), Const("nat")), set()) == "ns"

    def test_unregistered_head_none(self, lib):
        reg = NameHintRegistry(lib.env)
        assert reg.lookup(Const("state"), set()) is None

    def test_later_registration_shadows(self, lib):
        reg = NameHintRegistry(lib.env)
        reg.register("nat", ["k"])
        assert reg.lookup(Const("nat"), set()) == "k"

    def test_lookup_normalizes_head(self, lib):
        lib.load_text("def mynat : Type := nat")
        reg = NameHintRegistry(lib.env)
        assert reg.lookup(Const("mynat"), set()) == "n"


class TestRules:
    def test_tc_step_rule_table(self, lib):
        """Each argument of the step case is pinned to the rule that named
        it: x and z by index association, y and hr by their declared names,
        ht by the recursion rule."""
        lib.load_text(TC)
        out, events = run_with_trace(
            lib,
            "∀ (α : Type) (r : α → α → Type) (a b c : α)"
            " (h₁ : tc α r a b) (h₂ : tc α r b c), tc α r a c",
            ["α", "r", "a", "b", "c", "h₁", "h₂"],
            "h₁",
        )
        step_events = [(pos, rule, name) for ctor, pos, rule, name in events if ctor == "tc.step"]
        assert step_events == [
            (0, "index-association", "a"),
            (1, "named-argument", "y"),
            (2, "index-association", "b"),
            (3, "named-argument", "hr"),
            (4, "recursion", "h₁"),
        ]
        step = out.goals[1]
        assert [h.name for h in step.hyps] == ["α", "r", "a", "y", "b", "c", "hr", "h₁", "ih", "h₂"]

    def test_recursion_rule_names_after_major(self, lib):
        out, events = run_with_trace(lib, "∀ (n : nat), n = n", ["n"], "n")
        succ = out.goals[1]
        assert succ.hyps[0].name == "n"
        assert [e for e in events if e[0] == "nat.succ"] == [("nat.succ", 0, "recursion", "n")]

    def test_type_based_rule(self, lib):
        """An unnamed nat argument with no other rule applying uses the
        registered hints."""
        lib.load_text("inductive wrap : Type\n| mk : nat → wrap")
        st = intro_all(lib, "∀ (w : wrap), w = w", ["w"])
        out = induction_tactic(st, InductionConfig("w"))
        assert out.goals[0].hyps[0].name == "n"

    def test_fallback_rule(self, lib):
        lib.load_text(
            "constant A : Type\n"
            "inductive box : Type\n| mk : A → (lt 0 1) → box"
        )
        st = intro_all(lib, "∀ (b : box), b = b", ["b"])
        out = induction_tactic(st, InductionConfig("b"))
        # A has no hints and is no proposition: x; lt 0 1 has a 1-index head
        # family (le unfolds to a recursor application), so the guard decides
        names = [h.name for h in out.goals[0].hyps]
        assert names[0] == "x"

    def test_index_association_type_guard(self, lib):
        """An argument of element type associated with a list-typed index is
        not named after it."""
        lib.load_text(
            "inductive mem (A : Type) : A → list A → Type\n"
            "| head : ∀ (x : A) (xs : list A), mem A x (list.cons A x xs)"
        )
        st = intro_all(
            lib,
            "∀ (A : Type) (a : A) (as : list A), mem A a as → mem A a as",
            ["A", "a", "as", "h"],
        )
        out = induction_tactic(st, InductionConfig("h"))
        head = out.goals[0]
        # the x argument occurs in both index instantiations; the second index
        # (as : list A) has a different type, and the two indices differ, so
        # the rule's same-hypothesis premise fails and x falls through to its
        # declared name
        assert head.hyps[1].name == "x"


class TestIHNames:
    def test_single_ih_named_ih(self, lib):
        out = induction_tactic(
            intro_all(lib, "∀ (n : nat), n = n", ["n"]), InductionConfig("n")
        )
        assert "ih" in [h.name for h in out.goals[1].hyps]

    def test_multiple_ihs_use_argument_names(self, lib):
        lib.load_text(
            "inductive tree : Type\n| leaf : tree\n| node : tree → tree → tree\n"
            "name_hints tree := e"
        )
        out = induction_tactic(
            intro_all(lib, "∀ (t : tree), t = t", ["t"]), InductionConfig("t")
        )
        node = out.goals[1]
        names = [h.name for h in node.hyps]
        assert names == ["t", "ih_t", "t_1", "ih_t_1"]

    def test_collision_falls_back_to_numbering(self, lib):
        st = intro_all(lib, "∀ (ih : bool) (n : nat), n = n", ["ih", "n"])
        out = induction_tactic(st, InductionConfig("n"))
        names = [h.name for h in out.goals[1].hyps]
        assert "ih_1" in names  # desired "ih" is taken by the fixed hypothesis

    def test_resolve_collision_sequence(self):
        assert resolve_collision("n", set()) == "n"
        assert resolve_collision("n", {"n"}) == "n_1"
        assert resolve_collision("n", {"n", "n_1"}) == "n_2"


class TestStuckEquationNaming:
    def test_surviving_index_equation_named_induction_eq(self, lib):
        """A stuck index equation stays in the context under the numbered
        scheme."""
        from indie.induction import cases_tactic

        st = intro_all(
            lib,
            "∀ (f g : nat → nat) (x : nat), eq nat (f x) (g x) → false",
            ["f", "g", "x", "h"],
        )
        out = cases_tactic(st, InductionConfig("h"))
        refl = out.goals[0]
        assert refl.case_tag == "refl"
        assert [h.name for h in refl.hyps] == ["f", "g", "x", "induction_eq_1"]


class TestFinalize:
    def test_user_names_verbatim(self, lib):
        st = intro_all(lib, "∀ (n : nat), n = n", ["n"])
        out = induction_tactic(
            st, InductionConfig("n", user_names={"succ": ["p", "q"]})
        )
        succ = out.goals[1]
        assert [h.name for h in succ.hyps] == ["p", "q"]

    def test_all_names_distinct_and_final(self, lib):
        lib.load_text(TC)
        st = intro_all(
            lib,
            "∀ (α : Type) (r : α → α → Type) (a b c : α)"
            " (h₁ : tc α r a b) (h₂ : tc α r b c), tc α r a c",
            ["α", "r", "a", "b", "c", "h₁", "h₂"],
        )
        out = induction_tactic(st, InductionConfig("h₁"))
        for g in out.goals:
            names = [h.name for h in g.hyps]
            assert len(names) == len(set(names))
            assert all(not h.temporary for h in g.hyps)
