"""Locally nameless expression machinery."""

from hypothesis import given, strategies as st

from indie.kernel.expr import (
    App,
    BoundVar,
    Const,
    FreeVar,
    Lambda,
    Pi,
    SORT,
    abstract_fvar,
    beta_head,
    fvars,
    instantiate,
    instantiate_all,
    lift,
    locally_closed,
    mk_app,
    replace_subterm,
    subst_fvar,
    unfold_app,
)


def test_alpha_equivalence_ignores_hints():
    a = Lambda("x", Const("nat"), BoundVar(0))
    b = Lambda("y", Const("nat"), BoundVar(0))
    assert a == b


def test_unfold_app_roundtrip():
    e = mk_app(Const("f"), Const("a"), Const("b"))
    head, args = unfold_app(e)
    assert head == Const("f")
    assert args == [Const("a"), Const("b")]
    assert mk_app(head, *args) == e


def test_open_close_inverse():
    body = App(BoundVar(0), Const("c"))
    opened = instantiate(body, FreeVar(7))
    assert opened == App(FreeVar(7), Const("c"))
    assert abstract_fvar(opened, 7) == body


def test_instantiate_under_binder_shifts():
    # (λ y, #1) opened with a: the inner body references the outer binder
    body = Lambda("y", Const("nat"), BoundVar(1))
    assert instantiate(body, Const("a")) == Lambda("y", Const("nat"), Const("a"))


def test_instantiate_all_order():
    # body with #1 = first value, #0 = second value
    body = App(BoundVar(1), BoundVar(0))
    assert instantiate_all(body, [Const("f"), Const("a")]) == App(Const("f"), Const("a"))


def test_locally_closed():
    assert locally_closed(Lambda("x", SORT, BoundVar(0)))
    assert not locally_closed(BoundVar(0))
    assert not locally_closed(Lambda("x", SORT, BoundVar(1)))


def test_replace_subterm_under_binders():
    target = mk_app(Const("pair"), Const("a"), Const("b"))
    e = Lambda("x", SORT, mk_app(Const("f"), target))
    out = replace_subterm(e, target, FreeVar(3))
    assert out == Lambda("x", SORT, mk_app(Const("f"), FreeVar(3)))


def test_beta_head_iterates():
    e = mk_app(Lambda("x", SORT, Lambda("y", SORT, BoundVar(1))), Const("a"), Const("b"))
    assert beta_head(e) == Const("a")


@st.composite
def closed_exprs(draw, depth=0):
    if depth > 3 or draw(st.booleans()):
        return draw(st.sampled_from([Const("a"), Const("b"), SORT]))
    kind = draw(st.integers(0, 2))
    if kind == 0:
        return App(draw(closed_exprs(depth=depth + 1)), draw(closed_exprs(depth=depth + 1)))
    inner = draw(closed_exprs(depth=depth + 1))
    binder = Lambda if kind == 1 else Pi
    return binder("x", draw(closed_exprs(depth=depth + 1)), inner)


@given(closed_exprs())
def test_abstract_then_instantiate_roundtrip(e):
    # substituting a fresh fvar and abstracting it back is the identity
    opened = subst_fvar(e, 99, Const("unused"))
    assert opened == e  # 99 never occurs
    abstracted = abstract_fvar(e, 99)
    assert abstracted == e


@given(closed_exprs())
def test_lift_noop_on_closed(e):
    assert lift(e, 3) == e


def test_fvars_collects():
    e = mk_app(FreeVar(1), Lambda("x", FreeVar(2), BoundVar(0)))
    assert fvars(e) == {1, 2}
