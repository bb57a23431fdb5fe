"""First-order unification and its brute-force oracle."""

import itertools

from indie.kernel import Const, FreeVar, Meta, Transparency, mk_app
from indie.kernel.expr import App, Expr, metas as metas_of, unfold_app
from indie.parser import Scope, parse_term_text, to_expr
from indie.unify import UnifyResult, instantiate_metas, unify


def conv(env, text, fvars=None, ctx=None):
    return to_expr(parse_term_text(text), Scope(env, fvar_names=fvars or [], ctx=ctx or {}))


ZERO = Const("nat.zero")


def succ(e):
    return mk_app(Const("nat.succ"), e)


def pair(a, b):
    return mk_app(Const("prod.mk"), Const("nat"), Const("nat"), a, b)


class TestExamples:
    """The induction-hypothesis simplification scenarios."""

    def _setup(self, lib):
        lib.load_text(
            "inductive stmt : Type\n| skip : stmt\n| while : (state → bool) → stmt → stmt"
        )
        env = lib.env
        ctx = {1: Const("stmt"), 2: Const("state"), 3: Const("state")}
        fvars = [("S", 1), ("t", 2), ("s", 3)]
        return env, fvars, ctx

    def test_unique_solution(self, lib):
        env, fvars, ctx = self._setup(lib)
        a = conv(env, "(while (λ (_ : state), true) S, t)", fvars, ctx)
        b0 = conv(env, "(while (λ (_ : state), true) S, t)", fvars, ctx)
        # replace S by ?1 and t by ?2 in b
        from indie.kernel.expr import subst_fvars

        b = subst_fvars(b0, {1: Meta(101), 2: Meta(102)})
        out = unify(env, a, b, {101, 102}, Transparency.REDUCIBLE)
        assert out.kind is UnifyResult.SOLVED
        assert out.assignment == {101: FreeVar(1), 102: FreeVar(2)}

    def test_no_unique_solution_keeps_partial_assignment(self, lib):
        env, fvars, ctx = self._setup(lib)
        a = conv(env, "(S, s)", fvars, ctx)
        b0 = conv(env, "(while (λ (_ : state), true) S, t)", fvars, ctx)
        from indie.kernel.expr import subst_fvars

        b = subst_fvars(b0, {1: Meta(101), 2: Meta(102)})
        out = unify(env, a, b, {101, 102}, Transparency.REDUCIBLE)
        assert out.kind is UnifyResult.NO_UNIQUE_SOLUTION
        assert out.assignment == {102: FreeVar(3)}  # ?t' := s, ?S' unsolved

    def test_constructor_clash_fails(self, env):
        out = unify(env, ZERO, succ(Meta(7)), {7}, Transparency.REDUCIBLE)
        assert out.kind is UnifyResult.FAILURE


class TestInstantiate:
    def test_empty_assignment_is_identity(self, env):
        e = succ(Meta(1))
        assert instantiate_metas(e, {}) == e

    def test_chains_resolve_fully(self, env):
        e = Meta(1)
        out = instantiate_metas(e, {1: succ(Meta(2)), 2: ZERO})
        assert out == succ(ZERO)
        assert not metas_of(out)


# --------------------------------------------------------------------------
# Oracle equivalence: brute-force enumeration over small assignments
# --------------------------------------------------------------------------


def ground_terms(depth):
    if depth == 1:
        return [ZERO]
    smaller = ground_terms(depth - 1)
    out = list(smaller)
    out.extend(succ(t) for t in ground_terms(depth - 1))
    out.extend(pair(a, b) for a in smaller for b in smaller)
    # deduplicate while keeping deterministic order
    seen = []
    for t in out:
        if t not in seen:
            seen.append(t)
    return seen


def meta_terms(depth):
    if depth == 1:
        return [ZERO, Meta(1), Meta(2)]
    smaller = meta_terms(depth - 1)
    out = list(smaller)
    out.extend(succ(t) for t in smaller)
    out.extend(pair(a, b) for a in smaller for b in smaller)
    seen = []
    for t in out:
        if t not in seen:
            seen.append(t)
    return seen


def subst_metas_syntactic(e, sub):
    match e:
        case Meta(id=i) if i in sub:
            return sub[i]
        case App(fn=f, arg=a):
            return App(subst_metas_syntactic(f, sub), subst_metas_syntactic(a, sub))
        case _:
            return e


def matches_wild(a, b):
    """Could b (metas as wildcards) match a positionally?"""
    if isinstance(b, Meta):
        return True
    ha, aa = unfold_app(a)
    hb, ab = unfold_app(b)
    if isinstance(hb, Meta):
        return not ab
    if ha != hb or len(aa) != len(ab):
        return False
    return all(matches_wild(x, y) for x, y in zip(aa, ab))


def oracle(a, b, meta_ids, candidates):
    """Enumerate assignments (depth-4 ground terms per meta); classify by the
    number of solutions and, for zero, by whether heads clash rigidly."""
    ms = sorted(meta_ids)
    solutions = []
    if not ms:
        if a == b:
            solutions.append({})
    elif len(ms) == 1:
        for v in candidates:
            if subst_metas_syntactic(b, {ms[0]: v}) == a:
                solutions.append({ms[0]: v})
                if len(solutions) > 1:
                    break
    else:
        m1, m2 = ms
        for v1 in candidates:
            if not matches_wild(a, subst_metas_syntactic(b, {m1: v1})):
                continue
            for v2 in candidates:
                if subst_metas_syntactic(b, {m1: v1, m2: v2}) == a:
                    solutions.append({m1: v1, m2: v2})
                    if len(solutions) > 1:
                        break
            if len(solutions) > 1:
                break
    if len(solutions) == 1:
        return UnifyResult.SOLVED, solutions[0]
    if len(solutions) == 0:
        return UnifyResult.FAILURE, None
    return UnifyResult.NO_UNIQUE_SOLUTION, None


def test_oracle_equivalence_exhaustive(env):
    """unify agrees with the enumerator on every depth-≤3 pair over
    {zero, succ, pair} with ≤2 metas (metas on the right only); whenever it
    solves, the instantiated right side is definitionally the left side."""
    from indie.kernel import is_def_eq

    lhs_terms = ground_terms(3)
    rhs_terms = meta_terms(3)
    candidates = ground_terms(4)
    checked = 0
    for a in lhs_terms:
        for b in rhs_terms:
            ms = metas_of(b)
            expected_kind, expected_sol = oracle(a, b, ms, candidates)
            out = unify(env, a, b, ms, Transparency.REDUCIBLE)
            assert out.kind is expected_kind, f"disagree on {a!r} =?= {b!r}"
            if expected_kind is UnifyResult.SOLVED:
                assert out.assignment == expected_sol
                instantiated = instantiate_metas(b, out.assignment)
                assert not metas_of(instantiated)
                assert is_def_eq(env, a, instantiated, Transparency.REDUCIBLE)
            checked += 1
    assert checked == len(lhs_terms) * len(rhs_terms)


def test_oracle_equivalence_with_unconstrained_meta(env):
    """Passing a meta that does not occur on the right must yield
    NO_UNIQUE_SOLUTION whenever the rest matches (many solutions)."""
    candidates = ground_terms(4)
    for a in ground_terms(2):
        for b in meta_terms(2):
            ms = metas_of(b) | {99}
            if len(ms) > 2:
                continue  # the oracle covers pairs with at most two metas
            kind, _ = oracle(a, b, ms, candidates)
            out = unify(env, a, b, ms, Transparency.REDUCIBLE)
            assert out.kind is kind, f"disagree on {a!r} =?= {b!r} with spare meta"
