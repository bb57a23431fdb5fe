"""Pretty printing of expressions and goals.

Two modes share one engine:

* file mode (``annotate=True``): binders carry type annotations and the
  equality/pair constants print as plain applications, so ``parse . print``
  is the identity on ASTs;
* goal mode (``annotate=False``): the display the tactics golden-test
  against; binder annotations are dropped, pairs print as ``(a, b)``,
  equalities as ``=``/``==``, and binder hints that would capture an outer
  reference are primed (``S`` becomes ``S'``).

Goal display is deterministic and byte-stable: it depends only on the goal
value and the environment's declaration names.
"""

from __future__ import annotations

from .kernel.env import Environment
from .kernel.expr import (
    App,
    BoundVar,
    Const,
    Expr,
    FreeVar,
    Lambda,
    Meta,
    Pi,
    Sort,
    lift,
    unfold_app,
)

# precedence levels, loosest first
PREC_ARROW = 1
PREC_EQ = 2
PREC_PLUS = 3
PREC_PROD = 4
PREC_APP = 5
PREC_ATOM = 6


class Printer:
    def __init__(self, env: Environment, annotate: bool = False):
        self.env = env
        self.annotate = annotate

    # -- entry points ------------------------------------------------------

    def expr(self, e: Expr, scope: dict[int, str] | None = None) -> str:
        return self._fmt(e, [], scope or {}, PREC_ARROW)

    def expr_under(
        self,
        e: Expr,
        names: list[str],
        scope: dict[int, str] | None = None,
        arrow_operand: bool = False,
    ) -> str:
        """Format under enclosing binders (`names` innermost-first)."""
        prec = PREC_EQ if arrow_operand else PREC_ARROW
        return self._fmt(e, names, scope or {}, prec)

    # -- helpers -----------------------------------------------------------

    def _const_name(self, name: str) -> str:
        return self.env.display_name(name)

    def _numeral(self, e: Expr) -> int | None:
        n = 0
        while True:
            if isinstance(e, Const) and e.name == "nat.zero":
                return n
            head, args = unfold_app(e)
            if isinstance(head, Const) and head.name == "nat.succ" and len(args) == 1:
                n += 1
                e = args[0]
                continue
            return None

    def _referenced_names(
        self, e: Expr, names: list[str], scope: dict[int, str], depth: int
    ) -> set[str]:
        """Display names of variables occurring free in ``e`` (used to decide
        whether a binder hint must be primed).  ``depth`` is the number of
        binders between ``e`` and the scope ``names`` describes."""
        out: set[str] = set()

        def walk(x: Expr, depth: int) -> None:
            match x:
                case BoundVar(index=i):
                    if i >= depth and i - depth < len(names):
                        out.add(names[i - depth])
                case FreeVar(id=i):
                    out.add(scope.get(i, f"fv{i}"))
                case App(fn=f, arg=a):
                    walk(f, depth)
                    walk(a, depth)
                case Lambda(binder_type=t, body=b) | Pi(binder_type=t, body=b):
                    walk(t, depth)
                    walk(b, depth + 1)
                case _:
                    pass

        walk(e, depth)
        return out

    def _binder_name(self, hint: str, body: Expr, names: list[str], scope: dict[int, str]) -> str:
        if not hint:
            hint = "x"
        if hint == "_":
            return hint
        # the body sits one binder below the scope `names` describes
        used = self._referenced_names(body, names, scope, depth=1)
        while hint in used:
            hint += "'"
        return hint

    def _uses_binder(self, body: Expr, depth: int = 0) -> bool:
        match body:
            case BoundVar(index=i):
                return i == depth
            case App(fn=f, arg=a):
                return self._uses_binder(f, depth) or self._uses_binder(a, depth)
            case Lambda(binder_type=t, body=b) | Pi(binder_type=t, body=b):
                return self._uses_binder(t, depth) or self._uses_binder(b, depth + 1)
            case _:
                return False

    # -- core formatter ------------------------------------------------------

    def _fmt(self, e: Expr, names: list[str], scope: dict[int, str], prec: int) -> str:
        match e:
            case Sort():
                return "Type"
            case Const(name=n):
                num = self._numeral(e)
                if num is not None:
                    return str(num)
                return self._const_name(n)
            case BoundVar(index=i):
                return names[i] if i < len(names) else f"#{i}"
            case FreeVar(id=i):
                return scope.get(i, f"fv{i}")
            case Meta(id=i):
                return f"?m{i}"
            case Pi():
                return self._fmt_pi(e, names, scope, prec)
            case Lambda():
                return self._fmt_lambda(e, names, scope, prec)
            case App():
                return self._fmt_app(e, names, scope, prec)
        return repr(e)

    def _paren(self, s: str, outer: int, inner: int) -> str:
        return f"({s})" if outer > inner else s

    def _fmt_pi(self, e: Pi, names: list[str], scope: dict[int, str], prec: int) -> str:
        if not self._uses_binder(e.body):
            lhs = self._fmt(e.binder_type, names, scope, PREC_EQ)
            rhs = self._fmt(e.body, ["_"] + names, scope, PREC_ARROW)
            return self._paren(f"{lhs} → {rhs}", prec, PREC_ARROW)
        # dependent: collect a run of dependent binders
        binders: list[tuple[str, Expr]] = []
        body: Expr = e
        ns = list(names)
        while isinstance(body, Pi) and self._uses_binder(body.body):
            name = self._binder_name(body.hint, body.body, ns, scope)
            binders.append((name, body.binder_type))
            ns = [name] + ns
            body = body.body
        shown = self._format_binder_group(binders, names, scope)
        inner = self._fmt(body, ns, scope, PREC_ARROW)
        return self._paren(f"∀ {shown}, {inner}", prec, PREC_ARROW)

    def _fmt_lambda(self, e: Lambda, names: list[str], scope: dict[int, str], prec: int) -> str:
        binders: list[tuple[str, Expr]] = []
        body: Expr = e
        ns = list(names)
        while isinstance(body, Lambda):
            name = self._binder_name(body.hint, body.body, ns, scope)
            binders.append((name, body.binder_type))
            ns = [name] + ns
            body = body.body
        shown = self._format_binder_group(binders, names, scope)
        inner = self._fmt(body, ns, scope, PREC_ARROW)
        return self._paren(f"λ {shown}, {inner}", prec, PREC_ARROW)

    def _format_binder_group(
        self, binders: list[tuple[str, Expr]], names: list[str], scope: dict[int, str]
    ) -> str:
        if not self.annotate:
            return " ".join(n for n, _t in binders)
        # group consecutive binders with identical types (lift-adjusted: each
        # later binder sits one level deeper); types print in the scope of the
        # binders before the group
        parts: list[str] = []
        i = 0
        ns = list(names)
        while i < len(binders):
            j = i
            while j + 1 < len(binders) and binders[j + 1][1] == lift(binders[i][1], j + 1 - i):
                j += 1
            group_names = [binders[k][0] for k in range(i, j + 1)]
            ty = self._fmt(binders[i][1], ns, scope, PREC_ARROW)
            parts.append(f"({' '.join(group_names)} : {ty})")
            ns = list(reversed(group_names)) + ns
            i = j + 1
        return " ".join(parts)

    def _fmt_app(self, e: App, names: list[str], scope: dict[int, str], prec: int) -> str:
        num = self._numeral(e)
        if num is not None:
            return str(num)
        head, args = unfold_app(e)
        if isinstance(head, Const):
            n = head.name
            if n == "eq" and len(args) == 3 and not self.annotate:
                a = self._fmt(args[1], names, scope, PREC_EQ + 1)
                b = self._fmt(args[2], names, scope, PREC_EQ + 1)
                return self._paren(f"{a} = {b}", prec, PREC_EQ)
            if n == "heq" and len(args) == 4 and not self.annotate:
                a = self._fmt(args[1], names, scope, PREC_EQ + 1)
                b = self._fmt(args[3], names, scope, PREC_EQ + 1)
                return self._paren(f"{a} == {b}", prec, PREC_EQ)
            if n == "prod.mk" and len(args) == 4 and not self.annotate:
                a = self._fmt(args[2], names, scope, PREC_ARROW)
                b = self._fmt(args[3], names, scope, PREC_ARROW)
                return f"({a}, {b})"
            if n == "prod" and len(args) == 2:
                a = self._fmt(args[0], names, scope, PREC_PROD + 1)
                b = self._fmt(args[1], names, scope, PREC_PROD)
                return self._paren(f"{a} × {b}", prec, PREC_PROD)
            if n == "add" and len(args) == 2:
                a = self._fmt(args[0], names, scope, PREC_PLUS)
                b = self._fmt(args[1], names, scope, PREC_PLUS + 1)
                return self._paren(f"{a} + {b}", prec, PREC_PLUS)
        fn = self._fmt(head, names, scope, PREC_APP)
        parts = [fn] + [self._fmt(a, names, scope, PREC_APP + 1) for a in args]
        return self._paren(" ".join(parts), prec, PREC_APP)


def goal_scope(goal) -> dict[int, str]:
    """Display names for a goal's hypotheses; all but the last occurrence of
    a shadowed name carry dagger markers, so the display stays injective."""
    counts: dict[str, int] = {}
    for h in goal.hyps:
        counts[h.name] = counts.get(h.name, 0) + 1
    seen: dict[str, int] = {}
    scope: dict[int, str] = {}
    for h in goal.hyps:
        seen[h.name] = seen.get(h.name, 0) + 1
        remaining = counts[h.name] - seen[h.name]
        scope[h.id] = h.name + "✝" * remaining
    return scope


def pretty_goal(env: Environment, goal) -> str:
    """Deterministic goal display: one line per hypothesis group (consecutive
    hypotheses of syntactically equal type share a line), then the target."""
    pr = Printer(env, annotate=False)
    scope = goal_scope(goal)
    lines: list[str] = []
    i = 0
    hyps = list(goal.hyps)
    while i < len(hyps):
        j = i
        while j + 1 < len(hyps) and hyps[j + 1].type == hyps[i].type:
            j += 1
        names = " ".join(scope[h.id] for h in hyps[i : j + 1])
        lines.append(f"{names} : {pr.expr(hyps[i].type, scope)}")
        i = j + 1
    lines.append(f"⊢ {pr.expr(goal.target, scope)}")
    return "\n".join(lines)
