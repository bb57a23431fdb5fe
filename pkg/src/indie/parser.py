"""Surface-language parser for ``.ind`` files and tactic text.

The object language is fully explicit (no implicit arguments, no
elaboration), with three pieces of checked sugar resolved at conversion time
using the kernel's type inference: ``(a, b)`` for pair construction,
``a = b`` / ``a == b`` for homogeneous / heterogeneous equality, and decimal
numerals.  Unicode and ASCII operator spellings are both accepted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .kernel.env import Environment
from .kernel.expr import (
    Const,
    Expr,
    FreeVar,
    Lambda,
    Pi,
    SORT,
    abstract_fvar,
    lift,
    mk_app,
)
from .kernel.fresh import scratch_id
from .kernel.typecheck import infer_type


class ParseError(Exception):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.line = line
        self.col = col


# ---------------------------------------------------------------------------
# Lexer
# ---------------------------------------------------------------------------

_SUBSCRIPTS = "₀₁₂₃₄₅₆₇₈₉"
_SYMBOLS = [":=", "==", "->", "→", "×", "∀", "λ", "=", ":", "(", ")", ",", "|", "+", "*"]
KEYWORDS = {
    "inductive",
    "constant",
    "axiom",
    "def",
    "lemma",
    "begin",
    "end",
    "irreducible",
    "name_hints",
    "name_hints_container",
    "forall",
    "fun",
}


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "num" | "sym" | "eof"
    text: str
    line: int
    col: int
    pos: int = 0  # absolute offset into the source


def _ident_start(c: str) -> bool:
    return (c.isalpha() and c != "λ") or c == "_"


def _ident_cont(c: str) -> bool:
    return c.isalnum() or c in "_'" or c in _SUBSCRIPTS


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if text.startswith("--", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(Token("num", text[i:j], line, col, i))
            col += j - i
            i = j
            continue
        if _ident_start(c):
            j = i
            while j < n:
                if _ident_cont(text[j]):
                    j += 1
                elif text[j] == "." and j + 1 < n and _ident_start(text[j + 1]):
                    j += 1
                else:
                    break
            toks.append(Token("ident", text[i:j], line, col, i))
            col += j - i
            i = j
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                toks.append(Token("sym", sym, line, col, i))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    toks.append(Token("eof", "", line, col, len(text)))
    return toks


# ---------------------------------------------------------------------------
# Raw syntax trees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SName:
    name: str
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class SNum:
    value: int


@dataclass(frozen=True)
class SSort:
    pass


@dataclass(frozen=True)
class SApp:
    fn: object
    arg: object


@dataclass(frozen=True)
class SArrow:
    lhs: object
    rhs: object


@dataclass(frozen=True)
class SEq:
    lhs: object
    rhs: object
    heterogeneous: bool


@dataclass(frozen=True)
class SPlus:
    lhs: object
    rhs: object


@dataclass(frozen=True)
class SProd:
    lhs: object
    rhs: object


@dataclass(frozen=True)
class SPair:
    fst: object
    snd: object


@dataclass(frozen=True)
class SBinder:
    kind: str  # "pi" | "lam"
    groups: tuple[tuple[tuple[str, ...], object], ...]  # ((names, type), ...)
    body: object


# file items


@dataclass(frozen=True)
class SConstant:
    name: str
    type: object


@dataclass(frozen=True)
class SDef:
    name: str
    type: object
    body: object
    reducible: bool = True


@dataclass(frozen=True)
class SLemma:
    name: str
    type: object
    term: object | None  # term-mode proof
    tactics: tuple["TacticCall", ...] | None


@dataclass(frozen=True)
class SInductive:
    name: str
    params: tuple[tuple[tuple[str, ...], object], ...]
    arity: object | None  # indices → Type (None means plain Type)
    ctors: tuple[tuple[str, object], ...]


@dataclass(frozen=True)
class SHints:
    head: str
    names: tuple[str, ...]
    container: bool = False


@dataclass(frozen=True)
class SourceFile:
    items: tuple[object, ...]


@dataclass(frozen=True)
class TacticCall:
    name: str
    ident: str | None = None
    ident2: str | None = None
    term: object | None = None
    fixing: object = None  # None | "*" | tuple[str, ...]
    with_names: tuple[tuple[str, tuple[str, ...]], ...] | None = None
    text: str = ""


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.pos = 0

    # -- token plumbing ------------------------------------------------------

    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def at_sym(self, s: str) -> bool:
        t = self.peek()
        return t.kind == "sym" and t.text == s

    def at_ident(self, s: str | None = None) -> bool:
        t = self.peek()
        return t.kind == "ident" and (s is None or t.text == s)

    def expect_sym(self, s: str) -> Token:
        t = self.next()
        if t.kind != "sym" or t.text != s:
            raise ParseError(f"expected {s!r}, got {t.text!r}", t.line, t.col)
        return t

    def expect_ident(self, what: str = "identifier") -> Token:
        t = self.next()
        if t.kind != "ident":
            raise ParseError(f"expected {what}, got {t.text!r}", t.line, t.col)
        return t

    def fail(self, msg: str):
        t = self.peek()
        raise ParseError(msg, t.line, t.col)

    # -- terms ---------------------------------------------------------------

    def term(self):
        t = self.peek()
        if t.kind == "sym" and t.text in ("∀", "λ") or t.kind == "ident" and t.text in ("forall", "fun"):
            self.next()
            kind = "pi" if t.text in ("∀", "forall") else "lam"
            groups = []
            while self.at_sym("("):
                groups.append(self.binder_group())
            if not groups:
                self.fail("expected at least one (name : type) binder group")
            self.expect_sym(",")
            body = self.term()
            return SBinder(kind, tuple(groups), body)
        return self.arrow_term()

    def binder_group(self) -> tuple[tuple[str, ...], object]:
        self.expect_sym("(")
        names = [self.expect_ident("binder name").text]
        while self.at_ident() and not self.at_sym(":"):
            names.append(self.next().text)
        self.expect_sym(":")
        ty = self.term()
        self.expect_sym(")")
        return tuple(names), ty

    def arrow_term(self):
        lhs = self.eq_term()
        if self.at_sym("→") or self.at_sym("->"):
            self.next()
            return SArrow(lhs, self.term())
        return lhs

    def eq_term(self):
        lhs = self.plus_term()
        if self.at_sym("="):
            self.next()
            return SEq(lhs, self.plus_term(), heterogeneous=False)
        if self.at_sym("=="):
            self.next()
            return SEq(lhs, self.plus_term(), heterogeneous=True)
        return lhs

    def plus_term(self):
        lhs = self.prod_term()
        while self.at_sym("+"):
            self.next()
            lhs = SPlus(lhs, self.prod_term())
        return lhs

    def prod_term(self):
        lhs = self.app_term()
        if self.at_sym("×"):
            self.next()
            return SProd(lhs, self.prod_term())
        return lhs

    def app_term(self):
        e = self.atom()
        while True:
            t = self.peek()
            if t.kind in ("ident", "num") and t.text not in KEYWORDS or self.at_sym("("):
                e = SApp(e, self.atom())
            else:
                return e

    def atom(self):
        t = self.peek()
        if t.kind == "num":
            self.next()
            return SNum(int(t.text))
        if t.kind == "ident":
            if t.text in KEYWORDS:
                self.fail(f"unexpected keyword {t.text!r}")
            self.next()
            if t.text == "Type":
                return SSort()
            return SName(t.text, t.line, t.col)
        if self.at_sym("("):
            self.next()
            e = self.term()
            if self.at_sym(","):
                self.next()
                snd = self.term()
                self.expect_sym(")")
                return SPair(e, snd)
            self.expect_sym(")")
            return e
        self.fail("expected a term")

    # -- tactics ---------------------------------------------------------------

    def tactic(self) -> TacticCall:
        start = self.pos
        t = self.expect_ident("tactic name")
        name = t.text
        call: TacticCall
        if name == "intro":
            ident = self.next().text if self.at_ident() and not self._tactic_boundary() else None
            call = TacticCall("intro", ident=ident)
        elif name in ("exact", "apply"):
            call = TacticCall(name, term=self.term())
        elif name in ("induction'", "cases'"):
            major = self.expect_ident("hypothesis name").text
            fixing = None
            with_names = None
            if self.at_ident("fixing"):
                self.next()
                if self.at_sym("*"):
                    self.next()
                    fixing = "*"
                else:
                    names = [self.expect_ident("hypothesis name").text]
                    while self.at_ident() and not self._tactic_boundary():
                        if self.peek().text == "with":
                            break
                        names.append(self.next().text)
                    fixing = tuple(names)
            if self.at_ident("with"):
                self.next()
                cases = [self.case_clause()]
                while self.at_sym("|"):
                    self.next()
                    cases.append(self.case_clause())
                with_names = tuple(cases)
            call = TacticCall(name, ident=major, fixing=fixing, with_names=with_names)
        elif name == "clear":
            call = TacticCall("clear", ident=self.expect_ident("hypothesis name").text)
        elif name == "rename":
            old = self.expect_ident("hypothesis name").text
            new = self.expect_ident("new name").text
            call = TacticCall("rename", ident=old, ident2=new)
        elif name == "sorry":
            call = TacticCall("sorry")
        else:
            raise ParseError(f"unknown tactic {name!r}", t.line, t.col)
        end_tok = self.toks[self.pos - 1]
        raw = self.text[self.toks[start].pos : end_tok.pos + len(end_tok.text)]
        text = " ".join(raw.split())
        return TacticCall(
            call.name, call.ident, call.ident2, call.term, call.fixing, call.with_names, text
        )

    def _tactic_boundary(self) -> bool:
        return self.peek().kind == "ident" and self.peek().text in ("end",)

    def case_clause(self) -> tuple[str, tuple[str, ...]]:
        kw = self.expect_ident("'case'")
        if kw.text != "case":
            raise ParseError("expected 'case'", kw.line, kw.col)
        tag = self.expect_ident("constructor name").text
        self.expect_sym(":")
        names = []
        while self.at_ident() and self.peek().text not in ("end", "case"):
            names.append(self.next().text)
        return tag, tuple(names)

    # -- file items --------------------------------------------------------------

    def file(self) -> SourceFile:
        items = []
        while self.peek().kind != "eof":
            items.append(self.item())
        return SourceFile(tuple(items))

    def item(self):
        t = self.peek()
        if self.at_ident("constant") or self.at_ident("axiom"):
            self.next()
            name = self.expect_ident("declaration name").text
            self.expect_sym(":")
            return SConstant(name, self.term())
        if self.at_ident("irreducible") or self.at_ident("def"):
            reducible = True
            if t.text == "irreducible":
                self.next()
                reducible = False
            kw = self.expect_ident("'def'")
            if kw.text != "def":
                raise ParseError("expected 'def'", kw.line, kw.col)
            name = self.expect_ident("definition name").text
            self.expect_sym(":")
            ty = self.term()
            self.expect_sym(":=")
            return SDef(name, ty, self.term(), reducible)
        if self.at_ident("lemma"):
            self.next()
            name = self.expect_ident("lemma name").text
            self.expect_sym(":")
            ty = self.term()
            if self.at_sym(":="):
                self.next()
                if not self.at_ident("begin"):
                    return SLemma(name, ty, self.term(), None)
            kw = self.expect_ident("'begin' or ':='")
            if kw.text != "begin":
                raise ParseError("expected 'begin' or ':='", kw.line, kw.col)
            tactics = []
            while not self.at_ident("end"):
                tactics.append(self.tactic())
                if self.at_sym(","):
                    self.next()
            self.next()  # end
            return SLemma(name, ty, None, tuple(tactics))
        if self.at_ident("inductive"):
            self.next()
            name = self.expect_ident("inductive name").text
            params = []
            while self.at_sym("("):
                params.append(self.binder_group())
            arity = None
            if self.at_sym(":"):
                self.next()
                arity = self.term()
            ctors = []
            while self.at_sym("|"):
                self.next()
                cname = self.expect_ident("constructor name").text
                self.expect_sym(":")
                ctors.append((cname, self.term()))
            return SInductive(name, tuple(params), arity, tuple(ctors))
        if self.at_ident("name_hints"):
            self.next()
            head = self.expect_ident("type head").text
            self.expect_sym(":=")
            names = [self.expect_ident("name").text]
            while self.at_ident() and self.peek().text not in KEYWORDS and not self._at_item_start():
                names.append(self.next().text)
            return SHints(head, tuple(names))
        if self.at_ident("name_hints_container"):
            self.next()
            head = self.expect_ident("container head").text
            self.expect_sym(":=")
            kw = self.expect_ident("'pluralize'")
            if kw.text != "pluralize":
                raise ParseError("expected 'pluralize'", kw.line, kw.col)
            return SHints(head, (), container=True)
        self.fail("expected a declaration")

    def _at_item_start(self) -> bool:
        t = self.peek()
        return t.kind == "ident" and t.text in (
            "inductive",
            "constant",
            "axiom",
            "def",
            "lemma",
            "irreducible",
            "name_hints",
            "name_hints_container",
        )


def parse_file(text: str) -> SourceFile:
    p = Parser(text)
    return p.file()


def parse_term_text(text: str):
    p = Parser(text)
    e = p.term()
    if p.peek().kind != "eof":
        p.fail("trailing input after term")
    return e


def parse_tactic_text(text: str) -> TacticCall:
    p = Parser(text)
    t = p.tactic()
    if p.peek().kind != "eof":
        p.fail("trailing input after tactic")
    return t


# ---------------------------------------------------------------------------
# Conversion of raw trees to kernel expressions
# ---------------------------------------------------------------------------


class ConvError(Exception):
    pass


@dataclass
class Scope:
    """Name resolution for conversion: local binders shadow goal hypotheses,
    which shadow global declarations."""

    env: Environment
    fvar_names: list[tuple[str, int]] = field(default_factory=list)  # goal hypotheses, in order
    ctx: dict[int, Expr] = field(default_factory=dict)  # fvar id -> type
    binders: list[tuple[str, FreeVar]] = field(default_factory=list)

    def lookup(self, name: str) -> Expr:
        for n, fv in reversed(self.binders):
            if n == name:
                return fv
        for n, i in reversed(self.fvar_names):
            if n == name:
                return FreeVar(i)
        resolved = self.env.resolve(name)
        if resolved is not None:
            return Const(resolved)
        raise ConvError(f"unknown identifier {name!r}")


def to_expr(ast, scope: Scope) -> Expr:
    """Convert a raw tree to a locally closed expression, resolving the
    checked sugar (pairs, equalities, numerals) with kernel type inference."""
    match ast:
        case SSort():
            return SORT
        case SName(name=n):
            return scope.lookup(n)
        case SNum(value=v):
            e: Expr = Const("nat.zero")
            for _ in range(v):
                e = mk_app(Const("nat.succ"), e)
            return e
        case SApp(fn=f, arg=a):
            return mk_app(to_expr(f, scope), to_expr(a, scope))
        case SArrow(lhs=l, rhs=r):
            lt = to_expr(l, scope)
            rt = to_expr(r, scope)
            return Pi("_", lt, lift(rt, 1))
        case SPlus(lhs=l, rhs=r):
            return mk_app(Const("add"), to_expr(l, scope), to_expr(r, scope))
        case SProd(lhs=l, rhs=r):
            return mk_app(Const("prod"), to_expr(l, scope), to_expr(r, scope))
        case SPair(fst=f, snd=s):
            ef = to_expr(f, scope)
            es = to_expr(s, scope)
            tf = infer_type(scope.env, scope.ctx, ef)
            ts = infer_type(scope.env, scope.ctx, es)
            return mk_app(Const("prod.mk"), tf, ts, ef, es)
        case SEq(lhs=l, rhs=r, heterogeneous=het):
            el = to_expr(l, scope)
            er = to_expr(r, scope)
            tl = infer_type(scope.env, scope.ctx, el)
            if het:
                tr = infer_type(scope.env, scope.ctx, er)
                return mk_app(Const("heq"), tl, el, tr, er)
            return mk_app(Const("eq"), tl, el, er)
        case SBinder(kind=kind, groups=groups, body=body):
            return _convert_binder(kind, list(groups), body, scope)
        case _:
            raise ConvError(f"cannot convert {ast!r}")


def _convert_binder(kind: str, groups, body, scope: Scope) -> Expr:
    opened: list[tuple[str, FreeVar, Expr]] = []
    for names, ty_ast in groups:
        for name in names:
            ty = to_expr(ty_ast, scope)
            fv = FreeVar(scratch_id())
            scope.binders.append((name, fv))
            scope.ctx[fv.id] = ty
            opened.append((name, fv, ty))
    e = to_expr(body, scope)
    for name, fv, ty in reversed(opened):
        scope.binders.pop()
        scope.ctx.pop(fv.id, None)
        body_abs = abstract_fvar(e, fv.id)
        e = Pi(name, ty, body_abs) if kind == "pi" else Lambda(name, ty, body_abs)
    return e
