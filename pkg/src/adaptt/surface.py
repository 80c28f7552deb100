"""Concrete syntax: lexer, recursive-descent parser, surface AST.

One unified expression grammar covers types, terms and adapters; the
elaborator sorts expressions by the position they appear in.  Comments
run from ``--`` to end of line.  The grammar is documented in
``docs/grammar.md``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int, expected=()):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col
        self.expected = tuple(expected)


Span = tuple[int, int]

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+|--[^\n]*)
  | (?P<punct>\[\[|\]\]|:=|=>|->|\*\*|<\||\^-|[()>{}\[\];:,.=])
  | (?P<name>Ty[+-]|[A-Za-z_][A-Za-z0-9_']*)
""", re.VERBOSE)

KEYWORDS = {
    "base", "postulate", "adapter", "var", "covar", "def", "data",
    "check", "asserteq", "normalize", "fun", "fst", "snd", "id",
}


@dataclass(frozen=True)
class Token:
    kind: str   # "name", "kw", or the punctuation itself
    text: str
    span: Span


def lex(text: str) -> list[Token]:
    out = []
    line, col, i = 1, 1, 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if not m:
            raise ParseError(f"stray character {text[i]!r}", line, col)
        chunk = m.group(0)
        if m.lastgroup == "punct":
            out.append(Token(chunk, chunk, (line, col)))
        elif m.lastgroup == "name":
            kind = "kw" if chunk in KEYWORDS else "name"
            out.append(Token(kind, chunk, (line, col)))
        nl = chunk.count("\n")
        if nl:
            line += nl
            col = len(chunk) - chunk.rfind("\n")
        else:
            col += len(chunk)
        i = m.end()
    out.append(Token("eof", "", (line, col)))
    return out


# ---------------------------------------------------------------------------
# Surface AST
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SName:
    name: str
    span: Span


@dataclass(frozen=True)
class SApp:
    fn: SExpr
    arg: SExpr
    span: Span


@dataclass(frozen=True)
class SArrow:
    binder: str | None
    dom: SExpr
    cod: SExpr
    span: Span


@dataclass(frozen=True)
class SStar:
    binder: str | None
    fst: SExpr
    snd: SExpr
    span: Span


@dataclass(frozen=True)
class SFun:
    binder: str
    dom: SExpr
    body: SExpr
    span: Span


@dataclass(frozen=True)
class SFst:
    arg: SExpr
    span: Span


@dataclass(frozen=True)
class SSnd:
    arg: SExpr
    span: Span


@dataclass(frozen=True)
class SPair:
    fst: SExpr
    snd: SExpr
    ty: SExpr
    span: Span


@dataclass(frozen=True)
class SCast:
    tm: SExpr
    ad: SExpr
    span: Span


@dataclass(frozen=True)
class SComp:
    after: SExpr
    before: SExpr
    span: Span


@dataclass(frozen=True)
class SId:
    at: SExpr | None
    span: Span


@dataclass(frozen=True)
class SSpineComp:
    binders: tuple[str, ...]
    body: SExpr
    span: Span


@dataclass(frozen=True)
class SPush:
    head: SExpr
    comps: tuple[SSpineComp, ...]
    span: Span


@dataclass(frozen=True)
class SFam:
    """Type family with explicit binders: ``(x y => T)``."""

    binders: tuple[str, ...]
    body: SExpr
    span: Span


SExpr = (SName | SApp | SArrow | SStar | SFun | SFst | SSnd | SPair
         | SCast | SComp | SId | SPush | SFam)


@dataclass(frozen=True)
class PTyParam:
    name: str
    tele: tuple[tuple[str, SExpr], ...]
    dir: str   # "+" or "-"
    span: Span


@dataclass(frozen=True)
class PTmParam:
    name: str
    ty: SExpr
    span: Span


@dataclass(frozen=True)
class SConDecl:
    name: str
    args: tuple[tuple[str, SExpr], ...]
    result: SExpr
    span: Span


@dataclass(frozen=True)
class DBase:
    name: str
    span: Span


@dataclass(frozen=True)
class DPostulate:
    name: str
    src: SExpr
    tgt: SExpr
    span: Span


@dataclass(frozen=True)
class DVar:
    name: str
    ty: SExpr
    span: Span
    neg: bool = False


@dataclass(frozen=True)
class DDef:
    name: str
    ty: SExpr
    tm: SExpr
    span: Span


@dataclass(frozen=True)
class DData:
    name: str
    params: tuple[PTyParam | PTmParam, ...]
    indices: tuple[tuple[str | None, SExpr], ...]
    cons: tuple[SConDecl, ...]
    span: Span


@dataclass(frozen=True)
class DCheck:
    tm: SExpr
    ty: SExpr
    span: Span


@dataclass(frozen=True)
class DAssertEq:
    lhs: SExpr
    rhs: SExpr
    ty: SExpr
    span: Span


@dataclass(frozen=True)
class DNormalize:
    tm: SExpr
    span: Span


Decl = (DBase | DPostulate | DVar | DDef | DData | DCheck | DAssertEq
        | DNormalize)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class Parser:
    def __init__(self, text: str):
        self.toks = lex(text)
        self.pos = 0

    # -- token plumbing

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.peek()
        self.pos += 1
        return t

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.peek()
        return t.kind == kind and (text is None or t.text == text)

    def eat(self, kind: str, text: str | None = None) -> Token:
        if not self.at(kind, text):
            t = self.peek()
            want = text or kind
            raise ParseError(f"expected {want!r}, found {t.text or 'end of input'!r}",
                             t.span[0], t.span[1], expected=(want,))
        return self.next()

    def name(self) -> Token:
        return self.eat("name")

    # -- declarations

    def file(self) -> list[Decl]:
        out = []
        while not self.at("eof"):
            out.append(self.decl())
        return out

    def decl(self) -> Decl:
        t = self.peek()
        if self.at("kw", "base"):
            self.next()
            n = self.name()
            self.eat(";")
            return DBase(n.text, t.span)
        if self.at("kw", "postulate"):
            self.next()
            self.eat("kw", "adapter")
            n = self.name()
            self.eat(":")
            src = self.expr()
            self.eat("=>")
            tgt = self.expr()
            self.eat(";")
            return DPostulate(n.text, src, tgt, t.span)
        if self.at("kw", "var") or self.at("kw", "covar"):
            neg = self.next().text == "covar"
            n = self.name()
            self.eat(":")
            ty = self.expr()
            self.eat(";")
            return DVar(n.text, ty, t.span, neg)
        if self.at("kw", "def"):
            self.next()
            n = self.name()
            self.eat(":")
            ty = self.expr()
            self.eat(":=")
            tm = self.expr()
            self.eat(";")
            return DDef(n.text, ty, tm, t.span)
        if self.at("kw", "data"):
            return self.data_decl()
        if self.at("kw", "check"):
            self.next()
            tm = self.expr()
            self.eat(":")
            ty = self.expr()
            self.eat(";")
            return DCheck(tm, ty, t.span)
        if self.at("kw", "asserteq"):
            self.next()
            lhs = self.expr()
            self.eat("=")
            rhs = self.expr()
            self.eat(":")
            ty = self.expr()
            self.eat(";")
            return DAssertEq(lhs, rhs, ty, t.span)
        if self.at("kw", "normalize"):
            self.next()
            tm = self.expr()
            self.eat(";")
            return DNormalize(tm, t.span)
        raise ParseError(f"expected a declaration, found {t.text!r}",
                         t.span[0], t.span[1],
                         expected=("base", "postulate", "var", "def", "data",
                                   "check", "asserteq", "normalize"))

    def data_decl(self) -> DData:
        start = self.eat("kw", "data")
        n = self.name()
        params: list[PTyParam | PTmParam] = []
        while self.at("("):
            params.append(self.param())
        indices = []
        while self.at("["):
            self.next()
            if self.at("name") and self.peek(1).text == ":":
                iname = self.name().text
                self.eat(":")
            else:
                iname = None
            indices.append((iname, self.expr()))
            self.eat("]")
        self.eat("{")
        cons = []
        while not self.at("}"):
            cons.append(self.con_decl())
            if self.at(";"):
                self.next()
            else:
                break
        self.eat("}")
        return DData(n.text, tuple(params), tuple(indices), tuple(cons),
                     start.span)

    def param(self) -> PTyParam | PTmParam:
        start = self.eat("(")
        n = self.name()
        self.eat(":")
        save = self.pos
        tele = self.try_ty_param_sort()
        if tele is not None:
            binders, d = tele
            self.eat(")")
            return PTyParam(n.text, binders, d, start.span)
        self.pos = save
        ty = self.expr()
        self.eat(")")
        return PTmParam(n.text, ty, start.span)

    def try_ty_param_sort(self):
        """``(x : A) (y : B) ... Ty+`` or bare ``Ty-``; None if this is
        not a type-parameter sort."""
        binders = []
        try:
            while self.at("("):
                self.next()
                bn = self.name()
                self.eat(":")
                bt = self.expr()
                self.eat(")")
                binders.append((bn.text, bt))
            if self.at("name") and self.peek().text in ("Ty+", "Ty-"):
                d = self.next().text[-1]
                return tuple(binders), d
        except ParseError:
            pass
        return None

    def con_decl(self) -> SConDecl:
        n = self.name()
        self.eat(":")
        args = []
        while self.at("(") and self.peek(1).kind == "name" \
                and self.peek(2).text == ":":
            self.next()
            an = self.name()
            self.eat(":")
            at_ = self.expr()
            self.eat(")")
            args.append((an.text, at_))
        if args:
            self.eat("->")
        result = self.expr()
        return SConDecl(n.text, tuple(args), result, n.span)

    # -- expressions

    def expr(self) -> SExpr:
        return self.arrow()

    def arrow(self) -> SExpr:
        t = self.peek()
        binder = self.try_binder()
        if binder is not None:
            name, dom, kind = binder
            rest = self.arrow() if kind == "->" else self.star_tail_after_binder()
            if kind == "->":
                return SArrow(name, dom, rest, t.span)
            return SStar(name, dom, rest, t.span)
        left = self.star()
        if self.at("->"):
            self.next()
            return SArrow(None, left, self.arrow(), t.span)
        return left

    def star_tail_after_binder(self) -> SExpr:
        return self.arrow()

    def try_binder(self):
        """``(x : A) ->`` or ``(x : A) **`` introduces a binder."""
        if not self.at("("):
            return None
        save = self.pos
        try:
            self.next()
            n = self.name()
            self.eat(":")
            dom = self.expr()
            self.eat(")")
            if self.at("->") or self.at("**"):
                kind = self.next().text
                return n.text, dom, kind
        except ParseError:
            pass
        self.pos = save
        return None

    def star(self) -> SExpr:
        t = self.peek()
        left = self.castlevel()
        if self.at("**"):
            self.next()
            return SStar(None, left, self.star(), t.span)
        return left

    def castlevel(self) -> SExpr:
        t = self.peek()
        out = self.comp()
        while self.at("<|"):
            self.next()
            out = SCast(out, self.comp(), t.span)
        return out

    def comp(self) -> SExpr:
        t = self.peek()
        out = self.juxt()
        while self.at("."):
            self.next()
            out = SComp(out, self.juxt(), t.span)
        return out

    def juxt(self) -> SExpr:
        t = self.peek()
        out = self.postfix()
        while self.starts_atom():
            out = SApp(out, self.postfix(), t.span)
        return out

    def starts_atom(self) -> bool:
        return (self.at("name") or self.at("(")
                or self.at("kw", "fun") or self.at("kw", "fst")
                or self.at("kw", "snd") or self.at("kw", "id"))

    def postfix(self) -> SExpr:
        out = self.atom()
        while self.at("[["):
            t = self.next()
            comps: list[SSpineComp] = []
            if not self.at("]]"):
                comps.append(self.spine_comp())
                while self.at(">"):
                    self.next()
                    comps.append(self.spine_comp())
            self.eat("]]")
            out = SPush(out, tuple(comps), t.span)
        return out

    def spine_comp(self) -> SSpineComp:
        t = self.peek()
        save = self.pos
        binders = []
        while self.at("name"):
            binders.append(self.next().text)
        if binders and self.at("=>"):
            self.next()
            return SSpineComp(tuple(binders), self.expr(), t.span)
        self.pos = save
        return SSpineComp((), self.expr(), t.span)

    def atom(self) -> SExpr:
        t = self.peek()
        if self.at("kw", "fun"):
            self.next()
            self.eat("(")
            n = self.name()
            self.eat(":")
            dom = self.expr()
            self.eat(")")
            self.eat("=>")
            body = self.expr()
            return SFun(n.text, dom, body, t.span)
        if self.at("kw", "fst"):
            self.next()
            return SFst(self.postfix(), t.span)
        if self.at("kw", "snd"):
            self.next()
            return SSnd(self.postfix(), t.span)
        if self.at("kw", "id"):
            self.next()
            if self.starts_atom():
                return SId(self.postfix(), t.span)
            return SId(None, t.span)
        if self.at("name"):
            n = self.next()
            return SName(n.text, n.span)
        if self.at("("):
            self.next()
            fam = self.try_family(t.span)
            if fam is not None:
                return fam
            first = self.expr()
            if self.at(","):
                self.next()
                snd = self.expr()
                self.eat(":")
                ty = self.expr()
                self.eat(")")
                return SPair(first, snd, ty, t.span)
            self.eat(")")
            return first
        raise ParseError(f"expected an expression, found {t.text or 'end of input'!r}",
                         t.span[0], t.span[1],
                         expected=("name", "(", "fun", "fst", "snd", "id"))

    def try_family(self, span: Span) -> SFam | None:
        """After an open paren: ``x y => T )`` is a type family."""
        save = self.pos
        binders = []
        while self.at("name"):
            binders.append(self.next().text)
        if binders and self.at("=>"):
            self.next()
            body = self.expr()
            self.eat(")")
            return SFam(tuple(binders), body, span)
        self.pos = save
        return None


def parse(text: str) -> list[Decl]:
    return Parser(text).file()
