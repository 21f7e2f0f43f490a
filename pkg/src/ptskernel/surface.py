"""Concrete syntax for terms and contexts.

    term   ::= ('\\' | 'λ') NAME ':' term '.' term      lambda
             | ('!' | 'Π') NAME ':' term '.' term      Pi
             | app ('->' | '→') term                  non-dependent Pi
             | app
    app    ::= atom atom*                             left associative
    atom   ::= SORT | NAME | NAME '^' '{' term '}' | NAME '^' SORT | '(' term ')'

``#`` spells the top cube sort; ``□`` is accepted for it. Names bound by an
enclosing binder become indices. Tags are closed: they never see outer binders.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .errors import ParseError, UnboundName
from .pts_check import Context, Decl
from .pts_spec import BOX, SORT_ALIASES, STAR
from .syntax import (
    UNIT_TAG,
    App,
    Bound,
    Free,
    FreeVar,
    Lam,
    Pi,
    Sort,
    Term,
    hfv,
    occurs_bound,
    shift,
)

DEFAULT_SORTS = frozenset({STAR, BOX})

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<arrow>->|→)
  | (?P<lam>\\|λ)
  | (?P<pi>!|Π)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*|[0-9]+)
  | (?P<punct>[(){}^:.])
  | (?P<sym>\S)
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    start: int
    end: int


def tokenize(text: str) -> list:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), m.start(), m.end()))
        pos = m.end()
    out.append(Token("eof", "", len(text), len(text)))
    return out


class _Parser:
    def __init__(self, text, sorts, mode, ctx):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.sorts = frozenset(sorts)
        self.mode = mode
        self.ctx_names = {}
        if ctx is not None:
            for d in ctx:
                self.ctx_names.setdefault(d.var.name, []).append(d.var)
        self.has_ctx = ctx is not None

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def error(self, msg, tok=None, cls=ParseError):
        tok = tok or self.tok
        return cls(msg, (tok.start, tok.end))

    def expect(self, kind, text=None) -> Token:
        t = self.tok
        if t.kind != kind or (text is not None and t.text != text):
            want = text or kind
            got = t.text or "end of input"
            raise self.error(f"expected {want!r}, found {got!r}")
        return self.advance()

    def sort_name(self, tok) -> Optional[str]:
        text = SORT_ALIASES.get(tok.text, tok.text)
        if tok.kind in ("name", "sym") and text in self.sorts:
            return text
        return None

    def parse(self) -> Term:
        t = self.term([])
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")
        return t

    def term(self, env) -> Term:
        tok = self.tok
        if tok.kind in ("lam", "pi"):
            self.advance()
            name = self.expect("name")
            if self.sort_name(name) is not None:
                raise self.error("a sort cannot be bound", name)
            self.expect("punct", ":")
            dom = self.term(env)
            self.expect("punct", ".")
            body = self.term(env + [name.text])
            return Lam(dom, body) if tok.kind == "lam" else Pi(dom, body)
        left = self.app(env)
        if self.tok.kind == "arrow":
            self.advance()
            right = self.term(env + [None])
            return Pi(left, right)
        return left

    def starts_atom(self) -> bool:
        t = self.tok
        return t.kind == "name" or t.kind == "sym" or (t.kind == "punct" and t.text == "(")

    def app(self, env) -> Term:
        t = self.atom(env)
        while self.starts_atom():
            t = App(t, self.atom(env))
        return t

    def atom(self, env) -> Term:
        tok = self.tok
        if tok.kind == "punct" and tok.text == "(":
            self.advance()
            t = self.term(env)
            self.expect("punct", ")")
            return t
        s = self.sort_name(tok)
        if s is not None:
            self.advance()
            return Sort(s)
        if tok.kind == "sym":
            raise self.error(f"unknown symbol {tok.text!r}")
        if tok.kind != "name":
            raise self.error(f"expected a term, found {tok.text or 'end of input'!r}")
        self.advance()
        if not re.match(r"[A-Za-z_]", tok.text):
            raise self.error(f"invalid name {tok.text!r}", tok)
        if self.tok.kind == "punct" and self.tok.text == "^":
            self.advance()
            if self.tok.kind == "punct" and self.tok.text == "{":
                self.advance()
                tag = self.term([])
                self.expect("punct", "}")
            else:
                s = self.sort_name(self.tok)
                if s is None:
                    raise self.error("a tag needs braces unless it is a single sort")
                self.advance()
                tag = Sort(s)
            return Free(FreeVar(tok.text, tag))
        for k, bound in enumerate(reversed(env)):
            if bound == tok.text:
                return Bound(k)
        return self.unbound(tok)

    def unbound(self, tok) -> Term:
        if self.mode == "ginf":
            raise self.error(f"unbound name {tok.text!r}", tok, UnboundName)
        if self.has_ctx:
            found = self.ctx_names.get(tok.text, [])
            if len(found) == 1:
                return Free(found[0])
            if found:
                raise self.error(f"name {tok.text!r} is ambiguous in the context", tok, UnboundName)
            raise self.error(f"name {tok.text!r} is not declared", tok, UnboundName)
        return Free(FreeVar(tok.text, UNIT_TAG))


def parse_term(text: str, *, mode: str = "ginf", ctx: Optional[Context] = None,
               sorts=DEFAULT_SORTS) -> Term:
    """Parse a term.

    In ``"ginf"`` mode every free variable must be tagged. In ``"pts"`` mode a
    bare name refers to the context declaration of that name, or, with no
    context, to a variable carrying the unit tag.
    """
    if mode not in ("ginf", "pts"):
        raise ValueError(f"unknown mode {mode!r}")
    return _Parser(text, sorts, mode, ctx).parse()


def parse_context(text: str, *, annotated: bool = False, sorts=DEFAULT_SORTS) -> Context:
    """One ``name^{tag} : type`` or ``name : type`` declaration per line; ``;`` comments.

    Untagged names get the unit tag, or their declared type when ``annotated``.
    """
    ctx = Context()
    offset = 0
    for raw in text.splitlines(keepends=True):
        if raw.strip() and not raw.lstrip().startswith(";"):
            ctx = _parse_decl(raw, offset, ctx, annotated, sorts)
        offset += len(raw)
    return ctx


def _parse_decl(line, offset, ctx, annotated, sorts) -> Context:
    p = _Parser(line, sorts, "pts", ctx)
    name = p.expect("name")
    tag = None
    if p.tok.kind == "punct" and p.tok.text == "^":
        p.advance()
        if p.tok.kind == "punct" and p.tok.text == "{":
            p.advance()
            tag = p.term([])
            p.expect("punct", "}")
        else:
            s = p.sort_name(p.tok)
            if s is None:
                raise ParseError("a tag needs braces unless it is a single sort",
                                 (offset + p.tok.start, offset + p.tok.end))
            p.advance()
            tag = Sort(s)
    p.expect("punct", ":")
    ty = p.term([])
    if p.tok.kind != "eof":
        raise ParseError(f"unexpected {p.tok.text!r}", (offset + p.tok.start, offset + p.tok.end))
    if tag is None:
        tag = ty if annotated else UNIT_TAG
    v = FreeVar(name.text, tag)
    if ctx.lookup(v) is not None:
        raise ParseError(f"{name.text} declared twice", (offset + name.start, offset + name.end))
    return Context(ctx.decls + (Decl(v, ty),))


# -- printing -----------------------------------------------------------------

_TOP, _APP, _ATOM = 0, 1, 2


def _binder_name(env, avoid) -> str:
    i = len(env)
    while True:
        n = f"x{i}"
        if n not in avoid and n not in env:
            return n
        i += 1


def print_term(t: Term) -> str:
    """Render ``t`` so that ``parse_term(print_term(t), mode=...) == t``."""
    return _Printer(t).show(t, [], _TOP)


class _Printer:
    def __init__(self, root):
        self.avoid = {v.name for v in hfv(root)}

    def show(self, t, env, prec) -> str:
        if isinstance(t, Sort):
            return t.name
        if isinstance(t, Bound):
            return env[len(env) - 1 - t.index]
        if isinstance(t, Free):
            v = t.var
            if v.tag == UNIT_TAG:
                return v.name
            return f"{v.name}^{{{_Printer(v.tag).show(v.tag, [], _TOP)}}}"
        if isinstance(t, App):
            s = f"{self.show(t.fun, env, _APP)} {self.show(t.arg, env, _ATOM)}"
            return f"({s})" if prec > _APP else s
        if isinstance(t, Pi) and not occurs_bound(t.codomain):
            cod = _drop_binder(t.codomain)
            s = f"{self.show(t.domain, env, _APP)} -> {self.show(cod, env, _TOP)}"
            return f"({s})" if prec > _TOP else s
        body = t.codomain if isinstance(t, Pi) else t.body
        x = _binder_name(env, self.avoid)
        dom = self.show(t.domain, env, _TOP)
        if isinstance(t.domain, Lam) or (isinstance(t.domain, Pi) and occurs_bound(t.domain.codomain)):
            dom = f"({dom})"
        lead = "!" if isinstance(t, Pi) else "\\"
        s = f"{lead}{x} : {dom}. {self.show(body, env + [x], _TOP)}"
        return f"({s})" if prec > _TOP else s


def _drop_binder(t: Term) -> Term:
    """Remove an unused binder level: indices above 0 move down by one."""
    return shift(t, -1, 1)


def print_context(ctx: Context) -> str:
    lines = []
    for d in ctx:
        head = d.var.name if d.var.tag == UNIT_TAG else print_term(Free(d.var))
        lines.append(f"{head} : {print_term(d.type)}")
    return "\n".join(lines)


def print_judgment(j) -> str:
    ctx = getattr(j, "ctx", None)
    body = f"{print_term(j.subject)} : {print_term(j.type)}"
    if ctx is None:
        return body
    return f"{', '.join(print_context(Context((d,))) for d in ctx)} |- {body}"
