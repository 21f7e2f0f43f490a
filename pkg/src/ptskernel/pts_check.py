"""Contextful PTS checking (judgments ``ctx |- m : A``) and the context algebra."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import (
    DomainMismatch,
    IllegalCodomain,
    IllegalDomain,
    IllFormedTerm,
    NoAxiom,
    NonFunctionalSpec,
    NoRule,
    NotAFunction,
    NotDerivable,
    TypingError,
    UnboundVariable,
)
from .pts_spec import PtsSpec
from .syntax import (
    DEFAULT_FUEL,
    Bound,
    Free,
    FreeVar,
    Lam,
    Pi,
    Sort,
    Term,
    beta_eq,
    close_term,
    fresh_var,
    fv,
    hfv,
    open_term,
    require_locally_closed,
    whnf,
)


@dataclass(frozen=True)
class Decl:
    var: FreeVar
    type: Term


@dataclass(frozen=True)
class Context:
    """Ordered declarations with pairwise distinct variables."""

    decls: tuple = ()

    def __post_init__(self):
        decls = tuple(d if isinstance(d, Decl) else Decl(*d) for d in self.decls)
        object.__setattr__(self, "decls", decls)
        seen = set()
        for d in decls:
            if d.var in seen:
                raise ValueError(f"variable {d.var.name} declared twice")
            seen.add(d.var)
            require_locally_closed(d.type, "declared type")

    def __iter__(self) -> Iterator[Decl]:
        return iter(self.decls)

    def __len__(self):
        return len(self.decls)

    def __getitem__(self, i):
        return self.decls[i]

    def dom(self) -> tuple:
        return tuple(d.var for d in self.decls)

    def lookup(self, v: FreeVar) -> Optional[Term]:
        for d in self.decls:
            if d.var == v:
                return d.type
        return None

    def extend(self, v: FreeVar, ty: Term) -> "Context":
        return Context(self.decls + (Decl(v, ty),))

    def prefix(self, n: int) -> "Context":
        return Context(self.decls[:n])

    def restrict(self, keep) -> "Context":
        return Context(tuple(d for d in self.decls if d.var in keep))

    def hfv(self) -> frozenset:
        out = frozenset()
        for d in self.decls:
            out |= hfv(Free(d.var)) | hfv(d.type)
        return out


@dataclass(frozen=True)
class ContextfulJudgment:
    ctx: Context
    subject: Term
    type: Term

    def __post_init__(self):
        require_locally_closed(self.subject, "subject")
        require_locally_closed(self.type, "type")


def _require_functional(spec: PtsSpec):
    if not spec.is_functional():
        raise NonFunctionalSpec("syntax-directed checking needs a functional spec")


def _the_axiom(spec, s):
    targets = spec.axiom(s)
    if not targets:
        raise NoAxiom(f"no axiom for sort {s}")
    (t,) = targets
    return Sort(t)


def _the_rule(spec, s1, s2):
    targets = spec.rule(s1, s2)
    if not targets:
        raise NoRule(f"no rule ({s1}, {s2}, _)")
    (t,) = targets
    return t


class _Checker:
    def __init__(self, spec: PtsSpec, fuel: int):
        self.spec = spec
        self.fuel = fuel

    def infer(self, ctx: Context, m: Term) -> Term:
        if isinstance(m, Sort):
            return _the_axiom(self.spec, m.name)
        if isinstance(m, Free):
            ty = ctx.lookup(m.var)
            if ty is None:
                raise UnboundVariable(f"{m.var.name} is not declared")
            return ty
        if isinstance(m, Bound):
            raise IllFormedTerm("dangling bound index")
        if isinstance(m, Pi):
            s1 = self.sort_of(ctx, m.domain, IllegalDomain)
            y = self.fresh(ctx, m)
            s2 = self.sort_of(ctx.extend(y, m.domain), open_term(m.codomain, Free(y)), IllegalCodomain)
            return Sort(_the_rule(self.spec, s1, s2))
        if isinstance(m, Lam):
            self.sort_of(ctx, m.domain, IllegalDomain)
            y = self.fresh(ctx, m)
            body_ty = self.infer(ctx.extend(y, m.domain), open_term(m.body, Free(y)))
            pi = Pi(m.domain, close_term(body_ty, y))
            self.sort_of(ctx, pi, IllegalCodomain)
            return pi
        fun_ty = whnf(self.infer(ctx, m.fun), self.fuel)
        if not isinstance(fun_ty, Pi):
            raise NotAFunction("applied term does not have a Pi type")
        arg_ty = self.infer(ctx, m.arg)
        if not beta_eq(fun_ty.domain, arg_ty, self.fuel):
            raise DomainMismatch("argument type is not convertible to the domain")
        return open_term(fun_ty.codomain, m.arg)

    def sort_of(self, ctx, a, err=IllegalDomain) -> str:
        ty = whnf(self.infer(ctx, a), self.fuel)
        if not isinstance(ty, Sort):
            raise err("expected a term whose type is a sort")
        return ty.name

    @staticmethod
    def fresh(ctx: Context, m: Term) -> FreeVar:
        return fresh_var(m.domain, ctx.hfv() | hfv(m))

    def check_context(self, ctx: Context) -> None:
        for i, d in enumerate(ctx):
            prefix = ctx.prefix(i)
            if prefix.lookup(d.var) is not None:
                raise NotDerivable(f"{d.var.name} declared twice")
            self.sort_of(prefix, d.type, IllegalDomain)


def infer_type(spec: PtsSpec, ctx: Context, m: Term, fuel: int = DEFAULT_FUEL,
               check_context: bool = True) -> Term:
    """Synthesize the type of ``m`` under ``ctx`` by the syntax-directed PTS rules.

    Raises a TypingError subclass on rejection and FuelExhausted when a
    conversion could not be decided.
    """
    _require_functional(spec)
    require_locally_closed(m, "subject")
    checker = _Checker(spec, fuel)
    if check_context:
        checker.check_context(ctx)
    return checker.infer(ctx, m)


def _type_acceptable(checker: _Checker, ctx, inferred, expected) -> bool:
    if inferred == expected:
        return True
    if not isinstance(expected, Sort):
        try:
            checker.sort_of(ctx, expected)
        except TypingError:
            return False
    return beta_eq(inferred, expected, checker.fuel)


def check_judgment(spec: PtsSpec, j: ContextfulJudgment, fuel: int = DEFAULT_FUEL) -> bool:
    """Whether ``j`` is derivable. FuelExhausted propagates."""
    _require_functional(spec)
    checker = _Checker(spec, fuel)
    try:
        checker.check_context(j.ctx)
        inferred = checker.infer(j.ctx, j.subject)
    except TypingError:
        return False
    return _type_acceptable(checker, j.ctx, inferred, j.type)


def wf_context(spec: PtsSpec, ctx: Context, fuel: int = DEFAULT_FUEL) -> bool:
    _require_functional(spec)
    try:
        _Checker(spec, fuel).check_context(ctx)
    except TypingError:
        return False
    return True


# -- context algebra ----------------------------------------------------------


def compatible(g: Context, d: Context) -> bool:
    """Shared variables must carry syntactically identical types."""
    for decl in d:
        ty = g.lookup(decl.var)
        if ty is not None and ty != decl.type:
            return False
    return True


def merge(g: Context, d: Context) -> Context:
    """``g`` followed by the declarations of ``d`` whose variable ``g`` lacks."""
    dom = set(g.dom())
    return Context(g.decls + tuple(x for x in d if x.var not in dom))


def can_strengthen(ctx: Context, v: FreeVar, subject: Term, type_: Term) -> bool:
    """Side condition for dropping ``v``: it is not free in later types, subject or type."""
    idx = ctx.dom().index(v)
    if v in fv(subject) or v in fv(type_):
        return False
    return all(v not in fv(d.type) for d in ctx.decls[idx + 1:])


def strengthen(ctx: Context, v: FreeVar) -> Context:
    return Context(tuple(d for d in ctx if d.var != v))


def can_swap(ctx: Context, i: int) -> bool:
    """Whether declarations ``i`` and ``i + 1`` may be exchanged."""
    return ctx[i].var not in fv(ctx[i + 1].type)


def swap(ctx: Context, i: int) -> Context:
    if not can_swap(ctx, i):
        raise ValueError("later declaration depends on the earlier one")
    decls = list(ctx.decls)
    decls[i], decls[i + 1] = decls[i + 1], decls[i]
    return Context(tuple(decls))


def strengthen_to_hfv(spec: PtsSpec, j: ContextfulJudgment, fuel: int = DEFAULT_FUEL) -> Context:
    """Drop, right to left, every declaration outside ``hfv(subject) | hfv(type)``.

    Every intermediate judgment is re-checked instead of trusting the
    strengthening meta-theorem.
    """
    if not check_judgment(spec, j, fuel):
        raise NotDerivable("judgment is not derivable")
    keep = hfv(j.subject) | hfv(j.type)
    ctx = j.ctx
    for d in reversed(j.ctx.decls):
        if d.var in keep:
            continue
        ctx = strengthen(ctx, d.var)
        if not check_judgment(spec, ContextfulJudgment(ctx, j.subject, j.type), fuel):
            raise NotDerivable(f"cannot drop {d.var.name}")
    return ctx

