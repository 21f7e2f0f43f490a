"""Moving judgments between the contextful and the context-free presentation."""

from __future__ import annotations

import heapq

from .errors import CyclicTags, KernelError, NotDerivable, UndeclaredFreeVariable
from .ginf import GinfJudgment, ginf_check
from .pts_check import Context, ContextfulJudgment, Decl, check_judgment
from .pts_spec import PtsSpec
from .syntax import DEFAULT_FUEL, Free, FreeVar, fv, hfv, hfv_ordered, subst_many


class CorrespondenceFailure(KernelError):
    """A converted judgment failed its re-check. Indicates a kernel bug."""


def is_annotated(j: ContextfulJudgment) -> bool:
    """Every declaration is ``x^{B} : B`` and the subject and type mention only declared variables."""
    if any(d.var.tag != d.type for d in j.ctx):
        return False
    dom = set(j.ctx.dom())
    return fv(j.subject) <= dom and fv(j.type) <= dom


def standard_name(i: int) -> str:
    return f"x{i}"


def annotate(j: ContextfulJudgment) -> ContextfulJudgment:
    """Rename the context variables, left to right, to ``x1^{B1} : B1, x2^{B2} : B2, ...``.

    Renaming is simultaneous, so pre-existing variables that already use the
    standard names cannot be captured. Binder variables are indices already.
    """
    dom = set(j.ctx.dom())
    stray = (fv(j.subject) | fv(j.type)) - dom
    if stray:
        names = ", ".join(sorted(v.name for v in stray))
        raise UndeclaredFreeVariable(f"free variables not declared in the context: {names}")
    mapping = {}
    decls = []
    for i, d in enumerate(j.ctx, 1):
        ty = subst_many(d.type, mapping)
        new = FreeVar(standard_name(i), ty)
        mapping[d.var] = Free(new)
        decls.append(Decl(new, ty))
    return ContextfulJudgment(
        Context(tuple(decls)), subst_many(j.subject, mapping), subst_many(j.type, mapping))


def to_ginf(j: ContextfulJudgment, spec: PtsSpec, fuel: int = DEFAULT_FUEL) -> GinfJudgment:
    """Drop the context of a derivable type-annotated judgment."""
    if not is_annotated(j):
        raise NotDerivable("judgment is not type annotated")
    if not check_judgment(spec, j, fuel):
        raise NotDerivable("judgment is not derivable")
    g = GinfJudgment(j.subject, j.type)
    if not ginf_check(spec, g, fuel):
        raise CorrespondenceFailure("derivable annotated judgment rejected without its context")
    return g


def tag_order(variables) -> list:
    """Topologically sort ``variables`` so each comes after those in its tag.

    Ties go to the earliest position in ``variables``.
    """
    variables = list(variables)
    pos = {v: i for i, v in enumerate(variables)}
    deps = {v: {u for u in hfv(v.tag) if u in pos} for v in variables}
    users = {v: [] for v in variables}
    for v, ds in deps.items():
        for u in ds:
            users[u].append(v)
    missing = {v: len(ds) for v, ds in deps.items()}
    ready = [pos[v] for v in variables if missing[v] == 0]
    heapq.heapify(ready)
    out = []
    while ready:
        v = variables[heapq.heappop(ready)]
        out.append(v)
        for w in users[v]:
            missing[w] -= 1
            if missing[w] == 0:
                heapq.heappush(ready, pos[w])
    if len(out) != len(variables):
        raise CyclicTags("tag-occurrence relation is cyclic")
    return out


def synthesize_context(j: GinfJudgment, spec: PtsSpec, fuel: int = DEFAULT_FUEL) -> ContextfulJudgment:
    """Build the annotated context ``x^{A} : A`` for exactly ``hfv(subject) | hfv(type)``."""
    if not ginf_check(spec, j, fuel):
        raise NotDerivable("judgment is not derivable")
    order = tag_order(hfv_ordered(j.subject, j.type))
    ctx = Context(tuple(Decl(v, v.tag) for v in order))
    out = ContextfulJudgment(ctx, j.subject, j.type)
    if not check_judgment(spec, out, fuel):
        raise CorrespondenceFailure("synthesized context does not check")
    return out


def valid_orders(variables):
    """Every ordering of ``variables`` in which each variable follows those in its tag."""
    variables = list(variables)
    deps = {v: {u for u in hfv(v.tag) if u in set(variables)} for v in variables}

    def go(placed, rest):
        if not rest:
            yield list(placed)
            return
        for v in rest:
            if deps[v] <= set(placed):
                placed.append(v)
                yield from go(placed, [u for u in rest if u != v])
                placed.pop()

    yield from go([], variables)
