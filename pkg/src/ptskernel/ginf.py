"""Context-free checking: judgments ``m : A`` over type-tagged free variables.

Binders are checked by opening them with a fresh eigenvariable ``y^A`` that is
not hereditarily free in the body, then closing it again; a result in which
the eigenvariable still occurs (necessarily inside some tag) is rejected.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    DomainMismatch,
    FuelExhausted,
    IllegalCodomain,
    IllegalDomain,
    IllFormedTerm,
    NoAxiom,
    NonFunctionalSpec,
    NoRule,
    NotAFunction,
    SideConditionViolated,
    TagNotASort,
    TypingError,
)
from .pts_spec import PtsSpec
from .syntax import (
    DEFAULT_FUEL,
    Bound,
    Free,
    Lam,
    Pi,
    Sort,
    Term,
    beta_eq,
    close_term,
    fresh_var,
    hfv,
    open_term,
    require_locally_closed,
    whnf,
)


@dataclass(frozen=True)
class GinfJudgment:
    subject: Term
    type: Term

    def __post_init__(self):
        require_locally_closed(self.subject, "subject")
        require_locally_closed(self.type, "type")


def eigen_open(binder_domain: Term, body: Term, avoid) -> tuple:
    """Pick ``x<i>^{binder_domain}`` outside ``avoid`` and open ``body`` with it."""
    y = fresh_var(binder_domain, avoid)
    return y, open_term(body, Free(y))


class _Inferrer:
    def __init__(self, spec: PtsSpec, fuel: int):
        self.spec = spec
        self.fuel = fuel
        # tag -> sort name; tags recur constantly, each is checked once
        self.tag_sorts: dict = {}

    def infer(self, m: Term) -> Term:
        if isinstance(m, Sort):
            targets = self.spec.axiom(m.name)
            if not targets:
                raise NoAxiom(f"no axiom for sort {m.name}")
            (s2,) = targets
            return Sort(s2)
        if isinstance(m, Free):
            tag = m.var.tag
            if tag not in self.tag_sorts:
                try:
                    self.tag_sorts[tag] = self.sort_of(tag)
                except FuelExhausted:
                    raise
                except TypingError as e:
                    raise TagNotASort(f"tag of {m.var.name} is not typable by a sort: {e}") from e
            return tag
        if isinstance(m, Bound):
            raise IllFormedTerm("dangling bound index")
        if isinstance(m, Pi):
            s1 = self.sort_of(m.domain, IllegalDomain)
            y, body = eigen_open(m.domain, m.codomain, hfv(m.codomain))
            s2 = self.under_binder(m.codomain, m.domain, lambda b: self.sort_of(b, IllegalCodomain), body)
            targets = self.spec.rule(s1, s2)
            if not targets:
                raise NoRule(f"no rule ({s1}, {s2}, _)")
            (s3,) = targets
            return Sort(s3)
        if isinstance(m, Lam):
            self.sort_of(m.domain, IllegalDomain)
            y, body = eigen_open(m.domain, m.body, hfv(m.body))
            body_ty = self.under_binder(m.body, m.domain, self.infer, body)
            cod = close_term(body_ty, y)
            if y in hfv(cod):
                raise SideConditionViolated(
                    f"eigenvariable {y.name} escapes through a tag in the body's type")
            pi = Pi(m.domain, cod)
            self.sort_of(pi, IllegalCodomain)
            return pi
        fun_ty = whnf(self.infer(m.fun), self.fuel)
        if not isinstance(fun_ty, Pi):
            raise NotAFunction("applied term does not have a Pi type")
        arg_ty = self.infer(m.arg)
        if not beta_eq(fun_ty.domain, arg_ty, self.fuel):
            raise DomainMismatch("argument type is not convertible to the domain")
        return open_term(fun_ty.codomain, m.arg)

    def under_binder(self, raw_body, domain, check, opened):
        """Run ``check`` on the opened body.

        On rejection, look for a variable already free in the body that carries
        the binder's tag and under which the body *would* check: the binder
        could only be typed by abstracting that variable, which the side
        condition forbids because it stays hereditarily free.
        """
        try:
            return check(opened)
        except FuelExhausted:
            raise
        except TypingError as err:
            for z in sorted(hfv(raw_body), key=lambda v: v.name):
                if z.tag != domain:
                    continue
                try:
                    check(open_term(raw_body, Free(z)))
                except TypingError:
                    continue
                raise SideConditionViolated(
                    f"binder can only be typed by abstracting {z.name}, "
                    f"which remains hereditarily free in the body") from err
            raise

    def sort_of(self, a: Term, err=IllegalDomain) -> str:
        ty = whnf(self.infer(a), self.fuel)
        if not isinstance(ty, Sort):
            raise err("expected a term whose type is a sort")
        return ty.name


def ginf_infer(spec: PtsSpec, m: Term, fuel: int = DEFAULT_FUEL) -> Term:
    """Synthesize ``A`` with ``m : A`` derivable without any context."""
    if not spec.is_functional():
        raise NonFunctionalSpec("syntax-directed checking needs a functional spec")
    require_locally_closed(m, "subject")
    return _Inferrer(spec, fuel).infer(m)


def ginf_check(spec: PtsSpec, j: GinfJudgment, fuel: int = DEFAULT_FUEL) -> bool:
    """Whether ``j`` is derivable. FuelExhausted propagates."""
    if not spec.is_functional():
        raise NonFunctionalSpec("syntax-directed checking needs a functional spec")
    inf = _Inferrer(spec, fuel)
    try:
        inferred = inf.infer(j.subject)
        if inferred == j.type:
            return True
        if not isinstance(j.type, Sort):
            inf.sort_of(j.type)
    except TypingError:
        return False
    return beta_eq(inferred, j.type, fuel)


def ginf_diagnose(spec: PtsSpec, j: GinfJudgment, fuel: int = DEFAULT_FUEL):
    """Like ginf_check but returns ``(ok, inferred_or_None, error_or_None)``."""
    inf = _Inferrer(spec, fuel)
    try:
        inferred = inf.infer(j.subject)
    except TypingError as e:
        return False, None, e
    try:
        if inferred != j.type and not isinstance(j.type, Sort):
            inf.sort_of(j.type)
    except TypingError as e:
        return False, inferred, e
    return beta_eq(inferred, j.type, fuel), inferred, None
