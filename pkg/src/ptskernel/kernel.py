"""LCF-style kernel: ``Thm`` values can only come out of the rule functions below.

There is no ambient context. Each rule inspects only its argument theorems,
so independent proof constructions cannot interfere.
"""

from __future__ import annotations

from .errors import (
    AmbiguousAxiom,
    DomainMismatch,
    NoAxiom,
    NoRule,
    NotAFunction,
    NotASort,
    NotConvertible,
    PiMismatch,
    SideConditionViolated,
    SpecMismatch,
    TagMismatch,
)
from .ginf import GinfJudgment
from .pts_spec import PtsSpec
from .syntax import (
    DEFAULT_FUEL,
    App,
    Free,
    FreeVar,
    Lam,
    Pi,
    Sort,
    beta_eq,
    close_term,
    hfv,
    open_term,
    whnf,
)

_TOKEN = object()


class Thm:
    """A certified judgment ``subject : type`` under a fixed spec."""

    __slots__ = ("_judgment", "_spec")

    def __init__(self, judgment, spec, _token=None):
        if _token is not _TOKEN:
            raise TypeError("Thm values are only produced by kernel rules")
        object.__setattr__(self, "_judgment", judgment)
        object.__setattr__(self, "_spec", spec)

    def __setattr__(self, name, value):
        raise AttributeError("Thm is immutable")

    @property
    def judgment(self) -> GinfJudgment:
        return self._judgment

    @property
    def spec(self) -> PtsSpec:
        return self._spec

    @property
    def subject(self):
        return self._judgment.subject

    @property
    def type(self):
        return self._judgment.type

    def __eq__(self, other):
        return isinstance(other, Thm) and self._judgment == other._judgment and self._spec == other._spec

    def __hash__(self):
        return hash((self._judgment, self._spec))

    def __repr__(self):
        return f"Thm({self.subject!r} : {self.type!r})"


def _thm(spec, subject, type_):
    return Thm(GinfJudgment(subject, type_), spec, _TOKEN)


def _same_spec(*thms):
    spec = thms[0].spec
    for t in thms[1:]:
        if t.spec != spec:
            raise SpecMismatch("theorems were checked under different specs")
    return spec


def _sort_name(t: Thm) -> str:
    if not isinstance(t.type, Sort):
        raise NotASort("theorem's type is not a sort")
    return t.type.name


def mk_sort(spec: PtsSpec, s1: str) -> Thm:
    targets = spec.axiom(s1)
    if not targets:
        raise NoAxiom(f"no axiom for sort {s1}")
    if len(targets) > 1:
        raise AmbiguousAxiom(f"sort {s1} has several axioms")
    (s2,) = targets
    return _thm(spec, Sort(s1), Sort(s2))


def mk_var(t: Thm, name: str) -> Thm:
    """From ``A : s`` conclude ``name^{A} : A``."""
    _sort_name(t)
    return _thm(t.spec, Free(FreeVar(name, t.subject)), t.subject)


def _pi_target(spec, s1, s2):
    targets = spec.rule(s1, s2)
    if not targets:
        raise NoRule(f"no rule ({s1}, {s2}, _)")
    if len(targets) > 1:
        raise NoRule(f"rule ({s1}, {s2}, _) is ambiguous")
    (s3,) = targets
    return s3


def mk_pi(t_dom: Thm, t_cod: Thm, eigen: FreeVar) -> Thm:
    """From ``A : s1`` and ``B : s2`` conclude ``Pi A. B[eigen := 0] : s3``."""
    spec = _same_spec(t_dom, t_cod)
    s1, s2 = _sort_name(t_dom), _sort_name(t_cod)
    if eigen.tag != t_dom.subject:
        raise TagMismatch("eigenvariable's tag is not the domain")
    cod = close_term(t_cod.subject, eigen)
    if eigen in hfv(cod):
        raise SideConditionViolated(f"{eigen.name} still occurs hereditarily after closing")
    s3 = _pi_target(spec, s1, s2)
    return _thm(spec, Pi(t_dom.subject, cod), Sort(s3))


def mk_lam(t_body: Thm, t_pi: Thm, eigen: FreeVar) -> Thm:
    """From ``M : B`` and ``Pi A. B[eigen := 0] : s`` conclude ``Lam A. M[eigen := 0]``."""
    spec = _same_spec(t_body, t_pi)
    _sort_name(t_pi)
    pi = t_pi.subject
    if not isinstance(pi, Pi):
        raise PiMismatch("second theorem is not about a Pi type")
    if eigen.tag != pi.domain:
        raise TagMismatch("eigenvariable's tag is not the Pi domain")
    if close_term(t_body.type, eigen) != pi.codomain:
        raise PiMismatch("body type does not match the Pi codomain")
    body = close_term(t_body.subject, eigen)
    if eigen in hfv(body) or eigen in hfv(pi.codomain):
        raise SideConditionViolated(f"{eigen.name} still occurs hereditarily after closing")
    return _thm(spec, Lam(pi.domain, body), pi)


def mk_app(t_fun: Thm, t_arg: Thm, fuel: int = DEFAULT_FUEL) -> Thm:
    spec = _same_spec(t_fun, t_arg)
    fun_ty = whnf(t_fun.type, fuel)
    if not isinstance(fun_ty, Pi):
        raise NotAFunction("function theorem's type is not a Pi type")
    if not beta_eq(fun_ty.domain, t_arg.type, fuel):
        raise DomainMismatch("argument type is not convertible to the domain")
    return _thm(spec, App(t_fun.subject, t_arg.subject), open_term(fun_ty.codomain, t_arg.subject))


def mk_conv(t: Thm, t_type: Thm, fuel: int = DEFAULT_FUEL) -> Thm:
    """From ``M : A`` and ``B : s`` with ``A =β B`` conclude ``M : B``."""
    spec = _same_spec(t, t_type)
    _sort_name(t_type)
    if not beta_eq(t.type, t_type.subject, fuel):
        raise NotConvertible("types are not beta-convertible")
    return _thm(spec, t.subject, t_type.subject)
