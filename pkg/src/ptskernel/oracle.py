"""Small-scale ground truth: exhaustive term enumeration and declarative rule search.

Nothing here reuses the checkers' rule logic or their reduction machinery.
Binders are opened with ``o<i>`` eigenvariables (the checkers use ``x<i>``),
normal forms are computed by a separate recursive normalizer, and conversion
is searched over the reducts actually reachable from a type.
"""

from __future__ import annotations

from collections import deque
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Iterator, Optional

from .correspond import synthesize_context, to_ginf, valid_orders
from .errors import BudgetExhausted, FuelExhausted, KernelError, TypingError
from .ginf import GinfJudgment, ginf_infer
from .pts_check import Context, ContextfulJudgment, Decl, infer_type, strengthen_to_hfv, wf_context
from .pts_spec import PtsSpec
from .surface import print_term as show
from .syntax import UNIT_TAG, App, Bound, Free, FreeVar, Lam, Pi, Sort, Term, hfv, hfv_ordered


@dataclass(frozen=True)
class EnumBudget:
    max_term_size: int = 4
    max_tag_depth: int = 1
    sort_alphabet: tuple = ("*", "#")
    max_names_per_tag: int = 1
    fuel: int = 500
    names: tuple = ("a", "b", "c", "d", "e")
    max_conv_candidates: int = 32
    max_search_nodes: int = 20_000

    def __post_init__(self):
        object.__setattr__(self, "sort_alphabet", tuple(self.sort_alphabet))
        object.__setattr__(self, "names", tuple(self.names))
        for f in ("max_term_size", "max_tag_depth", "max_names_per_tag", "fuel"):
            if getattr(self, f) <= 0:
                raise ValueError(f"{f} must be positive")
        if not self.sort_alphabet:
            raise ValueError("sort alphabet is empty")
        if self.max_names_per_tag > len(self.names):
            raise ValueError("not enough names in the supply")


# -- enumeration --------------------------------------------------------------


@lru_cache(maxsize=None)
def _terms_of_size(n: int, depth: int, tag_depth: int, sorts: tuple, names: tuple) -> tuple:
    out = []
    if n == 1:
        out += [Sort(s) for s in sorts]
        out += [Bound(i) for i in range(depth)]
        return tuple(out)
    if tag_depth > 0:
        for tag in _terms_of_size(n - 1, 0, tag_depth - 1, sorts, names):
            out += [Free(FreeVar(x, tag)) for x in names]
    for ctor in (Pi, Lam):
        for k in range(1, n - 1):
            for a in _terms_of_size(k, depth, tag_depth, sorts, names):
                for b in _terms_of_size(n - 1 - k, depth + 1, tag_depth, sorts, names):
                    out.append(ctor(a, b))
    for k in range(1, n - 1):
        for f in _terms_of_size(k, depth, tag_depth, sorts, names):
            for a in _terms_of_size(n - 1 - k, depth, tag_depth, sorts, names):
                out.append(App(f, a))
    return tuple(out)


def enumerate_terms(budget: EnumBudget) -> Iterator[Term]:
    """Every locally closed term up to ``max_term_size`` nodes, smallest first, each once."""
    names = budget.names[: budget.max_names_per_tag]
    for n in range(1, budget.max_term_size + 1):
        yield from _terms_of_size(n, 0, budget.max_tag_depth, budget.sort_alphabet, names)


# -- private term machinery ---------------------------------------------------


def _lift(t, d, c=0):
    if isinstance(t, Bound):
        return Bound(t.index + d) if t.index >= c else t
    if isinstance(t, Pi):
        return Pi(_lift(t.domain, d, c), _lift(t.codomain, d, c + 1))
    if isinstance(t, Lam):
        return Lam(_lift(t.domain, d, c), _lift(t.body, d, c + 1))
    if isinstance(t, App):
        return App(_lift(t.fun, d, c), _lift(t.arg, d, c))
    return t


def _inst(t, u, k=0):
    """Replace index k by u, lowering the indices above it."""
    if isinstance(t, Bound):
        if t.index == k:
            return _lift(u, k)
        return Bound(t.index - 1) if t.index > k else t
    if isinstance(t, Pi):
        return Pi(_inst(t.domain, u, k), _inst(t.codomain, u, k + 1))
    if isinstance(t, Lam):
        return Lam(_inst(t.domain, u, k), _inst(t.body, u, k + 1))
    if isinstance(t, App):
        return App(_inst(t.fun, u, k), _inst(t.arg, u, k))
    return t


def _abs(t, v, k=0):
    if isinstance(t, Free):
        return Bound(k) if t.var == v else t
    if isinstance(t, Bound):
        return Bound(t.index + 1) if t.index >= k else t
    if isinstance(t, Pi):
        return Pi(_abs(t.domain, v, k), _abs(t.codomain, v, k + 1))
    if isinstance(t, Lam):
        return Lam(_abs(t.domain, v, k), _abs(t.body, v, k + 1))
    if isinstance(t, App):
        return App(_abs(t.fun, v, k), _abs(t.arg, v, k))
    return t


def _vars(t, acc=None):
    """Hereditarily free variables, collected afresh."""
    acc = set() if acc is None else acc
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Free):
            if u.var not in acc:
                acc.add(u.var)
                stack.append(u.var.tag)
        elif isinstance(u, (Pi, Lam)):
            stack.append(u.domain)
            stack.append(u.codomain if isinstance(u, Pi) else u.body)
        elif isinstance(u, App):
            stack.append(u.fun)
            stack.append(u.arg)
    return acc


def _reducts(t) -> Iterator[Term]:
    """All one-step beta reducts (redexes inside tags excluded)."""
    if isinstance(t, App):
        if isinstance(t.fun, Lam):
            yield _inst(t.fun.body, t.arg)
        for f in _reducts(t.fun):
            yield App(f, t.arg)
        for a in _reducts(t.arg):
            yield App(t.fun, a)
    elif isinstance(t, Pi):
        for a in _reducts(t.domain):
            yield Pi(a, t.codomain)
        for b in _reducts(t.codomain):
            yield Pi(t.domain, b)
    elif isinstance(t, Lam):
        for a in _reducts(t.domain):
            yield Lam(a, t.body)
        for b in _reducts(t.body):
            yield Lam(t.domain, b)


class _Normalizer:
    def __init__(self, fuel):
        self.fuel = fuel
        self.cache = {}

    def tick(self):
        self.fuel -= 1
        if self.fuel < 0:
            raise BudgetExhausted("normalization fuel exhausted")

    def nf(self, t):
        hit = self.cache.get(t)
        if hit is None:
            hit = self._nf(t)
            self.cache[t] = hit
        return hit

    def _nf(self, t):
        if isinstance(t, App):
            f = self._head(t.fun)
            if isinstance(f, Lam):
                self.tick()
                return self.nf(_inst(f.body, t.arg))
            return App(self.nf(f), self.nf(t.arg))
        if isinstance(t, Pi):
            return Pi(self.nf(t.domain), self.nf(t.codomain))
        if isinstance(t, Lam):
            return Lam(self.nf(t.domain), self.nf(t.body))
        return t

    def _head(self, t):
        while isinstance(t, App):
            f = self._head(t.fun)
            if not isinstance(f, Lam):
                return App(f, t.arg)
            self.tick()
            t = _inst(f.body, t.arg)
        return t


def _fresh(tag, avoid_terms, taken=()):
    used = set(taken)
    for t in avoid_terms:
        _vars(t, used)
    i = 0
    while FreeVar(f"o{i}", tag) in used:
        i += 1
    return FreeVar(f"o{i}", tag)


# -- declarative search -------------------------------------------------------


class _Search:
    """Shared bookkeeping: node budget, normal forms, conversion candidates."""

    def __init__(self, spec: PtsSpec, budget: EnumBudget):
        self.spec = spec
        self.budget = budget
        self.norm = _Normalizer(budget.fuel)
        self.nodes = 0

    def visit(self):
        self.nodes += 1
        if self.nodes > self.budget.max_search_nodes:
            raise BudgetExhausted("derivation search exceeded its node budget")

    def axioms(self, s):
        return [Sort(b) for a, b in sorted(self.spec.axioms) if a == s]

    def rules(self, s1, s2):
        return [c for a, b, c in sorted(self.spec.rules) if a == s1 and b == s2]

    def conv_candidates(self, t):
        """``t``, its reducts breadth-first (bounded) and its normal form."""
        seen = {t: None}
        queue = deque([t])
        while queue and len(seen) < self.budget.max_conv_candidates:
            for r in _reducts(queue.popleft()):
                if r not in seen:
                    seen[r] = None
                    queue.append(r)
        seen.setdefault(self.norm.nf(t), None)
        return list(seen)

    @staticmethod
    def add(results, norm, ty):
        results.setdefault(norm.nf(ty), ty)


class _GinfSearch(_Search):
    def __init__(self, spec, budget):
        super().__init__(spec, budget)
        self.memo = {}
        self.active = set()

    def types(self, m) -> dict:
        """Types of ``m`` from derivations not ending in conversion, keyed by normal form."""
        hit = self.memo.get(m)
        if hit is not None:
            return hit
        if m in self.active:
            raise BudgetExhausted("cyclic derivation search")
        self.visit()
        self.active.add(m)
        try:
            out = self._types(m)
        finally:
            self.active.discard(m)
        self.memo[m] = out
        return out

    def _types(self, m):
        out = {}
        if isinstance(m, Sort):
            for s in self.axioms(m.name):
                self.add(out, self.norm, s)
        elif isinstance(m, Free):
            if self.sorts(m.var.tag):
                self.add(out, self.norm, m.var.tag)
        elif isinstance(m, Pi):
            y = _fresh(m.domain, [m.codomain])
            cod = _inst(m.codomain, Free(y))
            for s1 in sorted(self.sorts(m.domain)):
                for s2 in sorted(self.sorts(cod)):
                    for s3 in self.rules(s1, s2):
                        self.add(out, self.norm, Sort(s3))
        elif isinstance(m, Lam):
            y = _fresh(m.domain, [m.body])
            body = _inst(m.body, Free(y))
            for t in list(self.types(body).values()):
                for cand in self.conv_candidates(t):
                    if cand != t and not self.sorts(cand):
                        continue
                    cod = _abs(cand, y)
                    if y in _vars(cod):
                        continue
                    pi = Pi(m.domain, cod)
                    if self.sorts(pi):
                        self.add(out, self.norm, pi)
                        break
        elif isinstance(m, App):
            for t in list(self.types(m.fun).values()):
                for cand in self.conv_candidates(t):
                    if not isinstance(cand, Pi):
                        continue
                    if cand != t and not self.sorts(cand):
                        continue
                    if self.has_type(m.arg, cand.domain):
                        self.add(out, self.norm, _inst(cand.codomain, m.arg))
        return out

    def has_type(self, m, b) -> bool:
        tys = self.types(m)
        if b in tys.values():
            return True
        if self.norm.nf(b) not in tys:
            return False
        return bool(self.sorts(b))

    def sorts(self, a) -> set:
        """Sorts ``s`` with ``a : s`` derivable (conversion included)."""
        out = set()
        for nf, t in self.types(a).items():
            if isinstance(t, Sort):
                out.add(t.name)
            elif isinstance(nf, Sort) and self.axioms(nf.name):
                out.add(nf.name)
        return out


class _PtsSearch(_Search):
    def __init__(self, spec, budget):
        super().__init__(spec, budget)
        self.memo = {}
        self.active = set()

    def types(self, ctx: tuple, m) -> dict:
        key = (ctx, m)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if key in self.active:
            raise BudgetExhausted("cyclic derivation search")
        self.visit()
        self.active.add(key)
        try:
            out = self._types(ctx, m)
        finally:
            self.active.discard(key)
        self.memo[key] = out
        return out

    def _fresh(self, ctx, *terms):
        return _fresh(UNIT_TAG, list(terms) + [Free(v) for v, _ in ctx] + [a for _, a in ctx])

    def _types(self, ctx, m):
        out = {}
        if ctx:
            *rest, (x, a) = ctx
            rest = tuple(rest)
            if self.sorts(rest, a) and all(v != x for v, _ in rest):
                # (var)
                if isinstance(m, Free) and m.var == x:
                    self.add(out, self.norm, a)
                # (weak)
                for nf, t in self.types(rest, m).items():
                    out.setdefault(nf, t)
        elif isinstance(m, Sort):
            for s in self.axioms(m.name):
                self.add(out, self.norm, s)
        if isinstance(m, Pi):
            y = self._fresh(ctx, m)
            inner = ctx + ((y, m.domain),)
            cod = _inst(m.codomain, Free(y))
            for s1 in sorted(self.sorts(ctx, m.domain)):
                for s2 in sorted(self.sorts(inner, cod)):
                    for s3 in self.rules(s1, s2):
                        self.add(out, self.norm, Sort(s3))
        elif isinstance(m, Lam):
            y = self._fresh(ctx, m)
            inner = ctx + ((y, m.domain),)
            body = _inst(m.body, Free(y))
            for t in list(self.types(inner, body).values()):
                for cand in self.conv_candidates(t):
                    if cand != t and not self.sorts(inner, cand):
                        continue
                    pi = Pi(m.domain, _abs(cand, y))
                    if self.sorts(ctx, pi):
                        self.add(out, self.norm, pi)
                        break
        elif isinstance(m, App):
            for t in list(self.types(ctx, m.fun).values()):
                for cand in self.conv_candidates(t):
                    if not isinstance(cand, Pi):
                        continue
                    if cand != t and not self.sorts(ctx, cand):
                        continue
                    if self.has_type(ctx, m.arg, cand.domain):
                        self.add(out, self.norm, _inst(cand.codomain, m.arg))
        return out

    def has_type(self, ctx, m, b) -> bool:
        tys = self.types(ctx, m)
        if b in tys.values():
            return True
        if self.norm.nf(b) not in tys:
            return False
        return bool(self.sorts(ctx, b))

    def sorts(self, ctx, a) -> set:
        out = set()
        for nf, t in self.types(ctx, a).items():
            if isinstance(t, Sort):
                out.add(t.name)
            elif isinstance(nf, Sort) and self.axioms(nf.name):
                out.add(nf.name)
        return out


def _ctx_tuple(ctx: Context) -> tuple:
    return tuple((d.var, d.type) for d in ctx)


def ginf_types(spec: PtsSpec, m: Term, budget: EnumBudget) -> list:
    """All types of ``m`` found by rule search, one per beta class."""
    return list(_GinfSearch(spec, budget).types(m).values())


def derive_ginf(spec: PtsSpec, m: Term, budget: EnumBudget) -> Optional[Term]:
    tys = ginf_types(spec, m, budget)
    return tys[0] if tys else None


def ginf_derivable(spec: PtsSpec, m: Term, a: Term, budget: EnumBudget) -> bool:
    return _GinfSearch(spec, budget).has_type(m, a)


def pts_types(spec: PtsSpec, ctx: Context, m: Term, budget: EnumBudget) -> list:
    return list(_PtsSearch(spec, budget).types(_ctx_tuple(ctx), m).values())


def derive_pts(spec: PtsSpec, ctx: Context, m: Term, budget: EnumBudget) -> Optional[Term]:
    tys = pts_types(spec, ctx, m, budget)
    return tys[0] if tys else None


def pts_derivable(spec: PtsSpec, ctx: Context, m: Term, a: Term, budget: EnumBudget) -> bool:
    return _PtsSearch(spec, budget).has_type(_ctx_tuple(ctx), m, a)


def same_beta_class(a: Term, b: Term, fuel: int) -> bool:
    n = _Normalizer(fuel)
    return n.nf(a) == n.nf(b)


# -- agreement and correspondence ---------------------------------------------


@dataclass
class AgreementReport:
    checked: int = 0
    agreed: int = 0
    exhausted: int = 0
    disagreements: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.disagreements and self.agreed == self.checked


def _agree(algo_result, oracle_types, fuel) -> bool:
    if algo_result is None:
        return not oracle_types
    return bool(oracle_types) and all(same_beta_class(algo_result, t, fuel) for t in oracle_types)


def ginf_agreement(spec: PtsSpec, budget: EnumBudget, terms=None) -> AgreementReport:
    """Compare ``ginf_infer`` with the rule search on every enumerated term."""
    rep = AgreementReport()
    for m in terms if terms is not None else enumerate_terms(budget):
        try:
            oracle = ginf_types(spec, m, budget)
            try:
                algo = ginf_infer(spec, m, budget.fuel)
            except TypingError:
                algo = None
        except (BudgetExhausted, FuelExhausted):
            rep.exhausted += 1
            continue
        rep.checked += 1
        if _agree(algo, oracle, budget.fuel):
            rep.agreed += 1
        else:
            rep.disagreements.append((m, algo, oracle))
    return rep


def sample_contexts(budget: EnumBudget) -> list:
    """A fixed family of small contexts, some annotated, some with unrelated tags, some ill formed."""
    s = budget.sort_alphabet[0]
    top = Sort(s)
    n0, n1 = budget.names[0], budget.names[1 % len(budget.names)]
    A = FreeVar(n0.upper(), top)
    a = FreeVar(n0, Free(A))
    plain = FreeVar(n0, UNIT_TAG)
    f = FreeVar(n1, Pi(Free(A), Free(A)))
    return [
        Context(),
        Context(((A, top),)),
        Context(((A, top), (a, Free(A)))),
        Context(((A, top), (a, Free(A)), (f, Pi(Free(A), Free(A))))),
        Context(((plain, top),)),
        Context(((FreeVar(n0, top), top),)),
        Context(((A, top), (FreeVar(n1, top), Free(A)))),
        Context(((a, Free(A)),)),
    ]


def pts_agreement(spec: PtsSpec, budget: EnumBudget, contexts=None, terms=None) -> AgreementReport:
    """Compare ``infer_type`` with the rule search on (context, term) pairs."""
    rep = AgreementReport()
    contexts = sample_contexts(budget) if contexts is None else contexts
    terms = list(enumerate_terms(budget)) if terms is None else list(terms)
    for ctx in contexts:
        ctx_vars = [Free(d.var) for d in ctx]
        for m in list(terms) + ctx_vars:
            try:
                oracle = pts_types(spec, ctx, m, budget)
                try:
                    algo = infer_type(spec, ctx, m, budget.fuel)
                except TypingError:
                    algo = None
            except (BudgetExhausted, FuelExhausted):
                rep.exhausted += 1
                continue
            rep.checked += 1
            if _agree(algo, oracle, budget.fuel):
                rep.agreed += 1
            else:
                rep.disagreements.append((ctx, m, algo, oracle))
    return rep


@dataclass
class CorrespondenceReport:
    spec: str
    budget: dict
    terms: int = 0
    ginf_typable: int = 0
    ginf_to_pts_checked: int = 0
    pts_judgments_checked: int = 0
    exhausted: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def exhausted_fraction(self) -> float:
        return len(self.exhausted) / self.terms if self.terms else 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ok"] = self.ok
        d["exhausted_fraction"] = round(self.exhausted_fraction, 6)
        return d

    def format_text(self) -> str:
        lines = [
            f"spec: {self.spec}",
            f"terms enumerated: {self.terms}",
            f"context-free typable: {self.ginf_typable}",
            f"context-free -> contextful checked: {self.ginf_to_pts_checked}",
            f"annotated judgments checked: {self.pts_judgments_checked}",
            f"budget exhausted: {len(self.exhausted)} ({self.exhausted_fraction:.2%})",
            f"violations: {len(self.violations)}",
        ]
        lines += [f"  {v}" for v in self.violations]
        return "\n".join(lines)


_MAX_ORDERS = 6


def _annotated_contexts(m, extra):
    """Annotated contexts to try for subject ``m``.

    Every tag-respecting order of hfv(m) (capped), each also followed by a
    spare declaration, and each hfv(m) with one variable dropped.
    """
    vs = hfv_ordered(m)
    out = []
    for i, order in enumerate(valid_orders(vs)):
        if i >= _MAX_ORDERS:
            break
        out.append(tuple(order))
        if extra is not None and extra not in vs:
            out.append(tuple(order) + (extra,))
    for v in vs:
        rest = [u for u in vs if u != v]
        for order in valid_orders(rest):
            out.append(tuple(order))
            break
    return [Context(tuple(Decl(v, v.tag) for v in o)) for o in out]


def correspondence_report(spec: PtsSpec, budget: EnumBudget, terms=None) -> CorrespondenceReport:
    """Check both translation directions on every enumerated term."""
    rep = CorrespondenceReport(spec=spec.name or "custom", budget=asdict(budget))
    s0 = budget.sort_alphabet[0]
    extra = FreeVar("z", Sort(s0)) if spec.axiom(s0) else None
    for m in terms if terms is not None else enumerate_terms(budget):
        rep.terms += 1
        try:
            _check_one(spec, budget, m, extra, rep)
        except (BudgetExhausted, FuelExhausted) as e:
            rep.exhausted.append(f"{show(m)}: {type(e).__name__}")
        except KernelError as e:
            rep.violations.append(f"{show(m)}: unexpected {type(e).__name__}: {e}")
    return rep


def _check_one(spec, budget, m, extra, rep):
    gs = _GinfSearch(spec, budget)
    tys = list(gs.types(m).values())
    try:
        algo = ginf_infer(spec, m, budget.fuel)
    except TypingError:
        algo = None
    if not _agree(algo, tys, budget.fuel):
        rep.violations.append(f"{show(m)}: checker and rule search disagree on typability")
    if tys:
        rep.ginf_typable += 1
    ps = _PtsSearch(spec, budget)
    # context-free -> contextful
    for a in tys:
        rep.ginf_to_pts_checked += 1
        try:
            j = synthesize_context(GinfJudgment(m, a), spec, budget.fuel)
        except TypingError as e:
            rep.violations.append(f"{show(m)} : {show(a)}: no context synthesized ({type(e).__name__})")
            continue
        if set(j.ctx.dom()) != set(hfv(m) | hfv(a)):
            rep.violations.append(f"{show(m)} : {show(a)}: synthesized domain is not hfv")
        if not ps.has_type(_ctx_tuple(j.ctx), m, a):
            rep.violations.append(f"{show(m)} : {show(a)}: synthesized judgment not derivable")
    # contextful (annotated) -> context-free
    required = set(hfv(m))
    for ctx in _annotated_contexts(m, extra):
        for a in list(ps.types(_ctx_tuple(ctx), m).values()):
            rep.pts_judgments_checked += 1
            where = f"{show(m)} : {show(a)} under {len(ctx)} declarations"
            if not required <= set(ctx.dom()):
                rep.violations.append(f"{where}: derivable although hfv is not declared")
                continue
            if not gs.has_type(m, a):
                rep.violations.append(f"{where}: context-free rule search rejects")
            j = ContextfulJudgment(ctx, m, a)
            try:
                to_ginf(j, spec, budget.fuel)
                small = strengthen_to_hfv(spec, j, budget.fuel)
            except TypingError as e:
                rep.violations.append(f"{where}: {type(e).__name__}")
                continue
            if set(small.dom()) != set(hfv(m) | hfv(a)):
                rep.violations.append(f"{where}: strengthened domain is not hfv")
            elif not wf_context(spec, small, budget.fuel):
                rep.violations.append(f"{where}: strengthened context ill formed")
