"""Locally nameless pseudo-terms with type-tagged free variables.

Bound variables are de Bruijn indices. Free variables carry a name and a tag
term; the tag is part of the variable's identity but is otherwise inert:
reduction, substitution and closing never look inside it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Optional, Union

from .errors import FuelExhausted, IllFormedTerm

DEFAULT_FUEL = 10_000

_NAME_RE = re.compile(r"[A-Za-z0-9_]+\Z")


class _Node:
    """Mixin giving terms a cached structural hash."""

    __slots__ = ()

    def __hash__(self):
        h = self._hash
        if h == 0:
            h = hash((type(self).__name__, *self._key())) or 1
            object.__setattr__(self, "_hash", h)
        return h


@dataclass(frozen=True, slots=True, eq=True)
class Sort(_Node):
    name: str
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def _key(self):
        return (self.name,)

    __hash__ = _Node.__hash__


@dataclass(frozen=True, slots=True, eq=True)
class Bound(_Node):
    index: int
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def _key(self):
        return (self.index,)

    __hash__ = _Node.__hash__


@dataclass(frozen=True, slots=True, eq=True)
class FreeVar(_Node):
    """A variable ``name^{tag}``. Equal iff names and tags are equal."""

    name: str
    tag: "Term"
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not _NAME_RE.match(self.name):
            raise ValueError(f"invalid variable name {self.name!r}")

    def _key(self):
        return (self.name, self.tag)

    __hash__ = _Node.__hash__


@dataclass(frozen=True, slots=True, eq=True)
class Free(_Node):
    var: FreeVar
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def _key(self):
        return (self.var,)

    __hash__ = _Node.__hash__


@dataclass(frozen=True, slots=True, eq=True)
class Pi(_Node):
    domain: "Term"
    codomain: "Term"
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def _key(self):
        return (self.domain, self.codomain)

    __hash__ = _Node.__hash__


@dataclass(frozen=True, slots=True, eq=True)
class Lam(_Node):
    domain: "Term"
    body: "Term"
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def _key(self):
        return (self.domain, self.body)

    __hash__ = _Node.__hash__


@dataclass(frozen=True, slots=True, eq=True)
class App(_Node):
    fun: "Term"
    arg: "Term"
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def _key(self):
        return (self.fun, self.arg)

    __hash__ = _Node.__hash__


Term = Union[Sort, Bound, Free, Pi, Lam, App]

# Tag given to untagged surface variables in contextful mode. "_" is never a
# legal sort name, so it cannot collide with a real sort.
UNIT_TAG = Sort("_")


def var(name: str, tag: Term) -> Free:
    """Shorthand for the term ``name^{tag}``."""
    return Free(FreeVar(name, tag))


def arrow(a: Term, b: Term) -> Pi:
    """Non-dependent function type ``a -> b`` (b is shifted under the binder)."""
    return Pi(a, shift(b, 1))


# -- index manipulation -------------------------------------------------------


def shift(t: Term, by: int, cutoff: int = 0) -> Term:
    if isinstance(t, Bound):
        return Bound(t.index + by) if t.index >= cutoff else t
    if isinstance(t, (Sort, Free)):
        return t
    if isinstance(t, Pi):
        return Pi(shift(t.domain, by, cutoff), shift(t.codomain, by, cutoff + 1))
    if isinstance(t, Lam):
        return Lam(shift(t.domain, by, cutoff), shift(t.body, by, cutoff + 1))
    return App(shift(t.fun, by, cutoff), shift(t.arg, by, cutoff))


def _instantiate(t: Term, k: int, repl: Term) -> Term:
    if isinstance(t, Bound):
        if t.index == k:
            return shift(repl, k) if k else repl
        if t.index > k:
            return Bound(t.index - 1)
        return t
    if isinstance(t, (Sort, Free)):
        return t
    if isinstance(t, Pi):
        return Pi(_instantiate(t.domain, k, repl), _instantiate(t.codomain, k + 1, repl))
    if isinstance(t, Lam):
        return Lam(_instantiate(t.domain, k, repl), _instantiate(t.body, k + 1, repl))
    return App(_instantiate(t.fun, k, repl), _instantiate(t.arg, k, repl))


def open_term(body: Term, replacement: Term) -> Term:
    """Instantiate the outermost dangling index of ``body`` with ``replacement``.

    ``replacement`` may itself carry dangling indices (as happens when a redex
    under a binder is contracted); they are shifted as it moves under binders.
    """
    return _instantiate(body, 0, replacement)


def _abstract(t: Term, k: int, target: FreeVar) -> Term:
    if isinstance(t, Free):
        return Bound(k) if t.var == target else t
    if isinstance(t, Bound):
        return Bound(t.index + 1) if t.index >= k else t
    if isinstance(t, Sort):
        return t
    if isinstance(t, Pi):
        return Pi(_abstract(t.domain, k, target), _abstract(t.codomain, k + 1, target))
    if isinstance(t, Lam):
        return Lam(_abstract(t.domain, k, target), _abstract(t.body, k + 1, target))
    return App(_abstract(t.fun, k, target), _abstract(t.arg, k, target))


def close_term(term: Term, target: FreeVar) -> Term:
    """Turn each untagged-position occurrence of ``target`` into a new index 0.

    Occurrences inside other variables' tags are left alone: tags are labels.
    """
    return _abstract(term, 0, target)


def subst_free(term: Term, target: FreeVar, replacement: Term) -> Term:
    """Capture-free ``term[target := replacement]``; tags are not entered."""
    return subst_many(term, {target: replacement})


def subst_many(term: Term, mapping: dict) -> Term:
    """Simultaneous substitution of free variables (keys) by terms (values)."""
    if not mapping:
        return term

    def go(t, depth):
        if isinstance(t, Free):
            r = mapping.get(t.var)
            if r is None:
                return t
            return shift(r, depth) if depth else r
        if isinstance(t, (Sort, Bound)):
            return t
        if isinstance(t, Pi):
            return Pi(go(t.domain, depth), go(t.codomain, depth + 1))
        if isinstance(t, Lam):
            return Lam(go(t.domain, depth), go(t.body, depth + 1))
        return App(go(t.fun, depth), go(t.arg, depth))

    return go(term, 0)


def is_locally_closed(t: Term, depth: int = 0) -> bool:
    if isinstance(t, Bound):
        return t.index < depth
    if isinstance(t, (Sort, Free)):
        return True
    if isinstance(t, Pi):
        return is_locally_closed(t.domain, depth) and is_locally_closed(t.codomain, depth + 1)
    if isinstance(t, Lam):
        return is_locally_closed(t.domain, depth) and is_locally_closed(t.body, depth + 1)
    return is_locally_closed(t.fun, depth) and is_locally_closed(t.arg, depth)


def occurs_bound(t: Term, k: int = 0) -> bool:
    """Whether index ``k`` (relative to ``t``'s top) occurs in ``t``."""
    if isinstance(t, Bound):
        return t.index == k
    if isinstance(t, (Sort, Free)):
        return False
    if isinstance(t, Pi):
        return occurs_bound(t.domain, k) or occurs_bound(t.codomain, k + 1)
    if isinstance(t, Lam):
        return occurs_bound(t.domain, k) or occurs_bound(t.body, k + 1)
    return occurs_bound(t.fun, k) or occurs_bound(t.arg, k)


def children(t: Term) -> tuple:
    if isinstance(t, (Pi, Lam)):
        return (t.domain, t.codomain if isinstance(t, Pi) else t.body)
    if isinstance(t, App):
        return (t.fun, t.arg)
    return ()


def size(t: Term) -> int:
    """Node count, tags included."""
    if isinstance(t, Free):
        return 1 + size(t.var.tag)
    return 1 + sum(size(c) for c in children(t))


# -- free variable analyses ---------------------------------------------------


def fv(t: Term) -> frozenset:
    """Free variables outside all tags."""
    out = set()

    def go(u):
        if isinstance(u, Free):
            out.add(u.var)
        else:
            for c in children(u):
                go(c)

    go(t)
    return frozenset(out)


@lru_cache(maxsize=1 << 16)
def hfv(t: Term) -> frozenset:
    """Hereditarily free variables: free variables plus, recursively, those of their tags."""
    if isinstance(t, Free):
        return frozenset((t.var,)) | hfv(t.var.tag)
    if isinstance(t, (Sort, Bound)):
        return frozenset()
    a, b = children(t)
    return hfv(a) | hfv(b)


@lru_cache(maxsize=1 << 16)
def hfvt(t: Term) -> frozenset:
    """Hereditarily free variables of the tags of the free variables."""
    if isinstance(t, Free):
        return hfv(t.var.tag)
    if isinstance(t, (Sort, Bound)):
        return frozenset()
    a, b = children(t)
    return hfvt(a) | hfvt(b)


def hfv_ordered(*terms: Term) -> list:
    """``hfv`` of all ``terms`` in first-occurrence order, each tag visited before its variable."""
    seen = {}

    def go(u):
        if isinstance(u, Free):
            if u.var not in seen:
                go(u.var.tag)
                seen[u.var] = None
        else:
            for c in children(u):
                go(c)

    for t in terms:
        go(t)
    return list(seen)


def iter_tags(t: Term) -> Iterator[Term]:
    """Every tag occurring in ``t``, tags of tags included."""
    if isinstance(t, Free):
        yield t.var.tag
        yield from iter_tags(t.var.tag)
    else:
        for c in children(t):
            yield from iter_tags(c)


def fresh_var(tag: Term, avoid, prefix: str = "x") -> FreeVar:
    """First ``prefix0``, ``prefix1``, ... tagged with ``tag`` that is not in ``avoid``."""
    i = 0
    while True:
        v = FreeVar(f"{prefix}{i}", tag)
        if v not in avoid:
            return v
        i += 1


# -- reduction ----------------------------------------------------------------


def beta_step(t: Term) -> Optional[Term]:
    """One leftmost-outermost beta step, or None if ``t`` is normal outside its tags."""
    if isinstance(t, App):
        if isinstance(t.fun, Lam):
            return open_term(t.fun.body, t.arg)
        r = beta_step(t.fun)
        if r is not None:
            return App(r, t.arg)
        r = beta_step(t.arg)
        return None if r is None else App(t.fun, r)
    if isinstance(t, (Pi, Lam)):
        a, b = children(t)
        r = beta_step(a)
        if r is not None:
            return type(t)(r, b)
        r = beta_step(b)
        return None if r is None else type(t)(a, r)
    return None


def whnf(t: Term, fuel: int = DEFAULT_FUEL) -> Term:
    """Weak head normal form by head reduction (a prefix of leftmost-outermost)."""
    spine = []
    head = t
    steps = 0
    while True:
        while isinstance(head, App):
            spine.append(head.arg)
            head = head.fun
        if isinstance(head, Lam) and spine:
            if steps >= fuel:
                raise FuelExhausted(f"no weak head normal form within {fuel} steps")
            steps += 1
            head = open_term(head.body, spine.pop())
            continue
        break
    for a in reversed(spine):
        head = App(head, a)
    return head


def normalize(t: Term, fuel: int = DEFAULT_FUEL) -> Term:
    """Leftmost-outermost normal form, raising FuelExhausted after ``fuel`` steps."""
    for _ in range(fuel + 1):
        r = beta_step(t)
        if r is None:
            return t
        t = r
    raise FuelExhausted(f"no normal form within {fuel} steps")


def beta_eq(a: Term, b: Term, fuel: int = DEFAULT_FUEL) -> bool:
    """Beta equality, deciding by normal forms. Raises FuelExhausted when unknown."""
    if a == b:
        return True
    return normalize(a, fuel) == normalize(b, fuel)


def require_locally_closed(t: Term, what: str = "term") -> None:
    if not is_locally_closed(t):
        raise IllFormedTerm(f"{what} has a dangling bound index")
