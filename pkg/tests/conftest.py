import random

import pytest
from hypothesis import strategies as st

from ptskernel.pts_spec import PRESETS
from ptskernel.syntax import App, Bound, Free, FreeVar, Lam, Pi, Sort, arrow, var

STAR = Sort("*")
BOX = Sort("#")

# the running example: A^* : *, a^{A^*} : A^*, and friends
A = var("A", STAR)
a = var("a", A)
B = var("B", STAR)
P = var("P", arrow(A, STAR))
h = var("h", App(P, a))
Q = var("Q", Pi(A, arrow(App(P, Bound(0)), STAR)))
# !y : A^*. Q y h  where h's tag mentions a^{A^*}
COUNTEREXAMPLE = Pi(A, App(App(Q, Bound(0)), h))
# premise of the bad Pi: Q a h : *
COUNTEREXAMPLE_BODY = App(App(Q, a), h)

X1 = var("x1", STAR)
X2 = var("x2", X1)
EXAMPLE_SUBJECT = App(Lam(X1, Bound(0)), X2)
READABLE_SUBJECT = App(Lam(A, Bound(0)), a)

ID_REDEX = App(Lam(STAR, Bound(0)), B)  # (\A:*. A) B^*
POLY_ID = Lam(STAR, Lam(Bound(0), Bound(0)))
POLY_ID_TYPE = Pi(STAR, Pi(Bound(0), Bound(1)))

COC = PRESETS["coc"]
STLC = PRESETS["stlc"]
F = PRESETS["f"]


@pytest.fixture
def coc():
    return COC


# -- random terms -------------------------------------------------------------

NAMES = ("a", "b", "c")


def random_term(rng: random.Random, size: int, depth: int = 0, tag_budget: int = 2):
    """A locally closed term with roughly ``size`` nodes, biased toward redexes and tags."""
    if size <= 1:
        choices = ["sort"] + (["bound"] * 2 if depth else [])
        if tag_budget:
            choices.append("free")
        kind = rng.choice(choices)
    else:
        kind = rng.choice(["pi", "lam", "app", "app", "redex", "free"] if tag_budget else
                          ["pi", "lam", "app", "redex"])
    if kind == "sort":
        return rng.choice([STAR, BOX])
    if kind == "bound":
        return Bound(rng.randrange(depth))
    if kind == "free":
        tag = random_term(rng, rng.randint(1, max(1, size - 1)), 0, tag_budget - 1)
        return Free(FreeVar(rng.choice(NAMES), tag))
    k = rng.randint(1, max(1, size - 2))
    rest = max(1, size - 1 - k)
    if kind in ("pi", "lam"):
        ctor = Pi if kind == "pi" else Lam
        return ctor(random_term(rng, k, depth, tag_budget), random_term(rng, rest, depth + 1, tag_budget))
    if kind == "redex":
        body = random_term(rng, k, depth + 1, tag_budget)
        return App(Lam(random_term(rng, 1, depth, tag_budget), body), random_term(rng, rest, depth, tag_budget))
    return App(random_term(rng, k, depth, tag_budget), random_term(rng, rest, depth, tag_budget))


@st.composite
def terms(draw, max_size=12, depth=0):
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    size = draw(st.integers(min_value=1, max_value=max_size))
    return random_term(random.Random(seed), size, depth)


def pytest_terminal_summary(terminalreporter):
    from tests import acceptance_log

    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.LINES:
            terminalreporter.write_line(line)
