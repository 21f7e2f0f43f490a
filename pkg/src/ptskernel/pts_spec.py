"""PTS instances: sorts, axioms and rules, the lambda-cube presets, spec files."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .errors import ParseError

STAR = "*"
BOX = "#"
SORT_ALIASES = {"□": BOX}


@dataclass(frozen=True)
class PtsSpec:
    sorts: frozenset
    axioms: frozenset
    rules: frozenset
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "sorts", frozenset(self.sorts))
        object.__setattr__(self, "axioms", frozenset(tuple(a) for a in self.axioms))
        object.__setattr__(self, "rules", frozenset(tuple(r) for r in self.rules))
        used = {s for a in self.axioms for s in a} | {s for r in self.rules for s in r}
        missing = used - self.sorts
        if missing:
            raise ValueError(f"sorts {sorted(missing)} used but not declared")
        for s in self.sorts:
            if not s or s == "_" or any(c.isspace() for c in s):
                raise ValueError(f"invalid sort name {s!r}")

    def axiom(self, s1: str) -> frozenset:
        return frozenset(s2 for a, s2 in self.axioms if a == s1)

    def rule(self, s1: str, s2: str) -> frozenset:
        return frozenset(s3 for a, b, s3 in self.rules if a == s1 and b == s2)

    def is_functional(self) -> bool:
        return all(len(self.axiom(s)) <= 1 for s, _ in self.axioms) and all(
            len(self.rule(a, b)) <= 1 for a, b, _ in self.rules
        )


def _cube(name, pairs):
    return PtsSpec(
        sorts={STAR, BOX},
        axioms={(STAR, BOX)},
        rules={(a, b, b) for a, b in pairs},
        name=name,
    )


PRESETS = {
    "stlc": _cube("stlc", [(STAR, STAR)]),
    "f": _cube("f", [(STAR, STAR), (BOX, STAR)]),
    "p": _cube("p", [(STAR, STAR), (STAR, BOX)]),
    "omega": _cube("omega", [(STAR, STAR), (BOX, STAR), (BOX, BOX)]),
    "coc": _cube("coc", [(STAR, STAR), (BOX, STAR), (STAR, BOX), (BOX, BOX)]),
}

EMPTY = PtsSpec(sorts=frozenset(), axioms=frozenset(), rules=frozenset(), name="empty")


def preset(name: str) -> PtsSpec:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; expected one of {', '.join(PRESETS)}") from None


def parse_spec(text: str, name: str = "") -> PtsSpec:
    """Read the line-oriented spec format.

    ``sorts: * #`` / ``axiom: * #`` / ``rule: * * *`` / ``preset: coc``;
    lines starting with ``;`` are comments. A preset line replaces whatever
    was declared above it.
    """
    sorts, axioms, rules = set(), set(), set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith(";"):
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            raise ParseError(f"line {lineno}: expected 'key: values'", (lineno, lineno))
        key = key.strip()
        words = [SORT_ALIASES.get(w, w) for w in rest.split()]
        if key == "sorts":
            sorts.update(words)
        elif key == "axiom":
            if len(words) != 2:
                raise ParseError(f"line {lineno}: axiom needs two sorts", (lineno, lineno))
            axioms.add(tuple(words))
        elif key == "rule":
            if len(words) != 3:
                raise ParseError(f"line {lineno}: rule needs three sorts", (lineno, lineno))
            rules.add(tuple(words))
        elif key == "preset":
            if len(words) != 1:
                raise ParseError(f"line {lineno}: preset needs one name", (lineno, lineno))
            try:
                p = preset(words[0])
            except ValueError as e:
                raise ParseError(f"line {lineno}: {e}", (lineno, lineno)) from None
            sorts, axioms, rules = set(p.sorts), set(p.axioms), set(p.rules)
            name = name or p.name
        else:
            raise ParseError(f"line {lineno}: unknown key {key!r}", (lineno, lineno))
    try:
        return PtsSpec(sorts, axioms, rules, name=name)
    except ValueError as e:
        raise ParseError(str(e)) from None


def load_spec(arg: str) -> PtsSpec:
    """A preset name or a path to a spec file."""
    if arg in PRESETS:
        return PRESETS[arg]
    path = Path(arg)
    return parse_spec(path.read_text(), name=path.stem)


def format_spec(spec: PtsSpec) -> str:
    lines = ["sorts: " + " ".join(sorted(spec.sorts))]
    lines += [f"axiom: {a} {b}" for a, b in sorted(spec.axioms)]
    lines += [f"rule: {a} {b} {c}" for a, b, c in sorted(spec.rules)]
    return "\n".join(lines) + "\n"
