"""Semantic trees: relation nodes over terminal words.

The canonical text form is ``name(child, child)``, e.g.
``on-top-of(indet(color(box, red)), indet(table))``.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Iterator, Union

from .errors import ParseError
from .scene_graph import ObjectInstance

_TOKEN = re.compile(r"[^\s(),]+")

PRONOUN = "it"
# size outermost, material innermost: "large red wooden box"
ATTRIBUTE_NESTING = ("size", "color", "material")


def _check_token(value: str, what: str) -> None:
    if not value or _TOKEN.fullmatch(value) is None:
        raise ValueError(f"invalid {what} {value!r}")


@dataclass(frozen=True)
class Terminal:
    word: str

    def __post_init__(self) -> None:
        _check_token(self.word, "terminal word")

    def __str__(self) -> str:
        return self.word


@dataclass(frozen=True)
class Relation:
    name: str
    children: tuple[SemTree, ...]

    def __post_init__(self) -> None:
        _check_token(self.name, "relation name")
        if not self.children:
            raise ValueError(f"relation {self.name!r} has no children")
        if not isinstance(self.children, tuple):
            object.__setattr__(self, "children", tuple(self.children))

    @property
    def arity(self) -> int:
        return len(self.children)

    def __str__(self) -> str:
        return print_semtree(self)


SemTree = Union[Terminal, Relation]


def rel(name: str, *children: SemTree | str) -> Relation:
    """Build a relation node; bare strings become terminals."""
    return Relation(name, tuple(Terminal(c) if isinstance(c, str) else c for c in children))


def print_semtree(tree: SemTree) -> str:
    if isinstance(tree, Terminal):
        return tree.word
    return f"{tree.name}({', '.join(print_semtree(c) for c in tree.children)})"


def parse_semtree(text: str) -> SemTree:
    pos = 0
    n = len(text)

    def skip_ws() -> None:
        nonlocal pos
        while pos < n and text[pos].isspace():
            pos += 1

    def node() -> SemTree:
        nonlocal pos
        skip_ws()
        m = _TOKEN.match(text, pos)
        if m is None:
            if pos >= n:
                raise ParseError("unexpected end of input", pos)
            raise ParseError(f"expected a token, found {text[pos]!r}", pos)
        pos = m.end()
        skip_ws()
        if pos < n and text[pos] == "(":
            pos += 1
            children = [node()]
            while True:
                skip_ws()
                if pos >= n:
                    raise ParseError("unbalanced parenthesis", pos)
                if text[pos] == ",":
                    pos += 1
                    children.append(node())
                elif text[pos] == ")":
                    pos += 1
                    return Relation(m.group(), tuple(children))
                else:
                    raise ParseError(f"expected ',' or ')', found {text[pos]!r}", pos)
        return Terminal(m.group())

    tree = node()
    skip_ws()
    if pos != n:
        raise ParseError(f"trailing input {text[pos:pos + 10]!r}", pos)
    return tree


def terminals(tree: SemTree) -> Iterator[str]:
    if isinstance(tree, Terminal):
        yield tree.word
    else:
        for c in tree.children:
            yield from terminals(c)


def relations(tree: SemTree) -> Iterator[Relation]:
    """All relation nodes, pre-order."""
    if isinstance(tree, Relation):
        yield tree
        for c in tree.children:
            yield from relations(c)


def make_tree(
    obj: ObjectInstance,
    use_attributes: bool,
    as_pronoun: bool,
    rng: random.Random,
) -> SemTree:
    """Sub-tree referring to ``obj``: a pronoun, or ``indet(...)`` over its class label.

    With ``use_attributes`` at most one attribute per category is drawn
    uniformly from those the object carries, nested size > color > material.
    """
    if as_pronoun:
        return Terminal(PRONOUN)
    core: SemTree = Terminal(obj.class_label)
    if use_attributes:
        by_cat = obj.attributes_by_category()
        for category in reversed(ATTRIBUTE_NESTING):
            options = by_cat.get(category)
            if not options:
                continue
            value = options[0] if len(options) == 1 else rng.choice(options)
            core = Relation(category, (core, Terminal(value)))
    return Relation("indet", (core,))
