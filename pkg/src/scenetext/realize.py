"""Surface realization: semantic tree -> sentence by weighted template expansion."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Sequence

from .errors import ArityMismatch, MissingTemplate, RealizeError
from .grammar import Grammar, Template
from .semtree import SemTree, Terminal

_VOWEL_INITIAL = re.compile(r"^[aeiou]", re.IGNORECASE)


@dataclass(frozen=True)
class RealizeConfig:
    mode: str = "sample"  # or "argmax"
    capitalize: bool = True
    final_period: bool = True
    article_agreement: bool = True

    def __post_init__(self) -> None:
        if self.mode not in ("sample", "argmax"):
            raise ValueError(f"unknown realization mode {self.mode!r}")


def choose_template(
    templates: Sequence[Template], mode: str, rng: random.Random | None
) -> Template:
    if mode == "argmax":
        best = templates[0]
        for t in templates[1:]:
            if t.weight > best.weight:
                best = t
        return best
    if rng is None:
        raise ValueError("sample mode needs a random source")
    return rng.choices(templates, weights=[t.weight for t in templates])[0]


def expand(
    tree: SemTree,
    grammar: Grammar,
    mode: str = "sample",
    rng: random.Random | None = None,
    trace: list[Template] | None = None,
) -> str:
    """Raw lowercase expansion without surface post-processing.

    Chosen templates are appended to ``trace`` in pre-order when given.
    """
    if isinstance(tree, Terminal):
        return tree.word.replace("-", " ")
    if tree.name not in grammar:
        raise MissingTemplate(tree.name)
    expected = grammar.arity(tree.name)
    if expected != tree.arity:
        raise ArityMismatch(tree.name, expected, tree.arity)
    template = choose_template(grammar.templates(tree.name), mode, rng)
    if trace is not None:
        trace.append(template)
    return template.fill([expand(c, grammar, mode, rng, trace) for c in tree.children])


def postprocess(text: str, config: RealizeConfig = RealizeConfig()) -> str:
    words = text.split()
    if config.article_agreement:
        for i in range(len(words) - 1):
            if words[i].lower() in ("a", "an"):
                article = "an" if _VOWEL_INITIAL.match(words[i + 1]) else "a"
                if words[i][0].isupper():
                    article = article.capitalize()
                words[i] = article
    out = " ".join(words)
    if config.capitalize and out:
        out = out[0].upper() + out[1:]
    if config.final_period and out and out[-1] not in ".!?":
        out += "."
    return out


def realize(
    tree: SemTree,
    grammar: Grammar,
    config: RealizeConfig = RealizeConfig(),
    rng: random.Random | None = None,
    trace: list[Template] | None = None,
) -> str:
    return postprocess(expand(tree, grammar, config.mode, rng, trace), config)


def realize_paragraph(
    plans: Sequence,
    grammar: Grammar,
    config: RealizeConfig = RealizeConfig(),
    rng: random.Random | None = None,
) -> str:
    """Realize each plan's tree in order and join the sentences with single spaces."""
    sentences = []
    for index, plan in enumerate(plans):
        tree = getattr(plan, "tree", plan)
        try:
            sentences.append(realize(tree, grammar, config, rng))
        except RealizeError as exc:
            exc.sentence_index = index
            raise
    return " ".join(sentences)
