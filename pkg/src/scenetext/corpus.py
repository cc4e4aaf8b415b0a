"""Corpus ingestion: bracketed parses -> simplified parses -> semantic trees.

A corpus file holds blank-line separated records. The first line of a record
is the raw sentence; the remaining lines are either a Penn-style bracketed
parse (starts with ``(``) or a canonical semantic tree (pre-aligned format).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterator, Mapping, Union

from .errors import FormatError, ParseError, UntranslatableError
from .scene_graph import COLORS, MATERIALS, SIZES
from .semtree import (
    Relation,
    SemTree,
    Terminal,
    parse_semtree,
    print_semtree,
    terminals,
)
from .text import tokenize

NOUN_TAGS = frozenset({"NN", "NNS", "NNP", "NNPS"})
ADJ_TAGS = frozenset({"JJ", "JJR", "JJS"})
PREP_TAGS = frozenset({"IN", "TO", "LINK"})
LINK = "LINK"
# constituents looked through when collecting clause arguments
_CLAUSE_LABELS = frozenset({"ROOT", "S", "SINV", "SQ", "FRAG", "VP", "SBAR"})
_SKIP_IN_CLAUSE = frozenset({"EX", "MD", "RB", "ADVP", "CC"})

ADJECTIVE_LEXICON: dict[str, str] = {
    **{w: "color" for w in COLORS + ("grey", "orange", "purple", "beige", "silver", "golden", "dark", "light")},
    **{w: "size" for w in SIZES + ("big", "little", "tiny", "huge", "short", "long", "narrow", "high", "low")},
    **{w: "material" for w in MATERIALS + ("metal", "metallic", "plastic", "glass", "leather", "marble")},
}
ARTICLES = {"a": "indet", "an": "indet", "the": "det"}


@dataclass(frozen=True)
class ParseTree:
    label: str
    children: tuple[Union[ParseTree, str], ...]

    @property
    def is_preterminal(self) -> bool:
        return len(self.children) == 1 and isinstance(self.children[0], str)

    @property
    def word(self) -> str:
        assert self.is_preterminal
        return self.children[0]  # type: ignore[return-value]

    def leaves(self) -> list[str]:
        out: list[str] = []
        for c in self.children:
            if isinstance(c, str):
                out.append(c)
            else:
                out.extend(c.leaves())
        return out

    def __str__(self) -> str:
        inner = " ".join(c if isinstance(c, str) else str(c) for c in self.children)
        return f"({self.label} {inner})"


@dataclass(frozen=True)
class AlignedExample:
    tokens: tuple[str, ...]
    tree: SemTree

    def __post_init__(self) -> None:
        if not self.tokens:
            raise ValueError("aligned example has no tokens")


# ---------------------------------------------------------------------------
# bracketed parse reader

_BRACKET_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def parse_bracketed(text: str) -> ParseTree:
    toks = [(m.group(), m.start()) for m in _BRACKET_TOKEN.finditer(text)]
    i = 0

    def expect_more() -> None:
        if i >= len(toks):
            raise ParseError("unbalanced brackets: unexpected end of input", len(text))

    def node() -> ParseTree:
        nonlocal i
        expect_more()
        tok, pos = toks[i]
        if tok != "(":
            raise ParseError(f"expected '(' but found {tok!r}", pos)
        i += 1
        expect_more()
        label = "ROOT"
        if toks[i][0] not in "()":
            label = toks[i][0]
            i += 1
        children: list[ParseTree | str] = []
        while True:
            expect_more()
            tok, cpos = toks[i]
            if tok == ")":
                i += 1
                break
            if tok == "(":
                children.append(node())
            else:
                children.append(tok.lower())
                i += 1
        if not children:
            raise ParseError(f"empty constituent {label!r}", pos)
        return ParseTree(label, tuple(children))

    if not toks:
        raise ParseError("empty input", 0)
    tree = node()
    if i != len(toks):
        raise ParseError(f"trailing input {toks[i][0]!r}", toks[i][1])
    return tree


# ---------------------------------------------------------------------------
# simplification


def load_preposition_table(path: str | Path | None = None) -> dict[tuple[str, ...], str]:
    if path is None:
        text = resources.files("scenetext").joinpath("data/prepositions.tsv").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    table: dict[tuple[str, ...], str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        phrase, sep, relation = line.partition("\t")
        if not sep or not relation.strip():
            raise FormatError("expected 'phrase<TAB>relation'", lineno)
        table[tuple(phrase.lower().split())] = relation.strip()
    return table


DEFAULT_PREPOSITIONS = load_preposition_table()


def _merge_compounds(children: list[ParseTree | str]) -> list[ParseTree | str]:
    out: list[ParseTree | str] = []
    run: list[ParseTree] = []

    def flush() -> None:
        if len(run) == 1:
            out.append(run[0])
        elif run:
            out.append(ParseTree(run[-1].label, ("-".join(t.word for t in run),)))
        run.clear()

    for c in children:
        if isinstance(c, ParseTree) and c.is_preterminal and c.label in NOUN_TAGS:
            run.append(c)
        else:
            flush()
            out.append(c)
    flush()
    return out


def _walk(node: ParseTree, offset: int) -> Iterator[tuple[ParseTree, int]]:
    """(subtree, start offset in the leaf sequence) pairs, pre-order."""
    yield node, offset
    for c in node.children:
        if isinstance(c, str):
            offset += 1
        else:
            yield from _walk(c, offset)
            offset += len(c.leaves())


def _find_object(
    run: list[ParseTree], phrase: tuple[str, ...], words: list[str]
) -> ParseTree | None:
    """Object NP of the PP headed by the phrase's last word, if the run is exactly phrase + object."""
    k = len(phrase)
    offset = 0
    for top in run:
        for sub, start in _walk(top, offset):
            if (
                start == k - 1
                and len(sub.children) == 2
                and isinstance(sub.children[0], ParseTree)
                and sub.children[0].is_preterminal
                and sub.children[0].word == phrase[-1]
                and isinstance(sub.children[1], ParseTree)
                and sub.children[1].leaves() == words[k:]
            ):
                return sub.children[1]
        offset += len(top.leaves())
    return None


def _collapse_prepositions(
    children: list[ParseTree | str], multiword: list[tuple[tuple[str, ...], str]]
) -> list[ParseTree | str]:
    changed = True
    while changed:
        changed = False
        for i in range(len(children)):
            for j in range(i, len(children)):
                run = children[i : j + 1]
                if any(isinstance(c, str) for c in run):
                    break
                words = [w for c in run for w in c.leaves()]  # type: ignore[union-attr]
                for phrase, relation in multiword:
                    if tuple(words[: len(phrase)]) != phrase or len(words) == len(phrase):
                        continue
                    obj = _find_object(run, phrase, words)  # type: ignore[arg-type]
                    if obj is None:
                        continue
                    link = ParseTree("PP", (ParseTree(LINK, (relation,)), obj))
                    children = children[:i] + [link] + children[j + 1 :]
                    changed = True
                    break
                if changed:
                    break
            if changed:
                break
    return children


def simplify(
    tree: ParseTree, prepositions: Mapping[tuple[str, ...], str] | None = None
) -> ParseTree:
    """Merge noun compounds and collapse multiword prepositions into link nodes."""
    table = DEFAULT_PREPOSITIONS if prepositions is None else prepositions
    multiword = sorted(
        ((p, r) for p, r in table.items() if len(p) > 1), key=lambda pr: (-len(pr[0]), pr[0])
    )

    def visit(node: ParseTree) -> ParseTree:
        if node.is_preterminal:
            return node
        children: list[ParseTree | str] = [
            c if isinstance(c, str) else visit(c) for c in node.children
        ]
        if node.label.startswith("NP"):
            children = _merge_compounds(children)
        children = _collapse_prepositions(children, multiword)
        # PP(PP(LINK ..)) or ADJP(PP(LINK ..)) left behind by a collapse
        if (
            node.label.startswith(("PP", "ADJP"))
            and len(children) == 1
            and isinstance(children[0], ParseTree)
            and children[0].label == "PP"
            and children[0].children
            and isinstance(children[0].children[0], ParseTree)
            and children[0].children[0].label == LINK
        ):
            return children[0]
        return ParseTree(node.label, tuple(children))

    return visit(tree)


# ---------------------------------------------------------------------------
# translation to semantic trees


def _content(node: ParseTree) -> list[ParseTree]:
    """Children minus punctuation preterminals."""
    out = []
    for c in node.children:
        if isinstance(c, str):
            raise UntranslatableError(f"bare word {c!r} under {node.label}")
        if c.is_preterminal and not c.label[0].isalpha():
            continue
        out.append(c)
    return out


class _Translator:
    def __init__(self, prepositions: Mapping[tuple[str, ...], str]) -> None:
        self.prepositions = prepositions

    def relation_of(self, prep: ParseTree) -> str:
        if prep.label == LINK:
            return prep.word
        return self.prepositions.get((prep.word,), prep.word)

    def pp(self, node: ParseTree) -> tuple[str, SemTree]:
        parts = _content(node)
        if len(parts) != 2 or not parts[0].is_preterminal or parts[0].label not in PREP_TAGS:
            raise UntranslatableError(f"unsupported PP {node}")
        return self.relation_of(parts[0]), self.np(parts[1])

    def np(self, node: ParseTree) -> SemTree:
        if node.is_preterminal:
            if node.label in NOUN_TAGS or node.label == "PRP":
                return Terminal(node.word)
            raise UntranslatableError(f"unsupported word {node}")
        parts = _content(node)
        if len(parts) == 1 and not parts[0].is_preterminal:
            return self.np(parts[0])
        if len(parts) == 2 and parts[1].label.startswith("PP") and not parts[0].is_preterminal:
            name, obj = self.pp(parts[1])
            return Relation(name, (self.np(parts[0]), obj))

        article = None
        adjectives: list[str] = []
        head: str | None = None
        for p in parts:
            if not p.is_preterminal:
                if p.label.startswith("ADJP") and head is None:
                    adjectives.extend(self.adjp(p))
                    continue
                raise UntranslatableError(f"unsupported constituent {p} in NP")
            if p.label == "DT" and article is None and head is None and not adjectives:
                if p.word not in ARTICLES:
                    raise UntranslatableError(f"unsupported determiner {p.word!r}")
                article = ARTICLES[p.word]
            elif p.label in ADJ_TAGS and head is None:
                adjectives.append(p.word)
            elif p.label in NOUN_TAGS and head is None:
                head = p.word
            elif p.label == "PRP" and len(parts) == 1:
                return Terminal(p.word)
            else:
                raise UntranslatableError(f"unsupported word {p} in NP")
        if head is None:
            raise UntranslatableError(f"noun phrase without head noun: {node}")
        tree: SemTree = Terminal(head)
        for adj in reversed(adjectives):
            tree = Relation(ADJECTIVE_LEXICON.get(adj, "mod"), (tree, Terminal(adj)))
        if article is not None:
            tree = Relation(article, (tree,))
        return tree

    def adjp(self, node: ParseTree) -> list[str]:
        words = []
        for p in _content(node):
            if not (p.is_preterminal and p.label in ADJ_TAGS):
                raise UntranslatableError(f"unsupported adjective phrase {node}")
            words.append(p.word)
        return words

    def clause(self, node: ParseTree) -> SemTree:
        nps: list[ParseTree] = []
        pps: list[ParseTree] = []

        def collect(n: ParseTree) -> None:
            for c in _content(n):
                if c.label.startswith("NP"):
                    inner = [] if c.is_preterminal else _content(c)
                    if not (len(inner) == 1 and inner[0].label == "EX"):
                        nps.append(c)
                elif c.label.startswith("PP"):
                    pps.append(c)
                elif c.label in _CLAUSE_LABELS:
                    collect(c)
                elif c.label.startswith("VB") or c.label in _SKIP_IN_CLAUSE:
                    continue
                else:
                    raise UntranslatableError(f"unsupported constituent {c.label} in clause")

        if node.label.startswith("NP"):
            return self.np(node)
        collect(node)
        if len(nps) == 1 and len(pps) == 1:
            name, obj = self.pp(pps[0])
            return Relation(name, (self.np(nps[0]), obj))
        if len(nps) == 1 and not pps:
            tree = self.np(nps[0])
            if isinstance(tree, Relation) and tree.name not in ("det", "indet"):
                return tree
        raise UntranslatableError(
            f"clause with {len(nps)} noun phrases and {len(pps)} prepositional phrases"
        )


def _aligned(tree: SemTree, tokens: list[str]) -> bool:
    joined = " " + " ".join(tokens) + " "
    for word in terminals(tree):
        if word not in tokens and f" {' '.join(word.split('-'))} " not in joined:
            return False
    return True


def to_semtree(
    tree: ParseTree,
    tokens: list[str],
    prepositions: Mapping[tuple[str, ...], str] | None = None,
) -> AlignedExample:
    """Translate a simplified parse into a semantic tree aligned with ``tokens``."""
    table = DEFAULT_PREPOSITIONS if prepositions is None else prepositions
    sem = _Translator(table).clause(tree)
    if not _aligned(sem, tokens):
        raise UntranslatableError(f"tree {sem} does not align with the sentence")
    return AlignedExample(tuple(tokens), sem)


# ---------------------------------------------------------------------------
# corpus files


@dataclass
class IngestReport:
    records: int = 0
    translated: int = 0
    pre_aligned: int = 0
    untranslatable: int = 0
    reasons: dict[str, int] = field(default_factory=dict)

    def __add__(self, other: IngestReport) -> IngestReport:
        reasons = dict(self.reasons)
        for k, v in other.reasons.items():
            reasons[k] = reasons.get(k, 0) + v
        return IngestReport(
            self.records + other.records,
            self.translated + other.translated,
            self.pre_aligned + other.pre_aligned,
            self.untranslatable + other.untranslatable,
            reasons,
        )


def read_records(text: str) -> Iterator[tuple[int, str, str]]:
    """(first line number, sentence, body) per blank-line separated record."""
    lines = text.splitlines()
    i = 0
    while i < len(lines):
        if not lines[i].strip() or lines[i].lstrip().startswith("#"):
            i += 1
            continue
        start = i
        block = []
        while i < len(lines) and lines[i].strip():
            block.append(lines[i].strip())
            i += 1
        if len(block) < 2:
            raise FormatError("record needs a sentence line and a tree line", start + 1)
        yield start + 1, block[0], " ".join(block[1:])


def ingest_corpus(
    text: str, prepositions: Mapping[tuple[str, ...], str] | None = None
) -> tuple[list[AlignedExample], IngestReport]:
    """Parse a corpus file into aligned examples.

    Malformed trees raise :class:`FormatError`; records no translation rule
    covers are skipped and counted in the report.
    """
    examples: list[AlignedExample] = []
    report = IngestReport()
    for lineno, sentence, body in read_records(text):
        report.records += 1
        tokens = tokenize(sentence)
        if not tokens:
            raise FormatError("empty sentence", lineno)
        try:
            if body.startswith("("):
                parse = simplify(parse_bracketed(body), prepositions)
                example = to_semtree(parse, tokens, prepositions)
                report.translated += 1
            else:
                example = AlignedExample(tuple(tokens), parse_semtree(body))
                report.pre_aligned += 1
        except ParseError as exc:
            raise FormatError(str(exc), lineno + 1) from exc
        except UntranslatableError as exc:
            report.untranslatable += 1
            key = str(exc).split(":")[0][:60]
            report.reasons[key] = report.reasons.get(key, 0) + 1
            continue
        examples.append(example)
    return examples, report


def format_record(sentence: str, tree: SemTree) -> str:
    return f"{sentence}\n{print_semtree(tree)}\n"
