"""Weighted template grammar: learning by recursive matching, pruning, persistence.

A template is a sequence of literal words and numbered placeholders, e.g.
``{1} is on top of {2}``. Weights are corpus frequencies.

Matching a relation node against a word span assigns each child a disjoint
sub-span. Children are placed left to right (for binary nodes the swapped
order is tried next); each child prefers its shortest realizing span, the
leftmost among equally short ones, and the search backtracks over these
candidates. Shortest spans push boundary words up to the parent, so
``a red box`` under ``indet(color(box, red))`` yields ``indet -> a {1}`` and
``color -> {2} {1}``. A unary node whose template would be the bare ``{1}``
is rejected, since it carries no surface material.
"""

from __future__ import annotations

import math
import re
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence, Union

from .errors import FormatError, MatchFailure
from .semtree import Relation, SemTree, Terminal

Part = Union[str, int]

_PLACEHOLDER = re.compile(r"^\{(\d+)\}$")


@dataclass(frozen=True)
class Template:
    relation: str
    parts: tuple[Part, ...]
    weight: float = 1.0

    def __post_init__(self) -> None:
        if not self.parts:
            raise ValueError(f"empty template for {self.relation!r}")
        slots = sorted(p for p in self.parts if isinstance(p, int))
        if slots != list(range(1, len(slots) + 1)):
            raise ValueError(
                f"template {self.text!r}: placeholders must be 1..arity, each exactly once"
            )
        if not self.weight > 0:
            raise ValueError(f"template {self.text!r}: weight must be positive")

    @property
    def arity(self) -> int:
        return sum(1 for p in self.parts if isinstance(p, int))

    @property
    def text(self) -> str:
        return " ".join(f"{{{p}}}" if isinstance(p, int) else p for p in self.parts)

    @classmethod
    def from_text(cls, relation: str, text: str, weight: float = 1.0) -> Template:
        parts: list[Part] = []
        for tok in text.split():
            m = _PLACEHOLDER.match(tok)
            parts.append(int(m.group(1)) if m else tok.lower())
        return cls(relation, tuple(parts), weight)

    def fill(self, children: Sequence[str]) -> str:
        return " ".join(children[p - 1] if isinstance(p, int) else p for p in self.parts)


@dataclass(frozen=True)
class Grammar:
    """Relation name -> templates, in file order (argmax ties go to the first)."""

    entries: Mapping[str, tuple[Template, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for relation, templates in self.entries.items():
            if not templates:
                raise ValueError(f"relation {relation!r} has no templates")
            arities = {t.arity for t in templates}
            if len(arities) != 1:
                raise ValueError(f"relation {relation!r} mixes arities {sorted(arities)}")
            if any(t.relation != relation for t in templates):
                raise ValueError(f"template filed under the wrong relation {relation!r}")

    def __contains__(self, relation: str) -> bool:
        return relation in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def templates(self, relation: str) -> tuple[Template, ...]:
        return self.entries[relation]

    def arity(self, relation: str) -> int:
        return self.entries[relation][0].arity

    def total_weight(self, relation: str) -> float:
        return sum(t.weight for t in self.entries[relation])

    def weight_of(self, relation: str, text: str) -> float:
        for t in self.entries.get(relation, ()):
            if t.text == text:
                return t.weight
        return 0.0

    def as_counts(self) -> dict[tuple[str, str], float]:
        return {(r, t.text): t.weight for r, ts in self.entries.items() for t in ts}


@dataclass(frozen=True)
class LearnConfig:
    min_template_count: int = 5
    min_relation_weight: int = 20

    def __post_init__(self) -> None:
        if self.min_template_count < 0 or self.min_relation_weight < 0:
            raise ValueError("pruning thresholds must be non-negative")


@dataclass
class LearnReport:
    examples: int = 0
    matched: int = 0
    failed: int = 0
    partial: int = 0
    templates_found: int = 0
    templates_kept: int = 0
    templates_discarded: int = 0
    relations_found: int = 0
    relations_kept: int = 0
    relations_discarded: int = 0

    def to_dict(self) -> dict[str, int]:
        return asdict(self)


@dataclass(frozen=True)
class MatchResult:
    template: Template
    child_spans: tuple[tuple[int, int], ...]  # per child, [start, end) into the span


# ---------------------------------------------------------------------------
# matching


def _terminal_tokens(word: str) -> tuple[tuple[str, ...], ...]:
    word = word.lower()
    forms = [(word,)]
    if "-" in word:
        forms.append(tuple(p for p in word.split("-") if p))
    return tuple(forms)


def _min_length(tree: SemTree) -> int:
    if isinstance(tree, Terminal):
        return 1
    return sum(_min_length(c) for c in tree.children)


def _realizes(tree: SemTree, tokens: tuple[str, ...]) -> bool:
    if isinstance(tree, Terminal):
        return tokens in _terminal_tokens(tree.word)
    return _match(tree, tokens) is not None


def _candidates(
    tree: SemTree, tokens: tuple[str, ...], lo: int
) -> Iterator[tuple[int, int]]:
    """Realizing spans within tokens[lo:], shortest first, then leftmost."""
    n = len(tokens)
    if isinstance(tree, Terminal):
        for form in sorted(set(_terminal_tokens(tree.word)), key=len):
            k = len(form)
            for s in range(lo, n - k + 1):
                if tokens[s : s + k] == form:
                    yield s, s + k
        return
    for length in range(_min_length(tree), n - lo + 1):
        for s in range(lo, n - length + 1):
            if _realizes(tree, tokens[s : s + length]):
                yield s, s + length


@lru_cache(maxsize=1 << 16)
def _match(tree: Relation, tokens: tuple[str, ...]) -> MatchResult | None:
    children = tree.children
    orders = [tuple(range(len(children)))]
    if len(children) == 2:
        orders.append((1, 0))
    n = len(tokens)

    def assign(order: tuple[int, ...], k: int, lo: int) -> list[tuple[int, int]] | None:
        if k == len(order):
            return []
        for s, e in _candidates(children[order[k]], tokens, lo):
            if len(children) == 1 and (s, e) == (0, n):
                continue
            rest = assign(order, k + 1, e)
            if rest is not None:
                return [(s, e)] + rest
        return None

    for order in orders:
        placed = assign(order, 0, 0)
        if placed is None:
            continue
        spans: list[tuple[int, int]] = [(0, 0)] * len(children)
        for child, span in zip(order, placed):
            spans[child] = span
        starts = {s: (child, e) for child, (s, e) in enumerate(spans)}
        parts: list[Part] = []
        i = 0
        while i < n:
            if i in starts:
                child, e = starts[i]
                parts.append(child + 1)
                i = e
            else:
                parts.append(tokens[i])
                i += 1
        return MatchResult(Template(tree.name, tuple(parts)), tuple(spans))
    return None


def match_node(tree: SemTree, span: Sequence[str]) -> MatchResult:
    """Extract the template a relation node uses in ``span``.

    Raises :class:`MatchFailure` when some child has no realizing sub-span.
    """
    if not isinstance(tree, Relation):
        raise MatchFailure(f"cannot match terminal {tree.word!r} as a relation")
    tokens = tuple(w.lower() for w in span)
    result = _match(tree, tokens)
    if result is None:
        raise MatchFailure(f"no alignment of {tree.name!r} node with {' '.join(tokens)!r}")
    return result


def _harvest(
    tree: SemTree, tokens: tuple[str, ...], found: list[Template]
) -> bool:
    """Collect templates of every matchable node; True if the whole subtree matched."""
    if isinstance(tree, Terminal):
        return True
    result = _match(tree, tokens)
    if result is not None:
        found.append(result.template)
        ok = True
        for child, (s, e) in zip(tree.children, result.child_spans):
            ok = _harvest(child, tokens[s:e], found) and ok
        return ok
    # partial credit: children matched on their own best span
    for child in tree.children:
        if isinstance(child, Relation):
            span = next(_candidates(child, tokens, 0), None)
            if span is not None:
                _harvest(child, tokens[span[0] : span[1]], found)
    return False


# ---------------------------------------------------------------------------
# learning and pruning


def _build(counts: Mapping[tuple[str, tuple[Part, ...]], float]) -> Grammar:
    by_relation: dict[str, list[Template]] = {}
    for (relation, parts), weight in counts.items():
        by_relation.setdefault(relation, []).append(Template(relation, parts, float(weight)))
    entries = {}
    for relation in sorted(by_relation):
        # stable sort keeps first-seen order among equal weights
        entries[relation] = tuple(sorted(by_relation[relation], key=lambda t: -t.weight))
    return Grammar(entries)


def prune(grammar: Grammar, config: LearnConfig) -> Grammar:
    """Drop templates seen fewer than ``min_template_count`` times, then
    relations whose remaining weight is below ``min_relation_weight``."""
    entries = {}
    for relation, templates in grammar.entries.items():
        kept = tuple(t for t in templates if not t.weight < config.min_template_count)
        if kept and not sum(t.weight for t in kept) < config.min_relation_weight:
            entries[relation] = kept
    return Grammar(entries)


def learn_templates(
    examples: Iterable, config: LearnConfig = LearnConfig()
) -> tuple[Grammar, LearnReport]:
    """Learn a grammar from aligned (tokens, tree) examples.

    Every successfully matched node contributes its template, including nodes
    below an ancestor that failed to match.
    """
    report = LearnReport()
    counts: dict[tuple[str, tuple[Part, ...]], int] = {}
    arities: dict[str, dict[int, int]] = {}
    for ex in examples:
        report.examples += 1
        found: list[Template] = []
        ok = _harvest(ex.tree, tuple(w.lower() for w in ex.tokens), found)
        if ok:
            report.matched += 1
        else:
            report.failed += 1
            if found:
                report.partial += 1
        for t in found:
            key = (t.relation, t.parts)
            counts[key] = counts.get(key, 0) + 1
            per = arities.setdefault(t.relation, {})
            per[t.arity] = per.get(t.arity, 0) + 1

    # a relation seen with several arities keeps the dominant one
    dropped = 0
    for relation, per in arities.items():
        if len(per) > 1:
            best = max(sorted(per), key=lambda a: per[a])
            for key in [k for k in counts if k[0] == relation]:
                if sum(isinstance(p, int) for p in key[1]) != best:
                    del counts[key]
                    dropped += 1

    full = _build(counts)
    pruned = prune(full, config)
    n_full = sum(len(ts) for ts in full.entries.values())
    n_kept = sum(len(ts) for ts in pruned.entries.values())
    report.templates_found = n_full + dropped
    report.templates_kept = n_kept
    report.templates_discarded = n_full + dropped - n_kept
    report.relations_found = len(full)
    report.relations_kept = len(pruned)
    report.relations_discarded = len(full) - len(pruned)
    return pruned, report


# ---------------------------------------------------------------------------
# persistence


def _format_weight(w: float) -> str:
    return str(int(w)) if float(w).is_integer() else repr(float(w))


def save_grammar(grammar: Grammar) -> str:
    blocks = []
    for relation, templates in grammar.entries.items():
        lines = [f"{relation}/{templates[0].arity}"]
        lines += [f"{_format_weight(t.weight)}\t{t.text}" for t in templates]
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)


_HEADER = re.compile(r"^([^\s(),/]+)/(\d+)$")


def load_grammar(text: str) -> Grammar:
    """Read the ``relation/arity`` + ``weight<TAB>template`` line format."""
    entries: dict[str, list[Template]] = {}
    current: str | None = None
    arity = 0
    header_line = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip()
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if "\t" not in line:
            m = _HEADER.match(line.strip())
            if m is None:
                raise FormatError(f"expected 'relation/arity' header, got {line!r}", lineno)
            if current is not None and not entries[current]:
                raise FormatError(f"relation {current!r} has no templates", header_line)
            current, arity = m.group(1), int(m.group(2))
            if current in entries:
                raise FormatError(f"duplicate relation {current!r}", lineno)
            entries[current] = []
            header_line = lineno
            continue
        if current is None:
            raise FormatError("template line before any relation header", lineno)
        weight_text, _, body = line.partition("\t")
        try:
            weight = float(weight_text)
        except ValueError:
            raise FormatError(f"bad weight {weight_text!r}", lineno) from None
        if not (weight > 0 and math.isfinite(weight)):
            raise FormatError(f"weight must be positive, got {weight_text}", lineno)
        try:
            template = Template.from_text(current, body, weight)
        except ValueError as exc:
            raise FormatError(str(exc), lineno) from None
        if template.arity != arity:
            raise FormatError(
                f"template {template.text!r} has arity {template.arity}, "
                f"relation {current!r} declares {arity}",
                lineno,
            )
        entries[current].append(template)
    if current is not None and not entries[current]:
        raise FormatError(f"relation {current!r} has no templates", header_line)
    return Grammar({r: tuple(ts) for r, ts in entries.items()})
