"""ROUGE-N and ROUGE-S/SU with recall, precision and F1."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .errors import EmptyCorpus, InvalidN
from .text import tokenize

Text = Union[str, Sequence[str]]


@dataclass(frozen=True)
class RougeScore:
    recall: float
    precision: float
    f1: float

    @classmethod
    def from_counts(cls, overlap: int, n_ref: int, n_cand: int) -> RougeScore:
        r = overlap / n_ref if n_ref else 0.0
        p = overlap / n_cand if n_cand else 0.0
        f = 2 * r * p / (r + p) if r + p > 0 else 0.0
        return cls(r, p, f)


def _tokens(text: Text) -> list[str]:
    return tokenize(text) if isinstance(text, str) else list(text)


def ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def skip_bigrams(tokens: Sequence[str], max_skip: int) -> Counter:
    """Ordered pairs (i, j), i < j, with at most ``max_skip`` tokens between them."""
    out: Counter = Counter()
    for i in range(len(tokens)):
        for j in range(i + 1, min(len(tokens), i + max_skip + 2)):
            out[(tokens[i], tokens[j])] += 1
    return out


def _overlap_score(cand: Counter, ref: Counter) -> RougeScore:
    overlap = sum((cand & ref).values())
    return RougeScore.from_counts(overlap, sum(ref.values()), sum(cand.values()))


def rouge_n(candidate: Text, reference: Text, n: int) -> RougeScore:
    if n < 1:
        raise InvalidN(f"n must be >= 1, got {n}")
    return _overlap_score(ngrams(_tokens(candidate), n), ngrams(_tokens(reference), n))


def rouge_su(
    candidate: Text, reference: Text, max_skip: int = 4, unigrams: bool = True
) -> RougeScore:
    """ROUGE-SU (skip-bigrams plus unigrams); ``unigrams=False`` gives plain ROUGE-S."""
    if max_skip < 0:
        raise ValueError(f"max_skip must be >= 0, got {max_skip}")
    c, r = _tokens(candidate), _tokens(reference)
    cand = skip_bigrams(c, max_skip)
    ref = skip_bigrams(r, max_skip)
    if unigrams:
        cand.update(ngrams(c, 1))
        ref.update(ngrams(r, 1))
    return _overlap_score(cand, ref)


_METRIC = re.compile(r"^rouge(?:(\d+)|(su|s)(\d+))$")


def metric_fn(name: str):
    """Scoring function for names like ``rouge1``, ``rouge2``, ``rougesu4``, ``rouges4``."""
    m = _METRIC.match(name.lower().replace("-", ""))
    if m is None:
        raise ValueError(f"unknown metric {name!r}")
    if m.group(1):
        n = int(m.group(1))
        return lambda cand, ref: rouge_n(cand, ref, n)
    skip = int(m.group(3))
    with_unigrams = m.group(2) == "su"
    return lambda cand, ref: rouge_su(cand, ref, skip, with_unigrams)


def score_multi(candidate: Text, references: Sequence[Text], metric: str) -> RougeScore:
    """Best-F score over several references (ties keep the first)."""
    fn = metric_fn(metric)
    best: RougeScore | None = None
    for ref in references:
        s = fn(candidate, ref)
        if best is None or s.f1 > best.f1:
            best = s
    if best is None:
        raise ValueError("no references given")
    return best


def evaluate_corpus(
    pairs: Iterable[tuple[Text, Union[Text, Sequence[Text]]]],
    metrics: Sequence[str] = ("rouge1", "rouge2", "rougesu4"),
) -> dict[str, RougeScore]:
    """Per-metric arithmetic mean of per-pair scores.

    A reference may be a single text or a list of alternatives, in which case
    the best-F alternative counts.
    """
    pairs = list(pairs)
    if not pairs:
        raise EmptyCorpus("no candidate/reference pairs to evaluate")
    out = {}
    for metric in metrics:
        scores = []
        for cand, ref in pairs:
            refs = [ref] if isinstance(ref, str) else list(ref)
            scores.append(score_multi(cand, refs, metric))
        k = len(scores)
        out[metric] = RougeScore(
            sum(s.recall for s in scores) / k,
            sum(s.precision for s in scores) / k,
            sum(s.f1 for s in scores) / k,
        )
    return out
