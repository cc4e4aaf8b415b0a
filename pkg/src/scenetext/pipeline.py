"""End-to-end helpers shared by the CLI and the fixture builder."""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .corpus import IngestReport, ingest_corpus
from .grammar import Grammar, LearnConfig, LearnReport, learn_templates
from .realize import RealizeConfig, realize_paragraph
from .scene_graph import SceneGraph
from .treegen import GenConfig, SentencePlan, generate_plans


@dataclass(frozen=True)
class Run:
    index: int
    seed: int
    plans: tuple[SentencePlan, ...]
    paragraph: str


def learn_from_text(
    corpus_text: str, config: LearnConfig = LearnConfig()
) -> tuple[Grammar, IngestReport, LearnReport]:
    examples, ingest = ingest_corpus(corpus_text)
    grammar, report = learn_templates(examples, config)
    return grammar, ingest, report


def run_seed(seed: int, index: int) -> int:
    """Seed of the ``index``-th run of a batch started with ``seed``."""
    return seed + index


def generate_one(
    graph: SceneGraph,
    grammar: Grammar,
    gen_config: GenConfig,
    realize_config: RealizeConfig,
    seed: int,
    index: int = 0,
) -> Run:
    # one random source per run drives both planning and template choice
    rng = random.Random(run_seed(seed, index))
    plans = generate_plans(graph, gen_config, rng)
    paragraph = realize_paragraph(plans, grammar, realize_config, rng)
    return Run(index, run_seed(seed, index), tuple(plans), paragraph)


def generate_runs(
    graph: SceneGraph,
    grammar: Grammar,
    gen_config: GenConfig,
    realize_config: RealizeConfig,
    seed: int,
    runs: int = 1,
    jobs: int = 1,
) -> list[Run]:
    """Independent runs with seeds ``seed + k``; results are ordered by run index."""
    if runs < 1:
        raise ValueError("runs must be at least 1")

    def one(k: int) -> Run:
        return generate_one(graph, grammar, gen_config, realize_config, seed, k)

    if jobs <= 1 or runs == 1:
        return [one(k) for k in range(runs)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(one, range(runs)))
