"""Bundled sample data and the synthetic-corpus generator.

Files live under ``scenetext/data``:

- ``reference_grammar.txt``  hand-written grammar the corpus is sampled from
- ``corpus.txt``             500 synthesized records, pre-aligned format
- ``parsed_corpus.txt``      hand-parsed sentences in bracketed form
- ``learned_grammar.txt``    grammar learned from ``corpus.txt`` (default pruning)
- ``scenes/*.json``          scene graphs
- ``golden.json``            paragraphs keyed by ``scene|level|seed``

Run ``python -m scenetext.fixtures`` to rebuild the derived files.
"""

from __future__ import annotations

import argparse
import json
import random
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .corpus import format_record
from .grammar import Grammar, load_grammar, save_grammar
from .pipeline import generate_one, learn_from_text
from .realize import RealizeConfig, realize
from .scene_graph import ATTRIBUTE_CATEGORIES, SceneGraph, load_scene_graph
from .semtree import Relation, SemTree, Terminal
from .treegen import GenConfig

CORPUS_SEED = 2015
CORPUS_SIZE = 500
GOLDEN_LEVELS = range(6)
GOLDEN_SEEDS = (1, 7)

# consonant-initial so a/an agreement never rewrites a sampled article
NOUNS = (
    "table", "chair", "box", "lamp", "sink", "cabinet", "bed", "pillow", "desk",
    "monitor", "toilet", "towel", "mirror", "shelf", "sofa", "picture", "cup",
    "mug", "bottle", "microwave-oven", "fire-extinguisher", "counter", "stove",
    "door", "window", "wall", "plant", "rug", "curtain", "television", "nightstand",
    "dresser", "bathtub", "bookshelf", "keyboard",
)
SCENES = ("kitchen", "bathroom", "bedroom", "office", "dining-room", "living-room")
ATTRIBUTE_RELATIONS = ("size", "color", "material")
ARTICLE_RELATIONS = ("det", "indet")


def data_dir() -> Path:
    return Path(str(resources.files("scenetext").joinpath("data")))


def fixture_path(name: str) -> Path:
    return data_dir() / name


def reference_grammar() -> Grammar:
    return load_grammar(fixture_path("reference_grammar.txt").read_text("utf-8"))


def scene_paths() -> dict[str, Path]:
    return {p.stem: p for p in sorted((data_dir() / "scenes").glob("*.json"))}


def load_scene(name: str) -> SceneGraph:
    return load_scene_graph(scene_paths()[name].read_text("utf-8"))


@dataclass(frozen=True)
class TreeSamplerConfig:
    nouns: tuple[str, ...] = NOUNS
    scenes: tuple[str, ...] = SCENES
    p_leading: float = 0.2
    p_pronoun: float = 0.15
    p_definite: float = 0.3
    p_attribute: float = 0.25


def _object_tree(noun: str, cfg: TreeSamplerConfig, rng: random.Random) -> SemTree:
    tree: SemTree = Terminal(noun)
    for category in reversed(ATTRIBUTE_RELATIONS):
        if rng.random() < cfg.p_attribute:
            value = rng.choice(ATTRIBUTE_CATEGORIES[category])
            tree = Relation(category, (tree, Terminal(value)))
    article = "det" if rng.random() < cfg.p_definite else "indet"
    return Relation(article, (tree,))


def sample_tree(
    grammar: Grammar, cfg: TreeSamplerConfig, rng: random.Random
) -> SemTree:
    """A random sentence-level tree whose relations all exist in ``grammar``."""
    spatial = [
        r
        for r in grammar.entries
        if grammar.arity(r) == 2 and r not in ATTRIBUTE_RELATIONS and r != "in"
    ]
    if "in" in grammar and rng.random() < cfg.p_leading:
        noun = rng.choice(cfg.nouns)
        scene = Relation("det", (Terminal(rng.choice(cfg.scenes)),))
        return Relation("in", (_object_tree(noun, cfg, rng), scene))
    relation = rng.choice(spatial)
    src, dst = rng.sample(cfg.nouns, 2)
    source = Terminal("it") if rng.random() < cfg.p_pronoun else _object_tree(src, cfg, rng)
    return Relation(relation, (source, _object_tree(dst, cfg, rng)))


def synthesize_corpus(
    grammar: Grammar,
    sampler: TreeSamplerConfig,
    n: int,
    rng: random.Random,
) -> tuple[str, Counter]:
    """Sample ``n`` trees, realize each with ``grammar``.

    Returns the corpus text (pre-aligned format) and how often each
    ``(relation, template text)`` was used, which is what learning with zero
    thresholds must recover.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    usage: Counter = Counter()
    records = []
    for _ in range(n):
        tree = sample_tree(grammar, sampler, rng)
        trace: list = []
        sentence = realize(tree, grammar, RealizeConfig(), rng, trace)
        usage.update((t.relation, t.text) for t in trace)
        records.append(format_record(sentence, tree))
    return "\n".join(records), usage


def golden_key(scene: str, level: int, seed: int) -> str:
    return f"{scene}|{level}|{seed}"


def build_golden(grammar: Grammar) -> dict[str, str]:
    out = {}
    for name in scene_paths():
        graph = load_scene(name)
        for level in GOLDEN_LEVELS:
            for seed in GOLDEN_SEEDS:
                run = generate_one(graph, grammar, GenConfig.from_level(level), RealizeConfig(), seed)
                out[golden_key(name, level, seed)] = run.paragraph
    return out


def rebuild(target: Path | None = None) -> None:
    target = target or data_dir()
    corpus, _ = synthesize_corpus(
        reference_grammar(), TreeSamplerConfig(), CORPUS_SIZE, random.Random(CORPUS_SEED)
    )
    (target / "corpus.txt").write_text(corpus, "utf-8")
    grammar, _, _ = learn_from_text(corpus)
    (target / "learned_grammar.txt").write_text(save_grammar(grammar), "utf-8")
    golden = build_golden(grammar)
    (target / "golden.json").write_text(json.dumps(golden, indent=2, sort_keys=True) + "\n", "utf-8")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description="Rebuild derived fixture files.")
    parser.add_argument("--out", type=Path, default=None, help="target directory (default: package data)")
    args = parser.parse_args(argv)
    rebuild(args.out)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
