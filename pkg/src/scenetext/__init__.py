"""Multi-sentence indoor scene descriptions from 3D scene graphs.

The pipeline: a grammar of weighted templates is learned from (sentence,
semantic tree) pairs; a scene graph is planned into a sequence of semantic
trees; each tree is realized into a sentence; output is scored with ROUGE.
"""

from .errors import ScenetextError
from .grammar import (
    Grammar,
    LearnConfig,
    Template,
    learn_templates,
    load_grammar,
    save_grammar,
)
from .realize import RealizeConfig, realize, realize_paragraph
from .rouge import RougeScore, evaluate_corpus, rouge_n, rouge_su
from .scene_graph import SceneGraph, load_scene_graph, serialize_scene_graph
from .semtree import Relation, Terminal, make_tree, parse_semtree, print_semtree
from .treegen import GenConfig, generate_plans

__version__ = "0.1.0"

__all__ = [
    "GenConfig",
    "Grammar",
    "LearnConfig",
    "RealizeConfig",
    "Relation",
    "RougeScore",
    "SceneGraph",
    "ScenetextError",
    "Template",
    "Terminal",
    "evaluate_corpus",
    "generate_plans",
    "learn_templates",
    "load_grammar",
    "load_scene_graph",
    "make_tree",
    "parse_semtree",
    "print_semtree",
    "realize",
    "realize_paragraph",
    "rouge_n",
    "rouge_su",
    "save_grammar",
    "serialize_scene_graph",
]
