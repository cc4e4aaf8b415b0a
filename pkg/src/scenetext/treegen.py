"""Sentence planning: scene graph -> ordered sequence of semantic trees.

Each object carries a source weight and a target weight, initialised to
saliency x confidence. A relational sentence (i, j, r) is drawn with
probability proportional to ``w_source[i] * w_target[j] * rho[r]``, competing
with a terminate outcome of mass ``tau``. With the diversity switch on, the
chosen source, target and relation weights are zeroed afterwards.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field, replace
from typing import Optional

from .errors import NoViableObject
from .scene_graph import SceneGraph
from .semtree import Relation, SemTree, Terminal, make_tree

FEATURES = ("diversity", "saliency", "scene", "attributes", "coreference")

# scene-graph edge name -> relation name used in semantic trees and grammars
TREE_RELATION = {"top-of": "on-top-of"}
# position edge -> (tree relation, region noun), only with position_sentences
POSITION_TREES = {
    "corner-of-room": ("corner-of", "room"),
    "center-of-room": ("center-of", "room"),
    "left-of-room": ("left-of", "room"),
    "right-of-room": ("right-of", "room"),
    "front-of-camera": ("in-front-of", "camera"),
    "far-away-from-camera": ("far-from", "camera"),
}
LEADING_RELATION = "in"

Edge = tuple[int, int, str]
Outcome = Optional[Edge]  # None means terminate


@dataclass(frozen=True)
class GenConfig:
    diversity: bool = False
    saliency: bool = False
    scene: bool = False
    attributes: bool = False
    coreference: bool = False
    tau: float = 1.0
    rho_default: float = 1.0
    max_sentences: int = 10
    position_sentences: bool = False

    def __post_init__(self) -> None:
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.rho_default < 0:
            raise ValueError("rho_default must be non-negative")
        if self.max_sentences < 1:
            raise ValueError("max_sentences must be at least 1")

    @classmethod
    def from_level(cls, level: int, **kwargs) -> GenConfig:
        """Level k switches on the first k of diversity, saliency, scene, attributes, coreference."""
        if not 0 <= level <= len(FEATURES):
            raise ValueError(f"level must be in 0..{len(FEATURES)}, got {level}")
        flags = {name: i < level for i, name in enumerate(FEATURES)}
        return cls(**flags, **kwargs)

    @property
    def level(self) -> int | None:
        flags = [getattr(self, f) for f in FEATURES]
        k = sum(flags)
        return k if all(flags[:k]) else None

    def to_dict(self) -> dict:
        return {f: getattr(self, f) for f in self.__dataclass_fields__}


@dataclass
class GenWeights:
    w_source: dict[int, float]
    w_target: dict[int, float]
    rho: dict[str, float]
    tau: float

    def copy(self) -> GenWeights:
        return GenWeights(dict(self.w_source), dict(self.w_target), dict(self.rho), self.tau)

    def scaled(self, c: float) -> GenWeights:
        """Source weights and tau times ``c``; the outcome distribution is unchanged."""
        return GenWeights(
            {k: c * v for k, v in self.w_source.items()},
            dict(self.w_target),
            dict(self.rho),
            c * self.tau,
        )


@dataclass
class GenState:
    used_as_source: set[int] = field(default_factory=set)
    used_as_target: set[int] = field(default_factory=set)
    used_relations: set[str] = field(default_factory=set)
    last_sentence_objects: frozenset[int] = frozenset()
    sentences_emitted: int = 0


@dataclass(frozen=True)
class SentencePlan:
    tree: SemTree
    source_id: int | None = None
    target_id: int | None = None
    relation: str | None = None

    @property
    def objects(self) -> frozenset[int]:
        return frozenset(i for i in (self.source_id, self.target_id) if i is not None)


def init_weights(graph: SceneGraph, config: GenConfig) -> GenWeights:
    w = {
        o.id: (o.saliency * o.confidence if config.saliency else o.confidence)
        for o in graph.objects
    }
    names = [name for _, _, name in graph.pairwise_edges] + [n for _, n in graph.position_edges]
    rho = {name: config.rho_default for name in names}
    return GenWeights(dict(w), dict(w), rho, config.tau)


def candidate_edges(graph: SceneGraph) -> list[Edge]:
    seen: set[Edge] = set()
    out = []
    for edge in graph.pairwise_edges:
        if edge[0] != edge[1] and edge not in seen:
            seen.add(edge)
            out.append(edge)
    return out


def _edge_masses(graph: SceneGraph, weights: GenWeights) -> list[tuple[Edge, float]]:
    out = []
    for edge in candidate_edges(graph):
        i, j, r = edge
        mass = weights.w_source.get(i, 0.0) * weights.w_target.get(j, 0.0) * weights.rho.get(r, 0.0)
        if mass > 0:
            out.append((edge, mass))
    return out


def outcome_distribution(graph: SceneGraph, weights: GenWeights) -> list[tuple[Outcome, float]]:
    """Normalized probabilities of each relational outcome and of terminating."""
    masses = _edge_masses(graph, weights)
    if not masses:
        return [(None, 1.0)]
    total = sum(m for _, m in masses) + weights.tau
    return [(e, m / total) for e, m in masses] + [(None, weights.tau / total)]


def draw_outcome(
    graph: SceneGraph, weights: GenWeights, rng: random.Random, allow_terminate: bool = True
) -> Outcome:
    masses = _edge_masses(graph, weights)
    if not masses:
        return None
    outcomes: list[Outcome] = [e for e, _ in masses]
    mass = [m for _, m in masses]
    if allow_terminate:
        outcomes.append(None)
        mass.append(weights.tau)
    return rng.choices(outcomes, weights=mass)[0]


def _mentioned_last(oid: int, config: GenConfig, state: GenState | None) -> bool:
    return config.coreference and state is not None and oid in state.last_sentence_objects


def _record(plan: SentencePlan, state: GenState | None) -> None:
    if state is None:
        return
    if plan.source_id is not None:
        state.used_as_source.add(plan.source_id)
    if plan.target_id is not None:
        state.used_as_target.add(plan.target_id)
    if plan.relation is not None:
        state.used_relations.add(plan.relation)
    state.last_sentence_objects = plan.objects
    state.sentences_emitted += 1


def _relational_plan(
    graph: SceneGraph,
    edge: Edge,
    weights: GenWeights,
    state: GenState | None,
    config: GenConfig,
    rng: random.Random,
) -> SentencePlan:
    i, j, r = edge
    # one pronoun per sentence: the source wins when both were just mentioned
    src_pronoun = _mentioned_last(i, config, state)
    dst_pronoun = _mentioned_last(j, config, state) and not src_pronoun
    tree = Relation(
        TREE_RELATION.get(r, r),
        (
            make_tree(graph.object(i), config.attributes, src_pronoun, rng),
            make_tree(graph.object(j), config.attributes, dst_pronoun, rng),
        ),
    )
    if config.diversity:
        weights.w_source[i] = 0.0
        weights.w_target[j] = 0.0
        weights.rho[r] = 0.0
    return SentencePlan(tree, i, j, r)


def _position_plan(
    graph: SceneGraph,
    weights: GenWeights,
    state: GenState | None,
    config: GenConfig,
    rng: random.Random,
    allow_terminate: bool,
) -> SentencePlan | None:
    outcomes: list[tuple[int, str] | None] = []
    mass = []
    for oid, name in dict.fromkeys(graph.position_edges):
        m = weights.w_source.get(oid, 0.0) * weights.rho.get(name, 0.0)
        if m > 0:
            outcomes.append((oid, name))
            mass.append(m)
    if not outcomes:
        return None
    if allow_terminate:
        outcomes.append(None)
        mass.append(weights.tau)
    pick = rng.choices(outcomes, weights=mass)[0]
    if pick is None:
        return None
    oid, name = pick
    relation, region = POSITION_TREES[name]
    tree = Relation(
        relation,
        (
            make_tree(graph.object(oid), config.attributes, _mentioned_last(oid, config, state), rng),
            Relation("det", (Terminal(region),)),
        ),
    )
    if config.diversity:
        weights.w_source[oid] = 0.0
        weights.rho[name] = 0.0
    return SentencePlan(tree, oid, None, name)


def plan_leading(
    graph: SceneGraph,
    weights: GenWeights,
    config: GenConfig,
    rng: random.Random,
    state: GenState | None = None,
) -> SentencePlan:
    """First sentence of a paragraph.

    With the scene switch on this is ``in(<object>, det(<scene class>))`` for a
    source drawn by source weight. Otherwise the first relational sentence is
    drawn as in :func:`plan_next` but without the option to stop.
    """
    if config.scene:
        ids = [o.id for o in graph.objects if weights.w_source.get(o.id, 0.0) > 0]
        if not ids:
            raise NoViableObject("every object has zero source weight")
        i = rng.choices(ids, weights=[weights.w_source[k] for k in ids])[0]
        tree = Relation(
            LEADING_RELATION,
            (
                make_tree(graph.object(i), config.attributes, False, rng),
                Relation("det", (Terminal(graph.scene_class),)),
            ),
        )
        if config.diversity:
            weights.w_source[i] = 0.0
        plan = SentencePlan(tree, i, None, None)
    else:
        edge = draw_outcome(graph, weights, rng, allow_terminate=False)
        if edge is not None:
            plan = _relational_plan(graph, edge, weights, state, config, rng)
        else:
            pos = None
            if config.position_sentences:
                pos = _position_plan(graph, weights, state, config, rng, allow_terminate=False)
            if pos is None:
                raise NoViableObject("no pairwise relation with positive weight to describe")
            plan = pos
    _record(plan, state)
    return plan


def plan_next(
    graph: SceneGraph,
    weights: GenWeights,
    state: GenState,
    config: GenConfig,
    rng: random.Random,
) -> SentencePlan | None:
    """Draw the next sentence, or None to terminate."""
    if _edge_masses(graph, weights):
        edge = draw_outcome(graph, weights, rng)
        if edge is None:
            return None
        plan = _relational_plan(graph, edge, weights, state, config, rng)
    elif config.position_sentences:
        plan = _position_plan(graph, weights, state, config, rng, allow_terminate=True)
        if plan is None:
            return None
    else:
        return None
    _record(plan, state)
    return plan


def generate_plans(
    graph: SceneGraph, config: GenConfig, rng: random.Random
) -> list[SentencePlan]:
    weights = init_weights(graph, config)
    state = GenState()
    plans = [plan_leading(graph, weights, config, rng, state)]
    while len(plans) < config.max_sentences:
        plan = plan_next(graph, weights, state, config, rng)
        if plan is None:
            break
        plans.append(plan)
    return plans


def with_level(config: GenConfig, level: int) -> GenConfig:
    flags = {name: i < level for i, name in enumerate(FEATURES)}
    return replace(config, **flags)
