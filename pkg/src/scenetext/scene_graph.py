"""Scene-graph data model, JSON interchange, and cuboid relation rules.

Coordinates are metric and camera-aligned: x to the right, y forward from
the camera, z up. A cuboid's ``dims`` are (width, depth, height) before the
yaw rotation about the vertical axis is applied.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Iterable

import jsonschema

from .errors import MissingCuboid, SchemaError, ValidationError

SCHEMA_VERSION = 1

COLORS = ("white", "black", "brown", "red", "green", "blue", "yellow", "gray", "pink")
MATERIALS = ("wooden", "bright")
SIZES = ("wide", "tall", "large", "small")
ATTRIBUTE_CATEGORIES: dict[str, tuple[str, ...]] = {
    "size": SIZES,
    "color": COLORS,
    "material": MATERIALS,
}
ATTRIBUTE_VOCABULARY = frozenset(COLORS + MATERIALS + SIZES)

POSITION_RELATIONS = (
    "corner-of-room",
    "front-of-camera",
    "far-away-from-camera",
    "center-of-room",
    "left-of-room",
    "right-of-room",
)
PAIRWISE_RELATIONS = (
    "next-to",
    "near",
    "top-of",
    "above",
    "in-front-of",
    "behind",
    "to-left-of",
    "to-right-of",
)


@dataclass(frozen=True)
class Cuboid:
    center: tuple[float, float, float]
    dims: tuple[float, float, float]
    yaw: float = 0.0

    def __post_init__(self) -> None:
        if len(self.center) != 3 or len(self.dims) != 3:
            raise ValidationError("cuboid center and dims must be 3-vectors")
        if any(d <= 0 for d in self.dims):
            raise ValidationError(f"cuboid dims must be positive, got {self.dims}")
        if not -math.pi <= self.yaw < math.pi:
            raise ValidationError(f"cuboid yaw {self.yaw} outside [-pi, pi)")

    @property
    def half_extents(self) -> tuple[float, float, float]:
        """Half sizes of the axis-aligned box enclosing the rotated cuboid."""
        w, d, h = self.dims
        c, s = abs(math.cos(self.yaw)), abs(math.sin(self.yaw))
        return (0.5 * (w * c + d * s), 0.5 * (w * s + d * c), 0.5 * h)

    @property
    def lo(self) -> tuple[float, float, float]:
        hx, hy, hz = self.half_extents
        x, y, z = self.center
        return (x - hx, y - hy, z - hz)

    @property
    def hi(self) -> tuple[float, float, float]:
        hx, hy, hz = self.half_extents
        x, y, z = self.center
        return (x + hx, y + hy, z + hz)


@dataclass(frozen=True)
class ObjectInstance:
    id: int
    class_label: str
    attributes: frozenset[str] = frozenset()
    saliency: float = 1.0
    confidence: float = 1.0
    cuboid: Cuboid | None = None

    def attributes_by_category(self) -> dict[str, list[str]]:
        """Attribute tokens grouped by category, each list sorted."""
        out: dict[str, list[str]] = {}
        for category, vocab in ATTRIBUTE_CATEGORIES.items():
            present = sorted(a for a in self.attributes if a in vocab)
            if present:
                out[category] = present
        return out


@dataclass(frozen=True)
class RelationLabel:
    kind: str
    name: str

    def __post_init__(self) -> None:
        allowed = {"position": POSITION_RELATIONS, "pairwise": PAIRWISE_RELATIONS}
        if self.kind not in allowed:
            raise ValidationError(f"unknown relation kind {self.kind!r}")
        if self.name not in allowed[self.kind]:
            raise ValidationError(f"unknown {self.kind} relation {self.name!r}")


@dataclass(frozen=True)
class RoomFrame:
    floor_z: float
    room_bounds: tuple[float, float, float, float]  # xmin, ymin, xmax, ymax
    camera_position: tuple[float, float, float]

    def __post_init__(self) -> None:
        xmin, ymin, xmax, ymax = self.room_bounds
        if not (xmax > xmin and ymax > ymin):
            raise ValidationError(f"room bounds {self.room_bounds} have no area")

    @property
    def diagonal(self) -> float:
        xmin, ymin, xmax, ymax = self.room_bounds
        return math.hypot(xmax - xmin, ymax - ymin)


@dataclass(frozen=True)
class SceneGraph:
    scene_class: str
    objects: tuple[ObjectInstance, ...]
    position_edges: tuple[tuple[int, str], ...] = ()
    pairwise_edges: tuple[tuple[int, int, str], ...] = ()
    frame: RoomFrame | None = None
    version: int = SCHEMA_VERSION

    def __post_init__(self) -> None:
        ids = [o.id for o in self.objects]
        if len(set(ids)) != len(ids):
            raise ValidationError("object ids are not unique")
        known = set(ids)
        for oid, name in self.position_edges:
            if oid not in known:
                raise ValidationError(f"position edge references unknown object {oid}")
            RelationLabel("position", name)
        for src, dst, name in self.pairwise_edges:
            for end in (src, dst):
                if end not in known:
                    raise ValidationError(f"pairwise edge references unknown object {end}")
            if src == dst:
                raise ValidationError(f"pairwise edge {name!r} from object {src} to itself")
            RelationLabel("pairwise", name)

    def object(self, oid: int) -> ObjectInstance:
        for o in self.objects:
            if o.id == oid:
                return o
        raise KeyError(oid)


# ---------------------------------------------------------------------------
# JSON interchange

_VEC3 = {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3}

SCENE_GRAPH_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["scene_class", "objects"],
    "additionalProperties": False,
    "properties": {
        "version": {"type": "integer", "minimum": 1},
        "scene_class": {"type": "string", "pattern": r"^[^\s(),]+$"},
        "objects": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "class"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "integer", "minimum": 0},
                    "class": {"type": "string", "pattern": r"^[^\s(),]+$"},
                    "attributes": {"type": "array", "items": {"type": "string"}},
                    "saliency": {"type": "number"},
                    "confidence": {"type": "number"},
                    "cuboid": {
                        "type": "object",
                        "required": ["center", "dims"],
                        "additionalProperties": False,
                        "properties": {
                            "center": _VEC3,
                            "dims": _VEC3,
                            "yaw": {"type": "number"},
                        },
                    },
                },
            },
        },
        "position_edges": {
            "type": "array",
            "items": {
                "type": "array",
                "prefixItems": [{"type": "integer"}, {"type": "string"}],
                "minItems": 2,
                "maxItems": 2,
            },
        },
        "pairwise_edges": {
            "type": "array",
            "items": {
                "type": "array",
                "prefixItems": [
                    {"type": "integer"},
                    {"type": "integer"},
                    {"type": "string"},
                ],
                "minItems": 3,
                "maxItems": 3,
            },
        },
        "frame": {
            "type": "object",
            "required": ["room_bounds", "camera_position"],
            "additionalProperties": False,
            "properties": {
                "floor_z": {"type": "number"},
                "room_bounds": {
                    "type": "array",
                    "items": {"type": "number"},
                    "minItems": 4,
                    "maxItems": 4,
                },
                "camera_position": _VEC3,
            },
        },
    },
}

_validator = jsonschema.Draft202012Validator(SCENE_GRAPH_SCHEMA)


def _check_unit(value: float, what: str, oid: int) -> float:
    if not 0.0 <= value <= 1.0:
        raise ValidationError(f"object {oid}: {what} {value} outside [0, 1]")
    return float(value)


def scene_graph_from_dict(doc: Any) -> SceneGraph:
    errors = sorted(_validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise SchemaError(f"{where}: {err.message}")

    objects = []
    for o in doc["objects"]:
        oid = o["id"]
        attrs = frozenset(o.get("attributes", ()))
        unknown = sorted(attrs - ATTRIBUTE_VOCABULARY)
        if unknown:
            raise ValidationError(f"object {oid}: unknown attributes {unknown}")
        cuboid = None
        if "cuboid" in o:
            c = o["cuboid"]
            cuboid = Cuboid(
                center=tuple(float(v) for v in c["center"]),
                dims=tuple(float(v) for v in c["dims"]),
                yaw=float(c.get("yaw", 0.0)),
            )
        objects.append(
            ObjectInstance(
                id=oid,
                class_label=o["class"],
                attributes=attrs,
                saliency=_check_unit(o.get("saliency", 1.0), "saliency", oid),
                confidence=_check_unit(o.get("confidence", 1.0), "confidence", oid),
                cuboid=cuboid,
            )
        )

    frame = None
    if "frame" in doc:
        f = doc["frame"]
        frame = RoomFrame(
            floor_z=float(f.get("floor_z", 0.0)),
            room_bounds=tuple(float(v) for v in f["room_bounds"]),
            camera_position=tuple(float(v) for v in f["camera_position"]),
        )

    return SceneGraph(
        scene_class=doc["scene_class"],
        objects=tuple(objects),
        position_edges=tuple((int(i), str(n)) for i, n in doc.get("position_edges", ())),
        pairwise_edges=tuple(
            (int(s), int(t), str(n)) for s, t, n in doc.get("pairwise_edges", ())
        ),
        frame=frame,
        version=doc.get("version", SCHEMA_VERSION),
    )


def load_scene_graph(json_text: str) -> SceneGraph:
    """Parse and validate a scene-graph JSON document."""
    try:
        doc = json.loads(json_text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"malformed JSON: {exc}") from exc
    return scene_graph_from_dict(doc)


def scene_graph_to_dict(graph: SceneGraph) -> dict[str, Any]:
    objects = []
    for o in graph.objects:
        entry: dict[str, Any] = {
            "id": o.id,
            "class": o.class_label,
            "attributes": sorted(o.attributes),
            "saliency": o.saliency,
            "confidence": o.confidence,
        }
        if o.cuboid is not None:
            entry["cuboid"] = {
                "center": list(o.cuboid.center),
                "dims": list(o.cuboid.dims),
                "yaw": o.cuboid.yaw,
            }
        objects.append(entry)
    doc: dict[str, Any] = {
        "version": graph.version,
        "scene_class": graph.scene_class,
        "objects": objects,
        "position_edges": [list(e) for e in graph.position_edges],
        "pairwise_edges": [list(e) for e in graph.pairwise_edges],
    }
    if graph.frame is not None:
        doc["frame"] = {
            "floor_z": graph.frame.floor_z,
            "room_bounds": list(graph.frame.room_bounds),
            "camera_position": list(graph.frame.camera_position),
        }
    return doc


def serialize_scene_graph(graph: SceneGraph) -> str:
    return json.dumps(scene_graph_to_dict(graph), indent=2) + "\n"


# ---------------------------------------------------------------------------
# Geometric relation rules


@dataclass(frozen=True)
class RelationThresholds:
    contact_eps: float = 0.05
    top_overlap: float = 0.5
    above_overlap: float = 0.1
    near_gap: float = 0.5
    next_to_gap: float = 0.15
    dominance: float = 1.5
    center_band: float = 0.4
    side_band: float = 0.3
    front_distance: float = 1.5
    front_half_angle: float = math.radians(30.0)
    far_fraction: float = 0.75
    corner_margin: float = 0.5

    def __post_init__(self) -> None:
        # next-to must imply near
        if not self.next_to_gap <= self.near_gap:
            raise ValueError("next_to_gap must not exceed near_gap")


DEFAULT_THRESHOLDS = RelationThresholds()


def _overlap(a0: float, a1: float, b0: float, b1: float) -> float:
    return max(0.0, min(a1, b1) - max(a0, b0))


def _gap(a: Cuboid, b: Cuboid) -> float:
    """Euclidean distance between the two enclosing boxes (0 if they intersect)."""
    alo, ahi, blo, bhi = a.lo, a.hi, b.lo, b.hi
    sq = 0.0
    for k in range(3):
        d = max(blo[k] - ahi[k], alo[k] - bhi[k], 0.0)
        sq += d * d
    return math.sqrt(sq)


def _footprint_overlap_fraction(a: Cuboid, b: Cuboid) -> float:
    alo, ahi, blo, bhi = a.lo, a.hi, b.lo, b.hi
    inter = _overlap(alo[0], ahi[0], blo[0], bhi[0]) * _overlap(alo[1], ahi[1], blo[1], bhi[1])
    smaller = min(
        (ahi[0] - alo[0]) * (ahi[1] - alo[1]),
        (bhi[0] - blo[0]) * (bhi[1] - blo[1]),
    )
    return inter / smaller


def extract_pairwise_relations(
    a: Cuboid, b: Cuboid, thresholds: RelationThresholds = DEFAULT_THRESHOLDS
) -> set[RelationLabel]:
    """Pairwise labels that hold with ``a`` as source and ``b`` as target."""
    t = thresholds
    out: set[str] = set()
    alo, ahi, blo, bhi = a.lo, a.hi, b.lo, b.hi
    overlap = _footprint_overlap_fraction(a, b)

    if (
        abs(alo[2] - bhi[2]) <= t.contact_eps
        and a.center[2] > b.center[2]
        and overlap >= t.top_overlap
    ):
        out.add("top-of")
    if alo[2] > bhi[2] + t.contact_eps and overlap >= t.above_overlap:
        out.add("above")

    gap = _gap(a, b)
    if gap < t.near_gap:
        out.add("near")
    if gap < t.next_to_gap and alo[2] < bhi[2] and blo[2] < ahi[2]:
        out.add("next-to")

    dx, dy, dz = (a.center[k] - b.center[k] for k in range(3))
    ax, ay, az = abs(dx), abs(dy), abs(dz)
    if ax > t.dominance * max(ay, az):
        out.add("to-left-of" if dx < 0 else "to-right-of")
    if ay > t.dominance * max(ax, az):
        out.add("in-front-of" if dy < 0 else "behind")

    return {RelationLabel("pairwise", n) for n in out}


def extract_position_relations(
    obj: ObjectInstance,
    frame: RoomFrame,
    thresholds: RelationThresholds = DEFAULT_THRESHOLDS,
) -> set[RelationLabel]:
    if obj.cuboid is None:
        raise MissingCuboid(f"object {obj.id} ({obj.class_label}) has no cuboid")
    t = thresholds
    c = obj.cuboid
    xmin, ymin, xmax, ymax = frame.room_bounds
    width, depth = xmax - xmin, ymax - ymin
    x, y, z = c.center
    out: set[str] = set()

    margin = 0.5 * (1.0 - t.center_band)
    if (
        xmin + margin * width <= x <= xmax - margin * width
        and ymin + margin * depth <= y <= ymax - margin * depth
    ):
        out.add("center-of-room")
    if x < xmin + t.side_band * width:
        out.add("left-of-room")
    if x > xmax - t.side_band * width:
        out.add("right-of-room")

    lo, hi = c.lo, c.hi
    near_x = lo[0] - xmin <= t.corner_margin or xmax - hi[0] <= t.corner_margin
    near_y = lo[1] - ymin <= t.corner_margin or ymax - hi[1] <= t.corner_margin
    if near_x and near_y:
        out.add("corner-of-room")

    cx, cy, cz = frame.camera_position
    fx, fy = x - cx, y - cy
    if fy > 0 and math.hypot(fx, fy) <= t.front_distance and abs(math.atan2(fx, fy)) <= t.front_half_angle:
        out.add("front-of-camera")
    if math.dist((x, y, z), (cx, cy, cz)) > t.far_fraction * frame.diagonal:
        out.add("far-away-from-camera")

    return {RelationLabel("position", n) for n in out}


def _sorted_names(labels: Iterable[RelationLabel], order: tuple[str, ...]) -> list[str]:
    return sorted((lab.name for lab in labels), key=order.index)


def extract_edges(
    graph: SceneGraph, thresholds: RelationThresholds = DEFAULT_THRESHOLDS
) -> SceneGraph:
    """Return ``graph`` with its edges recomputed from object cuboids.

    Objects without a cuboid get no edges. Position edges need ``graph.frame``;
    without one they are left empty.
    """
    boxed = [o for o in graph.objects if o.cuboid is not None]
    position: list[tuple[int, str]] = []
    if graph.frame is not None:
        for o in boxed:
            for name in _sorted_names(
                extract_position_relations(o, graph.frame, thresholds), POSITION_RELATIONS
            ):
                position.append((o.id, name))
    pairwise: list[tuple[int, int, str]] = []
    for a in boxed:
        for b in boxed:
            if a.id == b.id:
                continue
            labels = extract_pairwise_relations(a.cuboid, b.cuboid, thresholds)
            for name in _sorted_names(labels, PAIRWISE_RELATIONS):
                pairwise.append((a.id, b.id, name))
    return SceneGraph(
        scene_class=graph.scene_class,
        objects=graph.objects,
        position_edges=tuple(position),
        pairwise_edges=tuple(pairwise),
        frame=graph.frame,
        version=graph.version,
    )


__all__ = [
    "ATTRIBUTE_CATEGORIES",
    "ATTRIBUTE_VOCABULARY",
    "Cuboid",
    "ObjectInstance",
    "PAIRWISE_RELATIONS",
    "POSITION_RELATIONS",
    "RelationLabel",
    "RelationThresholds",
    "RoomFrame",
    "SceneGraph",
    "extract_edges",
    "extract_pairwise_relations",
    "extract_position_relations",
    "load_scene_graph",
    "scene_graph_from_dict",
    "scene_graph_to_dict",
    "serialize_scene_graph",
]
