"""Command-line entry point: ``scenetext learn|generate|eval|relations``.

Exit codes: 0 success, 1 user or input error, 2 internal error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import traceback
from pathlib import Path
from typing import Sequence

from . import __version__
from .corpus import ingest_corpus, load_preposition_table
from .errors import EmptyCorpus, ScenetextError
from .grammar import LearnConfig, learn_templates, load_grammar, save_grammar
from .pipeline import generate_runs
from .realize import RealizeConfig
from .rouge import evaluate_corpus, metric_fn
from .scene_graph import extract_edges, load_scene_graph, serialize_scene_graph
from .semtree import print_semtree
from .treegen import FEATURES, GenConfig


class UserError(Exception):
    pass


def _read(path: str | Path) -> str:
    try:
        return Path(path).read_text("utf-8")
    except FileNotFoundError:
        raise UserError(f"no such file: {path}") from None
    except OSError as exc:
        raise UserError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str | Path, text: str) -> None:
    try:
        Path(path).write_text(text, "utf-8")
    except OSError as exc:
        raise UserError(f"cannot write {path}: {exc.strerror}") from None


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# learn


def cmd_learn(args: argparse.Namespace) -> int:
    corpus_text = _read(args.corpus)
    table = load_preposition_table(args.prepositions) if args.prepositions else None
    try:
        examples, ingest = ingest_corpus(corpus_text, table)
    except ScenetextError as exc:
        raise UserError(f"{args.corpus}: {exc}") from None
    config = LearnConfig(args.min_template_count, args.min_relation_weight)
    grammar, report = learn_templates(examples, config)
    _write(args.output, save_grammar(grammar))

    if args.json:
        print(json.dumps({"ingest": vars(ingest), "learn": report.to_dict()}, indent=2))
    else:
        print(f"records: {ingest.records} (translated {ingest.translated}, "
              f"pre-aligned {ingest.pre_aligned}, skipped {ingest.untranslatable})")
        print(f"examples matched: {report.matched}, failed: {report.failed} "
              f"(partial {report.partial})")
        print(f"templates kept: {report.templates_kept}, discarded: {report.templates_discarded}")
        print(f"relations kept: {report.relations_kept}, discarded: {report.relations_discarded}")
        print(f"grammar written to {args.output}")
    if not len(grammar):
        print("warning: learned grammar is empty", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------
# generate


def _gen_config(args: argparse.Namespace) -> GenConfig:
    base = GenConfig.from_level(
        args.level,
        tau=args.tau,
        rho_default=args.rho,
        max_sentences=args.max_sentences,
        position_sentences=args.position_sentences,
    )
    overrides = {
        f: getattr(args, f"set_{f}") for f in FEATURES if getattr(args, f"set_{f}") is not None
    }
    return GenConfig(**{**base.to_dict(), **overrides})


def _manifest(args: argparse.Namespace, config: GenConfig, scene_text: str, grammar_text: str) -> dict:
    return {
        "tool_version": __version__,
        "seed": args.seed,
        "runs": args.runs,
        "config": config.to_dict(),
        "realize": {"mode": args.mode},
        "grammar_path": str(args.grammar),
        "grammar_sha256": _sha256(grammar_text),
        "input_paths": [str(args.scene)],
        "input_sha256": [_sha256(scene_text)],
    }


def _apply_replay(args: argparse.Namespace) -> GenConfig:
    try:
        manifest = json.loads(_read(args.replay))
        args.seed = int(manifest["seed"])
        args.runs = int(manifest.get("runs", 1))
        args.mode = manifest.get("realize", {}).get("mode", "sample")
        args.grammar = manifest["grammar_path"]
        args.scene = manifest["input_paths"][0]
        return GenConfig(**manifest["config"])
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise UserError(f"malformed manifest {args.replay}: {exc}") from None


def cmd_generate(args: argparse.Namespace) -> int:
    if args.replay:
        config = _apply_replay(args)
    else:
        if args.scene is None or args.grammar is None:
            raise UserError("generate needs SCENE and GRAMMAR (or --replay MANIFEST)")
        config = _gen_config(args)
    scene_text = _read(args.scene)
    grammar_text = _read(args.grammar)
    manifest = _manifest(args, config, scene_text, grammar_text)
    if args.replay:
        recorded = json.loads(_read(args.replay))
        for key in ("grammar_sha256", "input_sha256"):
            if key in recorded and recorded[key] != manifest[key]:
                raise UserError(f"{key} differs from the manifest; inputs changed since the run")

    try:
        graph = load_scene_graph(scene_text)
    except ScenetextError as exc:
        raise UserError(f"{args.scene}: {exc}") from None
    try:
        grammar = load_grammar(grammar_text)
    except ScenetextError as exc:
        raise UserError(f"{args.grammar}: {exc}") from None

    runs = generate_runs(
        graph, grammar, config, RealizeConfig(mode=args.mode), args.seed, args.runs, args.jobs
    )
    if args.manifest:
        _write(args.manifest, json.dumps(manifest, indent=2, sort_keys=True) + "\n")

    if args.json:
        out = [
            {
                "run": r.index,
                "seed": r.seed,
                "paragraph": r.paragraph,
                "trees": [print_semtree(p.tree) for p in r.plans],
            }
            for r in runs
        ]
        print(json.dumps(out, indent=2))
    else:
        for r in runs:
            if args.show_trees:
                for p in r.plans:
                    print(f"# {print_semtree(p.tree)}")
            print(r.paragraph)
    return 0


# ---------------------------------------------------------------------------
# eval


def _lines(path: str) -> list[str]:
    return [ln.strip() for ln in _read(path).splitlines() if ln.strip()]


def cmd_eval(args: argparse.Namespace) -> int:
    metrics = [m.strip() for m in args.metrics.split(",") if m.strip()]
    for m in metrics:
        try:
            metric_fn(m)
        except ValueError as exc:
            raise UserError(str(exc)) from None
    candidates = _lines(args.candidates)
    references = _lines(args.references)
    if len(candidates) != len(references):
        raise UserError(
            f"line count mismatch: {len(candidates)} candidates vs {len(references)} references"
        )
    pairs = [(c, [r.strip() for r in ref.split("|||")]) for c, ref in zip(candidates, references)]
    try:
        table = evaluate_corpus(pairs, metrics)
    except EmptyCorpus as exc:
        raise UserError(f"EmptyCorpus: {exc}") from None

    if args.json:
        print(json.dumps(
            {m: {"R": s.recall, "P": s.precision, "F": s.f1} for m, s in table.items()}, indent=2
        ))
    else:
        print(f"{'metric':<10} {'R':>6} {'P':>6} {'F':>6}")
        for m, s in table.items():
            print(f"{m.upper():<10} {s.recall:.4f} {s.precision:.4f} {s.f1:.4f}")
    return 0


# ---------------------------------------------------------------------------
# relations


def cmd_relations(args: argparse.Namespace) -> int:
    try:
        graph = load_scene_graph(_read(args.scene))
    except ScenetextError as exc:
        raise UserError(f"{args.scene}: {exc}") from None
    if not any(o.cuboid is not None for o in graph.objects):
        raise UserError(f"{args.scene}: no object has a cuboid to compute relations from")
    if graph.frame is None:
        print("warning: scene has no frame; position edges not computed", file=sys.stderr)
    text = serialize_scene_graph(extract_edges(graph))
    if args.output:
        _write(args.output, text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scenetext", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("learn", help="learn a template grammar from a corpus")
    p.add_argument("corpus")
    p.add_argument("-o", "--output", required=True, help="grammar file to write")
    p.add_argument("--min-template-count", type=int, default=5)
    p.add_argument("--min-relation-weight", type=int, default=20)
    p.add_argument("--prepositions", help="multiword preposition table (phrase<TAB>relation)")
    p.add_argument("--json", action="store_true", help="print the report as JSON")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("generate", help="describe a scene graph")
    p.add_argument("scene", nargs="?")
    p.add_argument("grammar", nargs="?")
    p.add_argument("--level", type=int, default=5, choices=range(6),
                   help="feature level 0-5 (default 5)")
    for feature in FEATURES:
        p.add_argument(f"--{feature}", dest=f"set_{feature}", default=None,
                       action=argparse.BooleanOptionalAction,
                       help=f"override the {feature} switch set by --level")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--jobs", type=int, default=1, help="parallel workers for --runs")
    p.add_argument("--tau", type=float, default=1.0, help="termination weight")
    p.add_argument("--rho", type=float, default=1.0, help="prior weight of every relation")
    p.add_argument("--max-sentences", type=int, default=10)
    p.add_argument("--position-sentences", action="store_true",
                   help="allow object-to-room sentences once pairwise relations run out")
    p.add_argument("--mode", choices=("sample", "argmax"), default="sample")
    p.add_argument("--manifest", help="write a run manifest here")
    p.add_argument("--replay", help="rerun exactly from a manifest")
    p.add_argument("--show-trees", action="store_true", help="print semantic trees as comments")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("eval", help="ROUGE scores of candidates against references")
    p.add_argument("candidates")
    p.add_argument("references", help="one line per candidate; alternatives separated by '|||'")
    p.add_argument("--metrics", default="rouge1,rouge2,rougesu4")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("relations", help="compute edges of a scene graph from its cuboids")
    p.add_argument("scene")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_relations)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UserError, ScenetextError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception:
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
