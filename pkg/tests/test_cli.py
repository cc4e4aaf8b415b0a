from __future__ import annotations

import json

import pytest

from scenetext.cli import main
from scenetext.fixtures import fixture_path, scene_paths

GRAMMAR = str(fixture_path("learned_grammar.txt"))
KITCHEN = str(scene_paths()["kitchen"])


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestGenerate:
    def test_deterministic(self, capsys):
        a = run(capsys, "generate", KITCHEN, GRAMMAR, "--seed", "3", "--runs", "4")
        b = run(capsys, "generate", KITCHEN, GRAMMAR, "--seed", "3", "--runs", "4")
        assert a[0] == 0 and a == b
        assert len(a[1].splitlines()) == 4

    def test_feature_override(self, capsys):
        _, out, _ = run(capsys, "generate", KITCHEN, GRAMMAR, "--level", "5", "--no-scene",
                        "--json", "--runs", "20")
        assert all("det(kitchen)" not in t for r in json.loads(out) for t in r["trees"])

    def test_json_shape(self, capsys):
        _, out, _ = run(capsys, "generate", KITCHEN, GRAMMAR, "--json", "--runs", "2", "--seed", "9")
        data = json.loads(out)
        assert [r["seed"] for r in data] == [9, 10]
        assert data[0]["trees"][0].startswith("in(")

    def test_show_trees(self, capsys):
        _, out, _ = run(capsys, "generate", KITCHEN, GRAMMAR, "--show-trees")
        assert out.startswith("# in(")

    def test_manifest_replay(self, capsys, tmp_path):
        manifest = tmp_path / "run.json"
        _, first, _ = run(capsys, "generate", KITCHEN, GRAMMAR, "--seed", "5", "--level", "4",
                          "--runs", "3", "--manifest", str(manifest))
        recorded = json.loads(manifest.read_text())
        assert recorded["seed"] == 5 and recorded["config"]["attributes"] is True
        code, again, _ = run(capsys, "generate", "--replay", str(manifest))
        assert code == 0 and again == first

    def test_replay_detects_changed_input(self, capsys, tmp_path):
        scene = tmp_path / "scene.json"
        scene.write_text(open(KITCHEN).read())
        manifest = tmp_path / "run.json"
        run(capsys, "generate", str(scene), GRAMMAR, "--manifest", str(manifest))
        scene.write_text(open(KITCHEN).read().replace("0.9", "0.8", 1))
        code, _, err = run(capsys, "generate", "--replay", str(manifest))
        assert code == 1 and "input_sha256" in err

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "generate", "nope.json", GRAMMAR)
        assert code == 1 and "no such file" in err

    def test_invalid_scene(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"scene_class": "k", "objects": [{"id": 0, "class": "a"}], '
                       '"pairwise_edges": [[0, 0, "near"]]}')
        code, _, err = run(capsys, "generate", str(bad), GRAMMAR)
        assert code == 1 and "error" in err

    def test_missing_template(self, capsys, tmp_path):
        g = tmp_path / "g.txt"
        g.write_text("indet/1\n1\ta {1}\n")
        code, _, err = run(capsys, "generate", KITCHEN, str(g), "--level", "0")
        assert code == 1 and "sentence 0" in err


class TestLearn:
    def test_learn_matches_bundle(self, capsys, tmp_path):
        out = tmp_path / "g.txt"
        code, stdout, _ = run(capsys, "learn", str(fixture_path("corpus.txt")), "-o", str(out))
        assert code == 0 and "records: 500" in stdout
        assert out.read_text() == fixture_path("learned_grammar.txt").read_text()

    def test_json_report(self, capsys, tmp_path):
        code, stdout, _ = run(capsys, "learn", str(fixture_path("parsed_corpus.txt")),
                              "-o", str(tmp_path / "g.txt"), "--json")
        data = json.loads(stdout)
        assert data["ingest"]["untranslatable"] == 1 and data["learn"]["matched"] == 8

    def test_empty_grammar_warns(self, capsys, tmp_path):
        code, _, err = run(capsys, "learn", str(fixture_path("parsed_corpus.txt")),
                           "-o", str(tmp_path / "g.txt"))
        assert code == 0 and "empty" in err

    def test_malformed_corpus(self, capsys, tmp_path):
        bad = tmp_path / "c.txt"
        bad.write_text("A box.\nindet(box\n")
        code, _, err = run(capsys, "learn", str(bad), "-o", str(tmp_path / "g.txt"))
        assert code == 1 and "line 2" in err


class TestEval:
    def test_table(self, capsys, tmp_path):
        cand = tmp_path / "c.txt"
        ref = tmp_path / "r.txt"
        cand.write_text("the red box on table\n")
        ref.write_text("a red box on the table\n")
        code, out, _ = run(capsys, "eval", str(cand), str(ref), "--metrics", "rouge2")
        assert code == 0 and "ROUGE2     0.4000 0.5000 0.4444" in out

    def test_alternative_references(self, capsys, tmp_path):
        cand = tmp_path / "c.txt"
        ref = tmp_path / "r.txt"
        cand.write_text("a b\n")
        ref.write_text("x y ||| a b\n")
        _, out, _ = run(capsys, "eval", str(cand), str(ref), "--metrics", "rouge1", "--json")
        assert json.loads(out)["rouge1"]["F"] == 1.0

    def test_line_mismatch(self, capsys, tmp_path):
        cand = tmp_path / "c.txt"
        ref = tmp_path / "r.txt"
        cand.write_text("a\nb\n")
        ref.write_text("a\n")
        assert run(capsys, "eval", str(cand), str(ref))[0] == 1

    def test_empty(self, capsys, tmp_path):
        cand = tmp_path / "c.txt"
        cand.write_text("\n")
        code, _, err = run(capsys, "eval", str(cand), str(cand))
        assert code == 1 and "EmptyCorpus" in err

    def test_unknown_metric(self, capsys, tmp_path):
        cand = tmp_path / "c.txt"
        cand.write_text("a\n")
        assert run(capsys, "eval", str(cand), str(cand), "--metrics", "bleu")[0] == 1


def test_relations_recomputes_office(capsys):
    code, out, _ = run(capsys, "relations", str(scene_paths()["office"]))
    assert code == 0
    assert json.loads(out) == json.loads(scene_paths()["office"].read_text())


def test_relations_needs_cuboids(capsys):
    code, _, err = run(capsys, "relations", KITCHEN)
    assert code == 1 and "cuboid" in err


def test_relations_without_frame_warns(capsys, tmp_path):
    doc = json.loads(scene_paths()["office"].read_text())
    del doc["frame"]
    path = tmp_path / "s.json"
    path.write_text(json.dumps(doc))
    code, out, err = run(capsys, "relations", str(path))
    assert code == 0 and "warning" in err
    assert json.loads(out)["position_edges"] == []


def test_usage_error_exits_two_from_argparse():
    with pytest.raises(SystemExit) as info:
        main(["generate", KITCHEN, GRAMMAR, "--level", "9"])
    assert info.value.code == 2
