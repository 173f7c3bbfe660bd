import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from ctxsent.bundle import FILES, load_bundle
from ctxsent.cli import main
from ctxsent.corpus import ingest
from ctxsent.synth import SynthConfig, benchmark_config, generate


@pytest.fixture(scope="module")
def corpus_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "corpus.jsonl"
    generate(benchmark_config(n_tweets=3000, seed=11), path)
    return path


@pytest.fixture(scope="module")
def bundle_dir(corpus_file, tmp_path_factory):
    d = tmp_path_factory.mktemp("bundle") / "model"
    assert main(["train", "--input", str(corpus_file), "--model", str(d), "--min-author-tweets", "20"]) == 0
    return d


def run(argv, capsys, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


class TestSubcommands:
    def test_ingest(self, corpus_file, capsys):
        code, out, err = run(["ingest", "--input", str(corpus_file)], capsys)
        assert code == 0
        stats = json.loads(out)
        assert stats["accepted"] == 3000
        assert err.startswith("config: ")

    def test_preprocess(self, capsys, monkeypatch):
        code, out, _ = run(["preprocess"], capsys, "Sooo happy today :-)\n@bob see http://x.co\n", monkeypatch)
        assert code == 0
        assert out.splitlines() == ["soo happi todai", "USERNAME see URL"]

    def test_empty_stdin(self, bundle_dir, capsys, monkeypatch):
        for argv in (["preprocess"], ["classify", "--model", str(bundle_dir)]):
            code, out, _ = run(argv, capsys, "", monkeypatch)
            assert code == 0 and out == ""

    def test_classify_matches_library(self, corpus_file, bundle_dir, capsys):
        code, out, _ = run(["classify", "--model", str(bundle_dir), "--input", str(corpus_file)], capsys)
        assert code == 0
        records, _ = ingest(corpus_file)
        clf = load_bundle(bundle_dir)
        expected = [f"{p.label}\t{p.margin!r}" for p in clf.classify_batch(records)]
        assert out.splitlines() == expected

    def test_classify_plain_text_and_mode(self, bundle_dir, capsys, monkeypatch):
        text = "hello there\n"
        _, ctx_out, _ = run(["classify", "--model", str(bundle_dir)], capsys, text, monkeypatch)
        _, base_out, _ = run(["classify", "--model", str(bundle_dir), "--mode", "baseline"], capsys, text, monkeypatch)
        # Plain text carries no context, so both modes agree.
        assert ctx_out == base_out
        label, margin = ctx_out.strip().split("\t")
        assert label in ("positive", "negative") and float(margin) == float(margin)

    def test_evaluate(self, corpus_file, capsys, tmp_path):
        csv_path = tmp_path / "eval.csv"
        code, out, err = run(
            ["evaluate", "--input", str(corpus_file), "--k", "3", "--all-variants",
             "--min-author-tweets", "20", "--output", str(csv_path)],
            capsys,
        )
        assert code == 0
        for name in ("Baseline-Majority", "Baseline-Bigram", "Contextual-All", "Contextual-NoState"):
            assert name in out
        assert "Precision" in out
        assert '"seed": 0' in err
        assert len(csv_path.read_text().splitlines()) == 10

    def test_evaluate_majority_line(self, tmp_path, capsys):
        path = tmp_path / "null.jsonl"
        generate(SynthConfig(n_tweets=20_000, seed=0), path)
        code, out, _ = run(["evaluate", "--input", str(path), "--mode", "baseline"], capsys)
        assert code == 0
        line = next(l for l in out.splitlines() if l.startswith("Baseline-Majority"))
        assert abs(float(line.split()[-1]) - 0.62) <= 0.01

    def test_priors(self, corpus_file, capsys, tmp_path):
        code, out, _ = run(["priors", "--input", str(corpus_file), "--categories", "dow"], capsys)
        assert code == 0
        lines = out.splitlines()
        assert lines[:2] == ["# dow", "cell,avg_sentiment,count"]
        assert len(lines) == 9
        outdir = tmp_path / "reports"
        assert main(["priors", "--input", str(corpus_file), "--output", str(outdir)]) == 0
        assert sorted(p.name for p in outdir.iterdir()) == [
            "author.csv", "dow.csv", "hour.csv", "month.csv", "state.csv"
        ]

    def test_synth(self, tmp_path, capsys):
        cfg = tmp_path / "s.cfg"
        cfg.write_text("n_tweets = 200\nshift.state.TX = 1\n")
        out = tmp_path / "s.jsonl"
        assert main(["synth", "--config", str(cfg), "--output", str(out), "--seed", "4"]) == 0
        assert len(out.read_text().splitlines()) == 200


class TestDeterminism:
    def test_bundles_bit_identical(self, corpus_file, bundle_dir, tmp_path):
        again = tmp_path / "again"
        assert main(["train", "--input", str(corpus_file), "--model", str(again), "--min-author-tweets", "20"]) == 0
        for name in FILES.values():
            assert (again / name).read_bytes() == (bundle_dir / name).read_bytes()


class TestErrors:
    def test_missing_input(self, tmp_path, capsys):
        code, _, err = run(["ingest", "--input", str(tmp_path / "nope.jsonl")], capsys)
        assert code == 1 and "nope.jsonl" in err

    def test_strict_malformed(self, tmp_path, capsys):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"text": "yay :)", "ts": 1, "author": "a", "state": "CA"}\nnot json\n')
        assert run(["ingest", "--input", str(path)], capsys)[0] == 0
        assert run(["ingest", "--input", str(path), "--strict"], capsys)[0] == 1

    def test_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["evaluate"])
        assert exc.value.code == 2
        with pytest.raises(SystemExit) as exc:
            main(["train", "--input", "x", "--model", "y", "--categories", "state", "--mode", "weird"])
        assert exc.value.code == 2

    def test_single_class_training(self, tmp_path, capsys):
        path = tmp_path / "pos.jsonl"
        path.write_text(
            "".join(json.dumps({"text": f"fine {i} :)", "ts": 1400000000, "author": "a", "state": "CA"}) + "\n"
                    for i in range(10))
        )
        code, _, err = run(["train", "--input", str(path), "--model", str(tmp_path / "m")], capsys)
        assert code == 3 and "training aborted" in err

    def test_unknown_category(self, corpus_file, tmp_path, capsys):
        code, _, err = run(
            ["train", "--input", str(corpus_file), "--model", str(tmp_path / "m"), "--categories", "weather"],
            capsys,
        )
        assert code == 1 and "weather" in err

    def test_version_mismatch(self, bundle_dir, tmp_path, capsys):
        copy = tmp_path / "old"
        copy.mkdir()
        for name in FILES.values():
            (copy / name).write_bytes((bundle_dir / name).read_bytes())
        manifest = json.loads((copy / FILES["manifest"]).read_text())
        manifest["preprocess_version"] = "0"
        (copy / FILES["manifest"]).write_text(json.dumps(manifest))
        code, _, err = run(["classify", "--model", str(copy), "--input", str(copy / FILES["manifest"])], capsys)
        assert code == 1 and "retrain" in err

    def test_not_a_bundle(self, tmp_path, capsys):
        code, _, err = run(["classify", "--model", str(tmp_path)], capsys)
        assert code == 1


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "ctxsent", "preprocess"],
        input="Goooood morning :)\n", capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout == "good morn\n"
    proc = subprocess.run([sys.executable, "-m", "ctxsent", "bogus"], capture_output=True, text=True)
    assert proc.returncode == 2
