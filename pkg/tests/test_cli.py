import io
import json

import pytest

from corpusgen import generate_corpus
from srclang.cli import main


@pytest.fixture(scope="module")
def cli_env(tmp_path_factory):
    """A small two-language corpus trained through the CLI itself."""
    root = tmp_path_factory.mktemp("cli-corpus")
    generate_corpus(root, languages=("python", "sql"), repos_per_language=5, files_per_repo=3)
    out = tmp_path_factory.mktemp("cli-out")
    model_path = out / "model.slm"
    test_manifest = out / "test.manifest"
    rc = main(
        [
            "train",
            str(root),
            "--out",
            str(model_path),
            "--test-manifest",
            str(test_manifest),
        ]
    )
    assert rc == 0
    sample = next((root / "python").rglob("*.py"))
    return {
        "root": root,
        "model": model_path,
        "test_manifest": test_manifest,
        "sample": sample,
    }


class TestTrainCommand:
    def test_reports_grammar_breakdown(self, cli_env, tmp_path, capsys):
        rc = main(["train", str(cli_env["root"]), "--out", str(tmp_path / "m.slm")])
        out = capsys.readouterr().out
        assert rc == 0
        assert "unigrams" in out and "bigrams" in out and "trigrams" in out
        assert "productions" in out

    def test_invalid_keyword_threshold_fails(self, cli_env, tmp_path, capsys):
        rc = main(
            [
                "train",
                str(cli_env["root"]),
                "--out",
                str(tmp_path / "m.slm"),
                "--keyword-threshold",
                "1.1",
            ]
        )
        assert rc == 2
        assert "fraction" in capsys.readouterr().err

    def test_rerun_is_byte_identical(self, cli_env, tmp_path):
        a, b = tmp_path / "a.slm", tmp_path / "b.slm"
        assert main(["train", str(cli_env["root"]), "--out", str(a)]) == 0
        assert main(["train", str(cli_env["root"]), "--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_root_and_manifest_are_mutually_exclusive(self, cli_env, tmp_path, capsys):
        rc = main(
            [
                "train",
                str(cli_env["root"]),
                "--manifest",
                str(cli_env["test_manifest"]),
                "--out",
                str(tmp_path / "m.slm"),
            ]
        )
        assert rc == 2
        assert "exactly one" in capsys.readouterr().err

    def test_no_split_conflicts_with_test_manifest(self, cli_env, tmp_path, capsys):
        rc = main(
            [
                "train",
                str(cli_env["root"]),
                "--out",
                str(tmp_path / "m.slm"),
                "--no-split",
                "--test-manifest",
                str(tmp_path / "t.manifest"),
            ]
        )
        assert rc == 2
        assert "split" in capsys.readouterr().err

    def test_no_split_trains_on_everything(self, cli_env, tmp_path, capsys):
        rc = main(
            ["train", str(cli_env["root"]), "--out", str(tmp_path / "m.slm"), "--no-split"]
        )
        out = capsys.readouterr().out
        assert rc == 0
        total = sum(1 for p in cli_env["root"].rglob("*") if p.is_file())
        assert f"trained on {total} files" in out


class TestClassifyCommand:
    def test_file_and_stdin_agree(self, cli_env, capsys, monkeypatch):
        rc = main(["classify", str(cli_env["sample"]), "--model", str(cli_env["model"])])
        assert rc == 0
        from_file = capsys.readouterr().out

        data = cli_env["sample"].read_bytes()
        monkeypatch.setattr("sys.stdin", io.TextIOWrapper(io.BytesIO(data)))
        rc = main(["classify", "--model", str(cli_env["model"])])
        assert rc == 0
        assert capsys.readouterr().out == from_file
        assert from_file.splitlines()[0].startswith("python")

    def test_top_limits_rows(self, cli_env, capsys):
        main(["classify", str(cli_env["sample"]), "--model", str(cli_env["model"]), "--top", "1"])
        assert len(capsys.readouterr().out.strip().splitlines()) == 1

    def test_json_format(self, cli_env, capsys):
        main(
            [
                "classify",
                str(cli_env["sample"]),
                "--model",
                str(cli_env["model"]),
                "--format",
                "json",
            ]
        )
        payload = json.loads(capsys.readouterr().out)
        assert payload["best"] == "python"
        assert payload["matched_productions"] > 0
        probabilities = [r["probability"] for r in payload["results"]]
        assert probabilities == sorted(probabilities, reverse=True)
        assert sum(probabilities) == pytest.approx(1.0, abs=1e-9)

    def test_empty_input_flags_no_evidence(self, cli_env, tmp_path, capsys):
        empty = tmp_path / "empty.txt"
        empty.write_bytes(b"")
        rc = main(["classify", str(empty), "--model", str(cli_env["model"])])
        out = capsys.readouterr().out
        assert rc == 0
        assert "no evidence" in out
        values = [
            float(line.split("\t")[1])
            for line in out.splitlines()
            if "\t" in line
        ]
        assert values == pytest.approx([0.5, 0.5])

    def test_model_from_environment(self, cli_env, capsys, monkeypatch):
        monkeypatch.setenv("SRCLANG_MODEL", str(cli_env["model"]))
        rc = main(["classify", str(cli_env["sample"])])
        assert rc == 0
        assert capsys.readouterr().out.splitlines()[0].startswith("python")

    def test_missing_model_is_an_error(self, cli_env, capsys, monkeypatch):
        monkeypatch.delenv("SRCLANG_MODEL", raising=False)
        rc = main(["classify", str(cli_env["sample"])])
        assert rc == 2
        assert "model" in capsys.readouterr().err

    def test_unreadable_input_is_an_error(self, cli_env, tmp_path, capsys):
        rc = main(["classify", str(tmp_path / "vanished.py"), "--model", str(cli_env["model"])])
        assert rc == 2
        assert "error" in capsys.readouterr().err


class TestEvaluateCommand:
    def test_gate_passes_then_fails(self, cli_env, capsys):
        args = [
            "evaluate",
            "--manifest",
            str(cli_env["test_manifest"]),
            "--model",
            str(cli_env["model"]),
        ]
        assert main([*args, "--min-f", "0.5"]) == 0
        capsys.readouterr()
        assert main([*args, "--min-f", "1.01"]) == 1
        assert "FAIL" in capsys.readouterr().err

    def test_report_and_misclassified_dump(self, cli_env, tmp_path, capsys):
        dump = tmp_path / "missed.tsv"
        rc = main(
            [
                "evaluate",
                "--manifest",
                str(cli_env["test_manifest"]),
                "--model",
                str(cli_env["model"]),
                "--dump-misclassified",
                str(dump),
            ]
        )
        out = capsys.readouterr().out
        assert rc == 0
        assert "Average" in out and "Confusion" in out
        assert dump.exists()

    def test_label_outside_model_is_an_error(self, cli_env, tmp_path, capsys):
        alien = tmp_path / "corpus"
        (alien / "fortran" / "r1").mkdir(parents=True)
        (alien / "fortran" / "r1" / "x.f90").write_text("program demo\nend program\n")
        rc = main(["evaluate", str(alien), "--model", str(cli_env["model"])])
        assert rc == 2
        assert "fortran" in capsys.readouterr().err

    def test_empty_test_set_is_an_error(self, cli_env, tmp_path, capsys):
        empty = tmp_path / "empty.manifest"
        empty.write_text("")
        rc = main(
            ["evaluate", "--manifest", str(empty), "--model", str(cli_env["model"])]
        )
        assert rc == 2
        assert "empty" in capsys.readouterr().err

    def test_json_report_parses_back(self, cli_env, capsys):
        from srclang.evaluation import parse_report

        rc = main(
            [
                "evaluate",
                "--manifest",
                str(cli_env["test_manifest"]),
                "--model",
                str(cli_env["model"]),
                "--format",
                "json",
            ]
        )
        assert rc == 0
        report = parse_report(capsys.readouterr().out)
        assert report.total_files == len(
            [l for l in cli_env["test_manifest"].read_text().splitlines() if l]
        )


class TestInspectCommand:
    def test_keywords_dump_sorted(self, cli_env, capsys):
        rc = main(["inspect", "keywords", "--model", str(cli_env["model"]), "--language", "python"])
        assert rc == 0
        lines = [l for l in capsys.readouterr().out.splitlines() if not l.startswith("#")]
        words = [line.split("\t")[0] for line in lines]
        assert words == sorted(words)
        assert all(len(line.split("\t")) == 3 for line in lines)

    def test_grammar_dump_mi_descending(self, cli_env, capsys):
        rc = main(["inspect", "grammar", "--model", str(cli_env["model"])])
        assert rc == 0
        scores = [
            float(line.split("\t")[0])
            for line in capsys.readouterr().out.splitlines()
        ]
        assert scores == sorted(scores, reverse=True)

    def test_weights_dump_dimensions(self, cli_env, capsys):
        rc = main(["inspect", "weights", "--model", str(cli_env["model"])])
        assert rc == 0
        lines = capsys.readouterr().out.splitlines()
        header = dict(part.split("=") for part in lines[0].split("\t"))
        assert int(header["languages"]) == 2
        assert int(header["productions"]) == len(lines) - 2

    def test_unknown_language_rejected(self, cli_env, capsys):
        rc = main(["inspect", "keywords", "--model", str(cli_env["model"]), "--language", "zz"])
        assert rc == 2


class TestServeCommand:
    def test_malformed_bind_rejected(self, cli_env, capsys):
        rc = main(["serve", "--model", str(cli_env["model"]), "--bind", "localhost"])
        assert rc == 2
        assert "HOST:PORT" in capsys.readouterr().err


class TestPreprocessCommand:
    def test_prints_rendered_stream(self, tmp_path, capsys):
        source = tmp_path / "demo.src"
        source.write_bytes(b'FUNCTION("123")')
        rc = main(["preprocess", str(source)])
        assert rc == 0
        assert capsys.readouterr().out.strip() == '__BOF__ function (" __d__ ") __EOF__'
