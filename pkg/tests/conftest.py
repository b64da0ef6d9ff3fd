from __future__ import annotations

from types import SimpleNamespace

import pytest

from corpusgen import generate_corpus
from srclang import load_model, read_manifest
from srclang.cli import main as cli_main


@pytest.fixture(scope="session")
def fixture_corpus(tmp_path_factory):
    """Six-language desk-scale corpus: 10 repositories x 5 files each."""
    root = tmp_path_factory.mktemp("corpus")
    return generate_corpus(root)


@pytest.fixture(scope="session")
def trained(fixture_corpus, tmp_path_factory):
    """Model trained once per session on the fixture corpus (defaults)."""
    out = tmp_path_factory.mktemp("trained")
    model_path = out / "fixture.slm"
    test_manifest = out / "test.manifest"
    rc = cli_main(
        [
            "train",
            str(fixture_corpus),
            "--out",
            str(model_path),
            "--test-manifest",
            str(test_manifest),
        ]
    )
    assert rc == 0, "fixture training failed"
    return SimpleNamespace(
        corpus_root=fixture_corpus,
        model_path=model_path,
        test_manifest=test_manifest,
    )


@pytest.fixture(scope="session")
def fixture_model(trained):
    return load_model(trained.model_path)


@pytest.fixture(scope="session")
def fixture_test_manifest(trained):
    return read_manifest(trained.test_manifest)
