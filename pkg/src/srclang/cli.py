"""Command line interface: train, classify, evaluate, serve, inspect, preprocess."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import corpus as corpus_mod
from . import evaluation, modelfile, server
from .pipeline import PipelineSettings, classify_text, train_from_manifest
from .preprocess import (
    default_comment_syntax,
    load_comment_syntax,
    preprocess_text,
    render_stream,
    render_token,
)

log = logging.getLogger(__name__)

MODEL_ENV_VAR = "SRCLANG_MODEL"


def _add_model_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--model",
        "-m",
        default=os.environ.get(MODEL_ENV_VAR),
        help=f"model file path (default: ${MODEL_ENV_VAR})",
    )


def _add_corpus_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "corpus_root",
        nargs="?",
        help="directory with one subdirectory per language",
    )
    parser.add_argument("--manifest", help="manifest file (repo_id TAB language TAB path)")
    parser.add_argument("--min-bytes", type=int, default=corpus_mod.DEFAULT_MIN_BYTES)
    parser.add_argument("--max-bytes", type=int, default=corpus_mod.DEFAULT_MAX_BYTES)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="srclang",
        description="Source-code language identification: train on a labeled corpus,"
        " then classify arbitrary source text.",
    )
    parser.add_argument("--verbose", "-v", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a model from a labeled corpus")
    _add_corpus_args(p_train)
    p_train.add_argument("--out", "-o", required=True, help="model file to write")
    p_train.add_argument("--keyword-threshold", type=float, default=PipelineSettings.keyword_threshold)
    p_train.add_argument("--mi-threshold", type=float, default=PipelineSettings.mi_threshold)
    p_train.add_argument("--sigma", type=float, default=PipelineSettings.sigma)
    p_train.add_argument("--train-fraction", type=float, default=PipelineSettings.train_fraction)
    p_train.add_argument("--seed", type=int, default=PipelineSettings.seed)
    p_train.add_argument("--tol", type=float, default=PipelineSettings.tol)
    p_train.add_argument("--max-iters", type=int, default=PipelineSettings.max_iters)
    p_train.add_argument("--comment-syntax", help="JSON comment-syntax config (default: bundled table)")
    p_train.add_argument(
        "--test-manifest",
        help="write the held-out test-side manifest to this path",
    )
    p_train.add_argument(
        "--no-split",
        action="store_true",
        help="train on every ingested file instead of the train side of a split",
    )

    p_classify = sub.add_parser("classify", help="classify one file or standard input")
    _add_model_arg(p_classify)
    p_classify.add_argument("input", nargs="?", help="file to classify (default: stdin)")
    p_classify.add_argument("--top", type=int, default=None, help="show only the top N languages")
    p_classify.add_argument("--format", choices=("text", "json"), default="text")

    p_eval = sub.add_parser("evaluate", help="score a model on a labeled test corpus")
    _add_model_arg(p_eval)
    _add_corpus_args(p_eval)
    p_eval.add_argument("--min-f", type=float, default=None, help="exit nonzero if macro-F falls below this")
    p_eval.add_argument("--format", choices=("text", "json"), default="text")
    p_eval.add_argument("--dump-misclassified", help="write misclassified files to this path")

    p_serve = sub.add_parser("serve", help="HTTP classification endpoint")
    _add_model_arg(p_serve)
    p_serve.add_argument("--bind", default="127.0.0.1:8080", help="HOST:PORT to listen on")

    p_inspect = sub.add_parser("inspect", help="dump model internals")
    _add_model_arg(p_inspect)
    p_inspect.add_argument("what", choices=("keywords", "grammar", "weights"))
    p_inspect.add_argument("--language", help="restrict the keywords dump to one language")

    p_pre = sub.add_parser("preprocess", help="print the normalized token stream (debug)")
    p_pre.add_argument("input", nargs="?", help="file to preprocess (default: stdin)")

    return parser


def _read_input(path: str | None) -> bytes:
    if path is None or path == "-":
        return sys.stdin.buffer.read()
    return Path(path).read_bytes()


def _load_model_arg(args: argparse.Namespace):
    if not args.model:
        raise ValueError(f"no model given: pass --model or set ${MODEL_ENV_VAR}")
    return modelfile.load_model(args.model)


def _ingest(args: argparse.Namespace) -> corpus_mod.CorpusManifest:
    if bool(args.corpus_root) == bool(args.manifest):
        raise ValueError(
            "give exactly one corpus source: either a corpus root directory or --manifest"
        )
    if args.manifest:
        return corpus_mod.read_manifest(
            args.manifest, min_bytes=args.min_bytes, max_bytes=args.max_bytes
        )
    root = Path(args.corpus_root)
    if not root.is_dir():
        raise NotADirectoryError(f"corpus root not found: {root}")
    roots = [(d, d.name) for d in sorted(root.iterdir()) if d.is_dir()]
    if not roots:
        raise ValueError(f"no language subdirectories under {root}")
    return corpus_mod.ingest(roots, min_bytes=args.min_bytes, max_bytes=args.max_bytes)


def cmd_train(args: argparse.Namespace) -> int:
    settings = PipelineSettings(
        keyword_threshold=args.keyword_threshold,
        mi_threshold=args.mi_threshold,
        sigma=args.sigma,
        min_bytes=args.min_bytes,
        max_bytes=args.max_bytes,
        train_fraction=args.train_fraction,
        seed=args.seed,
        tol=args.tol,
        max_iters=args.max_iters,
    )
    if not 0.0 < settings.keyword_threshold <= 1.0:
        raise ValueError(
            f"--keyword-threshold must be a fraction in (0, 1], got {settings.keyword_threshold}"
        )
    if settings.mi_threshold < 0.0:
        raise ValueError(f"--mi-threshold must be nonnegative, got {settings.mi_threshold}")

    manifest = _ingest(args)
    if args.no_split:
        if args.test_manifest:
            raise ValueError("--test-manifest requires a split; drop --no-split")
        train_side = manifest
    else:
        split = corpus_mod.split(manifest, settings.train_fraction, settings.seed)
        train_side = split.train
        if args.test_manifest:
            corpus_mod.write_manifest(split.test, args.test_manifest)
            print(f"test manifest ({len(split.test)} files) -> {args.test_manifest}")

    syntax = (
        load_comment_syntax(args.comment_syntax)
        if args.comment_syntax
        else default_comment_syntax()
    )
    progress = print if args.verbose else None
    model, result = train_from_manifest(train_side, syntax, settings, progress=progress)

    modelfile.save_model(model, args.out)
    sizes = model.grammar.size_by_length()
    print(
        f"trained on {len(train_side)} files, {len(model.languages)} languages:"
        f" {', '.join(model.languages)}"
    )
    print(
        f"grammar: {len(model.grammar)} productions"
        f" ({sizes.get(1, 0)} unigrams, {sizes.get(2, 0)} bigrams, {sizes.get(3, 0)} trigrams)"
    )
    status = "converged" if result.converged else "stopped at iteration limit"
    print(f"training {status} after {result.iterations} iterations")
    print(f"model -> {args.out}")
    return 0


def cmd_classify(args: argparse.Namespace) -> int:
    model = _load_model_arg(args)
    raw = _read_input(args.input)
    result = classify_text(model, raw)
    ranked = result.ranked[: args.top] if args.top else result.ranked
    if args.format == "json":
        payload = server.result_payload(result)
        if args.top:
            payload["results"] = payload["results"][: args.top]
        print(json.dumps(payload, indent=2))
    else:
        for language, probability in ranked:
            print(f"{language}\t{probability:.6f}")
        if result.matched_productions == 0:
            print("(no evidence: no grammar production matched; distribution is uniform)")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    model = _load_model_arg(args)
    manifest = _ingest(args)
    samples = [(record.path.read_bytes(), record.language) for record in manifest.records]
    ids = [str(record.path) for record in manifest.records]
    report, misclassified = evaluation.evaluate_with_errors(model.maxent, samples, ids)
    print(evaluation.render_report(report, args.format))
    if args.dump_misclassified:
        lines = [f"{p}\t{actual}\t{predicted}" for p, actual, predicted in misclassified]
        Path(args.dump_misclassified).write_text(
            "\n".join(lines) + ("\n" if lines else ""), encoding="utf-8"
        )
    if args.min_f is not None and report.macro_f < args.min_f:
        print(f"FAIL: macro-F {report.macro_f:.3f} < gate {args.min_f}", file=sys.stderr)
        return 1
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    model = _load_model_arg(args)
    host, _, port = args.bind.rpartition(":")
    if not host or not port.isdigit():
        raise ValueError(f"--bind expects HOST:PORT, got {args.bind!r}")
    server.serve(model, host, int(port))
    return 0


def cmd_inspect(args: argparse.Namespace) -> int:
    model = _load_model_arg(args)
    if args.what == "keywords":
        languages = [args.language] if args.language else list(model.languages)
        for language in languages:
            table = model.keyword_tables.get(language)
            if table is None:
                raise ValueError(f"model has no language {language!r}")
            print(
                f"# {language}: {len(table.keywords)} keywords,"
                f" {table.total_files} files, threshold {table.threshold:g}"
            )
            entries = sorted(
                (render_token(word), count) for word, count in table.doc_counts.items()
            )
            for word, count in entries:
                print(f"{word}\t{count}\t{count / table.total_files:.6g}")
    elif args.what == "grammar":
        for production in model.grammar:
            print(f"{production.mi_score:.6f}\t{production}")
    else:
        n_productions, n_languages = model.weights.shape
        print(f"productions={n_productions}\tlanguages={n_languages}")
        print("pattern\t" + "\t".join(model.languages))
        for production, row in zip(model.grammar, model.weights):
            print(str(production) + "\t" + "\t".join(f"{w:.6g}" for w in row))
    return 0


def cmd_preprocess(args: argparse.Namespace) -> int:
    raw = _read_input(args.input)
    print(render_stream(preprocess_text(raw)))
    return 0


_COMMANDS = {
    "train": cmd_train,
    "classify": cmd_classify,
    "evaluate": cmd_evaluate,
    "serve": cmd_serve,
    "inspect": cmd_inspect,
    "preprocess": cmd_preprocess,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING
    if args.verbose == 1:
        level = logging.INFO
    elif args.verbose >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, LookupError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
