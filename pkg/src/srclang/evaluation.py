"""Scoring a trained model on a labeled test set.

Builds a full actual-by-predicted confusion matrix and per-language
precision / recall / F plus macro averages.  The ratio definitions
follow the report format this tool reproduces: precision(j) =
correct(j) / labeled(j) and recall(j) = correct(j) / predicted(j),
which is the swap of the conventional naming.  F is symmetric in the
two ratios, so F values are identical under either naming.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .grammar import extract_features
from .maxent import MaxentModel, predict
from .preprocess import preprocess_text

FOOTNOTE = (
    "precision = correct/labeled, recall = correct/predicted"
    " (swapped relative to the conventional definitions);"
    " * marks a 0/0 ratio reported as 0"
)


@dataclass(frozen=True)
class LanguageScore:
    precision: float
    recall: float
    f: float
    test_files: int


class EvalReport:
    """Per-language scores plus the confusion matrix behind them."""

    def __init__(self, languages: tuple[str, ...], confusion: np.ndarray):
        confusion = np.asarray(confusion, dtype=np.int64)
        if confusion.shape != (len(languages), len(languages)):
            raise ValueError("confusion matrix shape does not match languages")
        self.languages = tuple(languages)
        self.confusion = confusion
        self.scores: dict[str, LanguageScore] = {}
        labeled = confusion.sum(axis=1)
        predicted = confusion.sum(axis=0)
        for j, language in enumerate(self.languages):
            correct = int(confusion[j, j])
            p = correct / labeled[j] if labeled[j] else 0.0
            r = correct / predicted[j] if predicted[j] else 0.0
            f = 2.0 * p * r / (p + r) if p + r > 0 else 0.0
            self.scores[language] = LanguageScore(p, r, f, int(labeled[j]))
        present = [self.scores[l] for l in self.languages if self.scores[l].test_files]
        count = len(present)
        self.macro_precision = sum(s.precision for s in present) / count if count else 0.0
        self.macro_recall = sum(s.recall for s in present) / count if count else 0.0
        self.macro_f = sum(s.f for s in present) / count if count else 0.0

    @property
    def total_files(self) -> int:
        return int(self.confusion.sum())

    @property
    def accuracy(self) -> float:
        return float(np.trace(self.confusion)) / self.total_files

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EvalReport):
            return NotImplemented
        return self.languages == other.languages and np.array_equal(
            self.confusion, other.confusion
        )

    def __repr__(self) -> str:
        return (
            f"<EvalReport {len(self.languages)} languages,"
            f" {self.total_files} files, macro-F {self.macro_f:.3f}>"
        )


def evaluate(
    model: MaxentModel, test: Iterable[tuple[bytes | str, str]]
) -> EvalReport:
    """Classify every (raw text, label) sample and tally the confusion matrix."""
    report, _ = evaluate_with_errors(model, test)
    return report


def evaluate_with_errors(
    model: MaxentModel,
    test: Iterable[tuple[bytes | str, str]],
    sample_ids: Sequence[str] | None = None,
) -> tuple[EvalReport, list[tuple[str, str, str]]]:
    """Like evaluate, also returning (id, actual, predicted) per miss."""
    samples = list(test)
    if not samples:
        raise ValueError("empty test set")
    index = {language: j for j, language in enumerate(model.languages)}
    unknown = sorted({label for _, label in samples if label not in index})
    if unknown:
        raise ValueError(f"test labels outside model languages: {', '.join(unknown)}")

    confusion = np.zeros((len(model.languages),) * 2, dtype=np.int64)
    misclassified: list[tuple[str, str, str]] = []
    for position, (raw, label) in enumerate(samples):
        features = extract_features(preprocess_text(raw), model.grammar)
        prediction = predict(features, model)
        confusion[index[label], index[prediction.best]] += 1
        if prediction.best != label:
            sample_id = sample_ids[position] if sample_ids else str(position)
            misclassified.append((sample_id, label, prediction.best))
    return EvalReport(model.languages, confusion), misclassified


def _cell(value: float, denominator_zero: bool) -> str:
    marker = "*" if denominator_zero else ""
    return f"{value:.3f}{marker}"


def render_report(report: EvalReport, fmt: str = "text") -> str:
    if fmt == "json":
        return _render_json(report)
    if fmt != "text":
        raise ValueError(f"unknown report format {fmt!r}")

    width = max(8, max((len(l) for l in report.languages), default=8))
    lines = [f"{'Language':<{width}}  Precision  Recall  F      Files"]
    predicted = report.confusion.sum(axis=0)
    for j, language in enumerate(report.languages):
        s = report.scores[language]
        p = _cell(s.precision, s.test_files == 0)
        r = _cell(s.recall, predicted[j] == 0)
        f = f"{s.f:.3f}"
        lines.append(f"{language:<{width}}  {p:<9}  {r:<6}  {f}  {s.test_files}")
    lines.append(
        f"{'Average':<{width}}  {report.macro_precision:.3f}{'':<4}  "
        f"{report.macro_recall:.3f}   {report.macro_f:.3f}  {report.total_files}"
    )
    lines.append("")
    lines.append("Confusion (rows = actual, columns = predicted):")
    lines.append(_render_confusion(report))
    lines.append("")
    lines.append(f"note: {FOOTNOTE}")
    return "\n".join(lines)


def _render_confusion(report: EvalReport) -> str:
    names = report.languages
    width = max(5, max(len(n) for n in names))
    header = " " * width + " " + " ".join(f"{n:>{width}}" for n in names)
    rows = [header]
    for j, name in enumerate(names):
        cells = " ".join(f"{int(c):>{width}}" for c in report.confusion[j])
        rows.append(f"{name:>{width}} {cells}")
    return "\n".join(rows)


def _render_json(report: EvalReport) -> str:
    payload = {
        "languages": list(report.languages),
        "confusion": report.confusion.tolist(),
        "scores": {
            language: {
                "precision": s.precision,
                "recall": s.recall,
                "f": s.f,
                "test_files": s.test_files,
            }
            for language, s in report.scores.items()
        },
        "macro": {
            "precision": report.macro_precision,
            "recall": report.macro_recall,
            "f": report.macro_f,
        },
        "total_files": report.total_files,
        "note": FOOTNOTE,
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def parse_report(text: str) -> EvalReport:
    """Rebuild an EvalReport from its JSON rendering."""
    payload = json.loads(text)
    return EvalReport(
        languages=tuple(payload["languages"]),
        confusion=np.asarray(payload["confusion"], dtype=np.int64),
    )
