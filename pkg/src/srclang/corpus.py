"""Labeled corpus ingestion with hygiene rules and repository-level splits.

Labels come from the directory layout or an explicit manifest, never
from file extensions.  Byte-identical files are deduplicated (first
occurrence in deterministic path order wins), files outside the size
window are skipped, and splitting assigns whole repositories to one
side so near-identical files from one project cannot leak across the
train/test boundary.
"""

from __future__ import annotations

import hashlib
import logging
import random
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

log = logging.getLogger(__name__)

DEFAULT_MIN_BYTES = 3
DEFAULT_MAX_BYTES = 240_000


@dataclass(frozen=True)
class SampleRecord:
    path: Path
    language: str
    repo_id: str
    content_hash: str
    size: int


@dataclass
class CorpusManifest:
    records: list[SampleRecord] = field(default_factory=list)

    @property
    def languages(self) -> tuple[str, ...]:
        return tuple(sorted({r.language for r in self.records}))

    def by_language(self) -> dict[str, list[SampleRecord]]:
        grouped: dict[str, list[SampleRecord]] = defaultdict(list)
        for record in self.records:
            grouped[record.language].append(record)
        return dict(grouped)

    def __len__(self) -> int:
        return len(self.records)


@dataclass
class SplitResult:
    train: CorpusManifest
    test: CorpusManifest
    # Languages whose every file landed on the train side (for example a
    # single-repository language); they cannot be evaluated.
    untestable: list[str] = field(default_factory=list)


def content_digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def ingest(
    roots: Sequence[tuple[Path | str, str]],
    *,
    min_bytes: int = DEFAULT_MIN_BYTES,
    max_bytes: int = DEFAULT_MAX_BYTES,
) -> CorpusManifest:
    """Walk (directory, language) roots into a deduplicated manifest.

    A file's repository id is its first path component under the root,
    namespaced by language so greedy splitting never couples languages
    that happen to share a directory name.
    """
    candidates: list[tuple[Path, str, str]] = []
    for root, language in roots:
        root = Path(root)
        if not root.is_dir():
            raise NotADirectoryError(f"corpus root not found: {root}")
        for path in sorted(p for p in root.rglob("*") if p.is_file()):
            relative = path.relative_to(root)
            repo = relative.parts[0] if len(relative.parts) > 1 else relative.name
            candidates.append((path, language, f"{language}/{repo}"))
    return _build_manifest(candidates, min_bytes=min_bytes, max_bytes=max_bytes)


def _build_manifest(
    candidates: Iterable[tuple[Path, str, str]],
    *,
    min_bytes: int,
    max_bytes: int,
) -> CorpusManifest:
    manifest = CorpusManifest()
    seen_hashes: set[str] = set()
    declared: set[str] = set()
    usable: set[str] = set()
    for path, language, repo_id in candidates:
        declared.add(language)
        try:
            data = path.read_bytes()
        except OSError as exc:
            log.warning("skipping unreadable file %s: %s", path, exc)
            continue
        size = len(data)
        if size < min_bytes or size > max_bytes:
            continue
        digest = content_digest(data)
        if digest in seen_hashes:
            continue
        seen_hashes.add(digest)
        usable.add(language)
        manifest.records.append(
            SampleRecord(
                path=path,
                language=language,
                repo_id=repo_id,
                content_hash=digest,
                size=size,
            )
        )
    missing = sorted(declared - usable)
    if missing:
        raise ValueError(f"no usable files for language(s): {', '.join(missing)}")
    return manifest


def split(
    manifest: CorpusManifest, train_fraction: float, seed: int
) -> SplitResult:
    """Assign whole repositories greedily until each language's train side
    holds at least ``train_fraction`` of its files."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train fraction must be in (0, 1), got {train_fraction}")

    repo_records: dict[str, list[SampleRecord]] = defaultdict(list)
    for record in manifest.records:
        repo_records[record.repo_id].append(record)
    repos = sorted(repo_records)
    random.Random(seed).shuffle(repos)

    lang_totals: dict[str, int] = defaultdict(int)
    repo_lang_files: dict[str, dict[str, int]] = defaultdict(lambda: defaultdict(int))
    for record in manifest.records:
        lang_totals[record.language] += 1
        repo_lang_files[record.repo_id][record.language] += 1

    assignment: dict[str, str] = {}
    for language in sorted(lang_totals):
        target = train_fraction * lang_totals[language]
        train_count = sum(
            repo_lang_files[repo].get(language, 0)
            for repo, side in assignment.items()
            if side == "train"
        )
        for repo in repos:
            if repo in assignment or language not in repo_lang_files[repo]:
                continue
            if train_count < target:
                assignment[repo] = "train"
                train_count += repo_lang_files[repo][language]
            else:
                assignment[repo] = "test"

    train = CorpusManifest()
    test = CorpusManifest()
    for record in manifest.records:
        side = train if assignment[record.repo_id] == "train" else test
        side.records.append(record)

    test_langs = {record.language for record in test.records}
    untestable = sorted(lang_totals.keys() - test_langs)
    for language in untestable:
        log.warning(
            "language %r has no test-side repositories; it cannot be evaluated",
            language,
        )
    return SplitResult(train=train, test=test, untestable=untestable)


def write_manifest(manifest: CorpusManifest, path: Path | str) -> None:
    """One UTF-8 line per record: ``repo_id TAB language TAB path``."""
    lines = [
        f"{record.repo_id}\t{record.language}\t{record.path}"
        for record in manifest.records
    ]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def read_manifest(
    path: Path | str,
    *,
    min_bytes: int = DEFAULT_MIN_BYTES,
    max_bytes: int = DEFAULT_MAX_BYTES,
) -> CorpusManifest:
    """Load a manifest file, re-applying the size and duplicate filters."""
    candidates: list[tuple[Path, str, str]] = []
    for number, line in enumerate(Path(path).read_text("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ValueError(f"{path}:{number}: expected repo_id<TAB>language<TAB>path")
        repo_id, language, file_path = parts
        candidates.append((Path(file_path), language, repo_id))
    return _build_manifest(candidates, min_bytes=min_bytes, max_bytes=max_bytes)
