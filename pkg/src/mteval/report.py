"""Best-epoch selection and BLEU-vs-grammar comparison reports.

A comparison report pairs a corpus BLEU run with a grammar-accuracy score
table over the same sentences, lists both scores per sentence, and flags
"discrepancy" sentences: near-zero BLEU despite a (by default) flawless
grammar judgment.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from . import gae
from .bleu import BleuConfig, BleuResult, corpus_bleu, segments_from_lines
from .errors import ConfigurationError, DataError
from .gae import GaeAnnotation, GaeScoreTable, SessionItem, format_score
from .tokenizers import DEFAULT_MODE

DEFAULT_BLEU_THRESHOLD = 5.0
DEFAULT_GAE_THRESHOLD = 100.0

RENDER_FORMATS = ("markdown", "csv", "json")


@dataclass(frozen=True)
class EpochEntry:
    epoch: int
    bleu: float


@dataclass(frozen=True)
class EpochScoreSeries:
    """BLEU checkpoints of one model, ordered by strictly increasing epoch."""

    model_label: str
    entries: tuple[EpochEntry, ...]

    def __post_init__(self) -> None:
        for prev, cur in zip(self.entries, self.entries[1:]):
            if cur.epoch <= prev.epoch:
                raise DataError(
                    f"epochs must strictly increase: {prev.epoch} then {cur.epoch}"
                )
        for entry in self.entries:
            if not 0.0 <= entry.bleu <= 100.0:
                raise DataError(f"BLEU {entry.bleu} at epoch {entry.epoch} outside [0, 100]")


def best_epoch(series: EpochScoreSeries) -> EpochEntry:
    """Entry with the highest BLEU; ties go to the earliest epoch."""
    if not series.entries:
        raise DataError(f"no epoch entries for {series.model_label!r}")
    best = series.entries[0]
    for entry in series.entries[1:]:
        if entry.bleu > best.bleu:
            best = entry
    return best


def read_epoch_scores(path, model_label: str | None = None) -> EpochScoreSeries:
    """Ingest a two-column CSV with header ``epoch,bleu``."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty epoch-score file") from None
        if [h.strip().lower() for h in header] != ["epoch", "bleu"]:
            raise DataError(f"{path}: expected header 'epoch,bleu', got {','.join(header)!r}")
        entries = []
        for lineno, row in enumerate(reader, start=2):
            if not row or not "".join(row).strip():
                continue
            try:
                entries.append(EpochEntry(int(row[0]), float(row[1])))
            except (ValueError, IndexError):
                raise DataError(f"{path}:{lineno}: bad epoch-score row {row!r}") from None
    return EpochScoreSeries(model_label or path.stem, tuple(entries))


def score_epoch_dir(
    directory,
    reference_path,
    model_label: str | None = None,
    tokenizer_mode: str = DEFAULT_MODE,
    config: BleuConfig | None = None,
) -> EpochScoreSeries:
    """Score every candidate file in a directory against one reference file.

    The epoch number is the last run of digits in each file's stem
    (``epoch_10000.txt`` or ``10000.txt`` both work).
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise DataError(f"no such directory: {directory}")
    reference_path = Path(reference_path)
    if not reference_path.is_file():
        raise DataError(f"no such file: {reference_path}")
    reference_lines = reference_path.read_text(encoding="utf-8").splitlines()
    scored: list[EpochEntry] = []
    for path in sorted(directory.iterdir()):
        if not path.is_file():
            continue
        matches = re.findall(r"\d+", path.stem)
        if not matches:
            raise DataError(f"{path}: cannot read an epoch number from the file name")
        epoch = int(matches[-1])
        candidate_lines = path.read_text(encoding="utf-8").splitlines()
        if len(candidate_lines) != len(reference_lines):
            raise DataError(
                f"{path}: {len(candidate_lines)} lines vs {len(reference_lines)} reference lines"
            )
        segments = segments_from_lines(candidate_lines, [reference_lines], tokenizer_mode)
        scored.append(EpochEntry(epoch, corpus_bleu(segments, config).score))
    scored.sort(key=lambda e: e.epoch)
    return EpochScoreSeries(model_label or directory.name, tuple(scored))


@dataclass(frozen=True)
class SentenceComparison:
    sentence_id: str
    sentence_bleu: float
    gae_sentence_score: float


@dataclass(frozen=True)
class ComparisonReport:
    model_label: str
    corpus_bleu: BleuResult
    gae_table: GaeScoreTable
    per_sentence: tuple[SentenceComparison, ...]
    discrepancies: tuple[str, ...]
    bleu_threshold: float = DEFAULT_BLEU_THRESHOLD
    gae_threshold: float = DEFAULT_GAE_THRESHOLD

    def __post_init__(self) -> None:
        by_id = {row.sentence_id: row for row in self.per_sentence}
        for sid in self.discrepancies:
            row = by_id.get(sid)
            if row is None:
                raise ConfigurationError(f"discrepancy {sid!r} not among per-sentence rows")
            if not (
                row.sentence_bleu <= self.bleu_threshold
                and row.gae_sentence_score >= self.gae_threshold
            ):
                raise ConfigurationError(f"{sid!r} does not satisfy the discrepancy predicate")


def find_discrepancies(
    per_sentence: Sequence[SentenceComparison],
    bleu_threshold: float = DEFAULT_BLEU_THRESHOLD,
    gae_threshold: float = DEFAULT_GAE_THRESHOLD,
) -> list[str]:
    """Sentences scoring at most bleu_threshold BLEU yet at least gae_threshold grammar."""
    hits = [
        row
        for row in per_sentence
        if row.sentence_bleu <= bleu_threshold and row.gae_sentence_score >= gae_threshold
    ]
    hits.sort(key=lambda row: row.sentence_bleu)
    return [row.sentence_id for row in hits]


def build_report(
    items: Sequence[SessionItem],
    annotations: Sequence[GaeAnnotation],
    model_label: str = "model",
    tokenizer_mode: str = DEFAULT_MODE,
    config: BleuConfig | None = None,
    bleu_threshold: float = DEFAULT_BLEU_THRESHOLD,
    gae_threshold: float = DEFAULT_GAE_THRESHOLD,
) -> ComparisonReport:
    """Assemble a comparison report from session items and their annotations.

    Corpus and per-sentence BLEU come from each item's candidate/reference
    text; the grammar table pools all annotators. Sentences appear in the
    per-sentence list only when both scores exist for them.
    """
    if not items:
        raise ConfigurationError("need at least one item")
    config = config or BleuConfig()
    segments = segments_from_lines(
        [i.candidate_text for i in items],
        [[i.reference_text for i in items]],
        tokenizer_mode,
    )
    overall = corpus_bleu(segments, config)
    sentence_bleu_by_id = {
        item.sentence_id: corpus_bleu([segment], config).score
        for item, segment in zip(items, segments)
    }

    pooled = gae.pooled_tables(annotations)
    if pooled.pooled is None:
        raise ConfigurationError("need at least one annotation to build a report")
    table = pooled.pooled

    per_sentence = tuple(
        SentenceComparison(
            sentence_id=item.sentence_id,
            sentence_bleu=sentence_bleu_by_id[item.sentence_id],
            gae_sentence_score=table.sentence_scores[item.sentence_id],
        )
        for item in items
        if item.sentence_id in table.sentence_scores
    )
    flagged = tuple(find_discrepancies(per_sentence, bleu_threshold, gae_threshold))
    return ComparisonReport(
        model_label=model_label,
        corpus_bleu=overall,
        gae_table=table,
        per_sentence=per_sentence,
        discrepancies=flagged,
        bleu_threshold=bleu_threshold,
        gae_threshold=gae_threshold,
    )


# --- rendering ------------------------------------------------------------


def report_to_dict(report: ComparisonReport) -> dict:
    return {
        "model_label": report.model_label,
        "corpus_bleu": report.corpus_bleu.as_dict(),
        "gae_table": report.gae_table.as_dict(),
        "per_sentence": [
            {
                "sentence_id": row.sentence_id,
                "sentence_bleu": row.sentence_bleu,
                "gae_sentence_score": row.gae_sentence_score,
            }
            for row in report.per_sentence
        ],
        "discrepancies": list(report.discrepancies),
        "bleu_threshold": report.bleu_threshold,
        "gae_threshold": report.gae_threshold,
    }


def report_from_dict(record: Mapping) -> ComparisonReport:
    return ComparisonReport(
        model_label=record["model_label"],
        corpus_bleu=BleuResult.from_dict(record["corpus_bleu"]),
        gae_table=GaeScoreTable.from_dict(record["gae_table"]),
        per_sentence=tuple(
            SentenceComparison(
                sentence_id=row["sentence_id"],
                sentence_bleu=float(row["sentence_bleu"]),
                gae_sentence_score=float(row["gae_sentence_score"]),
            )
            for row in record["per_sentence"]
        ),
        discrepancies=tuple(record["discrepancies"]),
        bleu_threshold=float(record["bleu_threshold"]),
        gae_threshold=float(record["gae_threshold"]),
    )


def report_from_json(text: str) -> ComparisonReport:
    return report_from_dict(json.loads(text))


def _render_markdown(report: ComparisonReport) -> str:
    bleu = report.corpus_bleu
    lines = [
        f"# Translation evaluation report: {report.model_label}",
        "",
        "## Corpus BLEU",
        "",
        "| Measure | Value |",
        "| --- | --- |",
        f"| Score | {format_score(bleu.score)} |",
        f"| Precisions | {', '.join(str(p) for p in bleu.precisions)} |",
        f"| Brevity penalty | {bleu.brevity_penalty:.4f} |",
        f"| Candidate length | {bleu.candidate_length} |",
        f"| Reference length | {bleu.reference_length} |",
        f"| Tokenizer | {bleu.tokenizer_mode} |",
        f"| Smoothing | {bleu.smoothing} |",
        "",
        f"## Grammar accuracy ({report.gae_table.sentence_count} sentences, "
        f"annotator: {report.gae_table.annotator_id})",
        "",
        "| Category | Score |",
        "| --- | --- |",
    ]
    for category in gae.CATEGORIES:
        lines.append(
            f"| {category.label} | {format_score(report.gae_table.category_scores[category])} |"
        )
    lines.append(f"| **Model score** | **{format_score(report.gae_table.model_score)}** |")
    lines.extend(["", "## Per-sentence comparison", ""])
    if report.per_sentence:
        lines.extend(
            [
                "| Sentence | BLEU | Grammar score | Flagged |",
                "| --- | --- | --- | --- |",
            ]
        )
        flagged = set(report.discrepancies)
        for row in report.per_sentence:
            mark = "yes" if row.sentence_id in flagged else ""
            lines.append(
                f"| {row.sentence_id} | {format_score(row.sentence_bleu)} "
                f"| {format_score(row.gae_sentence_score)} | {mark} |"
            )
    else:
        lines.append("_no sentences_")
    lines.extend(
        [
            "",
            f"## Discrepancies (BLEU <= {report.bleu_threshold:g}, "
            f"grammar >= {report.gae_threshold:g})",
            "",
        ]
    )
    if report.discrepancies:
        lines.extend(f"- {sid}" for sid in report.discrepancies)
    else:
        lines.append("_none_")
    return "\n".join(lines) + "\n"


def _render_csv(report: ComparisonReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["sentence_id", "sentence_bleu", "gae_sentence_score", "discrepancy"])
    flagged = set(report.discrepancies)
    for row in report.per_sentence:
        writer.writerow(
            [
                row.sentence_id,
                repr(row.sentence_bleu),
                repr(row.gae_sentence_score),
                "yes" if row.sentence_id in flagged else "no",
            ]
        )
    return buffer.getvalue()


def render_report(report: ComparisonReport, fmt: str) -> str:
    """Render to markdown, csv or json. Deterministic; json round-trips."""
    if fmt == "markdown":
        return _render_markdown(report)
    if fmt == "csv":
        return _render_csv(report)
    if fmt == "json":
        return json.dumps(report_to_dict(report), ensure_ascii=False, indent=2) + "\n"
    raise ConfigurationError(f"unknown report format {fmt!r}; choose from {', '.join(RENDER_FORMATS)}")
