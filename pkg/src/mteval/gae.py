"""Grammar accuracy scoring over binary human judgments.

A sentence is judged against nine fixed grammar categories, each marked
0 (flawed) or 1 (not flawed). Sentence, category and model scores are
all percentages derived from the same binary grid:

* sentence score = mean of the sentence's nine judgments x 100
* category score = share of sentences judged 1 in that category x 100
* model score    = mean of the nine category scores

For a complete single-annotator grid the three coincide with the grand
mean of the grid, which the tests pin down as an invariant.
"""

from __future__ import annotations

import enum
import json
from collections import Counter
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from statistics import fmean
from typing import Iterable, Mapping, Sequence

from .errors import ConfigurationError, NotFoundError, ValidationError

POOLED_MARKER = "pooled"


class GaeCategory(enum.Enum):
    """The nine judgment categories, in canonical order."""

    ARTICLE_OR_PARTICLE = "article_or_particle"
    VOCABULARY_SELECTION = "vocabulary_selection"
    SINGULAR_PLURAL = "singular_plural"
    MISSPELLED_WORD = "misspelled_word"
    MISSING_WORD = "missing_word"
    ADDED_WORD = "added_word"
    WORD_ORDER = "word_order"
    TENSE = "tense"
    SENTENCE_STRUCTURE = "sentence_structure"

    @property
    def key(self) -> str:
        return self.value

    @property
    def label(self) -> str:
        return _LABELS[self]

    @property
    def criterion(self) -> str:
        return _CRITERIA[self]


CATEGORIES: tuple[GaeCategory, ...] = tuple(GaeCategory)

_LABELS: dict[GaeCategory, str] = {
    GaeCategory.ARTICLE_OR_PARTICLE: "Article / Particle",
    GaeCategory.VOCABULARY_SELECTION: "Vocabulary selection",
    GaeCategory.SINGULAR_PLURAL: "Singular / Plural",
    GaeCategory.MISSPELLED_WORD: "Misspelled word",
    GaeCategory.MISSING_WORD: "Missing word",
    GaeCategory.ADDED_WORD: "Added word",
    GaeCategory.WORD_ORDER: "Word order",
    GaeCategory.TENSE: "Tense",
    GaeCategory.SENTENCE_STRUCTURE: "Sentence structure",
}

_CRITERIA: dict[GaeCategory, str] = {
    GaeCategory.ARTICLE_OR_PARTICLE: (
        "Articles (for Korean: postpositional particles) are neither omitted nor grammatically wrong."
    ),
    GaeCategory.VOCABULARY_SELECTION: (
        "Each chosen word is appropriate both in its own meaning and in the sentence meaning it composes."
    ),
    GaeCategory.SINGULAR_PLURAL: (
        "Nouns keep the grammatical number (singular or plural) they carry in the source sentence."
    ),
    GaeCategory.MISSPELLED_WORD: (
        "No word is misspelled; no letters are added or dropped."
    ),
    GaeCategory.MISSING_WORD: (
        "No expression present in the source sentence is left out of the translation."
    ),
    GaeCategory.ADDED_WORD: (
        "No expression absent from the source sentence is introduced in the translation."
    ),
    GaeCategory.WORD_ORDER: (
        "Words follow the syntactic ordering rules of the target language."
    ),
    GaeCategory.TENSE: (
        "The tense used in the source sentence is expressed by the same tense in the translation."
    ),
    GaeCategory.SENTENCE_STRUCTURE: (
        "The clause-level structure of the translation matches that of the source sentence."
    ),
}

_BY_KEY: dict[str, GaeCategory] = {c.key: c for c in CATEGORIES}


def category_from_key(key: str) -> GaeCategory:
    try:
        return _BY_KEY[key]
    except KeyError:
        raise ValidationError(f"unknown category key {key!r}") from None


def validate_judgments(judgments: Mapping) -> dict[GaeCategory, int]:
    """Coerce keys to categories and enforce a complete 0/1 grid row."""
    coerced: dict[GaeCategory, int] = {}
    for key, value in judgments.items():
        category = key if isinstance(key, GaeCategory) else category_from_key(str(key))
        if value not in (0, 1):
            raise ValidationError(
                f"judgment for {category.key} must be 0 or 1, got {value!r}"
            )
        coerced[category] = int(value)
    missing = [c.key for c in CATEGORIES if c not in coerced]
    if missing:
        raise ValidationError(f"missing judgment categories: {', '.join(missing)}")
    return {c: coerced[c] for c in CATEGORIES}


@dataclass(frozen=True)
class GaeAnnotation:
    """One annotator's complete nine-category judgment of one sentence."""

    sentence_id: str
    annotator_id: str
    judgments: Mapping[GaeCategory, int]
    timestamp: str
    comment: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "judgments", validate_judgments(self.judgments))

    def same_payload(self, other: "GaeAnnotation") -> bool:
        """True when judgments and comment agree (timestamps are ignored)."""
        return (
            self.sentence_id == other.sentence_id
            and self.annotator_id == other.annotator_id
            and dict(self.judgments) == dict(other.judgments)
            and self.comment == other.comment
        )


@dataclass(frozen=True)
class GaeScoreTable:
    """Per-sentence, per-category and model scores, all in [0, 100]."""

    annotator_id: str
    sentence_scores: Mapping[str, float]
    category_scores: Mapping[GaeCategory, float]
    model_score: float
    sentence_count: int

    def as_dict(self) -> dict:
        return {
            "annotator_id": self.annotator_id,
            "sentence_count": self.sentence_count,
            "sentence_scores": dict(self.sentence_scores),
            "category_scores": {c.key: v for c, v in self.category_scores.items()},
            "model_score": self.model_score,
        }

    @classmethod
    def from_dict(cls, record: Mapping) -> "GaeScoreTable":
        return cls(
            annotator_id=record["annotator_id"],
            sentence_scores=dict(record["sentence_scores"]),
            category_scores={
                category_from_key(k): float(v)
                for k, v in record["category_scores"].items()
            },
            model_score=float(record["model_score"]),
            sentence_count=int(record["sentence_count"]),
        )


@dataclass(frozen=True)
class PooledScores:
    """Per-annotator tables plus their unweighted pooled combination."""

    per_annotator: Mapping[str, GaeScoreTable]
    pooled: GaeScoreTable | None
    agreement: Mapping[GaeCategory, float] | None


def sentence_score(annotation: GaeAnnotation) -> float:
    """Mean of the nine judgments as a percentage."""
    return 100.0 * sum(annotation.judgments.values()) / len(CATEGORIES)


def category_score(annotations: Sequence[GaeAnnotation], category: GaeCategory) -> float:
    """Share of sentences judged not-flawed in one category, as a percentage."""
    if not annotations:
        raise ConfigurationError("need at least one annotation")
    ones = sum(a.judgments[category] for a in annotations)
    return 100.0 * ones / len(annotations)


def _check_one_per_sentence(annotations: Sequence[GaeAnnotation]) -> None:
    seen: set[str] = set()
    for a in annotations:
        if a.sentence_id in seen:
            raise ValidationError(f"duplicate annotation for sentence {a.sentence_id!r}")
        seen.add(a.sentence_id)


def model_score(annotations: Sequence[GaeAnnotation]) -> GaeScoreTable:
    """Score table for a single-annotator view: one annotation per sentence."""
    if not annotations:
        raise ConfigurationError("need at least one annotation")
    _check_one_per_sentence(annotations)
    annotators = {a.annotator_id for a in annotations}
    annotator_id = annotators.pop() if len(annotators) == 1 else "mixed"
    sentences = {a.sentence_id: sentence_score(a) for a in annotations}
    categories = {c: category_score(annotations, c) for c in CATEGORIES}
    return GaeScoreTable(
        annotator_id=annotator_id,
        sentence_scores=sentences,
        category_scores=categories,
        model_score=fmean(categories.values()),
        sentence_count=len(annotations),
    )


def _agreement(
    by_annotator: Mapping[str, Sequence[GaeAnnotation]]
) -> dict[GaeCategory, float] | None:
    """Raw percent agreement per category over annotator pairs sharing a sentence."""
    indexed = {
        annotator: {a.sentence_id: a for a in annotations}
        for annotator, annotations in by_annotator.items()
    }
    annotators = sorted(indexed)
    matches = {c: 0 for c in CATEGORIES}
    pairs = 0
    for i, first in enumerate(annotators):
        for second in annotators[i + 1 :]:
            shared = indexed[first].keys() & indexed[second].keys()
            pairs += len(shared)
            for sid in shared:
                a, b = indexed[first][sid], indexed[second][sid]
                for c in CATEGORIES:
                    if a.judgments[c] == b.judgments[c]:
                        matches[c] += 1
    if pairs == 0:
        return None
    return {c: 100.0 * matches[c] / pairs for c in CATEGORIES}


def pooled_tables(annotations: Sequence[GaeAnnotation]) -> PooledScores:
    """One table per annotator plus an unweighted pooled table across annotators.

    Pooled category scores are the plain mean of the per-annotator category
    scores; pooled sentence scores average over the annotators who judged
    that sentence. Raw percent agreement is reported per category whenever
    at least two annotators judged a common sentence.
    """
    by_annotator: dict[str, list[GaeAnnotation]] = {}
    for a in annotations:
        by_annotator.setdefault(a.annotator_id, []).append(a)
    per_annotator = {
        annotator: model_score(rows) for annotator, rows in sorted(by_annotator.items())
    }
    if not per_annotator:
        return PooledScores(per_annotator={}, pooled=None, agreement=None)

    tables = list(per_annotator.values())
    pooled_categories = {
        c: fmean(t.category_scores[c] for t in tables) for c in CATEGORIES
    }
    sentence_values: dict[str, list[float]] = {}
    for t in tables:
        for sid, value in t.sentence_scores.items():
            sentence_values.setdefault(sid, []).append(value)
    pooled = GaeScoreTable(
        annotator_id=POOLED_MARKER,
        sentence_scores={sid: fmean(vals) for sid, vals in sentence_values.items()},
        category_scores=pooled_categories,
        model_score=fmean(pooled_categories.values()),
        sentence_count=len(sentence_values),
    )
    return PooledScores(
        per_annotator=per_annotator,
        pooled=pooled,
        agreement=_agreement(by_annotator),
    )


# --- sessions -------------------------------------------------------------


@dataclass(frozen=True)
class SessionItem:
    sentence_id: str
    source_text: str
    reference_text: str
    candidate_text: str

    def as_dict(self) -> dict:
        return {
            "sentence_id": self.sentence_id,
            "source_text": self.source_text,
            "reference_text": self.reference_text,
            "candidate_text": self.candidate_text,
        }


@dataclass
class GaeSession:
    """A packaged set of sentences under annotation, with upsert semantics."""

    session_id: str
    model_label: str
    items: list[SessionItem]
    annotations: list[GaeAnnotation] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.items:
            raise ValidationError("session needs at least one item")
        counts = Counter(i.sentence_id for i in self.items)
        duplicates = sorted(sid for sid, n in counts.items() if n > 1)
        if duplicates:
            raise ValidationError(f"duplicate sentence ids: {', '.join(duplicates)}")
        self._item_ids = set(counts)

    def upsert_annotation(self, annotation: GaeAnnotation) -> str:
        """Insert or replace by (sentence_id, annotator_id).

        Returns "submitted", "replaced" or "unchanged"; identical payloads
        leave the stored annotation (and its timestamp) untouched.
        """
        if annotation.sentence_id not in self._item_ids:
            raise NotFoundError(f"unknown sentence {annotation.sentence_id!r}")
        for i, existing in enumerate(self.annotations):
            if (
                existing.sentence_id == annotation.sentence_id
                and existing.annotator_id == annotation.annotator_id
            ):
                if existing.same_payload(annotation):
                    return "unchanged"
                self.annotations[i] = annotation
                return "replaced"
        self.annotations.append(annotation)
        return "submitted"

    def annotations_by(self, annotator_id: str) -> list[GaeAnnotation]:
        return [a for a in self.annotations if a.annotator_id == annotator_id]

    def next_item(self, annotator_id: str) -> SessionItem | None:
        """Lowest-ordered item this annotator has not yet judged; None when done."""
        done = {a.sentence_id for a in self.annotations_by(annotator_id)}
        for item in self.items:
            if item.sentence_id not in done:
                return item
        return None

    def completion(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for a in self.annotations:
            counts[a.annotator_id] = counts.get(a.annotator_id, 0) + 1
        return dict(sorted(counts.items()))


def pooled_scores(session: GaeSession) -> PooledScores:
    """Pooled score tables over the session's current annotation snapshot."""
    return pooled_tables(session.annotations)


# --- line format ----------------------------------------------------------


def annotation_to_record(annotation: GaeAnnotation) -> dict:
    record = {
        "sentence_id": annotation.sentence_id,
        "annotator_id": annotation.annotator_id,
        "timestamp": annotation.timestamp,
        "judgments": {c.key: v for c, v in annotation.judgments.items()},
    }
    if annotation.comment is not None:
        record["comment"] = annotation.comment
    return record


def annotation_from_record(record: Mapping) -> GaeAnnotation:
    for required in ("sentence_id", "annotator_id", "timestamp", "judgments"):
        if required not in record:
            raise ValidationError(f"annotation record missing field {required!r}")
    return GaeAnnotation(
        sentence_id=str(record["sentence_id"]),
        annotator_id=str(record["annotator_id"]),
        judgments=record["judgments"],
        timestamp=str(record["timestamp"]),
        comment=record.get("comment"),
    )


def annotation_to_line(annotation: GaeAnnotation) -> str:
    return json.dumps(annotation_to_record(annotation), ensure_ascii=False)


def annotation_from_line(line: str) -> GaeAnnotation:
    try:
        record = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid annotation line: {exc}") from exc
    if not isinstance(record, dict):
        raise ValidationError("annotation line must hold a JSON object")
    return annotation_from_record(record)


def read_annotations(path) -> list[GaeAnnotation]:
    """Read a one-record-per-line annotation file, skipping blank lines."""
    annotations = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                annotations.append(annotation_from_line(line))
            except ValidationError as exc:
                raise ValidationError(f"{path}:{lineno}: {exc}") from exc
    return annotations


def write_annotations(path, annotations: Iterable[GaeAnnotation]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for a in annotations:
            handle.write(annotation_to_line(a) + "\n")


def format_score(value: float) -> str:
    """Display rounding: half up to two decimals."""
    return str(Decimal(repr(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def granularity_consistent(score: float, sentence_count: int, tol: float = 1e-9) -> bool:
    """Whether a category score is an attainable multiple of 100/sentence_count."""
    if sentence_count < 1:
        raise ConfigurationError("sentence_count must be >= 1")
    scaled = score * sentence_count / 100.0
    return abs(scaled - round(scaled)) <= tol
