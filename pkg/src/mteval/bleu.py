"""Corpus- and sentence-level BLEU.

Precisions are kept as exact integer ratios (clipped matches over total
candidate n-grams, pooled across segments); floating point enters only
through the brevity penalty and the exp/log combination. The final score
is reported on the 0-100 scale.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, NamedTuple, Sequence

from .errors import ConfigurationError, DataError, PrecisionUndefined
from .tokenizers import DEFAULT_MODE, TokenizedSentence, tokenize

SMOOTHING_NONE = "none"
SMOOTHING_ADD_EPSILON = "add-epsilon"

REFERENCE_LENGTH_RULE = "closest, ties to shorter"


class Ratio(NamedTuple):
    """An exact precision ratio; denominator 0 marks an undefined precision."""

    numerator: int
    denominator: int

    def as_fraction(self) -> Fraction:
        if self.denominator == 0:
            raise PrecisionUndefined(0)
        return Fraction(self.numerator, self.denominator)

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"


@dataclass(frozen=True)
class NGramMultiset:
    """Counts of every contiguous n-token window of one sentence."""

    order: int
    counts: Mapping[tuple[str, ...], int]

    def total(self) -> int:
        return sum(self.counts.values())


@dataclass(frozen=True)
class SegmentPair:
    """One candidate sentence with its reference sentence(s)."""

    candidate: TokenizedSentence
    references: tuple[TokenizedSentence, ...]

    def __post_init__(self) -> None:
        if not self.references:
            raise ConfigurationError("segment needs at least one reference")
        modes = {self.candidate.tokenizer_mode} | {r.tokenizer_mode for r in self.references}
        if len(modes) != 1:
            raise ConfigurationError(
                f"candidate and references must share one tokenizer mode, got {sorted(modes)}"
            )


@dataclass(frozen=True)
class BleuConfig:
    """Scoring knobs: n-gram order, per-order weights, zero-count smoothing."""

    max_n: int = 4
    weights: tuple[float, ...] = ()
    smoothing: str = SMOOTHING_NONE
    epsilon: float = 0.1

    def __post_init__(self) -> None:
        if self.max_n < 1:
            raise ConfigurationError(f"max_n must be >= 1, got {self.max_n}")
        if not self.weights:
            object.__setattr__(self, "weights", (1.0 / self.max_n,) * self.max_n)
        if len(self.weights) != self.max_n:
            raise ConfigurationError(
                f"need {self.max_n} weights, got {len(self.weights)}"
            )
        if any(w < 0 for w in self.weights):
            raise ConfigurationError("weights must be non-negative")
        if abs(math.fsum(self.weights) - 1.0) > 1e-12:
            raise ConfigurationError("weights must sum to 1 within 1e-12")
        if self.smoothing not in (SMOOTHING_NONE, SMOOTHING_ADD_EPSILON):
            raise ConfigurationError(f"unknown smoothing {self.smoothing!r}")
        if self.smoothing == SMOOTHING_ADD_EPSILON and self.epsilon <= 0:
            raise ConfigurationError("epsilon must be positive")


@dataclass(frozen=True)
class BleuResult:
    """Full scoring record: per-order ratios, brevity penalty, final score."""

    score: float
    precisions: tuple[Ratio, ...]
    brevity_penalty: float
    candidate_length: int
    reference_length: int
    tokenizer_mode: str
    smoothing: str
    epsilon: float | None = None
    reference_length_rule: str = REFERENCE_LENGTH_RULE
    notes: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        record = {
            "score": self.score,
            "precisions": [str(p) for p in self.precisions],
            "brevity_penalty": self.brevity_penalty,
            "candidate_length": self.candidate_length,
            "reference_length": self.reference_length,
            "tokenizer_mode": self.tokenizer_mode,
            "smoothing": self.smoothing,
            "reference_length_rule": self.reference_length_rule,
            "notes": list(self.notes),
        }
        if self.epsilon is not None:
            record["epsilon"] = self.epsilon
        return record

    @classmethod
    def from_dict(cls, record: Mapping) -> "BleuResult":
        precisions = tuple(
            Ratio(int(num), int(den))
            for num, den in (p.split("/") for p in record["precisions"])
        )
        return cls(
            score=float(record["score"]),
            precisions=precisions,
            brevity_penalty=float(record["brevity_penalty"]),
            candidate_length=int(record["candidate_length"]),
            reference_length=int(record["reference_length"]),
            tokenizer_mode=record["tokenizer_mode"],
            smoothing=record["smoothing"],
            epsilon=record.get("epsilon"),
            reference_length_rule=record.get("reference_length_rule", REFERENCE_LENGTH_RULE),
            notes=tuple(record.get("notes", ())),
        )


def ngram_multiset(sentence: TokenizedSentence | Sequence[str], n: int) -> NGramMultiset:
    """Count every contiguous n-token window; empty when the sentence is shorter than n."""
    if n < 1:
        raise ConfigurationError(f"n-gram order must be >= 1, got {n}")
    tokens = tuple(sentence)
    counts = Counter(tokens[i : i + n] for i in range(len(tokens) - n + 1))
    return NGramMultiset(n, dict(counts))


def clipped_matches(
    candidate_ngrams: NGramMultiset, reference_ngrams: Sequence[NGramMultiset]
) -> int:
    """Candidate n-gram count with each n-gram capped at its best reference count."""
    orders = {candidate_ngrams.order} | {r.order for r in reference_ngrams}
    if len(orders) != 1:
        raise ConfigurationError(f"mixed n-gram orders: {sorted(orders)}")
    matched = 0
    for gram, count in candidate_ngrams.counts.items():
        cap = max((ref.counts.get(gram, 0) for ref in reference_ngrams), default=0)
        matched += min(count, cap)
    return matched


def _pooled_counts(segments: Sequence[SegmentPair], n: int) -> Ratio:
    numerator = 0
    denominator = 0
    for segment in segments:
        cand = ngram_multiset(segment.candidate, n)
        refs = [ngram_multiset(ref, n) for ref in segment.references]
        numerator += clipped_matches(cand, refs)
        denominator += cand.total()
    return Ratio(numerator, denominator)


def modified_precision(segments: Sequence[SegmentPair], n: int) -> Fraction:
    """Order-n precision pooled over all segments, as an exact fraction.

    Raises :class:`PrecisionUndefined` when no candidate contributes any
    n-gram of this order (denominator 0), which is not the same thing as
    a zero-valued precision.
    """
    if not segments:
        raise ConfigurationError("need at least one segment")
    ratio = _pooled_counts(segments, n)
    if ratio.denominator == 0:
        raise PrecisionUndefined(n)
    return Fraction(ratio.numerator, ratio.denominator)


def effective_reference_length(segment: SegmentPair) -> int:
    """Reference length used for the brevity penalty: closest to the candidate, ties to shorter."""
    c = len(segment.candidate)
    return min((len(r) for r in segment.references), key=lambda length: (abs(length - c), length))


def brevity_penalty(c: int, r: int) -> float:
    """Length penalty: 1 when the candidate is longer than r, else e^(1 - r/c).

    A zero-length candidate makes the exponent undefined; defined here as 0.
    """
    if r < 1:
        raise ConfigurationError(f"effective reference length must be >= 1, got {r}")
    if c == 0:
        return 0.0
    if c > r:
        return 1.0
    return math.exp(1.0 - r / c)


def corpus_bleu(segments: Sequence[SegmentPair], config: BleuConfig | None = None) -> BleuResult:
    """Score a corpus of segments under the given configuration.

    Precisions are pooled across segments per order; the candidate and
    effective reference lengths are pooled for the brevity penalty. With
    smoothing off, any positively-weighted order with zero matches forces
    a score of exactly 0.
    """
    if not segments:
        raise ConfigurationError("need at least one segment")
    config = config or BleuConfig()

    precisions = tuple(_pooled_counts(segments, n) for n in range(1, config.max_n + 1))
    c = sum(len(seg.candidate) for seg in segments)
    r = sum(effective_reference_length(seg) for seg in segments)

    notes: list[str] = []
    if c == 0:
        notes.append("empty candidate corpus: brevity penalty defined as 0")
        bp = 0.0
    elif r == 0:
        notes.append("all references empty: brevity penalty defined as 1")
        bp = 1.0
    else:
        bp = brevity_penalty(c, r)

    epsilon = config.epsilon if config.smoothing == SMOOTHING_ADD_EPSILON else None
    log_sum = 0.0
    zero = False
    for order, (weight, ratio) in enumerate(zip(config.weights, precisions), start=1):
        if weight == 0.0:
            continue
        if ratio.denominator == 0:
            notes.append(f"precision undefined at order {order}: treated as 0")
            zero = True
        elif ratio.numerator == 0 and epsilon is None:
            zero = True
        else:
            value = (ratio.numerator + (epsilon or 0.0)) / ratio.denominator
            log_sum += weight * math.log(value)

    score = 0.0 if zero or bp == 0.0 else 100.0 * bp * math.exp(log_sum)

    modes = {seg.candidate.tokenizer_mode for seg in segments}
    mode = modes.pop() if len(modes) == 1 else "mixed"
    return BleuResult(
        score=score,
        precisions=precisions,
        brevity_penalty=bp,
        candidate_length=c,
        reference_length=r,
        tokenizer_mode=mode,
        smoothing=config.smoothing,
        epsilon=epsilon,
        notes=tuple(notes),
    )


def sentence_bleu(segment: SegmentPair, config: BleuConfig | None = None) -> BleuResult:
    """Corpus BLEU of a single segment."""
    return corpus_bleu([segment], config)


def segments_from_lines(
    candidate_lines: Sequence[str],
    reference_line_sets: Sequence[Sequence[str]],
    mode: str = DEFAULT_MODE,
) -> list[SegmentPair]:
    """Build segments from parallel line lists (one reference list per reference file)."""
    if not reference_line_sets:
        raise ConfigurationError("need at least one reference line set")
    for i, ref_lines in enumerate(reference_line_sets):
        if len(ref_lines) != len(candidate_lines):
            raise DataError(
                f"reference set {i} has {len(ref_lines)} lines, candidates have {len(candidate_lines)}"
            )
    segments = []
    for i, cand in enumerate(candidate_lines):
        refs = tuple(tokenize(ref_lines[i], mode) for ref_lines in reference_line_sets)
        segments.append(SegmentPair(tokenize(cand, mode), refs))
    return segments
