"""Parallel corpus loading, deterministic splitting and eval-set sampling.

Splits and samples are pure functions of (input bytes, spec, seed); the
generator behind them is Python's Mersenne Twister (``random.Random``),
whose identity is stamped into the provenance record so a split can be
reproduced elsewhere.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import ConfigurationError, DataError

logger = logging.getLogger(__name__)

GENERATOR_ID = "python-random-mt19937/fisher-yates-shuffle"


@dataclass(frozen=True)
class CorpusOrigin:
    source_path: str
    target_path: str
    source_sha256: str
    target_sha256: str
    source_blank_lines: int = 0
    target_blank_lines: int = 0

    def as_dict(self) -> dict:
        return {
            "source": {
                "path": self.source_path,
                "sha256": self.source_sha256,
                "blank_lines": self.source_blank_lines,
            },
            "target": {
                "path": self.target_path,
                "sha256": self.target_sha256,
                "blank_lines": self.target_blank_lines,
            },
        }


@dataclass(frozen=True)
class ParallelCorpus:
    """Line-aligned (source, target) sentence pairs, input order preserved."""

    pairs: tuple[tuple[str, str], ...]
    origin: CorpusOrigin | None = None

    def __len__(self) -> int:
        return len(self.pairs)

    def source_lines(self) -> list[str]:
        return [s for s, _ in self.pairs]

    def target_lines(self) -> list[str]:
        return [t for _, t in self.pairs]


@dataclass(frozen=True)
class SplitSpec:
    """Three-way split request: either ratios or exact counts, plus a seed."""

    seed: int
    ratios: tuple[float, float, float] | None = None
    counts: tuple[int, int, int] | None = None
    discard_remainder: bool = False

    def __post_init__(self) -> None:
        if (self.ratios is None) == (self.counts is None):
            raise ConfigurationError("give exactly one of ratios or counts")
        if self.ratios is not None:
            if any(r <= 0 for r in self.ratios):
                raise ConfigurationError("ratios must be positive")
            total = sum(self.ratios)
            normalized = tuple(r / total for r in self.ratios)
            if abs(sum(normalized) - 1.0) > 1e-9:
                raise ConfigurationError("ratios must normalize to 1 within 1e-9")
            object.__setattr__(self, "ratios", normalized)
        if self.counts is not None and any(n < 0 for n in self.counts):
            raise ConfigurationError("counts must be non-negative")

    def as_dict(self) -> dict:
        if self.ratios is not None:
            mode = {"kind": "ratio", "ratios": list(self.ratios)}
        else:
            mode = {
                "kind": "counts",
                "counts": list(self.counts or ()),
                "discard_remainder": self.discard_remainder,
            }
        return {"seed": self.seed, "mode": mode, "generator": GENERATOR_ID}


def parse_ratio(text: str) -> tuple[float, float, float]:
    """Parse ``"98:1:1"`` into a ratio triple (normalized later by SplitSpec)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigurationError(f"ratio must have three parts, got {text!r}")
    try:
        values = tuple(float(p) for p in parts)
    except ValueError:
        raise ConfigurationError(f"ratio parts must be numbers, got {text!r}") from None
    return values  # type: ignore[return-value]


def _read_lines(path: Path) -> tuple[list[str], int]:
    """Decode a text file line by line so errors can name the offending line."""
    raw = path.read_bytes()
    chunks = raw.split(b"\n")
    if chunks and chunks[-1] == b"":
        chunks.pop()
    lines: list[str] = []
    blanks = 0
    for lineno, chunk in enumerate(chunks, start=1):
        if chunk.endswith(b"\r"):
            chunk = chunk[:-1]
        try:
            line = chunk.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise DataError(f"{path}: line {lineno} is not valid UTF-8 ({exc})") from exc
        if not line.strip():
            blanks += 1
        lines.append(line)
    return lines, blanks


def read_lines(path) -> list[str]:
    """Read a UTF-8 line file; decoding errors name the offending line."""
    path = Path(path)
    if not path.is_file():
        raise DataError(f"no such file: {path}")
    lines, _ = _read_lines(path)
    return lines


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def load_parallel(source_path, target_path) -> ParallelCorpus:
    """Zip two line-aligned files into a corpus; line counts must match."""
    source_path, target_path = Path(source_path), Path(target_path)
    for path in (source_path, target_path):
        if not path.is_file():
            raise DataError(f"no such file: {path}")
    source_lines, source_blanks = _read_lines(source_path)
    target_lines, target_blanks = _read_lines(target_path)
    if len(source_lines) != len(target_lines):
        raise DataError(
            f"line count mismatch: {source_path} has {len(source_lines)}, "
            f"{target_path} has {len(target_lines)}"
        )
    if source_blanks or target_blanks:
        logger.warning(
            "blank lines kept as empty sentences: %d in %s, %d in %s",
            source_blanks, source_path, target_blanks, target_path,
        )
    origin = CorpusOrigin(
        source_path=str(source_path),
        target_path=str(target_path),
        source_sha256=_sha256(source_path),
        target_sha256=_sha256(target_path),
        source_blank_lines=source_blanks,
        target_blank_lines=target_blanks,
    )
    return ParallelCorpus(tuple(zip(source_lines, target_lines)), origin)


def _largest_remainder(total: int, ratios: Sequence[float]) -> list[int]:
    # Ties go to the earlier bucket (train > valid > test).
    floors = [math.floor(total * r) for r in ratios]
    remainders = [total * r - f for r, f in zip(ratios, floors)]
    leftover = total - sum(floors)
    order = sorted(range(len(ratios)), key=lambda i: (-remainders[i], i))
    for i in order[:leftover]:
        floors[i] += 1
    return floors


def resolve_sizes(spec: SplitSpec, corpus_size: int) -> tuple[int, int, int, int]:
    """Concrete (train, valid, test, discarded) sizes for a corpus."""
    if spec.ratios is not None:
        train, valid, test = _largest_remainder(corpus_size, spec.ratios)
        return train, valid, test, 0
    train, valid, test = spec.counts  # type: ignore[misc]
    requested = train + valid + test
    if requested > corpus_size:
        raise DataError(
            f"requested {requested} pairs but corpus has only {corpus_size}"
        )
    if requested < corpus_size and not spec.discard_remainder:
        raise DataError(
            f"counts cover {requested} of {corpus_size} pairs; "
            "pass discard_remainder to drop the rest"
        )
    return train, valid, test, corpus_size - requested


def split(
    corpus: ParallelCorpus, spec: SplitSpec
) -> tuple[ParallelCorpus, ParallelCorpus, ParallelCorpus]:
    """Partition the corpus by a seeded index permutation.

    The same seed and input always give bit-identical splits. Outputs keep
    the permuted order (training data comes out shuffled).
    """
    train_n, valid_n, test_n, _ = resolve_sizes(spec, len(corpus))
    indices = list(range(len(corpus)))
    random.Random(spec.seed).shuffle(indices)

    def take(start: int, count: int) -> ParallelCorpus:
        chosen = indices[start : start + count]
        return ParallelCorpus(tuple(corpus.pairs[i] for i in chosen), corpus.origin)

    return (
        take(0, train_n),
        take(train_n, valid_n),
        take(train_n + valid_n, test_n),
    )


def sample_eval_set(corpus: ParallelCorpus, k: int, seed: int) -> ParallelCorpus:
    """Seeded sample of k pairs without replacement, original order preserved."""
    if not 1 <= k <= len(corpus):
        raise DataError(f"sample size {k} out of range 1..{len(corpus)}")
    chosen = sorted(random.Random(seed).sample(range(len(corpus)), k))
    return ParallelCorpus(tuple(corpus.pairs[i] for i in chosen), corpus.origin)


def _write_pair_files(part: ParallelCorpus, directory: Path, stem: str) -> dict:
    src = directory / f"{stem}.src"
    tgt = directory / f"{stem}.tgt"
    src.write_text("".join(line + "\n" for line in part.source_lines()), encoding="utf-8")
    tgt.write_text("".join(line + "\n" for line in part.target_lines()), encoding="utf-8")
    return {"source": src.name, "target": tgt.name, "pairs": len(part)}


def write_split(
    corpus: ParallelCorpus, spec: SplitSpec, output_dir
) -> dict:
    """Split and write six line files plus a provenance document.

    The provenance (seed, mode, generator, sizes, input checksums) contains
    no timestamps, so identical inputs give byte-identical output trees.
    """
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    train, valid, test = split(corpus, spec)
    _, _, _, discarded = resolve_sizes(spec, len(corpus))
    provenance = {
        **spec.as_dict(),
        "corpus_size": len(corpus),
        "sizes": {
            "train": len(train),
            "valid": len(valid),
            "test": len(test),
            "discarded": discarded,
        },
        "inputs": corpus.origin.as_dict() if corpus.origin else None,
        "outputs": {
            "train": _write_pair_files(train, output_dir, "train"),
            "valid": _write_pair_files(valid, output_dir, "valid"),
            "test": _write_pair_files(test, output_dir, "test"),
        },
    }
    (output_dir / "provenance.json").write_text(
        json.dumps(provenance, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )
    return provenance


def write_sample(corpus: ParallelCorpus, k: int, seed: int, output_dir, stem: str = "sample") -> dict:
    """Sample and write one src/tgt file pair plus a provenance document."""
    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    sample = sample_eval_set(corpus, k, seed)
    provenance = {
        "seed": seed,
        "k": k,
        "generator": GENERATOR_ID,
        "corpus_size": len(corpus),
        "inputs": corpus.origin.as_dict() if corpus.origin else None,
        "outputs": {stem: _write_pair_files(sample, output_dir, stem)},
    }
    (output_dir / f"{stem}.provenance.json").write_text(
        json.dumps(provenance, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
    )
    return provenance
