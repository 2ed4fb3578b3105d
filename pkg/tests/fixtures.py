"""Shared test fixtures: the worked scoring example, published score
tables used as workflow fixtures, and two real discrepancy sentence pairs."""

from __future__ import annotations

from mteval.gae import CATEGORIES, GaeAnnotation

# 10 sentences x 9 categories, with the scores each row/column should get.
SAMPLE_GRID = [
    (1, 1, 1, 1, 1, 1, 1, 1, 1),
    (1, 1, 1, 1, 1, 1, 1, 1, 1),
    (1, 0, 1, 0, 1, 1, 1, 1, 0),
    (1, 0, 1, 1, 0, 1, 1, 1, 1),
    (1, 1, 1, 0, 1, 1, 1, 1, 1),
    (1, 0, 1, 1, 1, 1, 1, 1, 1),
    (1, 0, 1, 1, 0, 1, 1, 1, 1),
    (1, 1, 1, 1, 1, 0, 1, 1, 1),
    (1, 0, 1, 1, 1, 1, 1, 1, 1),
    (1, 0, 1, 1, 0, 1, 1, 1, 1),
]
SAMPLE_GRID_CATEGORY_SCORES = (100, 40, 100, 80, 70, 90, 100, 100, 90)
SAMPLE_GRID_SENTENCE_SCORES = (100, 100, 66.66, 77.78, 88.89, 88.89, 77.78, 88.89, 88.89, 77.78)
SAMPLE_GRID_MODEL_SCORE = 85.56

# Published per-model category scores over 50 sentences, and their means.
PUBLISHED_CATEGORY_SCORES = {
    "ko-en": (84, 50, 82, 90, 66, 82, 94, 98, 80),
    "en-ko": (96, 34, 100, 78, 72, 82, 92, 98, 76),
    "de-en": (98, 52, 96, 86, 72, 84, 94, 98, 72),
    "en-de": (86, 30, 96, 86, 70, 74, 94, 92, 76),
}
PUBLISHED_MODEL_SCORES = {
    "ko-en": 80.67,
    "en-ko": 80.89,
    "de-en": 83.56,
    "en-de": 78.22,
}
PUBLISHED_SENTENCE_COUNT = 50

# Published per-checkpoint BLEU series and the expected best checkpoint.
EPOCH_BLEU_SERIES = {
    "ko-en": [
        (10000, 23.35), (20000, 28.19), (30000, 29.80), (40000, 30.09), (50000, 30.71),
        (60000, 30.40), (70000, 30.39), (80000, 30.50), (90000, 30.80), (100000, 30.93),
    ],
    "en-ko": [
        (10000, 8.83), (20000, 11.96), (30000, 12.63), (40000, 12.81), (50000, 13.06),
        (60000, 13.21), (70000, 13.16), (80000, 13.28), (90000, 13.35), (100000, 13.29),
    ],
    "de-en": [
        (10000, 27.25), (20000, 29.74), (30000, 30.42), (40000, 30.59), (50000, 30.64),
        (60000, 30.61), (70000, 30.73), (80000, 30.66), (90000, 30.47), (100000, 30.26),
    ],
    "en-de": [
        (10000, 20.98), (20000, 23.83), (30000, 24.13), (40000, 24.41), (50000, 24.58),
        (60000, 24.63), (70000, 24.24), (80000, 24.33), (90000, 24.18), (100000, 24.02),
    ],
}
EXPECTED_BEST_EPOCH = {
    "ko-en": (100000, 30.93),
    "en-ko": (90000, 13.35),
    "de-en": (70000, 30.73),
    "en-de": (60000, 24.63),
}

# Grammatically flawless translations whose word-level overlap with the
# reference is too small for any 4-gram match: BLEU 0 despite grammar 100.
KO_DISCREPANCY = {
    "source": "It is said they also use relatively expensive automobiles brands.",
    "reference": "자동차도 비교적 고가 브랜드를 이용하고 있다는 전언이다.",
    "candidate": "상대적으로 가격이 비싼 자동차 브랜드도 사용한다고 한다.",
}
DE_DISCREPANCY = {
    "source": "More than 70 countries experienced a decline in freedom.",
    "reference": "In über 70 Ländern ist die Freiheit eingeschränkt worden.",
    "candidate": "Mehr als 70 Länder verzeichneten einen Rückgang der Freiheit.",
}


def grid_annotations(
    grid=SAMPLE_GRID, annotator_id: str = "rater-1", prefix: str = "s"
) -> list[GaeAnnotation]:
    """Annotations for a binary grid, one sentence per row."""
    return [
        GaeAnnotation(
            sentence_id=f"{prefix}{i + 1}",
            annotator_id=annotator_id,
            judgments=dict(zip(CATEGORIES, row)),
            timestamp="2024-01-01T00:00:00+00:00",
        )
        for i, row in enumerate(grid)
    ]
