import json

import pytest

from mteval.errors import ConfigurationError, DataError
from mteval.gae import SessionItem
from mteval.report import (
    ComparisonReport,
    EpochEntry,
    EpochScoreSeries,
    SentenceComparison,
    best_epoch,
    build_report,
    find_discrepancies,
    read_epoch_scores,
    render_report,
    report_from_json,
    score_epoch_dir,
)

from fixtures import (
    DE_DISCREPANCY,
    EPOCH_BLEU_SERIES,
    EXPECTED_BEST_EPOCH,
    KO_DISCREPANCY,
    grid_annotations,
)


def series(label: str) -> EpochScoreSeries:
    return EpochScoreSeries(label, tuple(EpochEntry(e, b) for e, b in EPOCH_BLEU_SERIES[label]))


# --- best epoch -------------------------------------------------------------


@pytest.mark.parametrize("label", sorted(EPOCH_BLEU_SERIES))
def test_best_epoch_on_published_series(label):
    best = best_epoch(series(label))
    assert (best.epoch, best.bleu) == EXPECTED_BEST_EPOCH[label]


def test_best_epoch_single_entry():
    only = EpochScoreSeries("m", (EpochEntry(10, 5.0),))
    assert best_epoch(only) == EpochEntry(10, 5.0)


def test_best_epoch_tie_goes_to_earliest():
    tied = EpochScoreSeries("m", (EpochEntry(1, 7.0), EpochEntry(2, 7.0)))
    assert best_epoch(tied).epoch == 1


def test_best_epoch_invariant_under_appending_lower_scores():
    base = series("ko-en")
    extended = EpochScoreSeries(
        base.model_label, base.entries + (EpochEntry(110000, 1.0),)
    )
    assert best_epoch(extended) == best_epoch(base)


def test_empty_series_rejected():
    with pytest.raises(DataError):
        best_epoch(EpochScoreSeries("m", ()))


def test_series_validates_monotone_epochs_and_range():
    with pytest.raises(DataError):
        EpochScoreSeries("m", (EpochEntry(2, 1.0), EpochEntry(1, 2.0)))
    with pytest.raises(DataError):
        EpochScoreSeries("m", (EpochEntry(1, 101.0),))


def test_read_epoch_scores_csv(tmp_path):
    path = tmp_path / "scores.csv"
    path.write_text("epoch,bleu\n10000,23.35\n20000,28.19\n", encoding="utf-8")
    loaded = read_epoch_scores(path, "ko-en")
    assert loaded.entries == (EpochEntry(10000, 23.35), EpochEntry(20000, 28.19))


def test_read_epoch_scores_rejects_bad_header(tmp_path):
    path = tmp_path / "scores.csv"
    path.write_text("step,score\n1,2\n", encoding="utf-8")
    with pytest.raises(DataError):
        read_epoch_scores(path)


def test_score_epoch_dir(tmp_path):
    reference = tmp_path / "ref.txt"
    reference.write_text("a b c d\ne f g h\n", encoding="utf-8")
    checkpoints = tmp_path / "checkpoints"
    checkpoints.mkdir()
    (checkpoints / "epoch_100.txt").write_text("a b c d\ne f g h\n", encoding="utf-8")
    (checkpoints / "epoch_200.txt").write_text("a b c d\nx x x x\n", encoding="utf-8")
    scored = score_epoch_dir(checkpoints, reference, model_label="demo")
    assert [e.epoch for e in scored.entries] == [100, 200]
    assert scored.entries[0].bleu == 100.0
    assert scored.entries[1].bleu < 100.0
    assert best_epoch(scored).epoch == 100


# --- discrepancies ------------------------------------------------------------


def test_discrepancy_predicate():
    rows = [
        SentenceComparison("zero-bleu-perfect-grammar", 0.0, 100.0),
        SentenceComparison("perfect-both", 100.0, 100.0),
        SentenceComparison("zero-bleu-flawed-grammar", 0.0, 77.78),
    ]
    assert find_discrepancies(rows) == ["zero-bleu-perfect-grammar"]


def test_discrepancies_sorted_by_bleu():
    rows = [
        SentenceComparison("b", 4.0, 100.0),
        SentenceComparison("a", 1.0, 100.0),
    ]
    assert find_discrepancies(rows) == ["a", "b"]


def test_raising_bleu_threshold_only_adds():
    rows = [
        SentenceComparison("a", 1.0, 100.0),
        SentenceComparison("b", 9.0, 100.0),
        SentenceComparison("c", 55.0, 100.0),
    ]
    low = set(find_discrepancies(rows, bleu_threshold=2.0))
    high = set(find_discrepancies(rows, bleu_threshold=10.0))
    assert low <= high


# --- report assembly ------------------------------------------------------------


def fixture_items() -> list[SessionItem]:
    items = [
        SessionItem("s1", KO_DISCREPANCY["source"], KO_DISCREPANCY["reference"], KO_DISCREPANCY["candidate"]),
        SessionItem("s2", DE_DISCREPANCY["source"], DE_DISCREPANCY["reference"], DE_DISCREPANCY["candidate"]),
        SessionItem("s3", "same text", "the very same line here", "the very same line here"),
    ]
    return items


def fixture_report() -> ComparisonReport:
    annotations = grid_annotations([[1] * 9, [1] * 9, [1, 0, 1, 0, 1, 1, 1, 1, 0]])
    return build_report(fixture_items(), annotations, model_label="demo")


def test_build_report_flags_fixture_pairs():
    report = fixture_report()
    assert set(report.discrepancies) == {"s1", "s2"}
    per = {row.sentence_id: row for row in report.per_sentence}
    assert per["s1"].sentence_bleu == 0.0
    assert per["s3"].sentence_bleu == 100.0
    assert per["s3"].gae_sentence_score == pytest.approx(100 * 6 / 9)


def test_report_validates_discrepancy_membership():
    report = fixture_report()
    with pytest.raises(ConfigurationError):
        ComparisonReport(
            model_label=report.model_label,
            corpus_bleu=report.corpus_bleu,
            gae_table=report.gae_table,
            per_sentence=report.per_sentence,
            discrepancies=("missing-id",),
        )


# --- rendering ---------------------------------------------------------------------


def test_markdown_contains_model_score_and_category_rows():
    annotations = grid_annotations()
    items = [
        SessionItem(f"s{i}", "src", "ref line", "ref line") for i in range(1, 11)
    ]
    report = build_report(items, annotations, model_label="demo")
    rendered = render_report(report, "markdown")
    assert "**85.56**" in rendered
    assert "| Vocabulary selection | 40.00 |" in rendered
    lines = rendered.splitlines()
    vocab_row = next(i for i, l in enumerate(lines) if "Vocabulary selection" in l)
    article_row = next(i for i, l in enumerate(lines) if "Article / Particle" in l)
    assert article_row < vocab_row


def test_markdown_marks_empty_sentence_list():
    report = fixture_report()
    empty = ComparisonReport(
        model_label="demo",
        corpus_bleu=report.corpus_bleu,
        gae_table=report.gae_table,
        per_sentence=(),
        discrepancies=(),
    )
    assert "_no sentences_" in render_report(empty, "markdown")


def test_rendering_deterministic():
    report = fixture_report()
    for fmt in ("markdown", "csv", "json"):
        assert render_report(report, fmt) == render_report(report, fmt)


def test_json_round_trips_losslessly():
    report = fixture_report()
    rendered = render_report(report, "json")
    assert report_from_json(rendered) == report
    assert json.loads(rendered)["model_label"] == "demo"


def test_csv_lists_sentences():
    rendered = render_report(fixture_report(), "csv")
    lines = rendered.strip().splitlines()
    assert lines[0] == "sentence_id,sentence_bleu,gae_sentence_score,discrepancy"
    assert len(lines) == 4
    assert lines[1].startswith("s1,0.0,")


def test_unknown_format_rejected():
    with pytest.raises(ConfigurationError):
        render_report(fixture_report(), "html")
