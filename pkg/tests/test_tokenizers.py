import pytest

from mteval.errors import ConfigurationError
from mteval.tokenizers import TokenizedSentence, registered_modes, tokenize


def test_whitespace_collapses_runs():
    assert tokenize("a b  c").tokens == ("a", "b", "c")


def test_empty_line_gives_zero_tokens():
    assert tokenize("").tokens == ()
    assert tokenize("   \t ").tokens == ()


def test_korean_sentence_splits_into_seven_words():
    sentence = tokenize("자동차도 비교적 고가 브랜드를 이용하고 있다는 전언이다.")
    assert len(sentence) == 7


def test_unknown_mode_rejected():
    with pytest.raises(ConfigurationError):
        tokenize("hello", "characters")


def test_mode_recorded_on_sentence():
    assert tokenize("hi", "whitespace").tokenizer_mode == "whitespace"
    assert tokenize("hi", "punct-split").tokenizer_mode == "punct-split"


def test_deterministic():
    line = "Der Hund, der bellt."
    for mode in registered_modes():
        assert tokenize(line, mode) == tokenize(line, mode)


def test_punct_split_peels_edges_only():
    assert tokenize("Hello, world!", "punct-split").tokens == ("Hello", ",", "world", "!")
    assert tokenize("don't stop", "punct-split").tokens == ("don't", "stop")
    assert tokenize('"Quoted..."', "punct-split").tokens == ('"', "Quoted", ".", ".", ".", '"')


def test_lowercase_suffix():
    assert tokenize("The CAT", "whitespace+lower").tokens == ("the", "cat")
    assert tokenize("Ab!", "punct-split+lower").tokens == ("ab", "!")


def test_no_empty_tokens_allowed():
    with pytest.raises(ConfigurationError):
        TokenizedSentence(("a", "", "b"))
