import numpy as np
import pytest

from vivada.config import EncodingLimits
from vivada.errors import FormatError, UsageError
from vivada.text import (
    EmbeddingTable,
    Vocabulary,
    build_vocabulary,
    decode,
    encode_text,
    load_embeddings,
    split_sentences,
    tokenize,
    write_embeddings,
)


def test_tokenize_lowercases_and_splits_on_punctuation():
    assert tokenize("Gun-control, in the U.S. (2016)!") == ["gun", "control", "in", "the", "u", "s", "2016"]
    assert tokenize("snake_case") == ["snake", "case"]
    assert tokenize("  ") == []


def test_split_sentences():
    text = "Dr. Smith disagreed. The debate went on!\n\nWas it settled? No"
    assert split_sentences(text) == [
        "Dr. Smith disagreed",
        "The debate went on",
        "Was it settled",
        "No",
    ]


def test_split_sentences_keeps_decimals_together():
    assert split_sentences("It rose 3.5 percent. Then fell.") == ["It rose 3.5 percent", "Then fell"]


def test_split_sentences_ordinary_words_end_sentences():
    assert split_sentences("The answer was no. Then they argued.") == ["The answer was no", "Then they argued"]
    assert split_sentences("A good co. Dec may come.") == ["A good co", "Dec may come"]
    assert split_sentences("See No. 5 and Fig. 2 here.") == ["See No. 5 and Fig. 2 here"]


def test_vocabulary_order_and_reserved_slots():
    vocab = build_vocabulary(["b a a", "c b a", "d"], max_size=5, min_freq=1)
    assert vocab.tokens == ["<pad>", "<oov>", "a", "b", "c"]
    assert vocab.lookup("d") == 1
    assert vocab.lookup("a") == 2
    assert "a" in vocab and "<pad>" not in vocab


def test_vocabulary_min_freq():
    vocab = build_vocabulary(["x x y"], min_freq=2)
    assert vocab.words() == ["x"]


def test_vocabulary_errors():
    with pytest.raises(UsageError):
        build_vocabulary([])
    with pytest.raises(UsageError):
        build_vocabulary(["a"], max_size=1)
    with pytest.raises(ValueError):
        Vocabulary(tokens=["a", "b"])


def test_vocabulary_hash_depends_on_order():
    a = Vocabulary.from_tokens(["<pad>", "<oov>", "x", "y"])
    b = Vocabulary.from_tokens(["<pad>", "<oov>", "y", "x"])
    assert a.hash() != b.hash()


def test_encode_truncates_and_pads():
    vocab = build_vocabulary(["one two three four five six"], min_freq=1)
    limits = EncodingLimits(max_sentences=2, max_words=2, max_tokens=8)
    enc = encode_text("d", "one two three. four five. six.", vocab, limits)
    assert len(enc.sentences) == 2
    assert all(len(s) <= 2 for s in enc.sentences)
    assert enc.length == 6
    assert enc.tokens[6:] == [0, 0]
    assert decode(enc.tokens, vocab) == ["one", "two", "three", "four", "five", "six"]


def test_encode_maps_unknown_words_to_oov():
    vocab = build_vocabulary(["known"], min_freq=1)
    enc = encode_text("d", "known unknown", vocab, EncodingLimits(max_tokens=3))
    assert enc.tokens == [2, 1, 0]


def test_encode_empty_document():
    vocab = build_vocabulary(["word"], min_freq=1)
    enc = encode_text("d", " ... ", vocab, EncodingLimits(max_tokens=4))
    assert enc.empty
    assert enc.sentences == []
    assert enc.tokens == [0, 0, 0, 0]


def test_random_table_zeroes_padding(rng):
    vocab = build_vocabulary(["a b c"], min_freq=1)
    table = EmbeddingTable.random(vocab, 4, rng)
    assert table.matrix.shape == (5, 4)
    assert not table.matrix[0].any()
    assert np.all(np.abs(table.matrix) <= 0.25)


def test_binary_embeddings_round_trip_byte_identical(tmp_path, rng):
    vocab = build_vocabulary(["alpha beta gamma"], min_freq=1)
    table = EmbeddingTable.random(vocab, 3, rng)
    first = tmp_path / "a.bin"
    write_embeddings(first, table)

    back = load_embeddings(first, vocab, dim=3)
    assert back.coverage == 1.0
    assert np.array_equal(back.matrix[2:], table.matrix[2:])

    second = tmp_path / "b.bin"
    write_embeddings(second, back)
    assert first.read_bytes() == second.read_bytes()


def test_text_embeddings_partial_coverage(tmp_path):
    path = tmp_path / "vectors.txt"
    path.write_text("2 2\nalpha 1.0 2.0\nzeta 3.0 4.0\n", encoding="utf-8")
    vocab = build_vocabulary(["alpha beta"], min_freq=1)
    table = load_embeddings(path, vocab, dim=2)
    assert np.array_equal(table.row("alpha"), [1.0, 2.0])
    assert table.coverage == 0.5


def test_embeddings_can_extend_the_vocabulary(tmp_path):
    path = tmp_path / "vectors.txt"
    path.write_text("3 2\nzeta 3.0 4.0\nalpha 1.0 2.0\neta 5.0 6.0\n", encoding="utf-8")
    vocab = build_vocabulary(["alpha beta"], min_freq=1)

    table = load_embeddings(path, vocab, dim=2, extend_to=5)
    assert table.vocabulary.tokens == [*vocab.tokens, "zeta"]
    assert np.array_equal(table.row("zeta"), [3.0, 4.0])
    assert table.coverage == 2 / 3
    assert "eta" not in table.vocabulary

    assert len(load_embeddings(path, vocab, dim=2).vocabulary) == len(vocab)


def test_binary_embeddings_dimension_mismatch(tmp_path, rng):
    vocab = build_vocabulary(["alpha"], min_freq=1)
    path = tmp_path / "v.bin"
    write_embeddings(path, EmbeddingTable.random(vocab, 3, rng))
    with pytest.raises(FormatError) as e:
        load_embeddings(path, vocab, dim=4)
    assert e.value.offset == 0


def test_binary_embeddings_truncated(tmp_path, rng):
    vocab = build_vocabulary(["alpha"], min_freq=1)
    path = tmp_path / "v.bin"
    write_embeddings(path, EmbeddingTable.random(vocab, 3, rng))
    data = path.read_bytes()
    path.write_bytes(data[:-6])
    with pytest.raises(FormatError) as e:
        load_embeddings(path, vocab, dim=3)
    # header "1 3\n" then "alpha " puts the vector at byte 10
    assert e.value.offset == 10


def test_binary_embeddings_reject_undecodable_words(tmp_path):
    vector = np.array([1.0, 2.0], dtype="<f4").tobytes()
    path = tmp_path / "v.bin"
    path.write_bytes(b"2 2\n" + b"alpha " + vector + b"\n" + b"\xff\xfe " + vector + b"\n")
    vocab = build_vocabulary(["alpha"], min_freq=1)
    with pytest.raises(FormatError) as e:
        load_embeddings(path, vocab, dim=2)
    # header (4 bytes) then "alpha " and one vector with its newline (15 bytes)
    assert e.value.offset == 19
