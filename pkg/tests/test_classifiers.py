from dataclasses import replace

import numpy as np
import pytest

from tests.conftest import make_doc, separable_corpus
from vivada.classifiers import (
    CnnClassifier,
    HanClassifier,
    LmClassifier,
    LmModel,
    TfIdfClassifier,
    build_classifier,
    calibrate_threshold,
    candidate_thresholds,
    cnn_features,
    cnn_forward,
    han_forward,
    init_cnn_params,
    init_han_params,
    load_classifier,
    load_lexicon,
    lm_score,
    lm_train,
    tfidf_score,
    tfidf_train,
)
from vivada.classifiers.cnn import cnn_logits
from vivada.classifiers.han import han_graph
from vivada.config import CnnConfig, EncodingLimits, HanConfig, ModelSettings, TfIdfConfig, TrainConfig
from vivada.errors import DataError, DomainError, IntegrityError, UsageError
from vivada.evaluation import prf
from vivada.models import Label, ModelKind
from vivada.tensor import Checkpoint, Graph, cross_entropy, grad_check, write_checkpoint
from vivada.text import EmbeddingTable, build_vocabulary, write_embeddings

SETTINGS = ModelSettings(
    vocabulary={"min_freq": 1},
    limits={"max_sentences": 5, "max_words": 10, "max_tokens": 24},
    cnn={"windows": [1, 2], "filters": 8, "embedding_dim": 8, "dropout": 0.0},
    han={"hidden": 4, "embedding_dim": 8, "dropout": 0.0},
    train={"epochs": 3, "batch_size": 4, "learning_rate": 0.05},
)


def trained(kind: ModelKind, docs, seed: int = 0, **train):
    classifier = build_classifier(kind, SETTINGS, docs, np.random.default_rng(seed))
    classifier.fit(docs, config=TrainConfig.from_dict({**SETTINGS.train, "seed": seed, **train}))
    return classifier


# -- CNN --------------------------------------------------------------------


def test_cnn_with_zero_parameters_is_undecided(rng):
    config = CnnConfig(windows=(2, 3), filters=4, embedding_dim=5)
    params = {k: np.zeros_like(v) for k, v in init_cnn_params(rng, np.ones((6, 5)), config).items()}
    assert np.allclose(cnn_forward([2, 3, 4, 5], params, config), [0.5, 0.5])


def test_cnn_pooling_finds_a_trigram_anywhere():
    config = CnnConfig(windows=(3,), filters=1, embedding_dim=6, dropout=0.0)
    embedding = np.eye(6)
    embedding[0] = 0.0
    params = init_cnn_params(np.random.default_rng(0), embedding, config)
    params["conv3.W"] = np.stack([embedding[2], embedding[3], embedding[4]])[:, :, None].astype(np.float32)
    params["conv3.b"] = np.zeros(1, dtype=np.float32)

    for tokens in ([2, 3, 4, 5, 5, 5], [5, 5, 5, 2, 3, 4], [5, 2, 3, 4, 5, 0]):
        pooled = cnn_features(Graph(params, dtype=np.float64), tokens, config).value
        assert pooled[0] == pytest.approx(3.0)


def _scalar_cnn(tokens, params, config):
    embedding = params["embedding"].astype(np.float64)
    features = []
    for h in config.windows:
        padded = list(tokens) + [0] * max(0, h - len(tokens))
        W, b = params[f"conv{h}.W"], params[f"conv{h}.b"]
        for f in range(config.filters):
            best = -np.inf
            for p in range(len(padded) - h + 1):
                total = b[f]
                for k in range(h):
                    for d in range(embedding.shape[1]):
                        total += embedding[padded[p + k], d] * W[k, d, f]
                best = max(best, max(total, 0.0))
            features.append(best)
    logits = np.array(features) @ params["dense.W"] + params["dense.b"]
    e = np.exp(logits - logits.max())
    return e / e.sum()


def test_cnn_matches_scalar_loops(rng):
    config = CnnConfig(windows=(2, 3), filters=3, embedding_dim=4, dropout=0.5)
    params = init_cnn_params(rng, rng.uniform(-0.5, 0.5, size=(7, 4)), config)
    params["embedding"][0] = 0.0
    tokens = [2, 5, 6, 1, 3]
    assert np.allclose(cnn_forward(tokens, params, config), _scalar_cnn(tokens, params, config), atol=1e-5)
    # a single token is padded out to one full window
    assert np.allclose(cnn_forward([4], params, config), _scalar_cnn([4], params, config), atol=1e-5)


def test_cnn_grad_check(rng):
    config = CnnConfig(windows=(2, 3), filters=2, embedding_dim=3, dropout=0.0)
    params = init_cnn_params(rng, rng.normal(size=(6, 3)), config)
    tokens = [2, 3, 5, 4, 1]
    report = grad_check(lambda g: cross_entropy(cnn_logits(g, tokens, config), 1), params)
    assert report.passed, report.failing()


def test_cnn_score_ignores_the_token_limit_of_short_documents(rng):
    vocab = build_vocabulary(["alpha beta gamma"], min_freq=1)
    config = CnnConfig(windows=(2,), filters=3, embedding_dim=4, dropout=0.0)
    embedding = rng.uniform(0.1, 1.0, size=(len(vocab), 4))
    params = init_cnn_params(rng, embedding, config)
    params["embedding"][0] = 0.0
    # pad windows would pool relu(b) = 1, text windows stay below 1
    params["conv2.W"] = -np.abs(params["conv2.W"]) - 0.1
    params["conv2.b"] = np.ones(3, dtype=np.float32)
    doc = make_doc("http://e.example.com/1", "alpha beta gamma")

    scores = [
        CnnClassifier(vocab, params, config, EncodingLimits(max_tokens=n)).score_document(doc)[0]
        for n in (3, 24, 400)
    ]
    assert scores[0] == scores[1] == scores[2]


# -- HAN --------------------------------------------------------------------


def _han(rng, hidden=3, dim=4, vocab=8):
    config = HanConfig(hidden=hidden, embedding_dim=dim, dropout=0.0)
    return config, init_han_params(rng, rng.uniform(-0.5, 0.5, size=(vocab, dim)), config)


def test_han_singleton_attention_is_one(rng):
    config, params = _han(rng)
    out = han_forward([[3]], params, config)
    assert out.word_attention[0].tolist() == [1.0]
    assert out.sentence_attention.tolist() == [1.0]
    assert np.isclose(out.probabilities.sum(), 1.0)


def test_han_attention_distributions_sum_to_one(rng):
    config, params = _han(rng)
    for _ in range(100):
        n = int(rng.integers(1, 5))
        sentences = [rng.integers(1, 8, size=int(rng.integers(1, 7))).tolist() for _ in range(n)]
        out = han_forward(sentences, params, config)
        assert all(abs(row.sum() - 1.0) < 1e-6 for row in out.word_attention)
        assert [len(row) for row in out.word_attention] == [len(s) for s in sentences]
        assert abs(out.sentence_attention.sum() - 1.0) < 1e-6


def test_han_identical_sentences_get_identical_word_attention(rng):
    config, params = _han(rng)
    out = han_forward([[2, 3, 4], [5, 6], [2, 3, 4]], params, config)
    assert np.array_equal(out.word_attention[0], out.word_attention[2])


def test_han_rejects_empty_input(rng):
    config, params = _han(rng)
    with pytest.raises(DomainError):
        han_forward([], params, config)


def test_han_grad_check(rng):
    config, params = _han(rng, hidden=2, dim=3, vocab=5)
    sentences = [[2, 3, 4], [3, 1]]

    def build(g):
        logits, _, _ = han_graph(g, sentences, config)
        return cross_entropy(logits, 0)

    report = grad_check(build, params)
    assert report.passed, report.failing()


# -- neural training --------------------------------------------------------


@pytest.mark.parametrize("kind", [ModelKind.CNN, ModelKind.HAN])
def test_zero_epochs_leave_initialisation_unchanged(kind, corpus):
    classifier = build_classifier(kind, SETTINGS, corpus, np.random.default_rng(1))
    before = {k: v.copy() for k, v in classifier.params.items()}
    log = classifier.fit(corpus, config=TrainConfig(epochs=0))
    assert log.epochs == []
    assert all(np.array_equal(before[k], classifier.params[k]) for k in before)


def test_training_is_deterministic(corpus):
    a = trained(ModelKind.CNN, corpus, seed=5)
    b = trained(ModelKind.CNN, corpus, seed=5)
    assert a.training_log.to_record() == b.training_log.to_record()
    assert all(np.array_equal(a.params[k], b.params[k]) for k in a.params)


def test_padding_row_stays_zero(corpus):
    classifier = trained(ModelKind.CNN, corpus)
    assert not classifier.params["embedding"][0].any()


@pytest.mark.parametrize("kind,epochs", [(ModelKind.CNN, 20), (ModelKind.HAN, 12)])
def test_neural_models_learn_a_separable_corpus(kind, epochs):
    docs = separable_corpus(32, seed=3)
    classifier = trained(kind, docs, epochs=epochs, batch_size=8)
    held_out = separable_corpus(16, seed=4)
    assert prf(classifier.predict(held_out)).f1 >= 0.9


def test_early_stopping_keeps_the_best_validation_epoch():
    docs = separable_corpus(16, seed=1)
    train, validation = docs[:12], docs[12:]
    classifier = build_classifier(ModelKind.CNN, SETTINGS, train, np.random.default_rng(2))
    log = classifier.fit(train, validation, TrainConfig(epochs=6, patience=1, batch_size=4, learning_rate=0.05))
    f1s = [e.val_f1 for e in log.epochs]
    assert log.best_epoch == 1 + f1s.index(max(f1s))
    assert len(log.epochs) == 6 or log.stopped_early
    # the best epoch's parameters are the ones left in place
    assert prf(classifier.predict(validation)).f1 == pytest.approx(max(f1s))


def test_empty_documents_are_scored_neutral_and_negative(corpus):
    classifier = trained(ModelKind.CNN, corpus, epochs=1)
    blank = make_doc("http://en.wikipedia.org/wiki/Blank", " ... ", Label.CONTROVERSIAL)
    preds = classifier.predict([blank, *corpus[:2]])
    assert preds.scores[0] == 0.5
    assert preds.empty.tolist() == [True, False, False]
    assert not preds.predicted[0]


def test_prediction_is_repeatable_and_batch_invariant(corpus):
    classifier = trained(ModelKind.HAN, corpus, epochs=1)
    once = classifier.predict(corpus)
    again = classifier.predict(corpus)
    threaded = classifier.predict(corpus, workers=3)
    singles = [classifier.predict([d]).scores[0] for d in corpus]
    assert np.array_equal(once.scores, again.scores)
    assert np.array_equal(once.scores, threaded.scores)
    assert np.array_equal(once.scores, singles)


# -- tf-idf -----------------------------------------------------------------


def test_tfidf_features_by_hand():
    docs = [
        make_doc("http://e.example.com/1", "a a b", Label.CONTROVERSIAL),
        make_doc("http://e.example.com/2", "b c", Label.NON_CONTROVERSIAL),
    ]
    model = tfidf_train(docs, TfIdfConfig(iterations=1))
    assert model.terms == ["a", "b", "c"]
    assert model.idf[1] == pytest.approx(1.0)
    assert model.idf[2] == pytest.approx(1.405, abs=1e-3)
    x = model.features(["b c"]).toarray()[0]
    assert x[1] == pytest.approx(0.580, abs=1e-3)
    assert x[2] == pytest.approx(0.815, abs=1e-3)
    assert np.linalg.norm(x) == pytest.approx(1.0)


def test_tfidf_rejects_a_single_class():
    docs = [make_doc(f"http://e.example.com/{i}", "words here") for i in range(3)]
    with pytest.raises(UsageError):
        tfidf_train(docs)
    with pytest.raises(UsageError):
        tfidf_train([])


def test_tfidf_separates_a_small_corpus():
    docs = [
        make_doc("http://e.example.com/1", "war fight", Label.CONTROVERSIAL),
        make_doc("http://e.example.com/2", "war protest", Label.CONTROVERSIAL),
        make_doc("http://e.example.com/3", "garden tree", Label.NON_CONTROVERSIAL),
        make_doc("http://e.example.com/4", "garden flower", Label.NON_CONTROVERSIAL),
    ]
    classifier = TfIdfClassifier()
    classifier.fit(docs)
    preds = classifier.predict(docs)
    assert preds.predicted.tolist() == [True, True, False, False]

    seen = make_doc("http://e.example.com/5", "war")
    unseen = make_doc("http://e.example.com/6", "war zebra")
    assert tfidf_score(seen, classifier.model) == pytest.approx(tfidf_score(unseen, classifier.model))
    assert classifier.score_document(make_doc("http://e.example.com/7", "!!")) == (0.0, True)
    assert classifier.score_document(make_doc("http://e.example.com/8", "zebra okapi")) == (0.0, True)


# -- language model ---------------------------------------------------------


def _lm_docs(positive: str, negative: str):
    return [
        make_doc("http://e.example.com/p", positive, Label.CONTROVERSIAL),
        make_doc("http://e.example.com/n", negative, Label.NON_CONTROVERSIAL),
    ]


def test_lm_identical_classes_score_zero():
    model = lm_train(_lm_docs("a b c", "a b c"), mu=10.0)
    for text in ("a", "b c", "c c a"):
        assert lm_score(make_doc("http://e.example.com/x", text), model) == 0.0


def test_lm_distributions_are_normalised():
    model = lm_train(_lm_docs("a a b", "b c"), mu=3.0)
    assert model.theta(model.positive).sum() == pytest.approx(1.0, abs=1e-9)
    assert model.theta(model.negative).sum() == pytest.approx(1.0, abs=1e-9)
    assert np.all(model.theta(model.negative) > 0)


def test_lm_antisymmetry_and_monotonicity():
    model = lm_train(_lm_docs("a b", "b c"), mu=50.0)
    doc = make_doc("http://e.example.com/x", "a b c b")
    assert lm_score(doc, model.swapped()) == pytest.approx(-lm_score(doc, model))
    assert lm_score(make_doc("http://e.example.com/y", "a"), model) > 0


def test_lm_score_by_hand():
    # mu = 1, background a: 2/3, b: 1/3
    model = lm_train(_lm_docs("a a", "b"), mu=1.0)
    expected = (np.log((8 / 9) / (1 / 3)) + np.log((1 / 9) / (2 / 3))) / 2
    assert lm_score(make_doc("http://e.example.com/x", "a b"), model) == pytest.approx(expected)


def test_lm_errors_and_empty_documents():
    with pytest.raises(UsageError):
        lm_train(_lm_docs("a", "b"), mu=0.0)
    with pytest.raises(UsageError):
        lm_train(_lm_docs("a", "b")[:1])
    classifier = LmClassifier()
    classifier.fit(_lm_docs("a", "b"))
    assert classifier.score_document(make_doc("http://e.example.com/x", "zzz")) == (0.0, True)


def test_lm_lexicon_filters_controversial_documents(tmp_path):
    lexicon_path = tmp_path / "lexicon.txt"
    lexicon_path.write_text("# controversy terms\n\nprotest\nDebate\n", encoding="utf-8")
    lexicon = load_lexicon(lexicon_path)
    assert lexicon == frozenset({"protest", "debate"})

    docs = [
        make_doc("http://e.example.com/1", "protest march", Label.CONTROVERSIAL),
        make_doc("http://e.example.com/2", "quiet march", Label.CONTROVERSIAL),
        make_doc("http://e.example.com/3", "garden", Label.NON_CONTROVERSIAL),
    ]
    model = lm_train(docs, mu=5.0, lexicon=lexicon)
    assert "quiet" not in model.index
    assert model.positive[model.index["protest"]] == 1

    classifier = build_classifier(
        ModelKind.LM, ModelSettings(lm={"lexicon": str(lexicon_path)}), docs, np.random.default_rng(0)
    )
    assert classifier.name == "lm-lexicon"

    (tmp_path / "empty.txt").write_text("# nothing\n", encoding="utf-8")
    with pytest.raises(UsageError):
        load_lexicon(tmp_path / "empty.txt")


def test_lm_model_rejects_mismatched_tables():
    with pytest.raises(IntegrityError):
        LmModel(terms=["a", "b"], positive=[1.0], negative=[1.0, 2.0], mu=1.0)


# -- thresholds -------------------------------------------------------------


def _sweep(scores, labels):
    scores, labels = np.asarray(scores), np.asarray(labels)
    best, best_f1 = None, -1.0
    for threshold in sorted(candidate_thresholds(scores)):
        predicted = scores >= threshold
        tp = np.sum(predicted & (labels == 1))
        fp = np.sum(predicted & (labels == 0))
        fn = np.sum(~predicted & (labels == 1))
        f1 = 2 * tp / (2 * tp + fp + fn) if tp else 0.0
        if f1 > best_f1:
            best, best_f1 = threshold, f1
    return best


def test_calibration_matches_exhaustive_sweep():
    scores = [0.1, 0.4, 0.35, 0.8, 0.7, 0.2]
    labels = [0, 0, 1, 1, 1, 0]
    assert calibrate_threshold(scores, labels) == pytest.approx(_sweep(scores, labels))


def test_calibration_picks_lowest_threshold_in_the_gap():
    assert calibrate_threshold([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1]) == pytest.approx(0.5)


def test_calibration_degenerate_inputs():
    assert calibrate_threshold([0.5, 0.5, 0.5], [1, 0, 0]) == 0.5
    with pytest.raises(UsageError):
        calibrate_threshold([0.1, 0.9], [1, 1])


def test_calibrated_threshold_is_used_for_prediction(corpus):
    classifier = TfIdfClassifier()
    classifier.fit(corpus, corpus, TrainConfig(calibrate=True))
    assert classifier.threshold_mode == "calibrated"
    preds = classifier.predict(corpus)
    assert preds.threshold == classifier.threshold
    assert np.array_equal(preds.predicted, preds.scores >= classifier.threshold)


# -- persistence ------------------------------------------------------------


@pytest.mark.parametrize("kind", list(ModelKind))
def test_checkpoint_round_trip_predicts_identically(kind, corpus, tmp_path):
    classifier = trained(kind, corpus, epochs=1)
    classifier.threshold = 0.25
    path = tmp_path / f"{kind.value}.ctrv"
    classifier.save(path)
    back = load_classifier(path)
    assert type(back) is type(classifier)
    assert back.name == classifier.name
    assert back.threshold == 0.25
    a, b = classifier.predict(corpus), back.predict(corpus)
    assert np.allclose(a.scores, b.scores, atol=1e-6)
    assert np.array_equal(a.predicted, b.predicted)


def test_checkpoint_with_unknown_kind(tmp_path):
    path = tmp_path / "x.ctrv"
    write_checkpoint(path, Checkpoint("svm-rbf", {}, "", {}))
    with pytest.raises(DataError):
        load_classifier(path)


def test_checkpoint_vocabulary_hash_is_checked(corpus, tmp_path):
    classifier = trained(ModelKind.CNN, corpus, epochs=0)
    checkpoint = classifier.to_checkpoint()
    tokens = checkpoint.extra["vocabulary"]
    checkpoint.extra["vocabulary"] = [*tokens[:2], *reversed(tokens[2:])]
    path = tmp_path / "cnn.ctrv"
    write_checkpoint(path, checkpoint)
    with pytest.raises(IntegrityError):
        load_classifier(path)


def test_build_classifier_uses_pretrained_embeddings(corpus, tmp_path):
    vocab = build_vocabulary(corpus, min_freq=1)
    table = EmbeddingTable.random(vocab, 8, np.random.default_rng(9))
    write_embeddings(tmp_path / "vectors.bin", table)
    settings = replace(SETTINGS, embeddings=str(tmp_path / "vectors.bin"))
    classifier = build_classifier(ModelKind.CNN, settings, corpus, np.random.default_rng(0))
    assert isinstance(classifier, CnnClassifier)
    assert np.array_equal(classifier.params["embedding"][2:], table.matrix[2:])
    assert isinstance(build_classifier(ModelKind.HAN, SETTINGS, corpus, np.random.default_rng(0)), HanClassifier)


# -- vocabulary drift -------------------------------------------------------

SYNONYMS = ["quarrel", "rally", "argument", "clash", "outrage", "allegation"]
HOT = ["dispute", "protest", "debate", "conflict", "scandal", "accusation"]
CALM = ["garden", "flower", "recipe", "river", "museum", "bridge"]
SHARED = ["the", "city", "people", "year"]


def clustered_embeddings(path, dim: int = 8):
    """Hot words and their synonyms share one cluster, calm words another."""
    rng = np.random.default_rng(5)
    rows = {}
    for words, axis in ((HOT + SYNONYMS, slice(0, dim // 2)), (CALM, slice(dim // 2, dim)), (SHARED, None)):
        for word in words:
            row = rng.uniform(-0.05, 0.05, size=dim)
            if axis is not None:
                row[axis] += 1.0
            rows[word] = row
    vocab = build_vocabulary([" ".join(rows)], min_freq=1)
    matrix = np.zeros((len(vocab), dim))
    for word, row in rows.items():
        matrix[vocab.index[word]] = row
    write_embeddings(path, EmbeddingTable(vocabulary=vocab, matrix=matrix))


def drifted_corpus(n: int, seed: int):
    """Controversial pages use only words absent from training."""
    rng = np.random.default_rng(seed)
    docs = []
    for i in range(n):
        positive = i % 2 == 0
        words = rng.choice(SYNONYMS if positive else CALM, size=12).tolist()
        text = " ".join(words[:6]) + ". " + " ".join(words[6:]) + "."
        label = Label.CONTROVERSIAL if positive else Label.NON_CONTROVERSIAL
        docs.append(make_doc(f"http://en.wikipedia.org/wiki/Later_{i}", text, label, year=2009))
    return docs


def test_pretrained_neighbours_keep_neural_recall_under_drift(tmp_path):
    clustered_embeddings(tmp_path / "vectors.txt")
    settings = replace(
        SETTINGS,
        embeddings=str(tmp_path / "vectors.txt"),
        vocabulary={"min_freq": 1, "include_pretrained": True},
    )
    train = separable_corpus(32, seed=3)
    within, between = separable_corpus(16, seed=4), drifted_corpus(16, seed=4)

    recall = {}
    for kind, epochs in ((ModelKind.CNN, 20), (ModelKind.HAN, 12), (ModelKind.TFIDF, 0), (ModelKind.LM, 0)):
        classifier = build_classifier(kind, settings, train, np.random.default_rng(0))
        classifier.fit(train, config=TrainConfig.from_dict({**settings.train, "epochs": epochs, "batch_size": 8}))
        recall[kind] = prf(classifier.predict(within)).recall, prf(classifier.predict(between)).recall

    # no controversial word survives the drift, so lexical models see empty pages
    assert recall[ModelKind.TFIDF][1] == recall[ModelKind.LM][1] == 0.0
    drops = {kind: w - b for kind, (w, b) in recall.items()}
    assert max(drops[ModelKind.CNN], drops[ModelKind.HAN]) < min(drops[ModelKind.TFIDF], drops[ModelKind.LM])
