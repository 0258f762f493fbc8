import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from builders import START_MINUTE, dataset_of, minute_row
from data_manager.csv_handler import CSVHandler
from features import (
    FeatureVector, FeatureWindow, Vocabulary, WindowSpec, build_feature_matrix, category_of_name,
    feature_category, feature_names, fit_scaler, fit_vocabulary, scale_features, slide_windows, tfidf_vectorize,
)
from utils.errors import DatasetTooShort, DimensionMismatch, EmptyCorpus, EmptyInput, InvalidSpec


def window(end, processes=(), domains=(), clicks=0, keystrokes=0, background=0, label='u'):
    return FeatureWindow(end, clicks, keystrokes, background, tuple(processes), tuple(domains), label)


def brute_force_tfidf(docs):
    """Textbook smoothed TF-IDF with L2 rows, one token field"""
    vocab = []
    for doc in docs:
        for token in doc:
            if token not in vocab:
                vocab.append(token)
    n = len(docs)
    df = {t: sum(1 for d in docs if t in d) for t in vocab}
    rows = []
    for doc in docs:
        weights = [doc.count(t) * (math.log((1 + n) / (1 + df[t])) + 1) for t in vocab]
        norm = math.sqrt(sum(w * w for w in weights))
        rows.append([w / norm if norm else 0.0 for w in weights])
    return vocab, np.array(rows)


CORPUS = [
    (('a.exe', 'b.exe', 'a.exe'), ('x.example',)),
    (('b.exe',), ('x.example', 'y.example', 'y.example')),
    (('c.exe', 'a.exe'), ()),
    (('a.exe',), ('z.example',)),
]


def test_tfidf_matches_brute_force_on_small_corpus():
    windows = [window(i, p, d) for i, (p, d) in enumerate(CORPUS)]
    vocab_proc = fit_vocabulary(windows, 'process')
    vocab_dom = fit_vocabulary(windows, 'domain')
    X = build_feature_matrix(windows, vocab_proc, vocab_dom).X.toarray()

    proc_tokens, proc_expected = brute_force_tfidf([list(p) for p, _ in CORPUS])
    dom_tokens, dom_expected = brute_force_tfidf([list(d) for _, d in CORPUS])
    assert vocab_proc.tokens == proc_tokens
    assert vocab_dom.tokens == dom_tokens
    n_proc = len(proc_tokens)
    np.testing.assert_allclose(X[:, 3:3 + n_proc], proc_expected, rtol=0, atol=1e-12)
    np.testing.assert_allclose(X[:, 3 + n_proc:], dom_expected, rtol=0, atol=1e-12)


def test_document_frequency_counts_presence():
    vocab = fit_vocabulary([window(0, ('a', 'a', 'a')), window(1, ('b', 'a'))], 'process')
    assert vocab.index == {'a': 0, 'b': 1}
    assert vocab.df == {'a': 2, 'b': 1}
    assert vocab.n_docs == 2


def test_vocabulary_needs_documents():
    with pytest.raises(EmptyCorpus):
        fit_vocabulary([], 'domain')


def test_vocabulary_json_form():
    vocab = fit_vocabulary([window(0, domains=('x', 'y')), window(1, domains=('y',))], 'domain')
    restored = Vocabulary.from_dict(vocab.to_dict())
    assert restored == vocab
    bad = vocab.to_dict()
    bad['tokens'][0]['index'] = 5
    with pytest.raises(InvalidSpec):
        Vocabulary.from_dict(bad)


def test_unseen_tokens_are_dropped():
    train = [window(0, ('a.exe',), ('x.example',))]
    vocab_proc = fit_vocabulary(train, 'process')
    vocab_dom = fit_vocabulary(train, 'domain')
    vector = tfidf_vectorize(window(1, ('new.exe',), ('x.example', 'new.example'), clicks=4),
                             vocab_proc, vocab_dom)
    assert vector.dim == 5
    assert vector.entries == {0: 4.0, 4: 1.0}


def test_numeric_columns_are_window_sums():
    rows = [minute_row(0, clicks=2, keystrokes=5), minute_row(1, domains=('x',)), minute_row(2, clicks=1)]
    windows = slide_windows(dataset_of('u', rows), WindowSpec(2))
    assert [(w.clicks_sum, w.keystrokes_sum, w.background_sum) for w in windows] == [(2, 5, 1), (1, 0, 1)]
    assert [w.end_minute_epoch for w in windows] == [START_MINUTE + 1, START_MINUTE + 2]
    assert windows[0].process_doc == ('c:/apps/editor.exe', 'c:/apps/editor.exe')


@settings(max_examples=30, deadline=None)
@given(n=st.integers(1, 40), t=st.integers(1, 12))
def test_window_count(n, t):
    dataset = dataset_of('u', [minute_row(i * 3) for i in range(n)])
    if n < t:
        with pytest.raises(DatasetTooShort):
            slide_windows(dataset, WindowSpec(t))
    else:
        assert len(slide_windows(dataset, WindowSpec(t))) == n - t + 1


def test_session_mode_restarts_after_gaps():
    rows = [minute_row(i) for i in range(4)] + [minute_row(100 + i) for i in range(3)]
    dataset = dataset_of('u', rows)
    assert len(slide_windows(dataset, WindowSpec(3), mode='rows')) == 5
    assert len(slide_windows(dataset, WindowSpec(3), mode='session', gap_minutes=30)) == 3
    with pytest.raises(InvalidSpec):
        slide_windows(dataset, WindowSpec(3), mode='hourly')


def test_window_spec_validation():
    with pytest.raises(InvalidSpec):
        WindowSpec(0)
    assert WindowSpec(30).standard_size
    assert not WindowSpec(3).standard_size


def test_feature_names_and_categories():
    train = [window(0, ('a.exe', 'b.exe'), ('x.example',))]
    names = feature_names(fit_vocabulary(train, 'process'), fit_vocabulary(train, 'domain'))
    assert names == ['clicks', 'keystrokes', 'background', 'proc:a.exe', 'proc:b.exe', 'dom:x.example']
    assert [feature_category(i, 2) for i in range(6)] == ['numeric'] * 3 + ['process'] * 2 + ['domain']
    assert [category_of_name(n) for n in names] == ['numeric'] * 3 + ['process'] * 2 + ['domain']


def test_feature_vector_keeps_nonzeros_only():
    vector = FeatureVector.from_dense([0.0, 1.5, 0.0, -2.0])
    assert vector.entries == {1: 1.5, 3: -2.0}
    np.testing.assert_array_equal(vector.to_dense(), [0.0, 1.5, 0.0, -2.0])
    with pytest.raises(DimensionMismatch):
        FeatureVector(dim=2, entries={3: 1.0})


def test_maxabs_scaler_fits_training_rows_only():
    train = sp.csr_matrix(np.array([[4.0, 0.0], [2.0, 0.0]]))
    test = sp.csr_matrix(np.array([[8.0, 3.0]]))
    train_s, test_s, scaler = scale_features(train, test, 'maxabs')
    np.testing.assert_allclose(train_s.toarray(), [[1.0, 0.0], [0.5, 0.0]])
    # Constant zero column keeps its raw value scale of 1
    np.testing.assert_allclose(test_s.toarray(), [[2.0, 3.0]])
    assert sp.issparse(train_s)
    with pytest.raises(DimensionMismatch):
        scaler.transform(sp.csr_matrix((1, 3)))


def test_minmax_scaler_maps_constant_columns_to_zero():
    train = np.array([[1.0, 5.0], [3.0, 5.0]])
    scaled = fit_scaler(train, 'minmax').transform(train)
    np.testing.assert_allclose(scaled, [[0.0, 0.0], [1.0, 0.0]])


def test_scaler_rejects_empty_training_and_unknown_modes():
    with pytest.raises(EmptyInput):
        fit_scaler(sp.csr_matrix((0, 3)))
    with pytest.raises(InvalidSpec):
        fit_scaler(np.ones((2, 2)), 'zscore')


def test_scaler_json_form_reproduces_transform():
    train = sp.csr_matrix(np.array([[4.0, -1.0, 0.0], [2.0, 0.5, 0.0]]))
    for mode in ('maxabs', 'minmax'):
        scaler = fit_scaler(train, mode)
        restored = type(scaler).from_dict(scaler.to_dict())
        a, b = scaler.transform(train), restored.transform(train)
        a = a.toarray() if sp.issparse(a) else a
        b = b.toarray() if sp.issparse(b) else b
        np.testing.assert_allclose(a, b)


def test_feature_matrix_triplets_on_disk(tmp_path, population):
    windows = slide_windows(population[0].select_days(1, 2), WindowSpec(5))
    matrix = build_feature_matrix(windows, fit_vocabulary(windows, 'process'), fit_vocabulary(windows, 'domain'))
    handler = CSVHandler()
    path = handler.write_feature_matrix(matrix, tmp_path / 'features.csv')
    loaded = handler.read_feature_matrix(path)
    assert (loaded.X != matrix.X).nnz == 0
    assert loaded.labels == matrix.labels
    assert loaded.names == matrix.names
    np.testing.assert_array_equal(loaded.end_minutes, matrix.end_minutes)
