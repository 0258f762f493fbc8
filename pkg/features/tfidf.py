"""
TF-IDF vectorization of feature windows.

Column layout: clicks, keystrokes, background, then one column per process
token, then one column per domain token, each block in vocabulary index order.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import scipy.sparse as sp
from sklearn.preprocessing import normalize

from config.constants import FEATURE_PREFIXES, NUMERIC_FEATURES
from utils.errors import DimensionMismatch, InvalidSpec
from .vocabulary import FieldTag, Vocabulary
from .windows import FeatureWindow

N_NUMERIC = len(NUMERIC_FEATURES)


@dataclass
class FeatureVector:
    """Sparse feature vector; explicit zeros are never stored"""
    dim: int
    entries: Dict[int, float] = field(default_factory=dict)
    label: Optional[str] = None

    def __post_init__(self):
        self.entries = {int(i): float(v) for i, v in self.entries.items() if v != 0.0}
        for i, v in self.entries.items():
            if not 0 <= i < self.dim:
                raise DimensionMismatch(f"index {i} outside dimension {self.dim}")
            if not np.isfinite(v):
                raise InvalidSpec(f"non-finite feature value at index {i}")

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.dim)
        for i, v in self.entries.items():
            dense[i] = v
        return dense

    @classmethod
    def from_dense(cls, values, label: Optional[str] = None) -> 'FeatureVector':
        values = np.asarray(values, dtype=float).ravel()
        nonzero = np.flatnonzero(values)
        return cls(dim=values.size, entries=dict(zip(nonzero.tolist(), values[nonzero].tolist())), label=label)


@dataclass
class FeatureMatrix:
    """Row-stacked feature vectors with their labels and window end minutes"""
    X: sp.csr_matrix
    labels: List[Optional[str]]
    end_minutes: np.ndarray
    names: List[str] = field(default_factory=list)

    def __post_init__(self):
        self.X = sp.csr_matrix(self.X)
        self.end_minutes = np.asarray(self.end_minutes, dtype=np.int64)
        if not (self.X.shape[0] == len(self.labels) == self.end_minutes.size):
            raise DimensionMismatch(
                f"{self.X.shape[0]} rows vs {len(self.labels)} labels vs {self.end_minutes.size} end minutes")

    def __len__(self):
        return self.X.shape[0]

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    def row(self, i: int) -> FeatureVector:
        r = self.X.getrow(i)
        return FeatureVector(dim=self.dim, entries=dict(zip(r.indices.tolist(), r.data.tolist())),
                             label=self.labels[i])


def idf_weights(vocab: Vocabulary) -> np.ndarray:
    """Smoothed idf per vocabulary index: ln((1 + n) / (1 + df)) + 1"""
    df = np.array([vocab.df[t] for t in vocab.tokens], dtype=float)
    return np.log((1.0 + vocab.n_docs) / (1.0 + df)) + 1.0


def _field_block(windows: Sequence[FeatureWindow], vocab: Vocabulary) -> sp.csr_matrix:
    rows, cols = [], []
    for r, window in enumerate(windows):
        for token in vocab.field_tag.document(window):
            c = vocab.index.get(token)
            if c is not None:
                rows.append(r)
                cols.append(c)
    # Duplicate (row, col) pairs sum into raw term counts
    tf = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(windows), len(vocab)))
    if not len(windows) or not len(vocab):
        return tf
    return normalize(sp.csr_matrix(tf @ sp.diags(idf_weights(vocab))), norm='l2', axis=1)


def build_feature_matrix(windows: Sequence[FeatureWindow], vocab_proc: Vocabulary,
                         vocab_dom: Vocabulary) -> FeatureMatrix:
    """Vectorize a batch of windows into a CSR matrix"""
    if vocab_proc.field_tag is not FieldTag.PROCESS or vocab_dom.field_tag is not FieldTag.DOMAIN:
        raise InvalidSpec("vocabularies must be (process, domain)")
    numeric = sp.csr_matrix(np.array(
        [(w.clicks_sum, w.keystrokes_sum, w.background_sum) for w in windows], dtype=float
    ).reshape(len(windows), N_NUMERIC))
    X = sp.hstack([numeric, _field_block(windows, vocab_proc), _field_block(windows, vocab_dom)], format='csr')
    X.eliminate_zeros()
    X.sort_indices()
    return FeatureMatrix(
        X=X,
        labels=[w.label for w in windows],
        end_minutes=np.array([w.end_minute_epoch for w in windows], dtype=np.int64),
        names=feature_names(vocab_proc, vocab_dom),
    )


def tfidf_vectorize(window: FeatureWindow, vocab_proc: Vocabulary, vocab_dom: Vocabulary) -> FeatureVector:
    """
    Vectorize one window.

    Raw in-window counts times smoothed idf, each token field L2-normalized on
    its own; tokens outside the vocabularies are dropped.
    """
    return build_feature_matrix([window], vocab_proc, vocab_dom).row(0)


def feature_names(vocab_proc: Vocabulary, vocab_dom: Vocabulary) -> List[str]:
    """Column names in matrix order"""
    return (list(NUMERIC_FEATURES)
            + [FEATURE_PREFIXES['process'] + t for t in vocab_proc.tokens]
            + [FEATURE_PREFIXES['domain'] + t for t in vocab_dom.tokens])


def feature_category(index: int, n_process_tokens: int) -> str:
    """Category (numeric, process, domain) of a column index"""
    if index < 0:
        raise InvalidSpec(f"negative feature index {index}")
    if index < N_NUMERIC:
        return 'numeric'
    if index < N_NUMERIC + n_process_tokens:
        return 'process'
    return 'domain'


def category_of_name(name: str) -> str:
    for category, prefix in FEATURE_PREFIXES.items():
        if name.startswith(prefix):
            return category
    return 'numeric'
