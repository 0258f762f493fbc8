"""
Per-field token vocabularies with document frequencies.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Sequence

from utils.errors import EmptyCorpus, InvalidSpec
from .windows import FeatureWindow


class FieldTag(Enum):
    """Enumeration for the token fields of a window"""
    PROCESS = "process"
    DOMAIN = "domain"

    def __str__(self):
        return self.value

    @classmethod
    def from_string(cls, tag_str: str) -> 'FieldTag':
        tag_map = {
            'process': cls.PROCESS,
            'proc': cls.PROCESS,
            'domain': cls.DOMAIN,
            'dom': cls.DOMAIN,
        }
        key = str(tag_str).strip().lower()
        if key not in tag_map:
            raise InvalidSpec(f"Unknown vocabulary field: {tag_str}")
        return tag_map[key]

    def document(self, window: FeatureWindow) -> Sequence[str]:
        return window.process_doc if self is FieldTag.PROCESS else window.domain_doc


@dataclass
class Vocabulary:
    """Token index (dense, first-occurrence order) and presence counts"""
    field_tag: FieldTag
    n_docs: int
    index: Dict[str, int] = field(default_factory=dict)
    df: Dict[str, int] = field(default_factory=dict)

    def __len__(self):
        return len(self.index)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    @property
    def tokens(self) -> List[str]:
        """Tokens ordered by index"""
        return sorted(self.index, key=self.index.__getitem__)

    def to_dict(self) -> dict:
        return {
            'field': str(self.field_tag),
            'n_docs': self.n_docs,
            'tokens': [{'token': t, 'index': self.index[t], 'df': self.df[t]} for t in self.tokens],
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'Vocabulary':
        vocab = cls(field_tag=FieldTag.from_string(data['field']), n_docs=int(data['n_docs']))
        for entry in sorted(data['tokens'], key=lambda e: e['index']):
            vocab.index[entry['token']] = int(entry['index'])
            vocab.df[entry['token']] = int(entry['df'])
        if sorted(vocab.index.values()) != list(range(len(vocab))):
            raise InvalidSpec("vocabulary indices are not dense")
        return vocab


def fit_vocabulary(windows: Iterable[FeatureWindow], field_tag) -> Vocabulary:
    """
    Fit the vocabulary of one field over training windows.

    Each window is one document; df counts documents containing the token,
    however often it occurs inside them.
    """
    field_tag = field_tag if isinstance(field_tag, FieldTag) else FieldTag.from_string(field_tag)
    index: Dict[str, int] = {}
    df: Dict[str, int] = {}
    n_docs = 0

    for window in windows:
        n_docs += 1
        for token in dict.fromkeys(field_tag.document(window)):
            if token not in index:
                index[token] = len(index)
                df[token] = 0
            df[token] += 1

    if n_docs == 0:
        raise EmptyCorpus(f"no training windows for the {field_tag} vocabulary")
    return Vocabulary(field_tag=field_tag, n_docs=n_docs, index=index, df=df)
