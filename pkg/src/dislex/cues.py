"""Boundary-marked letter n-grams and the sparse binary cue matrix."""

import hashlib
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import BadOrder, EmptyWord, ShapeMismatch
from .lexdata import BOUNDARY


def extract_ngrams(word, n=3):
    """All length-``n`` substrings of ``#word#``, in order, duplicates kept.

    >>> extract_ngrams("dominus")
    ['#do', 'dom', 'omi', 'min', 'inu', 'nus', 'us#']
    """
    if n < 2:
        raise BadOrder(f"gram order must be >= 2, got {n}")
    if not word:
        raise EmptyWord("cannot extract n-grams from an empty word")
    if BOUNDARY in word:
        raise EmptyWord(f"word {word!r} contains the boundary symbol")
    padded = BOUNDARY + word + BOUNDARY
    if len(padded) < n:
        # words shorter than n-2 symbols still get one (short) boundary gram
        return [padded]
    return [padded[i:i + n] for i in range(len(padded) - n + 1)]


class GramIndex:
    """Ordered set of n-grams with a gram -> column lookup."""

    def __init__(self, grams=()):
        self.grams = []
        self.lookup = {}
        for g in grams:
            self.add(g)

    def add(self, gram):
        col = self.lookup.get(gram)
        if col is None:
            col = len(self.grams)
            self.grams.append(gram)
            self.lookup[gram] = col
        return col

    def __len__(self):
        return len(self.grams)

    def __contains__(self, gram):
        return gram in self.lookup

    def __getitem__(self, gram):
        return self.lookup[gram]

    def __eq__(self, other):
        return isinstance(other, GramIndex) and self.grams == other.grams

    def __repr__(self):
        return f"GramIndex({len(self)} grams)"

    def digest(self):
        """SHA-256 over the ordered gram list; ties serialized matrices to an index."""
        return hashlib.sha256("\n".join(self.grams).encode("utf-8")).hexdigest()


@dataclass
class CueMatrix:
    n: int
    words: list
    index: GramIndex
    cells: sp.csr_matrix

    @property
    def shape(self):
        return self.cells.shape

    def toarray(self):
        return self.cells.toarray()

    def row(self, i):
        return self.cells.getrow(i).toarray().ravel()


def build_cue_matrix(words, n=3):
    """Binary words x grams matrix; columns in order of first appearance."""
    words = list(words)
    if len(set(words)) != len(words):
        raise ValueError("words must be unique")
    index = GramIndex()
    rows, cols = [], []
    for i, word in enumerate(words):
        for col in sorted({index.add(g) for g in extract_ngrams(word, n)}):
            rows.append(i)
            cols.append(col)
    cells = sp.csr_matrix(
        (np.ones(len(rows)), (rows, cols)), shape=(len(words), len(index)), dtype=np.float64
    )
    return CueMatrix(n=n, words=words, index=index, cells=cells)


def encode_word(word, index, n=3):
    """Binary row for ``word`` in an existing gram space, plus the grams it lacks."""
    row = np.zeros(len(index))
    unseen = []
    for g in extract_ngrams(word, n):
        col = index.lookup.get(g)
        if col is None:
            if g not in unseen:
                unseen.append(g)
        else:
            row[col] = 1.0
    return row, unseen


def encode_words(words, index, n=3):
    """Sparse rows for many words; unseen grams are dropped silently."""
    rows, cols = [], []
    for i, word in enumerate(words):
        for col in sorted({index.lookup[g] for g in extract_ngrams(word, n) if g in index.lookup}):
            rows.append(i)
            cols.append(col)
    return sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(words), len(index)))


# -- serialization -------------------------------------------------------------


def write_cue_matrix(cm, triplet_stream, index_stream):
    """Sparse triplets (row, col, 1) and the gram-index sidecar, both TSV."""
    coo = cm.cells.tocoo()
    order = np.lexsort((coo.col, coo.row))
    triplet_stream.write("row\tcol\tvalue\n")
    for k in order:
        triplet_stream.write(f"{coo.row[k]}\t{coo.col[k]}\t1\n")
    write_gram_index(cm.index, index_stream, n=cm.n)
    return cm


def write_gram_index(index, stream, n=3):
    stream.write(f"col\tgram\t# n={n}\n")
    for col, gram in enumerate(index.grams):
        stream.write(f"{col}\t{gram}\n")


def read_gram_index(stream):
    header = next(iter(stream)).rstrip("\n").split("\t")
    n = 3
    for cell in header:
        if cell.startswith("# n="):
            n = int(cell[4:])
    grams = []
    for line in stream:
        line = line.rstrip("\n")
        if not line:
            continue
        col, gram = line.split("\t")
        if int(col) != len(grams):
            raise ValueError(f"gram index is not contiguous at column {col}")
        grams.append(gram)
    return GramIndex(grams), n


def read_cue_matrix(triplet_stream, index_stream, words=None):
    index, n = read_gram_index(index_stream)
    next(iter(triplet_stream))
    rows, cols = [], []
    for line in triplet_stream:
        if not line.strip():
            continue
        r, c, _ = line.split("\t")
        rows.append(int(r))
        cols.append(int(c))
    n_rows = (max(rows) + 1) if rows else 0
    if words is not None:
        n_rows = len(words)
    cells = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n_rows, len(index)))
    return CueMatrix(n=n, words=list(words) if words is not None else list(range(n_rows)),
                     index=index, cells=cells)


class CueEncoder(TransformerMixin, BaseEstimator):
    """Learn a gram vocabulary from training words and encode words as binary cue rows.

    Parameters
    ----------
    n : int, default=3
        Gram order.
    """

    def __init__(self, n=3):
        self.n = n

    def fit(self, words, y=None):
        cm = build_cue_matrix(words, self.n)
        self.index_ = cm.index
        self.n_features_out_ = len(cm.index)
        return self

    def transform(self, words):
        check_is_fitted(self, "index_")
        return encode_words(list(words), self.index_, self.n)

    def fit_transform(self, words, y=None):
        cm = build_cue_matrix(words, self.n)
        self.index_ = cm.index
        self.n_features_out_ = len(cm.index)
        return cm.cells

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "index_")
        return np.asarray(self.index_.grams, dtype=object)


def check_cue_width(rows, index):
    if rows.shape[1] != len(index):
        raise ShapeMismatch(f"cue rows have {rows.shape[1]} columns, index has {len(index)}")
