"""Lexicon and embedding ingestion.

The lexicon is a UTF-8 TSV with a header row; any subset of the
:class:`WordEntry` fields may appear as columns, but ``word`` is mandatory.
Empty cells mean "feature absent". Embeddings use the plain text vector
layout (``word v1 ... vd``), with or without a leading ``count dim`` header.
"""

import dataclasses
import math
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _diagnostics
from .exceptions import (
    DimensionMismatch,
    EmptyInput,
    EmptyJoin,
    InfeasibleSplit,
    InvalidEnumValue,
    InvalidWord,
    MissingColumn,
    NonFiniteValue,
)

BOUNDARY = "#"

POS = ("adjective", "adverb", "gerund", "noun", "participle", "verb")

# Fine-grained classes; each maps onto one of the six coarse classes.
POS_DETAILED = {
    "adj": "adjective",
    "adv": "adverb",
    "ger": "gerund",
    "noun": "noun",
    "active.adj.particip": "participle",
    "passive.adj.particip": "participle",
    "pres.adv.particip": "participle",
    "perf.adv.particip": "participle",
    "past.verb": "verb",
    "pres.verb": "verb",
    "fut.verb": "verb",
    "impers.verb": "verb",
    "imperat.verb": "verb",
    "inf.verb": "verb",
}

FEATURE_VALUES = {
    "pos": POS,
    "pos_detailed": tuple(POS_DETAILED),
    "tense": ("past", "present", "future"),
    "person": ("first", "second", "third"),
    "case": ("nom", "gen", "dat", "acc", "instr", "loc", "voc"),
    "gender3": ("fem", "masc", "neut"),
    "gender5": ("fem", "masc_anim", "masc_inanim", "masc_pers", "neut"),
    "number": ("sg", "pl"),
    "aspect": ("imperf", "perf"),
    "prefix": ("ɕ", "f", "fs", "s", "v", "vz", "z"),
    "parsability": ("most", "less", "least"),
    "sonority_profile": ("F", "F+R", "F+R+R", "plat", "plat+F", "plat+F+R", "plat+R", "R", "R+plat"),
    "cluster_size": ("CC", "CCC", "CCCC"),
}

CATEGORICAL = tuple(FEATURE_VALUES)
MORPHOSYNTACTIC = ("tense", "person", "case", "gender3", "gender5", "number", "aspect")

_NOMINAL = {"number", "case", "gender3", "gender5"}
_ALLOWED = {
    "adj": _NOMINAL,
    "adv": set(),
    "ger": _NOMINAL | {"aspect"},
    "noun": _NOMINAL,
    "active.adj.particip": _NOMINAL | {"aspect"},
    "passive.adj.particip": _NOMINAL | {"aspect"},
    "pres.adv.particip": {"aspect"},
    "perf.adv.particip": {"aspect"},
    # past-tense forms carry gender in Polish, so it is allowed but not expected
    "past.verb": {"person", "number", "aspect", "tense", "gender3", "gender5"},
    "pres.verb": {"person", "number", "aspect", "tense"},
    "fut.verb": {"person", "number", "aspect", "tense"},
    "impers.verb": {"aspect"},
    "imperat.verb": {"person", "number", "aspect"},
    "inf.verb": {"aspect"},
}
_EXPECTED = {k: v - {"gender3", "gender5"} if k.endswith(".verb") else set(v) for k, v in _ALLOWED.items()}
_ALLOWED_COARSE = {
    "adjective": _NOMINAL,
    "adverb": set(),
    "gerund": _NOMINAL | {"aspect"},
    "noun": _NOMINAL,
    "participle": _NOMINAL | {"aspect"},
    "verb": {"person", "number", "aspect", "tense", "gender3", "gender5"},
}

_CANONICAL = {name: {v.casefold(): v for v in values} for name, values in FEATURE_VALUES.items()}


@dataclass(frozen=True)
class WordEntry:
    word: str
    lemma: Optional[str] = None
    pos: Optional[str] = None
    pos_detailed: Optional[str] = None
    tense: Optional[str] = None
    person: Optional[str] = None
    case: Optional[str] = None
    gender3: Optional[str] = None
    gender5: Optional[str] = None
    number: Optional[str] = None
    aspect: Optional[str] = None
    prefix: Optional[str] = None
    parsability: Optional[str] = None
    sonority_profile: Optional[str] = None
    cluster_size: Optional[str] = None
    frequency: int = 0

    def __post_init__(self):
        check_word(self.word)
        if self.frequency < 0:
            raise ValueError(f"negative frequency for {self.word!r}")
        if self.pos is None and self.pos_detailed is not None:
            object.__setattr__(self, "pos", POS_DETAILED[self.pos_detailed])

    def feature(self, name):
        return getattr(self, name)

    def features(self):
        """Mapping of the categorical features that are present."""
        return {k: getattr(self, k) for k in CATEGORICAL if getattr(self, k) is not None}


FIELDS = tuple(f.name for f in dataclasses.fields(WordEntry))


def check_word(word):
    if not isinstance(word, str) or not word:
        raise InvalidWord("word must be a non-empty string")
    if BOUNDARY in word or any(ch.isspace() for ch in word):
        raise InvalidWord(f"word {word!r} contains whitespace or the boundary symbol")
    return word


def validate_entry(entry):
    """List the feature-applicability violations of one entry.

    Returns a list of ``(feature, problem)`` tuples, where problem is
    ``"unexpected"`` (present on a part of speech that cannot carry it),
    ``"missing"`` (expected but absent) or ``"pos_conflict"``.
    """
    problems = []
    if entry.pos_detailed is not None:
        if entry.pos is not None and POS_DETAILED[entry.pos_detailed] != entry.pos:
            problems.append(("pos", "pos_conflict"))
        allowed, expected = _ALLOWED[entry.pos_detailed], _EXPECTED[entry.pos_detailed]
    elif entry.pos is not None:
        allowed, expected = _ALLOWED_COARSE[entry.pos], set()
    else:
        return problems
    for name in MORPHOSYNTACTIC:
        present = getattr(entry, name) is not None
        if present and name not in allowed:
            problems.append((name, "unexpected"))
        elif not present and name in expected:
            # gender may legitimately be coded on only one of the two scales
            if name.startswith("gender") and (entry.gender3 or entry.gender5):
                continue
            problems.append((name, "missing"))
    return problems


def validate_lexicon(lexicon, emit=True):
    """Run :func:`validate_entry` over a lexicon; returns ``[(row, word, feature, problem)]``."""
    report = []
    for i, entry in enumerate(lexicon.entries):
        for feature, problem in validate_entry(entry):
            report.append((i, entry.word, feature, problem))
    if emit and report:
        _diagnostics.emit("feature_applicability", violations=len(report),
                          first=[list(r) for r in report[:5]])
    return report


@dataclass
class Lexicon:
    entries: list
    provenance: str = ""
    dropped: int = 0

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def words(self):
        return [e.word for e in self.entries]

    def lookup(self):
        """Map word string to its (first) entry."""
        table = {}
        for e in self.entries:
            table.setdefault(e.word, e)
        return table


@dataclass
class EmbeddingTable:
    """Word vectors of a fixed dimension, kept as a row-aligned matrix."""

    dim: int
    words: list
    vectors: np.ndarray
    duplicates: int = 0
    _index: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64).reshape(len(self.words), self.dim)
        if len(set(self.words)) != len(self.words):
            raise ValueError("duplicate words in embedding table")
        if not np.all(np.isfinite(self.vectors)):
            raise ValueError("embedding table contains non-finite values")
        self._index = {w: i for i, w in enumerate(self.words)}

    @classmethod
    def from_dict(cls, rows):
        rows = dict(rows)
        if not rows:
            raise EmptyInput("no vectors")
        words = list(rows)
        matrix = np.array([np.asarray(rows[w], dtype=np.float64) for w in words])
        return cls(dim=matrix.shape[1], words=words, vectors=matrix)

    def __len__(self):
        return len(self.words)

    def __contains__(self, word):
        return word in self._index

    def __getitem__(self, word):
        return self.vectors[self._index[word]]

    @property
    def rows(self):
        return {w: self.vectors[i] for i, w in enumerate(self.words)}


@dataclass
class Dataset:
    """Words, their embeddings (row-aligned) and their lexicon entries."""

    words: list
    S: np.ndarray
    features: list
    missing: int = 0

    def __post_init__(self):
        self.S = np.asarray(self.S, dtype=np.float64)
        if not (len(self.words) == self.S.shape[0] == len(self.features)):
            raise ValueError("words, S and features must be aligned")
        self.S.setflags(write=False)

    def __len__(self):
        return len(self.words)

    def subset(self, indices):
        indices = list(indices)
        return Dataset(
            words=[self.words[i] for i in indices],
            S=self.S[indices] if indices else np.zeros((0, self.S.shape[1])),
            features=[self.features[i] for i in indices],
        )

    def labels(self, feature):
        """Values of ``feature`` per word (``None`` where absent)."""
        return [getattr(e, feature) for e in self.features]

    def index_of(self):
        return {w: i for i, w in enumerate(self.words)}


# -- embeddings ---------------------------------------------------------------


def _looks_like_header(tokens):
    if len(tokens) != 2:
        return False
    try:
        count, dim = int(tokens[0]), int(tokens[1])
    except ValueError:
        return False
    return count >= 0 and dim > 0


def parse_embedding_file(stream, expected_dim=None):
    """Read text-format word vectors from an open text stream."""
    header = None
    dim = expected_dim
    words, rows, seen = [], [], set()
    duplicates = 0
    first = True
    for lineno, line in enumerate(stream, start=1):
        tokens = line.split()
        if not tokens:
            continue
        if first:
            first = False
            if _looks_like_header(tokens):
                header = (int(tokens[0]), int(tokens[1]))
                if dim is None:
                    dim = header[1]
                elif header[1] != dim:
                    raise DimensionMismatch(lineno, dim, header[1])
                continue
        word, values = tokens[0], tokens[1:]
        if dim is None:
            dim = len(values)
            if dim == 0:
                raise DimensionMismatch(lineno, "at least 1", 0)
        if len(values) != dim:
            raise DimensionMismatch(lineno, dim, len(values))
        try:
            vec = [float(v) for v in values]
        except ValueError:
            raise NonFiniteValue(lineno, word) from None
        if not all(math.isfinite(v) for v in vec):
            raise NonFiniteValue(lineno, word)
        if word in seen:
            duplicates += 1
            continue
        seen.add(word)
        words.append(word)
        rows.append(vec)
    if not words:
        raise EmptyInput("embedding stream contains no vectors")
    if duplicates:
        _diagnostics.emit("duplicate_vectors", count=duplicates)
    if header is not None and header[0] != len(words) + duplicates:
        _diagnostics.emit("header_count_mismatch", declared=header[0], found=len(words) + duplicates)
    return EmbeddingTable(dim=dim, words=words, vectors=np.array(rows), duplicates=duplicates)


def write_embedding_file(table, stream, header=True):
    if header:
        stream.write(f"{len(table)} {table.dim}\n")
    for word, vec in zip(table.words, table.vectors):
        stream.write(word + " " + " ".join(repr(float(v)) for v in vec) + "\n")


# -- lexicon -------------------------------------------------------------------


def _decode(column, token, row):
    if column == "frequency":
        try:
            value = int(token)
        except ValueError:
            raise InvalidEnumValue(row, column, token) from None
        if value < 0:
            raise InvalidEnumValue(row, column, token)
        return value
    if column in ("word", "lemma"):
        return token
    try:
        return _CANONICAL[column][token.casefold()]
    except KeyError:
        raise InvalidEnumValue(row, column, token) from None


def parse_lexicon_file(stream, provenance=""):
    """Parse a lexicon TSV. Row numbers in errors count the header as row 1."""
    lines = iter(stream)
    header_line = next(lines, None)
    if header_line is None or not header_line.strip():
        raise EmptyInput("lexicon stream is empty")
    header = [h.strip() for h in header_line.rstrip("\r\n").split("\t")]
    if "word" not in header:
        raise MissingColumn("word")
    unknown = [h for h in header if h not in FIELDS]
    if unknown:
        _diagnostics.emit("unknown_columns", columns=unknown)
    known = [(i, h) for i, h in enumerate(header) if h in FIELDS]
    entries = []
    for row, line in enumerate(lines, start=2):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        cells = line.split("\t")
        values = {}
        for i, name in known:
            token = cells[i].strip() if i < len(cells) else ""
            if token:
                values[name] = _decode(name, token, row)
        if "word" not in values:
            raise InvalidEnumValue(row, "word", "")
        try:
            entries.append(WordEntry(**values))
        except InvalidWord:
            raise InvalidEnumValue(row, "word", values["word"]) from None
    return Lexicon(entries=entries, provenance=provenance)


def write_lexicon_file(lexicon, stream, columns=None):
    if columns is None:
        columns = [f for f in FIELDS if f == "word" or any(getattr(e, f) not in (None, 0) for e in lexicon)]
    stream.write("\t".join(columns) + "\n")
    for e in lexicon:
        cells = []
        for c in columns:
            v = getattr(e, c)
            cells.append("" if v is None else str(v))
        stream.write("\t".join(cells) + "\n")


# -- shaping -------------------------------------------------------------------


def resolve_syncretic(entries, provenance=""):
    """Keep, for every word string, the entry with the highest frequency.

    Ties go to the entry seen first. The returned lexicon keeps the order of
    first appearance of each word string and records the number of dropped rows.
    """
    entries = list(entries)
    best = {}
    order = []
    for entry in entries:
        current = best.get(entry.word)
        if current is None:
            best[entry.word] = entry
            order.append(entry.word)
        elif entry.frequency > current.frequency:
            best[entry.word] = entry
    kept = [best[w] for w in order]
    return Lexicon(entries=kept, provenance=provenance, dropped=len(entries) - len(kept))


def join_dataset(lexicon, table):
    """Align lexicon words with their vectors, in lexicon order."""
    words, rows, feats = [], [], []
    missing = 0
    for entry in lexicon:
        if entry.word in table:
            words.append(entry.word)
            rows.append(table[entry.word])
            feats.append(entry)
        else:
            missing += 1
    if not words:
        raise EmptyJoin("no lexicon word has an embedding")
    if missing:
        _diagnostics.emit("missing_vectors", count=missing)
    return Dataset(words=words, S=np.array(rows), features=feats, missing=missing)


def _feature_keys(entry):
    return [(k, v) for k, v in entry.features().items()]


def split_heldout(dataset, n_test, seed, max_attempts=1000):
    """Hold out ``n_test`` words whose lemma and feature values stay attested in train.

    Each attempt walks a seeded shuffle of the rows and greedily moves a word
    to the test set when doing so leaves its lemma on some other training
    word and every one of its feature values on at least one training word.
    The first attempt that reaches ``n_test`` wins; otherwise the largest
    test set seen is returned with a warning.
    """
    n = len(dataset)
    if not 0 < n_test < n:
        raise ValueError(f"n_test must be in [1, {n - 1}], got {n_test}")
    lemmas = [e.lemma if e.lemma is not None else e.word for e in dataset.features]
    keys = [_feature_keys(e) for e in dataset.features]
    lemma_total = Counter(lemmas)
    value_total = Counter(kv for ks in keys for kv in ks)

    rng = random.Random(seed)
    best = []
    for _ in range(max_attempts):
        order = list(range(n))
        rng.shuffle(order)
        lemma_left = lemma_total.copy()
        value_left = value_total.copy()
        chosen = []
        for i in order:
            if lemma_left[lemmas[i]] < 2:
                continue
            if any(value_left[kv] < 2 for kv in keys[i]):
                continue
            chosen.append(i)
            lemma_left[lemmas[i]] -= 1
            for kv in keys[i]:
                value_left[kv] -= 1
            if len(chosen) == n_test:
                break
        if len(chosen) > len(best):
            best = chosen
        if len(best) == n_test:
            break
    if not best:
        raise InfeasibleSplit("no word can be held out without losing its lemma or a feature value")
    if len(best) < n_test:
        _diagnostics.emit("split_shortfall", requested=n_test, achieved=len(best))
    test_set = set(best)
    train_idx = [i for i in range(n) if i not in test_set]
    test_idx = sorted(best)
    return dataset.subset(train_idx), dataset.subset(test_idx)


def split_by_words(dataset, test_words):
    test_words = set(test_words)
    train_idx = [i for i, w in enumerate(dataset.words) if w not in test_words]
    test_idx = [i for i, w in enumerate(dataset.words) if w in test_words]
    return dataset.subset(train_idx), dataset.subset(test_idx)


def feature_counts(dataset, feature):
    counts = defaultdict(int)
    for v in dataset.labels(feature):
        if v is not None:
            counts[v] += 1
    return dict(counts)
