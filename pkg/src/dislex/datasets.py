"""Synthetic corpora with known structure.

These generators back the test-suite and the bundled demo corpus. Each one
plants a property (an exact linear form-meaning map, a unique synthesis
path per word, class signal in chosen principal directions, case-specific
plural offsets) so that the analysis code has a known right answer.
"""

import io
from importlib import resources

import numpy as np

from .cues import build_cue_matrix
from .lexdata import (
    BOUNDARY,
    Dataset,
    EmbeddingTable,
    Lexicon,
    WordEntry,
    join_dataset,
    parse_embedding_file,
    parse_lexicon_file,
    write_embedding_file,
    write_lexicon_file,
)

ALPHABET = "abcdefghijklmnoprstuwyz"

# 12 single-letter onsets on a shared "-an" stem ending: the cue row of
# stem + suffix is then (onset grams) + (suffix grams), with no overlap.
BUNDLED_ONSETS = ("b", "d", "f", "g", "k", "l", "m", "p", "r", "s", "t", "w")
BUNDLED_SUFFIXES = (
    ("", "sg", "nom"),
    ("u", "sg", "gen"),
    ("em", "sg", "instr"),
    ("y", "pl", "nom"),
    ("ami", "pl", "instr"),
)
BUNDLED_DIM = 48
BUNDLED_SEED = 20240
BUNDLED_TEST = 6


def single_symbol_words(n=40):
    """``n`` one-letter words; each is its own single boundary gram, so C = I."""
    pool = [chr(c) for c in range(ord("a"), ord("z") + 1)] + [chr(c) for c in range(0x3B1, 0x3CA)]
    pool = [ch for ch in pool if ch.islower() and ch != "ς"]
    if n > len(pool):
        raise ValueError(f"at most {len(pool)} single-symbol words are available")
    return pool[:n]


def has_unique_bigrams(word):
    """True when no bigram of ``#word#`` repeats.

    Every own gram then has exactly one own successor, so the word is the
    only boundary-to-boundary path through its own grams.
    """
    padded = BOUNDARY + word + BOUNDARY
    bigrams = [padded[i:i + 2] for i in range(len(padded) - 1)]
    return len(set(bigrams)) == len(bigrams)


def path_unique_words(n_words, seed=0, min_len=3, max_len=7, alphabet=ALPHABET):
    """Distinct random words whose own trigrams admit a single path."""
    rng = np.random.default_rng(seed)
    words, seen = [], set()
    attempts = 0
    while len(words) < n_words:
        attempts += 1
        if attempts > 1000 * n_words:
            raise RuntimeError("could not draw enough path-unique words")
        length = int(rng.integers(min_len, max_len + 1))
        word = "".join(rng.choice(list(alphabet), size=length))
        if word in seen or not has_unique_bigrams(word):
            continue
        seen.add(word)
        words.append(word)
    return words


def planted_semantics(C, dim=None, seed=0):
    """``S = C W0`` for a Gaussian ``W0`` of full row rank (``dim >= #grams``).

    Returns ``(S, W0)``. With full row rank, ``col(S) = col(C)``, so both the
    comprehension and the production mappings fit with zero residual.
    """
    cells = C.cells.toarray() if hasattr(C, "cells") else np.asarray(C, dtype=np.float64)
    n_grams = cells.shape[1]
    dim = n_grams + 8 if dim is None else dim
    if dim < n_grams:
        raise ValueError(f"dim {dim} < {n_grams} grams; W0 would not have full row rank")
    W0 = np.random.default_rng(seed).normal(size=(n_grams, dim))
    return cells @ W0, W0


def planted_dataset(words, dim=None, seed=0, entries=None):
    """A :class:`Dataset` whose embeddings are an exact linear image of the cues."""
    cm = build_cue_matrix(words)
    S, _ = planted_semantics(cm, dim, seed)
    if entries is None:
        entries = [WordEntry(word=w, lemma=w) for w in words]
    return Dataset(words=list(words), S=S, features=list(entries))


# -- bundled demo corpus -------------------------------------------------------


def bundled_entries():
    entries = []
    for i, onset in enumerate(BUNDLED_ONSETS):
        stem = onset + "an"
        gender5 = "masc_inanim" if i % 2 == 0 else "masc_anim"
        for j, (suffix, number, case) in enumerate(BUNDLED_SUFFIXES):
            entries.append(WordEntry(
                word=stem + suffix, lemma=stem, pos_detailed="noun", case=case,
                number=number, gender3="masc", gender5=gender5,
                frequency=10 * (len(BUNDLED_ONSETS) - i) + (len(BUNDLED_SUFFIXES) - j),
            ))
    return entries


def make_bundled_corpus(dim=BUNDLED_DIM, seed=BUNDLED_SEED):
    """Regenerate the 60-word demo lexicon and its planted embeddings."""
    lexicon = Lexicon(entries=bundled_entries(), provenance="dislex synthetic demo corpus")
    words = lexicon.words
    S, _ = planted_semantics(build_cue_matrix(words), dim, seed)
    # round-trip through text so the regenerated table equals the shipped file
    table = EmbeddingTable(dim=dim, words=words, vectors=S)
    buf = io.StringIO()
    write_embedding_file(table, buf)
    buf.seek(0)
    return lexicon, parse_embedding_file(buf)


def bundled_paths():
    """Paths of the shipped lexicon TSV and embedding file."""
    root = resources.files("dislex") / "data"
    return root / "demo_lexicon.tsv", root / "demo_vectors.vec"


def load_bundled_corpus():
    """The shipped 60-word corpus as a :class:`Dataset`."""
    lex_path, vec_path = bundled_paths()
    with lex_path.open("r", encoding="utf-8") as fh:
        lexicon = parse_lexicon_file(fh, provenance="dislex synthetic demo corpus")
    with vec_path.open("r", encoding="utf-8") as fh:
        table = parse_embedding_file(fh)
    return join_dataset(lexicon, table)


def write_bundled_corpus(lex_stream, vec_stream):
    lexicon, table = make_bundled_corpus()
    write_lexicon_file(lexicon, lex_stream)
    write_embedding_file(table, vec_stream)


def in_rowspace(C_train, rows, tol=1e-8):
    """Whether every row of ``rows`` is a linear combination of the rows of ``C_train``."""
    A = C_train.toarray() if hasattr(C_train, "toarray") else np.asarray(C_train, dtype=np.float64)
    B = rows.toarray() if hasattr(rows, "toarray") else np.asarray(rows, dtype=np.float64)
    coef, *_ = np.linalg.lstsq(A.T, B.T, rcond=None)
    return np.abs(A.T @ coef - B.T).max(axis=0) < tol


# -- classification constructions ----------------------------------------------


def two_blobs(n_per=300, p=10, separation=10.0, seed=0):
    """Two isotropic Gaussian clouds whose means differ by ``separation`` per axis."""
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.normal(size=(n_per, p)), rng.normal(size=(n_per, p)) + separation])
    y = np.repeat([0, 1], n_per)
    return X, y


def sweep_top_component(n=400, p=40, seed=0, gap=6.0):
    """Two classes separated along the highest-variance axis only.

    Noise is isotropic with unit variance; the class means differ by ``gap``
    along axis 0, which therefore carries the top principal component.
    """
    rng = np.random.default_rng(seed)
    y = np.arange(n) % 2
    X = rng.normal(size=(n, p))
    X[:, 0] += gap * (y - 0.5)
    return X, y


def sweep_spread_thin(n=400, p=40, seed=0, loud=5, loud_sd=10.0, amplitude=0.45):
    """Two classes whose signal is spread thinly over the low-variance axes.

    The first ``loud`` axes carry large pure noise and so take the top
    principal components. The class means differ by ``amplitude`` (less than
    the unit noise sd) on every remaining axis: no single component separates
    the classes, but together they do.
    """
    rng = np.random.default_rng(seed)
    y = np.arange(n) % 2
    sd = np.ones(p)
    sd[:loud] = loud_sd
    X = rng.normal(size=(n, p)) * sd
    X[:, loud:] += amplitude * (y[:, None] - 0.5)
    return X, y


CASES = ("nom", "gen", "dat", "acc", "instr", "loc", "voc")


def planted_shift_dataset(n_cases=5, pairs_per_case=100, dim=50, offset_ratio=3.0, sigma=1.0,
                          noise="vector", seed=0):
    """Singular/plural pairs whose plural adds a case-specific offset plus noise.

    Offsets are random directions of norm ``offset_ratio * sigma``. With
    ``noise="vector"`` the noise vector has expected norm ``sigma`` (per-axis
    sd ``sigma / sqrt(dim)``); with ``noise="axis"`` every axis gets sd
    ``sigma``.
    """
    if n_cases > len(CASES):
        raise ValueError(f"at most {len(CASES)} cases")
    rng = np.random.default_rng(seed)
    offsets = rng.normal(size=(n_cases, dim))
    offsets *= offset_ratio * sigma / np.linalg.norm(offsets, axis=1, keepdims=True)
    axis_sd = sigma / np.sqrt(dim) if noise == "vector" else sigma
    words, rows, entries = [], [], []
    for c in range(n_cases):
        for k in range(pairs_per_case):
            lemma = f"lem{c}x{k}"
            sg = rng.normal(size=dim) * 5.0
            pl = sg + offsets[c] + rng.normal(size=dim) * axis_sd
            for number, vec in (("sg", sg), ("pl", pl)):
                word = f"{lemma}{number}"
                words.append(word)
                rows.append(vec)
                entries.append(WordEntry(word=word, lemma=lemma, pos_detailed="noun", case=CASES[c],
                                         number=number, gender3="masc", gender5="masc_inanim"))
    return Dataset(words=words, S=np.array(rows), features=entries), offsets
