"""Word-form synthesis from semantic vectors.

A semantic vector is mapped through G to a support value per gram. Grams
whose support exceeds the threshold become vertices of an order graph in
which ``a -> b`` when the last n-1 symbols of ``a`` are the first n-1 of
``b``. Candidate forms are boundary-to-boundary paths, ranked by mean
support, and finally re-ranked by how well their re-comprehended meaning
matches the target (the form-to-meaning feedback loop).
"""

import dataclasses
import heapq
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_vector
from .cues import encode_word
from .exceptions import EmptyEvaluation, NoPath, ShapeMismatch
from .lexdata import BOUNDARY, Lexicon
from .mapping import similarity

THETA = 0.01
BEAM = 20
MAX_LEN = 30
NO_OUTPUT = ""

CORRECT = "correct"
FEATURE_CHANGE = "same_lexeme_feature_change"
WRONG_LEXEME = "wrong_lexeme"
NONWORD = "nonword"


@dataclass
class SupportVector:
    values: np.ndarray
    index: object
    theta: float = THETA

    def active(self, theta=None):
        """Grams whose support is strictly above the threshold, in column order."""
        theta = self.theta if theta is None else theta
        return [self.index.grams[j] for j in np.flatnonzero(self.values > theta)]

    def __getitem__(self, gram):
        return self.values[self.index[gram]]


@dataclass
class CandidateForm:
    word: str
    path: tuple
    path_score: float
    feedback_score: float = None


@dataclass
class ProductionErrorRecord:
    target: str
    produced: str
    category: str
    changed_features: list = field(default_factory=list)
    path_score: float = None
    feedback_score: float = None


def predict_cue_support(s, G, index, theta=THETA):
    s = check_vector(s, "s")
    if s.shape[0] != G.shape[0]:
        raise ShapeMismatch(f"semantic vector has length {s.shape[0]}, G expects {G.shape[0]}")
    if G.shape[1] != len(index):
        raise ShapeMismatch(f"G has {G.shape[1]} columns, index has {len(index)} grams")
    return SupportVector(values=s @ G, index=index, theta=theta)


@dataclass
class OrderGraph:
    vertices: list
    successors: dict
    starts: list
    ends: list

    @property
    def edges(self):
        return {(a, b) for a, succ in self.successors.items() for b in succ}


def build_order_graph(active):
    """Overlap graph over the active grams."""
    vertices = sorted(set(active))
    by_prefix = defaultdict(list)
    for g in vertices:
        by_prefix[g[:-1]].append(g)
    successors = {}
    for g in vertices:
        if g.endswith(BOUNDARY) and len(g) > 1:
            successors[g] = []
            continue
        successors[g] = list(by_prefix.get(g[1:], ()))
    starts = [g for g in vertices if g.startswith(BOUNDARY)]
    ends = [g for g in vertices if g.endswith(BOUNDARY) and len(g) > 1]
    return OrderGraph(vertices=vertices, successors=successors, starts=starts, ends=ends)


def decode_path(path):
    s = path[0] + "".join(g[-1] for g in path[1:])
    return s.strip(BOUNDARY)


def _steps_to_end(graph):
    """Fewest grams (inclusive) from each vertex to an end vertex."""
    preds = defaultdict(list)
    for a, succ in graph.successors.items():
        for b in succ:
            preds[b].append(a)
    dist = {g: 1 for g in graph.ends}
    queue = deque(graph.ends)
    while queue:
        b = queue.popleft()
        for a in preds[b]:
            if a not in dist:
                dist[a] = dist[b] + 1
                queue.append(a)
    return dist


def synthesize_forms(support, beam=BEAM, max_len=MAX_LEN, n=3):
    """The ``beam`` best boundary-to-boundary paths by mean gram support.

    The search is exact: for each path length it keeps the ``beam`` highest
    support sums per end vertex, which is sufficient to recover the global
    top ``beam`` paths by mean. Paths may revisit vertices as long as the
    decoded word stays within ``max_len`` symbols.
    """
    if beam < 1:
        raise ValueError("beam must be positive")
    active = support.active()
    graph = build_order_graph(active)
    if not graph.starts or not graph.ends:
        raise NoPath("no start or no end gram above threshold")
    value = {g: float(support[g]) for g in graph.vertices}
    max_grams = max_len + 3 - n
    to_end = _steps_to_end(graph)

    def keep(entries):
        return heapq.nsmallest(beam, entries, key=lambda e: (-e[0], e[1]))

    layer = {}
    for g in graph.starts:
        if g in to_end and to_end[g] <= max_grams:
            layer[g] = [(value[g], (g,))]
    complete = []
    length = 1
    while layer:
        for g in graph.ends:
            for total, path in layer.get(g, ()):
                complete.append((total / length, decode_path(path), path))
        if length == max_grams:
            break
        nxt = defaultdict(list)
        for g, entries in layer.items():
            for h in graph.successors[g]:
                if length + to_end.get(h, max_grams + 1) > max_grams:
                    continue
                nxt[h].extend((total + value[h], path + (h,)) for total, path in entries)
        layer = {h: keep(entries) for h, entries in nxt.items()}
        length += 1
    if not complete:
        raise NoPath("no start-to-end path above threshold")
    complete.sort(key=lambda c: (-c[0], c[1]))
    return [CandidateForm(word=w, path=p, path_score=score) for score, w, p in complete[:beam]]


def enumerate_paths(grams, max_len=MAX_LEN, n=3):
    """All boundary-to-boundary words over ``grams`` up to ``max_len`` symbols (brute force)."""
    graph = build_order_graph(grams)
    ends = set(graph.ends)
    out = []
    stack = [(g,) for g in graph.starts]
    max_grams = max_len + 3 - n
    while stack:
        path = stack.pop()
        if path[-1] in ends:
            out.append(decode_path(path))
            continue
        if len(path) >= max_grams:
            continue
        for h in graph.successors[path[-1]]:
            stack.append(path + (h,))
    return sorted(out)


def score_feedback(candidates, F, target_s, index, metric="pearson", n=3):
    scored = []
    for c in candidates:
        row, _ = encode_word(c.word, index, n)
        meaning = row @ F
        scored.append(dataclasses.replace(c, feedback_score=similarity(meaning, target_s, metric)))
    return scored


def rerank_by_feedback(candidates, F, target_s, index, metric="pearson", n=3):
    """Pick the candidate whose re-comprehended meaning is closest to ``target_s``."""
    if not candidates:
        raise ValueError("no candidates to re-rank")
    scored = score_feedback(candidates, F, target_s, index, metric, n)
    return min(scored, key=lambda c: (-c.feedback_score, -c.path_score, c.word))


_GENDER = ("gender3", "gender5")
INFLECTIONAL = ("aspect", "case", "number", "tense", "gender", "person")


def changed_features(a, b):
    changed = []
    for name in INFLECTIONAL:
        fields = _GENDER if name == "gender" else (name,)
        if any(getattr(a, f) != getattr(b, f) for f in fields):
            changed.append(name)
    if a.pos_detailed != b.pos_detailed or a.pos != b.pos:
        changed.append("pos")
    return changed


def classify_production_error(target, produced, lexicon):
    """Place a produced form in the error taxonomy relative to its target entry."""
    table = lexicon.lookup() if isinstance(lexicon, Lexicon) else lexicon
    if produced == target.word:
        return ProductionErrorRecord(target.word, produced, CORRECT)
    other = table.get(produced)
    if other is None:
        return ProductionErrorRecord(target.word, produced, NONWORD)
    if target.lemma is not None and other.lemma == target.lemma:
        return ProductionErrorRecord(target.word, produced, FEATURE_CHANGE, changed_features(target, other))
    return ProductionErrorRecord(target.word, produced, WRONG_LEXEME)


def produce(s, pair, index, theta=THETA, beam=BEAM, max_len=MAX_LEN, metric="pearson",
            feedback_F=None, feedback_index=None, n=3):
    """Best form for one semantic vector; returns ``None`` when no path exists."""
    support = predict_cue_support(s, pair.G, index, theta)
    try:
        candidates = synthesize_forms(support, beam, max_len, n)
    except NoPath:
        return None
    F = pair.F if feedback_F is None else feedback_F
    fb_index = index if feedback_index is None else feedback_index
    return rerank_by_feedback(candidates, F, s, fb_index, metric, n)


def evaluate_production(dataset, pair, index, theta=THETA, beam=BEAM, max_len=MAX_LEN,
                        metric="pearson", lexicon=None, feedback_F=None, feedback_index=None, n=3):
    """Produce every word of ``dataset`` from its embedding and score exact matches."""
    if len(dataset) == 0:
        raise EmptyEvaluation("no words to evaluate")
    table = (lexicon.lookup() if isinstance(lexicon, Lexicon) else lexicon) or {
        e.word: e for e in dataset.features
    }
    records = []
    for s, entry in zip(dataset.S, dataset.features):
        best = produce(s, pair, index, theta, beam, max_len, metric, feedback_F, feedback_index, n)
        produced = NO_OUTPUT if best is None else best.word
        rec = classify_production_error(entry, produced, table)
        if best is not None:
            rec.path_score, rec.feedback_score = best.path_score, best.feedback_score
        records.append(rec)
    accuracy = float(np.mean([r.category == CORRECT for r in records]))
    return accuracy, records


def tabulate_errors(records):
    """Counts of feature-change errors keyed by the '+'-joined changed features."""
    counts = Counter()
    for r in records:
        if r.category == FEATURE_CHANGE:
            counts["+".join(r.changed_features) or "none"] += 1
    return counts


def write_production_tsv(records, stream):
    stream.write("target\tproduced\tcategory\tchanged_features\tpath_score\tfeedback_score\n")
    for r in records:
        ps = "" if r.path_score is None else f"{r.path_score:.6f}"
        fs = "" if r.feedback_score is None else f"{r.feedback_score:.6f}"
        stream.write(f"{r.target}\t{r.produced}\t{r.category}\t{','.join(r.changed_features)}\t{ps}\t{fs}\n")
