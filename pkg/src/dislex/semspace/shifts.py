"""Plural-minus-singular shift vectors."""

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .. import _diagnostics
from ..exceptions import NoPairs


@dataclass
class ShiftVectorSet:
    rows: np.ndarray
    case: list
    gender: list
    pos: list
    lemma: list = field(default_factory=list)
    singular: list = field(default_factory=list)
    plural: list = field(default_factory=list)
    skipped: int = 0

    def __len__(self):
        return self.rows.shape[0]

    def labels(self, name):
        return getattr(self, name)


def _gender(entry):
    return entry.gender5 or entry.gender3


def _pos(entry):
    return entry.pos_detailed or entry.pos


def shift_vectors(dataset):
    """One shift vector per (lemma, case, gender, pos) group with exactly one singular and one plural."""
    groups = defaultdict(lambda: {"sg": [], "pl": []})
    for i, e in enumerate(dataset.features):
        if e.number not in ("sg", "pl") or e.case is None or e.lemma is None:
            continue
        groups[(e.lemma, e.case, _gender(e), _pos(e))][e.number].append(i)
    out = {k: [] for k in ("rows", "case", "gender", "pos", "lemma", "singular", "plural")}
    skipped = 0
    for (lemma, case, gender, pos), members in groups.items():
        sg, pl = members["sg"], members["pl"]
        if not sg or not pl:
            continue
        if len(sg) > 1 or len(pl) > 1:
            skipped += 1
            continue
        out["rows"].append(dataset.S[pl[0]] - dataset.S[sg[0]])
        out["case"].append(case)
        out["gender"].append(gender)
        out["pos"].append(pos)
        out["lemma"].append(lemma)
        out["singular"].append(dataset.words[sg[0]])
        out["plural"].append(dataset.words[pl[0]])
    if skipped:
        _diagnostics.emit("shift_groups_skipped", count=skipped, reason="more than one singular or plural")
    if not out["rows"]:
        raise NoPairs("no singular-plural pairs share lemma, case, gender and part of speech")
    rows = np.array(out.pop("rows"))
    return ShiftVectorSet(rows=rows, skipped=skipped, **out)
