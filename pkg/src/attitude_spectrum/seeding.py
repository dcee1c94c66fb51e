"""Seed-term lexicons, preliminary attitude scores and the supervision mask."""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy import sparse

from .corpus import DocumentTermMatrix, Vocabulary, tokenize

ATTITUDES = ("empathy", "threat")
DEFAULT_THRESHOLD = 0.25


class SeedLexiconError(ValueError):
    pass


def normalize_term(phrase: str) -> str:
    """Map a seed phrase to the term form produced by the extraction pipeline."""
    return " ".join(tok.surface for tok in tokenize(phrase))


@dataclass(frozen=True)
class SeedLexicon:
    empathy_terms: frozenset[str]
    threat_terms: frozenset[str]

    def __post_init__(self):
        overlap = self.empathy_terms & self.threat_terms
        if overlap:
            raise SeedLexiconError(f"terms seeded for both attitudes: {sorted(overlap)}")

    @classmethod
    def from_phrases(cls, empathy: Sequence[str], threat: Sequence[str]) -> "SeedLexicon":
        return cls(
            frozenset(filter(None, map(normalize_term, empathy))),
            frozenset(filter(None, map(normalize_term, threat))),
        )

    def terms(self, attitude: str) -> frozenset[str]:
        return self.empathy_terms if attitude == "empathy" else self.threat_terms


def load_seed_lexicon(path: str | Path) -> SeedLexicon:
    """Read a seed file with ``[empathy]`` and ``[threat]`` sections."""
    sections: dict[str, list[str]] = {a: [] for a in ATTITUDES}
    current = None
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith(";"):
                continue
            if line.startswith("[") and line.endswith("]"):
                current = line[1:-1].strip().lower()
                if current not in sections:
                    raise SeedLexiconError(f"{path}:{lineno}: unknown section [{current}]")
                continue
            if current is None:
                raise SeedLexiconError(f"{path}:{lineno}: term outside of a section")
            sections[current].append(line)
    return SeedLexicon.from_phrases(sections["empathy"], sections["threat"])


def score_seeds(row, vocabulary: Vocabulary, lexicon: SeedLexicon) -> tuple[float, float]:
    """Sum of a matrix row's cells over each attitude's seed terms.

    ``row`` is a dense 1-D array or a 1×n sparse row. Seed terms missing from
    the vocabulary contribute nothing.
    """
    dense = row.toarray().ravel() if sparse.issparse(row) else np.asarray(row, dtype=float).ravel()
    out = []
    for attitude in ATTITUDES:
        cols = sorted(vocabulary.index[t] for t in lexicon.terms(attitude) if t in vocabulary.index)
        out.append(float(dense[cols].sum()) if cols else 0.0)
    return out[0], out[1]


def seed_scores(dtm: DocumentTermMatrix, lexicon: SeedLexicon) -> np.ndarray:
    """Vectorized ``score_seeds`` over all rows, shape (n_users, 2)."""
    scores = np.zeros((dtm.shape[0], 2))
    for j, attitude in enumerate(ATTITUDES):
        cols = sorted(dtm.vocabulary.index[t] for t in lexicon.terms(attitude) if t in dtm.vocabulary.index)
        if cols:
            scores[:, j] = np.asarray(dtm.values[:, cols].sum(axis=1)).ravel()
    return scores


@dataclass
class SupervisionMatrix:
    rows: list[str]
    values: np.ndarray  # (n, 2) of {0, 1}; columns follow ATTITUDES
    # which attitudes reached the threshold; a user hit by both is labeled
    # with both and therefore left unconstrained in ``values``
    hits: np.ndarray | None = None

    def __post_init__(self):
        v = self.values
        if v.ndim != 2 or v.shape[0] != len(self.rows):
            raise ValueError("supervision matrix shape does not match its rows")
        if not np.isin(v, (0, 1)).all():
            raise ValueError("supervision entries must be 0 or 1")
        if (v.sum(axis=1) == 0).any():
            raise ValueError("supervision matrix has an all-zero row")

    @property
    def labeled(self) -> np.ndarray:
        if self.hits is not None:
            return self.hits.any(axis=1)
        return self.values.sum(axis=1) < self.values.shape[1]

    def label_fraction(self) -> float:
        return float(self.labeled.mean()) if len(self.rows) else 0.0


def build_supervision(scores, threshold: float = DEFAULT_THRESHOLD, rows: Sequence[str] | None = None) -> SupervisionMatrix:
    """Label a user with an attitude when its seed score reaches ``threshold``.

    Users reaching it for exactly one attitude are restricted to that
    attitude; everybody else (none or both) stays unconstrained.
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    s = np.asarray(scores, dtype=float).reshape(-1, 2)
    hit = s >= threshold
    values = np.ones_like(s, dtype=np.int8)
    only_empathy = hit[:, 0] & ~hit[:, 1]
    only_threat = hit[:, 1] & ~hit[:, 0]
    values[only_empathy, 1] = 0
    values[only_threat, 0] = 0
    if rows is None:
        rows = [str(i) for i in range(len(s))]
    return SupervisionMatrix(list(rows), values, hit)
