"""Tendency and polarity of users, terms and posts; attitude grouping of posts."""
from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from typing import Iterable, Sequence

import numpy as np

from .corpus import RawPost, extract_terms, tokenize
from .factorizer import FactorModel

GROUPS = ("empathy", "threat")


class UnknownTerm(KeyError):
    pass


class UnknownUser(KeyError):
    pass


@dataclass(frozen=True)
class AttitudeScore:
    empathy: float
    threat: float

    @property
    def tendency(self) -> float:
        return tendency(self)

    @property
    def polarity(self) -> float:
        return polarity(self)


def tendency(score: AttitudeScore) -> float:
    return score.empathy - score.threat


def polarity(score: AttitudeScore) -> float:
    return score.empathy + score.threat


# the same definitions apply to users and terms
user_tendency = term_tendency = tendency
user_polarity = term_polarity = polarity


def group_of(value: float) -> str:
    return "empathy" if value >= 0 else "threat"


def month_of(ts: datetime) -> str:
    return f"{ts.year:04d}-{ts.month:02d}"


@dataclass(frozen=True)
class ScoredTweet:
    post_id: str
    author_id: str
    timestamp: datetime
    tendency: float
    polarity: float
    kind: str = "original"

    @property
    def group(self) -> str:
        return group_of(self.tendency)

    @property
    def month(self) -> str:
        return month_of(self.timestamp)


class AttitudeModel:
    """Read-only lookups of user and term attitudes on a fitted model."""

    def __init__(self, model: FactorModel, stopwords: frozenset[str] | set[str] = frozenset(), distinct_terms: bool = False):
        if model.U.shape[1] != 2:
            raise ValueError("attitude scoring needs a two-topic model")
        self.model = model
        self.stopwords = frozenset(stopwords)
        self.distinct_terms = distinct_terms
        self._row = {r: i for i, r in enumerate(model.rows)}
        self._col = {t: j for j, t in enumerate(model.terms)}
        self.term_tendencies = model.T[0] - model.T[1]
        self.term_polarities = model.T[0] + model.T[1]
        U = model.U * model.L
        self.user_tendencies = U[:, 0] - U[:, 1]
        self.user_polarities = U[:, 0] + U[:, 1]

    def user_score(self, user_id: str) -> AttitudeScore:
        try:
            i = self._row[user_id]
        except KeyError:
            raise UnknownUser(user_id) from None
        u = self.model.U[i] * self.model.L[i]
        return AttitudeScore(float(u[0]), float(u[1]))

    def has_user(self, user_id: str) -> bool:
        return user_id in self._row

    def term_score(self, term: str) -> AttitudeScore:
        try:
            j = self._col[term]
        except KeyError:
            raise UnknownTerm(term) from None
        return AttitudeScore(float(self.model.T[0, j]), float(self.model.T[1, j]))

    def term_columns(self, text: str) -> list[int]:
        """Vocabulary columns of the terms in ``text``, one per occurrence."""
        terms = extract_terms(tokenize(text, self.stopwords))
        cols = []
        for term, count in sorted(terms.items()):
            j = self._col.get(term)
            if j is not None:
                cols.extend([j] * (1 if self.distinct_terms else count))
        return cols

    def text_tendency(self, text: str) -> float:
        cols = self.term_columns(text)
        return float(self.term_tendencies[cols].sum()) if cols else 0.0

    def text_polarity(self, text: str) -> float:
        cols = self.term_columns(text)
        return float(self.term_polarities[cols].sum()) if cols else 0.0

    def score_post(self, post: RawPost) -> ScoredTweet:
        cols = self.term_columns(post.text)
        t = float(self.term_tendencies[cols].sum()) if cols else 0.0
        p = float(self.term_polarities[cols].sum()) if cols else 0.0
        return ScoredTweet(post.id, post.author_id, post.timestamp, t, p, post.kind)

    def top_terms(self, attitude: str, n: int = 20, unigrams_only: bool = False) -> list[str]:
        sign = 1.0 if attitude == "empathy" else -1.0
        order = np.lexsort((np.array(self.model.terms, dtype=object), -sign * self.term_tendencies))
        out = []
        for j in order:
            term = self.model.terms[j]
            if unigrams_only and (" " in term or term[:1] in "#@" or "://" in term):
                continue
            out.append(term)
            if len(out) == n:
                break
        return out


def tweet_tendency(post: RawPost, model: FactorModel | AttitudeModel, stopwords=frozenset()) -> float:
    am = model if isinstance(model, AttitudeModel) else AttitudeModel(model, stopwords)
    return am.text_tendency(post.text)


def tweet_polarity(post: RawPost, model: FactorModel | AttitudeModel, stopwords=frozenset()) -> float:
    am = model if isinstance(model, AttitudeModel) else AttitudeModel(model, stopwords)
    return am.text_polarity(post.text)


def score_posts(posts: Iterable[RawPost], model: AttitudeModel, kinds: Sequence[str] | None = None) -> list[ScoredTweet]:
    return [model.score_post(p) for p in posts if kinds is None or p.kind in kinds]


def group_tweets(scored: Iterable[ScoredTweet]) -> dict[str, list[ScoredTweet]]:
    """Split posts by tendency sign; zero goes to empathy."""
    groups: dict[str, list[ScoredTweet]] = {g: [] for g in GROUPS}
    for tweet in scored:
        groups[tweet.group].append(tweet)
    return groups
