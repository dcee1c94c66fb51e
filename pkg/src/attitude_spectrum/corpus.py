"""Post ingestion, tokenization, term extraction and the TF-IDF user-term matrix."""
from __future__ import annotations

import json
import math
import re
import unicodedata
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import sparse

POST_KINDS = ("original", "retweet", "reply", "quote")
MAX_NGRAM = 4

_TOKEN_RE = re.compile(
    r"(?P<url>(?:https?://|www\.)[^\s]+)"
    r"|(?P<hashtag>#[^\W]+)"
    r"|(?P<mention>@[^\W]+)"
    r"|(?P<word>[^\W_]+)"
)
# trailing punctuation that commonly sticks to URLs in running text
_URL_TRAIL = ".,;:!?)]}\"'"


class CorpusError(ValueError):
    pass


class AllDocumentsEmpty(CorpusError):
    pass


@dataclass(frozen=True)
class RawPost:
    id: str
    author_id: str
    timestamp: datetime
    text: str
    kind: str = "original"
    retweeted_author_id: str | None = None
    mentioned_author_ids: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in POST_KINDS:
            raise CorpusError(f"post {self.id}: unknown kind {self.kind!r}")
        if self.kind == "retweet" and not self.retweeted_author_id:
            raise CorpusError(f"post {self.id}: retweet without retweeted_author_id")
        if self.timestamp.tzinfo is None:
            object.__setattr__(self, "timestamp", self.timestamp.replace(tzinfo=timezone.utc))

    @classmethod
    def from_dict(cls, d: Mapping) -> "RawPost":
        return cls(
            id=str(d["id"]),
            author_id=str(d["author_id"]),
            timestamp=parse_timestamp(d["timestamp"]),
            text=d.get("text") or "",
            kind=d.get("kind") or "original",
            retweeted_author_id=d.get("retweeted_author_id"),
            mentioned_author_ids=tuple(str(m) for m in d.get("mentions") or ()),
        )

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "author_id": self.author_id,
            "timestamp": format_timestamp(self.timestamp),
            "text": self.text,
            "kind": self.kind,
            "retweeted_author_id": self.retweeted_author_id,
            "mentions": list(self.mentioned_author_ids),
        }


def parse_timestamp(value: str) -> datetime:
    ts = datetime.fromisoformat(value.replace("Z", "+00:00"))
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def read_posts(path: str | Path) -> list[RawPost]:
    """Read a JSON Lines corpus. Duplicate post ids are rejected."""
    posts = []
    seen = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                post = RawPost.from_dict(json.loads(line))
            except (KeyError, ValueError, TypeError) as exc:
                raise CorpusError(f"{path}:{lineno}: {exc}") from exc
            if post.id in seen:
                raise CorpusError(f"{path}:{lineno}: duplicate post id {post.id}")
            seen.add(post.id)
            posts.append(post)
    return posts


def write_posts(posts: Iterable[RawPost], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for post in posts:
            fh.write(json.dumps(post.to_dict(), ensure_ascii=False, sort_keys=True) + "\n")


def load_stopwords(path: str | Path) -> frozenset[str]:
    with open(path, encoding="utf-8") as fh:
        return frozenset(fold(w.strip()) for w in fh if w.strip() and not w.startswith("#"))


# --- tokenization -----------------------------------------------------------


@dataclass(frozen=True)
class Token:
    surface: str
    kind: str  # word | hashtag | mention | url
    is_stopword: bool = False


def fold(text: str) -> str:
    """Lowercase and strip combining accents (NFD decomposition)."""
    decomposed = unicodedata.normalize("NFD", text.lower())
    return "".join(c for c in decomposed if not unicodedata.combining(c))


def tokenize(text: str, stopwords: frozenset[str] | set[str] = frozenset()) -> list[Token]:
    tokens = []
    for m in _TOKEN_RE.finditer(fold(text)):
        kind = m.lastgroup
        surface = m.group()
        if kind == "url":
            surface = surface.rstrip(_URL_TRAIL)
        tokens.append(Token(surface, kind, kind == "word" and surface in stopwords))
    return tokens


def build_user_documents(
    posts: Sequence[RawPost],
    stopwords: frozenset[str] | set[str] = frozenset(),
    include_retweets: bool = True,
) -> dict[str, list[Token]]:
    """Concatenate each author's posts, in time order, into one token list."""
    return {
        author: [tok for post in user_posts for tok in tokenize(post.text, stopwords)]
        for author, user_posts in posts_by_author(posts, include_retweets).items()
    }


def posts_by_author(posts: Sequence[RawPost], include_retweets: bool = True) -> dict[str, list[RawPost]]:
    # every author keeps a key, even if all their posts are filtered out
    grouped: dict[str, list[RawPost]] = {p.author_id: [] for p in posts}
    for post in sorted(posts, key=lambda p: (p.timestamp, p.id)):
        if include_retweets or post.kind != "retweet":
            grouped[post.author_id].append(post)
    return grouped


def extract_terms(tokens: Sequence[Token], max_n: int = MAX_NGRAM) -> Counter:
    """Hashtags, mentions, URLs, and word n-grams (n <= max_n) of a token stream.

    N-grams run over the word stream only, keep stopwords inside, and pure
    stopword unigrams are dropped.
    """
    terms: Counter = Counter()
    words = []
    for tok in tokens:
        if tok.kind == "word":
            words.append(tok)
        else:
            terms[tok.surface] += 1
    for n in range(1, max_n + 1):
        for i in range(len(words) - n + 1):
            if n == 1 and words[i].is_stopword:
                continue
            terms[" ".join(w.surface for w in words[i : i + n])] += 1
    return terms


def user_term_counts(
    posts: Sequence[RawPost],
    stopwords: frozenset[str] | set[str] = frozenset(),
    include_retweets: bool = True,
) -> dict[str, Counter]:
    """Per-author term multisets; n-grams never straddle two posts."""
    docs = {}
    for author, user_posts in posts_by_author(posts, include_retweets).items():
        counts: Counter = Counter()
        for post in user_posts:
            counts.update(extract_terms(tokenize(post.text, stopwords)))
        docs[author] = counts
    return docs


# --- document-term matrix -----------------------------------------------------


@dataclass
class Vocabulary:
    terms: list[str]
    document_frequency: dict[str, int]
    index: dict[str, int] = field(init=False)

    def __post_init__(self):
        self.index = {t: i for i, t in enumerate(self.terms)}

    def __len__(self):
        return len(self.terms)

    def __contains__(self, term):
        return term in self.index


@dataclass
class DocumentTermMatrix:
    rows: list[str]
    vocabulary: Vocabulary
    values: sparse.csr_matrix

    @property
    def shape(self):
        return self.values.shape

    def row_index(self) -> dict[str, int]:
        return {r: i for i, r in enumerate(self.rows)}

    def to_dict(self) -> dict:
        v = self.values
        return {
            "rows": self.rows,
            "terms": self.vocabulary.terms,
            "document_frequency": [self.vocabulary.document_frequency[t] for t in self.vocabulary.terms],
            "indptr": v.indptr.tolist(),
            "indices": v.indices.tolist(),
            "data": v.data.tolist(),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "DocumentTermMatrix":
        vocab = Vocabulary(list(d["terms"]), dict(zip(d["terms"], d["document_frequency"])))
        values = sparse.csr_matrix(
            (np.asarray(d["data"], float), np.asarray(d["indices"], np.int64), np.asarray(d["indptr"], np.int64)),
            shape=(len(d["rows"]), len(vocab)),
        )
        return cls(list(d["rows"]), vocab, values)


def smooth_idf(n_docs: int, df: np.ndarray) -> np.ndarray:
    return np.log((1.0 + n_docs) / (1.0 + df)) + 1.0


def build_matrix(docs: Mapping[str, Mapping[str, int]], min_df: int = 2) -> DocumentTermMatrix:
    """TF-IDF weighted, L2 row-normalized user-term matrix.

    Rows are sorted author ids and columns sorted terms, so the result does
    not depend on input ordering.
    """
    if min_df < 1:
        raise ValueError("min_df must be >= 1")
    rows = sorted(docs)
    df: Counter = Counter()
    for author in rows:
        df.update(t for t, c in docs[author].items() if c > 0)
    terms = sorted(t for t, c in df.items() if c >= min_df)
    if not terms:
        raise AllDocumentsEmpty("no term reaches the minimum document frequency")
    vocab = Vocabulary(terms, {t: df[t] for t in terms})
    idf = smooth_idf(len(rows), np.array([df[t] for t in terms], dtype=float))

    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for author in rows:
        cols = sorted(vocab.index[t] for t, c in docs[author].items() if c > 0 and t in vocab.index)
        vals = np.array([docs[author][terms[j]] for j in cols], dtype=float) * idf[cols]
        norm = math.sqrt(float(vals @ vals)) if len(vals) else 0.0
        if norm > 0:
            vals = vals / norm
        indices.extend(cols)
        data.extend(vals.tolist())
        indptr.append(len(indices))
    values = sparse.csr_matrix(
        (np.asarray(data, float), np.asarray(indices, np.int64), np.asarray(indptr, np.int64)),
        shape=(len(rows), len(terms)),
    )
    return DocumentTermMatrix(rows, vocab, values)
