"""Hierarchical word-category lexicons (LIWC .dic layout) and group z-scores."""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import fold


class LexiconError(ValueError):
    pass


class ParseError(LexiconError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class CycleError(LexiconError):
    pass


class UnknownCategory(KeyError):
    pass


class EmptyGroup(ValueError):
    pass


@dataclass
class CategoryLexicon:
    categories: dict[str, str]  # id -> name
    parent: dict[str, str | None]
    entries: list[tuple[str, tuple[str, ...]]]
    _literal: dict[str, set[str]] = field(init=False, repr=False)
    _prefix: list[tuple[str, set[str]]] = field(init=False, repr=False)
    _ancestors: dict[str, frozenset[str]] = field(init=False, repr=False)
    _cache: dict[str, frozenset[str]] = field(init=False, repr=False)

    def __post_init__(self):
        for cid, pid in self.parent.items():
            if pid is not None and pid not in self.categories:
                raise LexiconError(f"category {cid} has unknown parent {pid}")
        self._ancestors = {cid: self._closure(cid) for cid in self.categories}
        self._literal = defaultdict(set)
        prefix: dict[str, set[str]] = defaultdict(set)
        for pattern, cids in self.entries:
            for cid in cids:
                if cid not in self.categories:
                    raise LexiconError(f"entry {pattern!r} references unknown category {cid}")
            expanded = set().union(*(self._ancestors[c] for c in cids)) if cids else set()
            if pattern.endswith("*"):
                prefix[pattern[:-1]] |= expanded
            else:
                self._literal[pattern] |= expanded
        self._prefix = sorted(prefix.items())
        self._cache = {}

    def _closure(self, cid: str) -> frozenset[str]:
        seen = []
        node: str | None = cid
        while node is not None:
            if node in seen:
                raise CycleError(f"category hierarchy cycle through {' -> '.join(seen + [node])}")
            seen.append(node)
            node = self.parent.get(node)
        return frozenset(seen)

    def category_id(self, key: str) -> str:
        """Resolve a category id or name."""
        if key in self.categories:
            return key
        for cid, name in self.categories.items():
            if name == key:
                return cid
        raise UnknownCategory(key)

    def word_categories(self, word: str) -> frozenset[str]:
        """Category ids matched by ``word``, ancestors included."""
        hit = self._cache.get(word)
        if hit is None:
            cats = set(self._literal.get(word, ()))
            for stem, cids in self._prefix:
                if word.startswith(stem):
                    cats |= cids
            hit = self._cache[word] = frozenset(cats)
        return hit

    def descendants(self, cid: str) -> frozenset[str]:
        return frozenset(c for c, anc in self._ancestors.items() if cid in anc)


def load_lexicon(path: str | Path) -> CategoryLexicon:
    """Parse a ``%``-delimited category header followed by pattern lines."""
    categories: dict[str, str] = {}
    parent: dict[str, str | None] = {}
    entries: list[tuple[str, tuple[str, ...]]] = []
    section = 0  # 0 before header, 1 header, 2 entries
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            if line.strip() == "%":
                section += 1
                if section > 2:
                    raise ParseError(lineno, "unexpected third '%' delimiter")
                continue
            fields = [f.strip() for f in line.split("\t") if f.strip()]
            if section == 0:
                raise ParseError(lineno, "content before the opening '%'")
            if section == 1:
                if len(fields) not in (2, 3):
                    raise ParseError(lineno, "category lines are id<TAB>name[<TAB>parent_id]")
                cid = fields[0]
                if cid in categories:
                    raise ParseError(lineno, f"duplicate category id {cid}")
                categories[cid] = fields[1]
                parent[cid] = fields[2] if len(fields) == 3 else None
            else:
                if len(fields) < 2:
                    raise ParseError(lineno, "entry lines are pattern<TAB>id[<TAB>id...]")
                pattern = fold(fields[0])
                if "*" in pattern[:-1]:
                    raise ParseError(lineno, "'*' is only allowed at the end of a pattern")
                cids = tuple(fields[1:])
                for cid in cids:
                    if cid not in categories:
                        raise ParseError(lineno, f"unknown category id {cid}")
                entries.append((pattern, cids))
    if section < 1:
        raise ParseError(0, "missing category header")
    for cid, pid in parent.items():
        if pid is not None and pid not in categories:
            raise LexiconError(f"category {cid} has unknown parent {pid}")
    return CategoryLexicon(categories, parent, entries)


def tweet_category_fraction(words: Sequence[str], category: str, lexicon: CategoryLexicon) -> float:
    """Share of ``words`` falling in ``category`` (or any descendant)."""
    cid = lexicon.category_id(category)
    if not words:
        return 0.0
    return sum(cid in lexicon.word_categories(w) for w in words) / len(words)


def category_fractions(tweets: Sequence[Sequence[str]], lexicon: CategoryLexicon, categories: Sequence[str]) -> np.ndarray:
    """Matrix of fractions, shape (n_tweets, n_categories)."""
    cids = [lexicon.category_id(c) for c in categories]
    col = {c: j for j, c in enumerate(cids)}
    out = np.zeros((len(tweets), len(cids)))
    for i, words in enumerate(tweets):
        if not words:
            continue
        for w in words:
            for c in lexicon.word_categories(w):
                j = col.get(c)
                if j is not None:
                    out[i, j] += 1
        out[i] /= len(words)
    return out


def zscore(group_values: Sequence[float], population_values: Sequence[float]) -> float | None:
    """(mean of group - population mean) / population std; None when the std is 0."""
    if len(population_values) == 0:
        raise ValueError("empty population")
    if len(group_values) == 0:
        raise EmptyGroup("group has no tweets")
    pop = np.asarray(population_values, dtype=float)
    # a constant population has zero spread even if the rounded mean says otherwise
    if pop.max() == pop.min():
        return None
    mu = float(pop.mean())
    sigma = float(np.sqrt(np.mean((pop - mu) ** 2)))
    if not math.isfinite(sigma):
        return None
    return (float(np.mean(group_values)) - mu) / sigma


@dataclass(frozen=True)
class CategoryAssociation:
    category_id: str
    category: str
    group: str
    month: str
    z: float | None
    n_tweets: int

    @property
    def defined(self) -> bool:
        return self.z is not None


def group_zscores(
    fractions: np.ndarray, groups: Sequence[str], categories: Sequence[str], lexicon: CategoryLexicon, month: str = ""
) -> list[CategoryAssociation]:
    """Z-scores of each group against the population given by all rows of ``fractions``."""
    labels = np.asarray(groups)
    out = []
    for j, cat in enumerate(categories):
        cid = lexicon.category_id(cat)
        for g in sorted(set(groups)):
            sel = labels == g
            out.append(
                CategoryAssociation(cid, lexicon.categories[cid], g, month, zscore(fractions[sel, j], fractions[:, j]), int(sel.sum()))
            )
    return out


def monthly_group_zscores(
    tweets: Iterable[tuple[str, str, Sequence[str]]],
    lexicon: CategoryLexicon,
    categories: Sequence[str] | None = None,
) -> list[CategoryAssociation]:
    """Per (category, month, group) associations.

    ``tweets`` yields ``(month, group, words)``. Each month's tweets, both
    groups together, form the population for that month.
    """
    if categories is None:
        categories = sorted(lexicon.categories, key=_id_key)
    by_month: Mapping[str, list] = defaultdict(list)
    for month, group, words in tweets:
        by_month[month].append((group, list(words)))
    out = []
    for month in sorted(by_month):
        rows = by_month[month]
        fr = category_fractions([w for _, w in rows], lexicon, categories)
        out.extend(group_zscores(fr, [g for g, _ in rows], categories, lexicon, month))
    return out


def _id_key(cid: str):
    return (0, int(cid), cid) if cid.isdigit() else (1, 0, cid)
