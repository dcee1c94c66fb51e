"""Mention/retweet graphs, largest strongly connected component, assortativity."""
from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .attitude import AttitudeModel, AttitudeScore, group_of
from .corpus import RawPost

ATTRIBUTES = ("empathy", "threat", "tendency")


class EmptyGraph(ValueError):
    pass


class DegenerateAttribute(ValueError):
    pass


@dataclass
class InteractionGraph:
    kind: str
    edges: dict[tuple[str, str], int] = field(default_factory=dict)
    # None marks users without a model row; they are skipped by assortativity
    nodes: dict[str, AttitudeScore | None] = field(default_factory=dict)

    def __post_init__(self):
        for (s, t), w in self.edges.items():
            if s == t:
                raise ValueError(f"self-loop on {s}")
            if w < 1:
                raise ValueError(f"edge {s}->{t} has weight {w}")
            self.nodes.setdefault(s, None)
            self.nodes.setdefault(t, None)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def successors(self) -> dict[str, list[str]]:
        adj: dict[str, list[str]] = {n: [] for n in sorted(self.nodes)}
        for s, t in sorted(self.edges):
            adj[s].append(t)
        return adj

    def subgraph(self, keep: Iterable[str]) -> "InteractionGraph":
        keep = set(keep)
        edges = {e: w for e, w in self.edges.items() if e[0] in keep and e[1] in keep}
        return InteractionGraph(self.kind, edges, {n: self.nodes[n] for n in sorted(keep)})

    def reversed(self) -> "InteractionGraph":
        return InteractionGraph(self.kind, {(t, s): w for (s, t), w in self.edges.items()}, dict(self.nodes))

    def with_attitudes(self, model: AttitudeModel) -> "InteractionGraph":
        nodes = {n: model.user_score(n) if model.has_user(n) else None for n in self.nodes}
        return InteractionGraph(self.kind, dict(self.edges), nodes)


def _count_edges(pairs: Iterable[tuple[str, str]]) -> dict[tuple[str, str], int]:
    return dict(sorted(Counter((s, t) for s, t in pairs if s != t).items()))


def build_mention_graph(posts: Iterable[RawPost]) -> InteractionGraph:
    """Edge u->v weighted by the number of u's posts mentioning v."""
    pairs = ((p.author_id, m) for p in posts for m in dict.fromkeys(p.mentioned_author_ids))
    return InteractionGraph("mention", _count_edges(pairs))


def build_retweet_graph(posts: Iterable[RawPost]) -> InteractionGraph:
    """Edge u->v weighted by the number of times u retweeted v."""
    pairs = ((p.author_id, p.retweeted_author_id) for p in posts if p.kind == "retweet")
    return InteractionGraph("retweet", _count_edges(pairs))


def strongly_connected_components(adj: dict[str, list[str]]) -> list[list[str]]:
    """Tarjan's algorithm, iterative to avoid recursion limits."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    components = []
    counter = 0
    for root in adj:
        if root in index:
            continue
        work = [(root, iter(adj[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, children = work[-1]
            for child in children:
                if child not in index:
                    index[child] = low[child] = counter
                    counter += 1
                    stack.append(child)
                    on_stack.add(child)
                    work.append((child, iter(adj.get(child, ()))))
                    break
                if child in on_stack:
                    low[node] = min(low[node], index[child])
            else:
                work.pop()
                if work:
                    parent = work[-1][0]
                    low[parent] = min(low[parent], low[node])
                if low[node] == index[node]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack.discard(w)
                        comp.append(w)
                        if w == node:
                            break
                    components.append(sorted(comp))
    return components


def largest_scc(graph: InteractionGraph) -> InteractionGraph:
    """Induced subgraph on the biggest SCC; ties go to the lexicographically smallest id set."""
    if not graph.nodes:
        raise EmptyGraph(f"{graph.kind} graph has no nodes")
    comps = strongly_connected_components(graph.successors())
    best = min(comps, key=lambda c: (-len(c), c))
    return graph.subgraph(best)


def pearson(x: np.ndarray, y: np.ndarray, weights: np.ndarray | None = None) -> float:
    w = np.ones_like(x) if weights is None else np.asarray(weights, dtype=float)
    total = w.sum()
    dx = x - (w * x).sum() / total
    dy = y - (w * y).sum() / total
    sxx = float((w * dx * dx).sum())
    syy = float((w * dy * dy).sum())
    sxy = float((w * dx * dy).sum())
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateAttribute("an endpoint attribute sequence is constant")
    r = sxy / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def node_attribute(score: AttitudeScore, attribute: str) -> float:
    if attribute == "tendency":
        return score.tendency
    if attribute in ("empathy", "threat"):
        return getattr(score, attribute)
    raise ValueError(f"unknown attribute {attribute!r}")


def edge_pairs(graph: InteractionGraph, attribute: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    src, dst, w = [], [], []
    for (s, t), weight in sorted(graph.edges.items()):
        a, b = graph.nodes.get(s), graph.nodes.get(t)
        if a is None or b is None:
            continue
        src.append(node_attribute(a, attribute))
        dst.append(node_attribute(b, attribute))
        w.append(weight)
    return np.array(src, float), np.array(dst, float), np.array(w, float)


@dataclass(frozen=True)
class AssortativityResult:
    attribute: str
    coefficient: float | None
    n_edges: int
    weighted: bool = False


def assortativity(graph: InteractionGraph, attribute: str, weighted: bool = False) -> AssortativityResult:
    """Pearson correlation of (source, target) attribute pairs over directed edges.

    Weighted mode counts every edge ``weight`` times.
    """
    if not graph.nodes:
        raise EmptyGraph(f"{graph.kind} graph has no nodes")
    x, y, w = edge_pairs(graph, attribute)
    if len(x) < 2:
        raise DegenerateAttribute(f"need at least two scored edges, got {len(x)}")
    r = pearson(x, y, w if weighted else None)
    return AssortativityResult(attribute, r, len(x), weighted)


def network_metrics(graph: InteractionGraph, weighted: bool = False) -> dict:
    """Size of the graph and its largest SCC plus per-attribute assortativity of the SCC."""
    out = {"kind": graph.kind, "nodes": graph.n_nodes, "edges": graph.n_edges}
    if not graph.nodes:
        out["largest_scc"] = None
        return out
    scc = largest_scc(graph)
    coeffs = {}
    for attribute in ATTRIBUTES:
        try:
            res = assortativity(scc, attribute, weighted)
            coeffs[attribute] = {"coefficient": res.coefficient, "n_edges": res.n_edges}
        except DegenerateAttribute as exc:
            coeffs[attribute] = {"coefficient": None, "n_edges": len(edge_pairs(scc, attribute)[0]), "reason": str(exc)}
    out["largest_scc"] = {"nodes": scc.n_nodes, "edges": scc.n_edges, "assortativity": coeffs}
    return out


EDGE_COLUMNS = ("source", "target", "weight", "source_tendency", "source_group")


def write_edge_list(graph: InteractionGraph, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(EDGE_COLUMNS)
        for (s, t), w in sorted(graph.edges.items()):
            score = graph.nodes.get(s)
            if score is None:
                writer.writerow([s, t, w, "", ""])
            else:
                writer.writerow([s, t, w, repr(score.tendency), group_of(score.tendency)])
