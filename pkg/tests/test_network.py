import csv
from datetime import datetime, timezone

import numpy as np
import pytest
from hypothesis import given, strategies as st

from attitude_spectrum import network
from attitude_spectrum.attitude import AttitudeScore
from attitude_spectrum.corpus import RawPost
from attitude_spectrum.network import InteractionGraph, assortativity, largest_scc

T0 = datetime(2017, 1, 1, tzinfo=timezone.utc)


def mention(pid, author, *targets):
    return RawPost(pid, author, T0, "x", mentioned_author_ids=tuple(targets))


def retweet(pid, author, original):
    return RawPost(pid, author, T0, "x", kind="retweet", retweeted_author_id=original)


def test_mention_counts():
    g = network.build_mention_graph([mention(str(i), "A", "B") for i in range(3)])
    assert g.edges == {("A", "B"): 3}


def test_self_mention_dropped():
    g = network.build_mention_graph([mention("1", "A", "A")])
    assert g.edges == {} and g.nodes == {}


def test_mention_counting_oracle():
    rng = np.random.default_rng(0)
    users = [f"u{i}" for i in range(12)]
    posts = []
    for i in range(100):
        k = rng.integers(0, 3)
        posts.append(mention(str(i), users[rng.integers(12)], *rng.choice(users, size=k, replace=False)))
    expected = {}
    for p in posts:
        for t in set(p.mentioned_author_ids):
            if t != p.author_id:
                expected[p.author_id, t] = expected.get((p.author_id, t), 0) + 1
    assert network.build_mention_graph(posts).edges == expected


def test_retweet_counts_and_self_loop():
    g = network.build_retweet_graph([retweet("1", "A", "B"), retweet("2", "A", "B"), retweet("3", "A", "B"), retweet("4", "C", "C")])
    assert g.edges == {("A", "B"): 3}


def test_retweet_counting_oracle():
    rng = np.random.default_rng(1)
    users = [f"u{i}" for i in range(10)]
    posts = [retweet(str(i), users[rng.integers(10)], users[rng.integers(10)]) for i in range(100)]
    posts += [mention("m", "u1", "u2")]
    expected = {}
    for p in posts:
        if p.kind == "retweet" and p.author_id != p.retweeted_author_id:
            key = (p.author_id, p.retweeted_author_id)
            expected[key] = expected.get(key, 0) + 1
    assert network.build_retweet_graph(posts).edges == expected


def graph(edges, kind="mention"):
    return InteractionGraph(kind, {e: 1 for e in edges})


def test_scc_cycle_plus_dangling():
    g = graph([("a", "b"), ("b", "c"), ("c", "a"), ("c", "d")])
    assert set(largest_scc(g).nodes) == {"a", "b", "c"}
    assert largest_scc(g).n_edges == 3


def test_scc_dag_tie_rule():
    g = graph([("b", "a"), ("c", "b"), ("c", "a")])
    assert list(largest_scc(g).nodes) == ["a"]


def test_scc_empty():
    with pytest.raises(network.EmptyGraph):
        largest_scc(InteractionGraph("mention"))


def reachability_oracle(nodes, edges):
    reach = {n: {n} for n in nodes}
    changed = True
    while changed:
        changed = False
        for s, t in edges:
            new = reach[t] - reach[s]
            if new:
                reach[s] |= new
                changed = True
    comps = {frozenset(m for m in reach[n] if n in reach[m]) for n in nodes}
    return min(comps, key=lambda c: (-len(c), sorted(c)))


def random_digraph(rng, n=50, p=None):
    p = rng.uniform(0.01, 0.06) if p is None else p
    edges = {}
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < p:
                edges[f"n{i:02d}", f"n{j:02d}"] = int(rng.integers(1, 6))
    nodes = {f"n{i:02d}": None for i in range(n)}
    return InteractionGraph("mention", edges, nodes)


def test_scc_matches_reachability_oracle():
    rng = np.random.default_rng(2)
    for _ in range(30):
        g = random_digraph(rng)
        assert set(largest_scc(g).nodes) == reachability_oracle(list(g.nodes), list(g.edges))


def test_scc_idempotent():
    rng = np.random.default_rng(3)
    g = largest_scc(random_digraph(rng, p=0.05))
    again = largest_scc(g)
    assert again.nodes.keys() == g.nodes.keys() and again.edges == g.edges


def test_scc_deep_chain_no_recursion_limit():
    n = 5000
    g = graph([(f"n{i}", f"n{i + 1}") for i in range(n)] + [(f"n{n}", "n0")])
    assert largest_scc(g).n_nodes == n + 1


def scored_graph(edges, values, attr="empathy"):
    nodes = {n: AttitudeScore(v, 1 - v) for n, v in values.items()}
    return InteractionGraph("retweet", dict(edges), nodes)


def test_perfect_homophily():
    g = scored_graph({("a", "b"): 1, ("b", "a"): 1, ("c", "d"): 1, ("d", "c"): 1}, {"a": 1.0, "b": 1.0, "c": 0.0, "d": 0.0})
    assert assortativity(g, "empathy").coefficient == 1.0


def test_assortativity_pearson_oracle():
    rng = np.random.default_rng(4)
    for _ in range(30):
        g = random_digraph(rng, p=0.05)
        g.nodes = {n: AttitudeScore(float(rng.random()), float(rng.random())) for n in g.nodes}
        for attr in ("empathy", "threat", "tendency"):
            pairs = [(getattr(g.nodes[s], attr), getattr(g.nodes[t], attr)) for s, t in g.edges]
            x, y = np.array(pairs).T
            assert abs(assortativity(g, attr).coefficient - np.corrcoef(x, y)[0, 1]) < 1e-12


def test_weighted_variant_repeats_pairs():
    rng = np.random.default_rng(5)
    g = random_digraph(rng, p=0.05)
    g.nodes = {n: AttitudeScore(float(rng.random()), 0.0) for n in g.nodes}
    x, y = [], []
    for (s, t), w in g.edges.items():
        x += [g.nodes[s].empathy] * w
        y += [g.nodes[t].empathy] * w
    assert abs(assortativity(g, "empathy", weighted=True).coefficient - np.corrcoef(x, y)[0, 1]) < 1e-12


def test_weights_ignored_when_unweighted():
    rng = np.random.default_rng(6)
    g = random_digraph(rng, p=0.05)
    g.nodes = {n: AttitudeScore(float(rng.random()), 0.0) for n in g.nodes}
    heavy = InteractionGraph(g.kind, {e: w * 7 + 1 for e, w in g.edges.items()}, dict(g.nodes))
    assert assortativity(g, "empathy").coefficient == assortativity(heavy, "empathy").coefficient


def test_null_model_near_zero():
    rng = np.random.default_rng(7)
    n = 400
    edges = set()
    while len(edges) < 2000:
        s, t = rng.integers(n, size=2)
        if s != t:
            edges.add((f"n{s}", f"n{t}"))
    g = scored_graph({e: 1 for e in edges}, {f"n{i}": float(rng.random()) for i in range(n)})
    assert abs(assortativity(g, "empathy").coefficient) < 0.1


def test_reverse_equals_swapped_pairs():
    rng = np.random.default_rng(8)
    g = random_digraph(rng, p=0.05)
    g.nodes = {n: AttitudeScore(float(rng.random()), 0.0) for n in g.nodes}
    x, y = network.edge_pairs(g, "empathy")[:2]
    assert abs(assortativity(g.reversed(), "empathy").coefficient - np.corrcoef(y, x)[0, 1]) < 1e-12


@given(st.floats(0.1, 10), st.floats(-5, 5))
def test_affine_invariance(a, b):
    rng = np.random.default_rng(9)
    base = {f"n{i}": float(rng.random()) for i in range(20)}
    edges = {(f"n{i}", f"n{(i * 7 + 3) % 20}"): 1 for i in range(20)}
    edges.update({(f"n{i}", f"n{(i + 1) % 20}"): 1 for i in range(20)})
    g1 = InteractionGraph("mention", edges, {n: AttitudeScore(v, 0.0) for n, v in base.items()})
    g2 = InteractionGraph("mention", edges, {n: AttitudeScore(a * v + b, 0.0) for n, v in base.items()})
    assert assortativity(g1, "empathy").coefficient == pytest.approx(assortativity(g2, "empathy").coefficient, abs=1e-9)


def test_degenerate_attribute():
    g = scored_graph({("a", "b"): 1, ("b", "a"): 1}, {"a": 0.5, "b": 0.5})
    with pytest.raises(network.DegenerateAttribute):
        assortativity(g, "empathy")


def test_unscored_nodes_excluded():
    g = scored_graph({("a", "b"): 1, ("b", "a"): 1, ("c", "d"): 1, ("d", "c"): 1, ("a", "x"): 1}, {"a": 1.0, "b": 1.0, "c": 0.0, "d": 0.0})
    assert g.nodes["x"] is None
    res = assortativity(g, "empathy")
    assert res.n_edges == 4 and res.coefficient == 1.0


def test_edge_list_export(tmp_path):
    g = scored_graph({("a", "b"): 2, ("b", "a"): 1}, {"a": 0.2, "b": 0.9})
    path = tmp_path / "e.csv"
    network.write_edge_list(g, path)
    rows = list(csv.DictReader(open(path)))
    assert rows[0] == {"source": "a", "target": "b", "weight": "2", "source_tendency": repr(0.2 - 0.8), "source_group": "threat"}
    assert rows[1]["source_group"] == "empathy"
