import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import sparse

from attitude_spectrum import seeding
from attitude_spectrum.corpus import Vocabulary
from attitude_spectrum.pipeline import bundled
from attitude_spectrum.seeding import SeedLexicon, build_supervision, score_seeds


@pytest.fixture(scope="module")
def table1():
    return seeding.load_seed_lexicon(bundled("seeds.txt"))


def test_load_seed_lexicon(table1):
    assert "#todossomosmigrantes" in table1.empathy_terms
    assert "bienvenidos a chile" in table1.empathy_terms
    assert "@oimchile" in table1.empathy_terms
    assert "inmigracion descontrolada" in table1.threat_terms
    assert not table1.empathy_terms & table1.threat_terms


def test_lexicon_rejects_overlap():
    with pytest.raises(seeding.SeedLexiconError):
        SeedLexicon.from_phrases(["#a"], ["#A"])


def test_load_rejects_orphan_terms(tmp_path):
    p = tmp_path / "s.txt"
    p.write_text("#x\n[empathy]\n#y\n", encoding="utf-8")
    with pytest.raises(seeding.SeedLexiconError, match=":1: term outside"):
        seeding.load_seed_lexicon(p)


def test_score_seeds_direct_sum(table1):
    vocab = Vocabulary(["#chileterecibe", "#nomasilegales", "otro"], {"#chileterecibe": 1, "#nomasilegales": 1, "otro": 1})
    assert score_seeds(np.array([0.3, 0.2, 0.9]), vocab, table1) == pytest.approx((0.3, 0.2))


def test_score_seeds_no_overlap(table1):
    vocab = Vocabulary(["x", "y"], {"x": 1, "y": 1})
    assert score_seeds(sparse.csr_matrix([[0.6, 0.8]]), vocab, table1) == (0.0, 0.0)


def test_score_seeds_loop_oracle():
    rng = np.random.default_rng(11)
    terms = [f"t{i}" for i in range(40)]
    vocab = Vocabulary(terms, {t: 1 for t in terms})
    for _ in range(50):
        row = np.where(rng.random(40) < 0.3, rng.random(40), 0.0)
        picks = rng.choice(terms + ["missing1", "missing2"], size=10, replace=False)
        lex = SeedLexicon(frozenset(picks[:5]), frozenset(picks[5:]))
        expected = []
        for group in (lex.empathy_terms, lex.threat_terms):
            total = 0.0
            for j, t in enumerate(terms):
                if t in group:
                    total += row[j]
            expected.append(total)
        got = score_seeds(sparse.csr_matrix(row), vocab, lex)
        assert got[0] == pytest.approx(expected[0], abs=1e-15)
        assert got[1] == pytest.approx(expected[1], abs=1e-15)


def test_seed_scores_matches_rowwise(table1):
    rng = np.random.default_rng(2)
    terms = sorted(table1.empathy_terms | table1.threat_terms | {"x", "y"})
    vocab = Vocabulary(terms, {t: 1 for t in terms})
    from attitude_spectrum.corpus import DocumentTermMatrix

    m = sparse.csr_matrix(np.where(rng.random((6, len(terms))) < 0.4, rng.random((6, len(terms))), 0.0))
    dtm = DocumentTermMatrix([str(i) for i in range(6)], vocab, m)
    vec = seeding.seed_scores(dtm, table1)
    for i in range(6):
        assert tuple(vec[i]) == pytest.approx(score_seeds(m[i], vocab, table1))


@pytest.mark.parametrize(
    "scores,row",
    [((0.30, 0.10), (1, 0)), ((0.10, 0.30), (0, 1)), ((0.05, 0.05), (1, 1)), ((0.26, 0.27), (1, 1)), ((0.25, 0.0), (1, 0))],
)
def test_build_supervision(scores, row):
    assert tuple(build_supervision([scores]).values[0]) == row


def test_build_supervision_rejects_bad_threshold():
    with pytest.raises(ValueError):
        build_supervision([(0.1, 0.1)], threshold=0)


score_lists = st.lists(st.tuples(st.floats(0, 2), st.floats(0, 2)), min_size=1, max_size=30)


@given(score_lists, st.floats(0.01, 1.0), st.floats(0.01, 1.0))
def test_label_fraction_non_increasing_in_threshold(scores, a, b):
    lo, hi = sorted((a, b))
    assert build_supervision(scores, hi).label_fraction() <= build_supervision(scores, lo).label_fraction()


def test_doubly_labeled_users_count_as_labeled():
    L = build_supervision([(1.0, 0.5)], 0.5)
    assert tuple(L.values[0]) == (1, 1)
    assert L.label_fraction() == 1.0


@given(score_lists)
def test_supervision_has_no_zero_rows(scores):
    L = build_supervision(scores)
    assert set(np.unique(L.values)) <= {0, 1}
    assert (L.values.sum(axis=1) >= 1).all()


@given(st.lists(st.floats(0, 1), min_size=4, max_size=4), st.integers(0, 3), st.floats(0, 1))
def test_score_monotone_in_seed_cells(row, j, bump):
    vocab = Vocabulary(["a", "b", "c", "d"], dict.fromkeys("abcd", 1))
    lex = SeedLexicon(frozenset({"a", "b"}), frozenset({"c"}))
    before = score_seeds(np.array(row), vocab, lex)
    bumped = np.array(row)
    bumped[j] += bump
    after = score_seeds(bumped, vocab, lex)
    assert after[0] >= before[0] and after[1] >= before[1]
