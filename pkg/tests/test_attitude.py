from datetime import datetime, timezone

import numpy as np
import pytest
from hypothesis import given, strategies as st

from attitude_spectrum import attitude
from attitude_spectrum.attitude import AttitudeModel, AttitudeScore, ScoredTweet, group_tweets, polarity, tendency
from attitude_spectrum.corpus import RawPost, extract_terms, tokenize
from attitude_spectrum.factorizer import FactorModel

T0 = datetime(2017, 5, 1, tzinfo=timezone.utc)
unit = st.floats(0, 1)


def test_user_tendency_examples():
    assert tendency(AttitudeScore(0.7, 0.2)) == pytest.approx(0.5)
    assert tendency(AttitudeScore(0.0, 1.0)) == -1.0
    assert polarity(AttitudeScore(0.7, 0.2)) == pytest.approx(0.9)
    assert polarity(AttitudeScore(0.0, 0.0)) == 0.0


def test_zero_tendency_is_not_neutral():
    s = AttitudeScore(0.5, 0.5)
    assert s.tendency == 0.0 and s.polarity == 1.0


@given(unit)
def test_symmetric_score_has_zero_tendency(x):
    assert tendency(AttitudeScore(x, x)) == 0.0


@given(unit, unit)
def test_tendency_bounded_by_polarity(a, b):
    s = AttitudeScore(a, b)
    assert abs(s.tendency) <= s.polarity
    assert tendency(AttitudeScore(b, a)) == -s.tendency
    assert polarity(AttitudeScore(b, a)) == s.polarity


def toy_model(terms=("chile", "familia", "dinero", "#chileterecibe")):
    T = np.array([[0.4, 0.3, 0.0, 0.3], [0.1, 0.0, 0.8, 0.1]])
    U = np.array([[0.6, 0.0], [0.2, 0.5]])
    return FactorModel(U=U, T=T, L=np.array([[1.0, 0.0], [1.0, 1.0]]), rows=["a", "b"], terms=list(terms))


def test_term_scores():
    am = AttitudeModel(toy_model())
    s = am.term_score("chile")
    assert s.tendency == pytest.approx(0.3) and s.polarity == pytest.approx(0.5)
    with pytest.raises(attitude.UnknownTerm):
        am.term_score("nope")


def test_user_scores():
    am = AttitudeModel(toy_model())
    assert am.user_score("a") == AttitudeScore(0.6, 0.0)
    with pytest.raises(attitude.UnknownUser):
        am.user_score("zz")


def post(text, pid="p", ts=T0):
    return RawPost(pid, "a", ts, text)


def test_tweet_single_term():
    m = toy_model()
    assert attitude.tweet_tendency(post("dinero"), m) == pytest.approx(-0.8)
    assert attitude.tweet_polarity(post("dinero"), m) == pytest.approx(0.8)


def test_tweet_without_vocabulary_terms():
    m = toy_model()
    assert attitude.tweet_tendency(post("nada conocido"), m) == 0.0
    assert attitude.tweet_polarity(post(""), m) == 0.0


def test_tweet_loop_oracle():
    rng = np.random.default_rng(0)
    words = ["w%d" % i for i in range(12)]
    terms = sorted({t for i in range(40) for t in extract_terms(tokenize(" ".join(rng.choice(words, 5))))})
    T = rng.random((2, len(terms)))
    m = FactorModel(U=np.ones((1, 2)), T=T, L=np.ones((1, 2)), rows=["a"], terms=terms)
    am = AttitudeModel(m)
    col = {t: j for j, t in enumerate(terms)}
    for _ in range(100):
        text = " ".join(rng.choice(words + ["#x", "oov"], size=rng.integers(0, 10)))
        t_sum = p_sum = 0.0
        for term, count in extract_terms(tokenize(text)).items():
            if term in col:
                t_sum += count * (T[0, col[term]] - T[1, col[term]])
                p_sum += count * (T[0, col[term]] + T[1, col[term]])
        assert abs(am.text_tendency(text) - t_sum) < 1e-12
        assert abs(am.text_polarity(text) - p_sum) < 1e-12


def test_distinct_term_flag():
    m = toy_model()
    assert AttitudeModel(m).text_tendency("dinero dinero") == pytest.approx(-1.6)
    assert AttitudeModel(m, distinct_terms=True).text_tendency("dinero dinero") == pytest.approx(-0.8)


def test_additive_under_concatenation():
    am = AttitudeModel(toy_model())
    a, b = "chile #chileterecibe", "dinero familia"
    # separate lines keep n-grams from straddling the join
    joined = extract_terms(tokenize(a)) + extract_terms(tokenize(b))
    expected = sum(c * am.term_score(t).tendency for t, c in joined.items() if t in am._col)
    assert am.text_tendency(a) + am.text_tendency(b) == pytest.approx(expected, abs=1e-12)


def test_column_swap_antisymmetry():
    m = toy_model()
    swapped = FactorModel(U=m.U[:, ::-1].copy(), T=m.T[::-1].copy(), L=m.L[:, ::-1].copy(), rows=m.rows, terms=m.terms)
    a, b = AttitudeModel(m), AttitudeModel(swapped)
    np.testing.assert_array_equal(a.term_tendencies, -b.term_tendencies)
    np.testing.assert_array_equal(a.term_polarities, b.term_polarities)
    np.testing.assert_array_equal(a.user_tendencies, -b.user_tendencies)


def scored(values):
    return [ScoredTweet(str(i), "a", T0, v, abs(v)) for i, v in enumerate(values)]


def test_group_boundary():
    groups = group_tweets(scored([0.1, 0.0, -0.1]))
    assert [t.tendency for t in groups["empathy"]] == [0.1, 0.0]
    assert [t.tendency for t in groups["threat"]] == [-0.1]


def test_group_all_positive():
    assert group_tweets(scored([0.3, 1.0]))["threat"] == []


def test_group_partition_law():
    vals = np.random.default_rng(1).normal(size=1000)
    groups = group_tweets(scored(vals))
    assert len(groups["empathy"]) + len(groups["threat"]) == 1000
    assert all(t.tendency >= 0 for t in groups["empathy"])
    assert all(t.tendency < 0 for t in groups["threat"])


def test_month_bucket():
    assert ScoredTweet("1", "a", datetime(2017, 11, 19, tzinfo=timezone.utc), 0, 0).month == "2017-11"


def test_top_terms():
    am = AttitudeModel(toy_model())
    assert am.top_terms("empathy", 2) == ["chile", "familia"]
    assert am.top_terms("threat", 1) == ["dinero"]
    assert am.top_terms("empathy", 5, unigrams_only=True) == ["chile", "familia", "dinero"]
