"""Attitude spectrum analysis of social media posts.

Topic-supervised NMF places users and terms on an empathy/threat spectrum;
the remaining modules score posts, compare lexical categories between
attitude groups, measure network assortativity and smooth temporal trends.
"""
from .attitude import AttitudeModel, AttitudeScore, group_tweets, polarity, tendency
from .corpus import RawPost, build_matrix, extract_terms, read_posts, tokenize
from .factorizer import FactorizationConfig, FactorModel, fit, normalize_model, objective
from .seeding import SeedLexicon, build_supervision, score_seeds

__version__ = "0.1.0"
