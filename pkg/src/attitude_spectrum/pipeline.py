"""End-to-end run: ingest -> matrix -> seeds -> fit -> score -> lexicon -> network -> trends."""
from __future__ import annotations

import csv
import hashlib
import json
import logging
import os
from dataclasses import asdict, dataclass, field, fields, replace
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np
import yaml

from . import attitude, corpus, factorizer, lexicon, network, seeding, trends
from .attitude import AttitudeModel, ScoredTweet
from .corpus import RawPost

log = logging.getLogger(__name__)

ENV_OUTPUT_DIR = "ATTITUDE_SPECTRUM_OUTPUT_DIR"
ENV_SEED = "ATTITUDE_SPECTRUM_SEED"

# one exit code per stage
EXIT_CODES = {
    "config": 2,
    "ingest": 3,
    "seeding": 4,
    "fit": 5,
    "score": 6,
    "liwc": 7,
    "network": 8,
    "trends": 9,
    "synth": 10,
    "report": 11,
}

ARTIFACTS = (
    "model.json",
    "user_attitudes.csv",
    "scored_tweets.csv",
    "term_associations.csv",
    "liwc_zscores.csv",
    "network_metrics.json",
    "edges_mention.csv",
    "edges_retweet.csv",
    "trends.csv",
)


class StageError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
        self.exit_code = EXIT_CODES[stage]


def bundled(name: str) -> Path:
    return Path(str(resources.files("attitude_spectrum") / "data" / name))


@dataclass
class PipelineConfig:
    corpus: str = ""
    stopwords: str = field(default_factory=lambda: str(bundled("stopwords_es.txt")))
    seeds: str = field(default_factory=lambda: str(bundled("seeds.txt")))
    lexicon: str = field(default_factory=lambda: str(bundled("categories.dic")))
    output_dir: str = "out"
    min_df: int = 2
    threshold: float = seeding.DEFAULT_THRESHOLD
    include_retweets: bool = True
    distinct_terms: bool = False
    score_kinds: list[str] | None = None
    weighted_assortativity: bool = False
    lowess_fraction: float = 0.3
    lowess_iterations: int = 2
    rng_seed: int = 0
    factorization: factorizer.FactorizationConfig = field(default_factory=factorizer.FactorizationConfig)

    def __post_init__(self):
        if isinstance(self.factorization, Mapping):
            self.factorization = factorizer.FactorizationConfig(**self.factorization)
        # the run seed drives every stochastic stage
        if self.factorization.rng_seed != self.rng_seed:
            self.factorization = replace(self.factorization, rng_seed=self.rng_seed)

    def validate(self) -> None:
        if self.threshold <= 0:
            raise StageError("config", "threshold must be positive")
        if self.min_df < 1:
            raise StageError("config", "min_df must be >= 1")
        if not 0 < self.lowess_fraction <= 1:
            raise StageError("config", "lowess_fraction must be in (0, 1]")
        for name in ("corpus", "stopwords", "seeds", "lexicon"):
            path = getattr(self, name)
            if not path or not Path(path).is_file():
                raise StageError("config", f"{name} file not found: {path!r}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise StageError("config", f"unknown config keys: {sorted(unknown)}")
        return cls(**dict(data))


def load_config(path: str | Path | None = None, overrides: Mapping[str, Any] | None = None, env: Mapping[str, str] | None = None) -> PipelineConfig:
    """Config file (YAML), then environment, then explicit overrides."""
    data: dict[str, Any] = {}
    if path:
        try:
            loaded = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise StageError("config", f"cannot read config {path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise StageError("config", "config file must hold a mapping")
        data.update(loaded)
    env = os.environ if env is None else env
    if env.get(ENV_OUTPUT_DIR):
        data["output_dir"] = env[ENV_OUTPUT_DIR]
    if env.get(ENV_SEED):
        data["rng_seed"] = int(env[ENV_SEED])
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key == "factorization":
            merged = dict(data.get("factorization") or {})
            merged.update(value)
            data["factorization"] = merged
        else:
            data[key] = value
    try:
        return PipelineConfig.from_mapping(data)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, StageError):
            raise
        raise StageError("config", str(exc)) from exc


# --- CSV helpers ------------------------------------------------------------


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: str | Path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def read_csv(path: str | Path) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


SCORED_COLUMNS = ("post_id", "author_id", "timestamp", "tendency", "polarity", "group")


def write_scored(scored: Sequence[ScoredTweet], path: str | Path) -> None:
    write_csv(
        path,
        SCORED_COLUMNS,
        ((s.post_id, s.author_id, corpus.format_timestamp(s.timestamp), s.tendency, s.polarity, s.group) for s in scored),
    )


def read_scored(path: str | Path) -> list[ScoredTweet]:
    return [
        ScoredTweet(r["post_id"], r["author_id"], corpus.parse_timestamp(r["timestamp"]), float(r["tendency"]), float(r["polarity"]))
        for r in read_csv(path)
    ]


# --- stages -----------------------------------------------------------------


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except Exception as exc:  # noqa: BLE001 - every failure is reported with its stage
        raise StageError(name, f"{type(exc).__name__}: {exc}") from exc


def ingest(posts: Sequence[RawPost], stopwords, min_df: int = 2, include_retweets: bool = True) -> corpus.DocumentTermMatrix:
    docs = corpus.user_term_counts(posts, stopwords, include_retweets)
    return corpus.build_matrix(docs, min_df)


def supervise(dtm: corpus.DocumentTermMatrix, seeds: seeding.SeedLexicon, threshold: float) -> seeding.SupervisionMatrix:
    return seeding.build_supervision(seeding.seed_scores(dtm, seeds), threshold, dtm.rows)


def user_rows(am: AttitudeModel) -> list[tuple]:
    m = am.model
    labeled = m.L.sum(axis=1) < m.L.shape[1]
    return [
        (r, float(m.U[i, 0]), float(m.U[i, 1]), float(am.user_tendencies[i]), float(am.user_polarities[i]), int(labeled[i]))
        for i, r in enumerate(m.rows)
    ]


def term_rows(am: AttitudeModel) -> list[tuple]:
    m = am.model
    return [
        (t, float(m.T[0, j]), float(m.T[1, j]), float(am.term_tendencies[j]), float(am.term_polarities[j]))
        for j, t in enumerate(m.terms)
    ]


def liwc_table(posts: Sequence[RawPost], scored: Sequence[ScoredTweet], lex: lexicon.CategoryLexicon, stopwords) -> list[lexicon.CategoryAssociation]:
    text = {p.id: p.text for p in posts}
    tweets = (
        (s.month, s.group, [t.surface for t in corpus.tokenize(text[s.post_id], stopwords) if t.kind == "word"])
        for s in scored
    )
    return lexicon.monthly_group_zscores(tweets, lex)


def network_report(posts: Sequence[RawPost], am: AttitudeModel, weighted: bool = False) -> tuple[dict, dict[str, network.InteractionGraph]]:
    graphs = {
        "mention": network.build_mention_graph(posts).with_attitudes(am),
        "retweet": network.build_retweet_graph(posts).with_attitudes(am),
    }
    metrics = {kind: network.network_metrics(g, weighted) for kind, g in graphs.items()}
    return metrics, graphs


def trend_table(posts: Sequence[RawPost], scored: Sequence[ScoredTweet], fraction: float, iterations: int) -> list[tuple]:
    rows: list[tuple] = []
    weeks = trends.weekly_volume(posts)
    if len(weeks) >= 2:
        t = np.arange(len(weeks), dtype=float) * 7.0
        counts = np.array([c for _, c in weeks], dtype=float)
        smooth = trends.lowess(t, counts, fraction, iterations)
        stamps = [datetime(w.year, w.month, w.day, tzinfo=timezone.utc) for w, _ in weeks]
        rows += trends.trend_rows(stamps, counts, smooth, "weekly_count")
    if len(scored) >= 2:
        stamps = [s.timestamp for s in scored]
        t = trends.jitter_ties(trends.days_since(stamps), [s.post_id for s in scored])
        for series in ("tendency", "polarity"):
            y = np.array([getattr(s, series) for s in scored])
            rows += trends.trend_rows(stamps, y, trends.lowess(t, y, fraction, iterations), series)
    return rows


def sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def run(config: PipelineConfig) -> dict:
    """Execute every stage and write the report bundle plus ``manifest.json``."""
    _stage("config", config.validate)
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    posts = _stage("ingest", corpus.read_posts, config.corpus)
    stopwords = _stage("ingest", corpus.load_stopwords, config.stopwords)
    dtm = _stage("ingest", ingest, posts, stopwords, config.min_df, config.include_retweets)
    log.info("matrix %d users x %d terms", *dtm.shape)

    seeds = _stage("seeding", seeding.load_seed_lexicon, config.seeds)
    L = _stage("seeding", supervise, dtm, seeds, config.threshold)
    log.info("seed-labeled users: %.1f%%", 100 * L.label_fraction())

    model = _stage("fit", factorizer.fit, dtm, L, config.factorization)
    log.info("fit: %d iterations, converged=%s", model.iterations_run, model.converged)

    def score():
        am = AttitudeModel(model, stopwords, config.distinct_terms)
        return am, attitude.score_posts(posts, am, config.score_kinds)

    am, scored = _stage("score", score)
    lex = _stage("liwc", lexicon.load_lexicon, config.lexicon)
    assoc = _stage("liwc", liwc_table, posts, scored, lex, stopwords)
    metrics, graphs = _stage("network", network_report, posts, am, config.weighted_assortativity)
    trend = _stage("trends", trend_table, posts, scored, config.lowess_fraction, config.lowess_iterations)

    def report():
        model.save(out / "model.json")
        write_csv(out / "user_attitudes.csv", ("user_id", "empathy", "threat", "tendency", "polarity", "seed_labeled"), user_rows(am))
        write_scored(scored, out / "scored_tweets.csv")
        write_csv(out / "term_associations.csv", ("term", "empathy", "threat", "tendency", "polarity"), term_rows(am))
        write_association_csv(assoc, out / "liwc_zscores.csv")
        (out / "network_metrics.json").write_text(json.dumps(metrics, indent=1, sort_keys=True) + "\n", encoding="utf-8")
        for kind, g in graphs.items():
            network.write_edge_list(network.largest_scc(g) if g.nodes else g, out / f"edges_{kind}.csv")
        trends.write_trends(trend, out / "trends.csv")
        manifest = {
            "config": config.to_dict(),
            "rng_seed": config.rng_seed,
            "inputs": {name: sha256(getattr(config, name)) for name in ("corpus", "stopwords", "seeds", "lexicon")},
            "summary": {
                "posts": len(posts),
                "users": dtm.shape[0],
                "terms": dtm.shape[1],
                "seed_labeled_fraction": L.label_fraction(),
                "iterations": model.iterations_run,
                "converged": model.converged,
                "final_objective": model.objective_trace[-1],
            },
            "artifacts": {name: sha256(out / name) for name in ARTIFACTS},
        }
        (out / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n", encoding="utf-8")
        return manifest

    return _stage("report", report)


ASSOCIATION_COLUMNS = ("category_id", "category", "month", "group", "z", "n_tweets")


def write_association_csv(assoc: Sequence[lexicon.CategoryAssociation], path: str | Path) -> None:
    write_csv(path, ASSOCIATION_COLUMNS, ((a.category_id, a.category, a.month, a.group, a.z, a.n_tweets) for a in assoc))
