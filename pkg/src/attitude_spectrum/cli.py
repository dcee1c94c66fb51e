"""Command line entry point: ``attitude-spectrum <subcommand>``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import attitude, corpus, factorizer, lexicon, network, pipeline, seeding, synthetic, trends
from .pipeline import StageError, bundled

log = logging.getLogger("attitude_spectrum")


def _factorization_overrides(args) -> dict:
    keys = {"k": "k", "max_iterations": "max_iterations", "tolerance": "relative_tolerance", "init": "init"}
    return {dst: getattr(args, src) for src, dst in keys.items() if getattr(args, src, None) is not None}


def _add_fit_flags(p):
    p.add_argument("--max-iterations", type=int, dest="max_iterations")
    p.add_argument("--tolerance", type=float, help="relative objective change that stops the solver")
    p.add_argument("--init", choices=("random_uniform", "nndsvd"))
    p.add_argument("--seed", type=int, dest="rng_seed")


def cmd_synth(args) -> dict:
    spec = synthetic.SyntheticSpec(
        n_users_per_attitude=args.users,
        posts_per_user=args.posts,
        seed_user_fraction=args.seed_fraction,
        noise_rate=args.noise,
        intra_group_preference=args.intra,
        rng_seed=args.rng_seed or 0,
    )
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    synth = synthetic.generate_synthetic(spec)
    synth.write(out / "corpus.jsonl", out / "labels.json")
    return {"posts": len(synth.posts), "users": len(synth.labels), "corpus": str(out / "corpus.jsonl")}


def cmd_ingest(args) -> dict:
    posts = corpus.read_posts(args.corpus)
    stop = corpus.load_stopwords(args.stopwords)
    dtm = pipeline.ingest(posts, stop, args.min_df, not args.exclude_retweets)
    Path(args.out).write_text(json.dumps(dtm.to_dict()) + "\n", encoding="utf-8")
    return {"users": dtm.shape[0], "terms": dtm.shape[1], "matrix": args.out}


def cmd_fit(args) -> dict:
    try:
        dtm = corpus.DocumentTermMatrix.from_dict(json.loads(Path(args.matrix).read_text(encoding="utf-8")))
        seeds = seeding.load_seed_lexicon(args.seeds)
        L = pipeline.supervise(dtm, seeds, args.threshold)
    except Exception as exc:  # noqa: BLE001
        raise StageError("seeding", str(exc)) from exc
    cfg = factorizer.FactorizationConfig(rng_seed=args.rng_seed or 0, **_factorization_overrides(args))
    try:
        model = factorizer.fit(dtm, L, cfg)
    except Exception as exc:  # noqa: BLE001
        raise StageError("fit", str(exc)) from exc
    model.save(args.out)
    return {"iterations": model.iterations_run, "converged": model.converged, "labeled": L.label_fraction()}


def cmd_score(args) -> dict:
    posts = corpus.read_posts(args.corpus)
    am = attitude.AttitudeModel(factorizer.FactorModel.load(args.model), corpus.load_stopwords(args.stopwords), args.distinct)
    scored = attitude.score_posts(posts, am, args.kinds)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    pipeline.write_scored(scored, out / "scored_tweets.csv")
    pipeline.write_csv(out / "term_associations.csv", ("term", "empathy", "threat", "tendency", "polarity"), pipeline.term_rows(am))
    pipeline.write_csv(
        out / "user_attitudes.csv", ("user_id", "empathy", "threat", "tendency", "polarity", "seed_labeled"), pipeline.user_rows(am)
    )
    return {"scored": len(scored)}


def cmd_liwc(args) -> dict:
    posts = corpus.read_posts(args.corpus)
    scored = pipeline.read_scored(args.scored)
    lex = lexicon.load_lexicon(args.lexicon)
    assoc = pipeline.liwc_table(posts, scored, lex, corpus.load_stopwords(args.stopwords))
    pipeline.write_association_csv(assoc, args.out)
    return {"rows": len(assoc)}


def cmd_network(args) -> dict:
    posts = corpus.read_posts(args.corpus)
    am = attitude.AttitudeModel(factorizer.FactorModel.load(args.model))
    metrics, graphs = pipeline.network_report(posts, am, args.weighted)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "network_metrics.json").write_text(json.dumps(metrics, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    for kind, g in graphs.items():
        network.write_edge_list(network.largest_scc(g) if g.nodes else g, out / f"edges_{kind}.csv")
    return metrics


def cmd_trends(args) -> dict:
    posts = corpus.read_posts(args.corpus)
    scored = pipeline.read_scored(args.scored)
    rows = pipeline.trend_table(posts, scored, args.fraction, args.robust_iterations)
    trends.write_trends(rows, args.out)
    return {"rows": len(rows)}


def cmd_run(args) -> dict:
    overrides = {
        "corpus": args.corpus,
        "stopwords": args.stopwords,
        "seeds": args.seeds,
        "lexicon": args.lexicon,
        "output_dir": args.out_dir,
        "min_df": args.min_df,
        "threshold": args.threshold,
        "rng_seed": args.rng_seed,
        "lowess_fraction": args.fraction,
        "lowess_iterations": args.robust_iterations,
        "factorization": _factorization_overrides(args) or None,
    }
    cfg = pipeline.load_config(args.config, overrides)
    manifest = pipeline.run(cfg)
    return {"output_dir": cfg.output_dir, **manifest["summary"]}


# each subcommand's failures map to the exit code of its stage
STAGE_OF = {
    "synth": "synth",
    "ingest": "ingest",
    "fit": "fit",
    "score": "score",
    "liwc": "liwc",
    "network": "network",
    "trends": "trends",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="attitude-spectrum", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    stop_default = str(bundled("stopwords_es.txt"))

    p = sub.add_parser("synth", help="generate a planted synthetic corpus")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--users", type=int, default=100, help="users per attitude")
    p.add_argument("--posts", type=int, default=5, help="posts per user")
    p.add_argument("--seed-fraction", type=float, default=0.2)
    p.add_argument("--noise", type=float, default=0.3)
    p.add_argument("--intra", type=float, default=0.8, help="intra-group interaction preference")
    p.add_argument("--seed", type=int, dest="rng_seed")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ingest", help="build the TF-IDF user-term matrix")
    p.add_argument("--corpus", required=True)
    p.add_argument("--stopwords", default=stop_default)
    p.add_argument("--min-df", type=int, default=2)
    p.add_argument("--exclude-retweets", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("fit", help="fit the topic-supervised factorization")
    p.add_argument("--matrix", required=True)
    p.add_argument("--seeds", default=str(bundled("seeds.txt")))
    p.add_argument("--threshold", type=float, default=seeding.DEFAULT_THRESHOLD)
    _add_fit_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("score", help="score posts, terms and users")
    p.add_argument("--corpus", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--stopwords", default=stop_default)
    p.add_argument("--kinds", nargs="*", choices=corpus.POST_KINDS)
    p.add_argument("--distinct", action="store_true", help="count each term once per post")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("liwc", help="monthly category z-scores per attitude group")
    p.add_argument("--corpus", required=True)
    p.add_argument("--scored", required=True)
    p.add_argument("--lexicon", default=str(bundled("categories.dic")))
    p.add_argument("--stopwords", default=stop_default)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_liwc)

    p = sub.add_parser("network", help="interaction graphs, largest SCC and assortativity")
    p.add_argument("--corpus", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--weighted", action="store_true")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_network)

    p = sub.add_parser("trends", help="weekly volume and LOWESS trends")
    p.add_argument("--corpus", required=True)
    p.add_argument("--scored", required=True)
    p.add_argument("--fraction", type=float, default=0.3)
    p.add_argument("--robust-iterations", type=int, default=2)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_trends)

    p = sub.add_parser("run", help="full pipeline with report bundle and manifest")
    p.add_argument("--config", help="YAML config file")
    p.add_argument("--corpus")
    p.add_argument("--stopwords")
    p.add_argument("--seeds")
    p.add_argument("--lexicon")
    p.add_argument("--out-dir")
    p.add_argument("--min-df", type=int)
    p.add_argument("--threshold", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--fraction", type=float)
    p.add_argument("--robust-iterations", type=int)
    _add_fit_flags(p)
    p.set_defaults(func=cmd_run)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        result = args.func(args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # noqa: BLE001
        stage = STAGE_OF.get(args.command, "report")
        print(f"error: [{stage}] {type(exc).__name__}: {exc}", file=sys.stderr)
        return pipeline.EXIT_CODES[stage]
    print(json.dumps(result, indent=1, sort_keys=True, default=str))
    return 0


if __name__ == "__main__":
    sys.exit(main())
