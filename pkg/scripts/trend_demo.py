"""Weekly volume and LOWESS trend of a synthetic corpus, one line per week and group."""
import argparse

from attitude_spectrum import attitude, corpus, factorizer, pipeline, seeding, synthetic, trends


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fraction", type=float, default=0.3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    synth = synthetic.generate_synthetic(synthetic.SyntheticSpec(rng_seed=args.seed))
    stop = corpus.load_stopwords(pipeline.bundled("stopwords_es.txt"))
    dtm = pipeline.ingest(synth.posts, stop)
    seeds = seeding.load_seed_lexicon(pipeline.bundled("seeds.txt"))
    model = factorizer.fit(dtm, pipeline.supervise(dtm, seeds, seeding.DEFAULT_THRESHOLD))
    scored = attitude.score_posts(synth.posts, attitude.AttitudeModel(model, stop))
    print("  ".join(trends.TREND_COLUMNS))
    for row in pipeline.trend_table(synth.posts, scored, args.fraction, 2):
        print("  ".join(f"{v:.4f}" if isinstance(v, float) else str(v) for v in row))


if __name__ == "__main__":
    main()
