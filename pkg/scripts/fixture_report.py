"""Run the whole pipeline on the bundled fixture corpus and summarize the outputs."""
import argparse
import json
from pathlib import Path

from attitude_spectrum import pipeline


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="fixture_run")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    cfg = pipeline.PipelineConfig(corpus=str(pipeline.bundled("fixture_corpus.jsonl")), output_dir=args.out_dir, rng_seed=args.seed)
    manifest = pipeline.run(cfg)
    print(json.dumps(manifest["summary"], indent=1, sort_keys=True))

    out = Path(args.out_dir)
    metrics = json.loads((out / "network_metrics.json").read_text())
    print("\nnetwork metrics:")
    for kind, m in sorted(metrics.items()):
        print(f"  {kind}: {json.dumps(m, sort_keys=True)}")

    print("\nstrongest category associations:")
    rows = [r for r in pipeline.read_csv(out / "liwc_zscores.csv") if r["z"]]
    rows.sort(key=lambda r: -abs(float(r["z"])))
    for r in rows[:10]:
        print(f"  {r['month']} {r['group']:<8} {r['category']:<10} z={float(r['z']):+.3f}  (n={r['n_tweets']})")


if __name__ == "__main__":
    main()
