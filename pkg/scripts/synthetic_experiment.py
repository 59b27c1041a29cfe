"""Run the full pipeline on synthetic datasets over several seeds.

Usage: python scripts/synthetic_experiment.py [--seeds 1 2 3] [--hard] [--enhance MODE]

Prints resubstitution and held-out accuracy per seed, then the mean.
"""

import argparse
import statistics
import tempfile
from dataclasses import replace
from pathlib import Path

from ovoscope.enhancement import ENHANCE_MODES
from ovoscope.evaluation import percent_str, run_scenarios
from ovoscope.pipeline import PipelineConfig, extract_all, load_manifest, split, to_samples
from ovoscope.svm import train_smo
from ovoscope.synthgen import generate_dataset


def run_seed(seed, hard, cfg, n_per_class):
    with tempfile.TemporaryDirectory() as tmp:
        generate_dataset(n_per_class, n_per_class, seed, tmp, hard=hard)
        train, test = split(load_manifest(Path(tmp) / "manifest.json"), seed)
        train_rows, _ = extract_all(train, cfg)
        test_rows, _ = extract_all(test, cfg)
    model = train_smo(to_samples(train_rows), replace(cfg.svm, seed=seed))
    resub = run_scenarios(model, to_samples(train_rows), len(train_rows))
    held = run_scenarios(model, to_samples(test_rows), 10)
    return model, resub, held


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3, 4, 5])
    ap.add_argument("--hard", action="store_true")
    ap.add_argument("--enhance", choices=ENHANCE_MODES, default="clahe-he")
    ap.add_argument("--per-class", type=int, default=50)
    args = ap.parse_args()

    cfg = PipelineConfig(enhance_mode=args.enhance)
    print(f"{'seed':>4}  {'conv':>5}  {'resub':>7}  {'held-out':>8}  FP  FN")
    held_means = []
    for seed in args.seeds:
        model, resub, held = run_seed(seed, args.hard, cfg, args.per_class)
        cm = held.confusion
        held_means.append(held.scenario_mean)
        print(f"{seed:>4}  {str(model.converged):>5}  {percent_str(resub.pooled):>7}  "
              f"{percent_str(held.scenario_mean):>8}  {cm.fp:>2}  {cm.fn:>2}")
    print(f"mean held-out scenario accuracy: {percent_str(statistics.mean(held_means))}%")


if __name__ == "__main__":
    main()
