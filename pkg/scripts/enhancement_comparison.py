"""Held-out accuracy for each enhancement mode on the hard synthetic set."""

import argparse
import statistics

from ovoscope.enhancement import ENHANCE_MODES
from ovoscope.evaluation import percent_str
from ovoscope.pipeline import PipelineConfig

from synthetic_experiment import run_seed


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--easy", action="store_true", help="use the default generator instead")
    args = ap.parse_args()
    for mode in ENHANCE_MODES:
        cfg = PipelineConfig(enhance_mode=mode)
        held = [run_seed(s, not args.easy, cfg, 50)[2].scenario_mean for s in args.seeds]
        print(f"{mode:>9}: {percent_str(statistics.mean(held))}%  "
              f"(per seed {', '.join(percent_str(h) for h in held)})")


if __name__ == "__main__":
    main()
