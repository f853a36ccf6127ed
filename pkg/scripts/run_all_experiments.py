"""Run every committed experiment and write JSON lines under an output directory."""

import argparse
import sys
import time
from pathlib import Path

from lempert_lab.experiments import EXPERIMENTS, load_config, run_experiment, summary_table


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="results")
    parser.add_argument("--only", nargs="*", choices=EXPERIMENTS, help="subset of experiments")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--timing", action="store_true")
    args = parser.parse_args(argv)

    failed = 0
    for name in args.only or EXPERIMENTS:
        cfg = load_config(name)
        if args.seed is not None:
            cfg.seed = args.seed
        start = time.perf_counter()
        rows = run_experiment(cfg, Path(args.out_dir) / f"{name}.jsonl", timing=args.timing)
        print(f"== {name} ({time.perf_counter() - start:.1f}s)")
        print(summary_table(rows))
        failed += sum(not r.passed for r in rows)
    print(f"{failed} failing rows")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
