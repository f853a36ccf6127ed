"""Gap to the disc oracle as a function of the free degree.

Random unit-disc specs are drawn as in the disc-oracle experiment and
estimated with plain polynomial discs, so the free part has to absorb the
whole automorphism. Prints one row per degree: median and worst gap.
"""

import argparse

import numpy as np

from lempert_lab.domains import unit_disc
from lempert_lab.experiments import random_disc_specs
from lempert_lab.lempert import OptimizerConfig, estimate_lempert, lempert_disc_oracle


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--degrees", type=int, nargs="+", default=[0, 4, 8, 12, 20])
    parser.add_argument("--cases", type=int, default=8)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--radius", type=float, default=0.6)
    args = parser.parse_args(argv)

    specs = random_disc_specs(np.random.default_rng(args.seed), args.cases, 3, 2.0, args.radius, 0.05)
    print(f"{'degree':>6}  {'median gap':>10}  {'worst gap':>10}  certified")
    for k in args.degrees:
        cfg = OptimizerConfig(free_degree=k, restarts=1, representation="polynomial")
        gaps, cert = [], 0
        for spec, z in specs:
            est = estimate_lempert(unit_disc(), spec, z, cfg, seed=args.seed)
            gaps.append(est.value - lempert_disc_oracle(spec, z))
            cert += est.certified
        print(f"{k:>6}  {np.median(gaps):>10.2e}  {max(gaps):>10.2e}  {cert}/{len(specs)}")


if __name__ == "__main__":
    main()
