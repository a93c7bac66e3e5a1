"""Max and mean pairwise distortion of Gaussian projections as the target
dimension grows, next to the pair failure bound at each width."""

import argparse
import json

from sketchbench import _rng
from sketchbench import linear_rp as lrp
from sketchbench.random_matrices import sample_projection


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--d", type=int, default=1000)
    ap.add_argument("--epsilon", type=float, default=0.5)
    ap.add_argument("--widths", default="25,50,100,200,400")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    X = _rng.numpy_generator(args.seed, 1).normal(size=(args.d, args.n))
    rows = []
    for p in (int(v) for v in args.widths.split(",")):
        U = sample_projection(args.d, p, "gaussian", _rng.derive_seed(args.seed, p))
        rep = lrp.distortion_report(X, lrp.project(X, U), args.epsilon)
        rows.append({"p": p, "max_distortion": rep.max_distortion, "mean_distortion": rep.mean_distortion,
                     "violation_fraction": rep.violation_fraction,
                     "pair_failure_bound": lrp.jl_failure_bound(p, args.epsilon)})
    print(json.dumps({"p_min": lrp.jl_min_dimension(args.n, args.epsilon), "rows": rows}, indent=2))


if __name__ == "__main__":
    main()
