"""Wall time of the sketched low-rank path against a full SVD, and the
resulting Frobenius errors, over a few matrix heights."""

import argparse

import numpy as np

from sketchbench import lowrank as lr


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--heights", default="200,400,800")
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--p", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'d':>6} {'sketch s':>10} {'svd s':>10} {'err sketch':>12} {'err best':>12}")
    for d in (int(v) for v in args.heights.split(",")):
        g = np.random.default_rng(args.seed + d)
        X = g.normal(size=(d, 5)) @ g.normal(size=(5, args.n)) + 0.1 * g.normal(size=(d, args.n))
        t = lr.timing_comparison(X, args.p, args.seed)
        res = lr.lowrank_approximate(X, args.p, args.seed)
        err = np.linalg.norm(X - res.approx)
        best = np.linalg.norm(X - lr.best_rank_p(X, args.p))
        print(f"{d:6d} {t['randomized_seconds']:10.4f} {t['full_svd_seconds']:10.4f} {err:12.4f} {best:12.4f}")


if __name__ == "__main__":
    main()
