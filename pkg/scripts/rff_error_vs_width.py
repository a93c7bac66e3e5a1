"""Largest kernel approximation error over a point set as the number of
random Fourier frequencies grows (mean over seeds)."""

import argparse
import math

import numpy as np

from sketchbench import _rng, rff


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kernel", choices=[rff.GAUSSIAN, rff.LAPLACIAN], default=rff.GAUSSIAN)
    ap.add_argument("--sigma", type=float, default=1.0)
    ap.add_argument("--d", type=int, default=8)
    ap.add_argument("--n", type=int, default=50)
    ap.add_argument("--widths", default="50,100,200,400,800,1600")
    ap.add_argument("--seeds", type=int, default=10)
    args = ap.parse_args()

    kernel = rff.KernelSpec(args.kernel, args.sigma)
    X = _rng.numpy_generator(0, 1).normal(scale=args.sigma / math.sqrt(args.d), size=(args.d, args.n))
    prev = None
    print(f"{'p':>6} {'sup error':>10} {'ratio':>7}")
    for p in (int(v) for v in args.widths.split(",")):
        err = float(np.mean([rff.sup_error_estimate(kernel, X, p, s) for s in range(args.seeds)]))
        ratio = "" if prev is None else f"{err / prev:7.3f}"
        print(f"{p:6d} {err:10.4f} {ratio}")
        prev = err


if __name__ == "__main__":
    main()
