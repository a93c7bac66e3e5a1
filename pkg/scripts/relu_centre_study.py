"""Where do squared distances after a random ReLU layer concentrate?

For pairs at a range of angles, compares the Monte Carlo mean of
|relu(U^T x) - relu(U^T y)|^2 with the "plus" and "minus" centre values,
for N(0, 1/p) and N(0, 2/p) weights.
"""

import argparse
import math

import numpy as np

from sketchbench import layers as ly


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d", type=int, default=16)
    ap.add_argument("--p", type=int, default=4096)
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--angles", type=int, default=7)
    args = ap.parse_args()

    print(f"{'angle':>7} {'plus':>8} {'minus':>8} {'mean@1/p':>10} {'mean@2/p':>10}")
    for theta in np.linspace(0, math.pi, args.angles):
        x = np.zeros(args.d)
        y = np.zeros(args.d)
        x[0] = 1.0
        y[0], y[1] = math.cos(theta), math.sin(theta)
        X = np.column_stack([x, y])
        plus = ly.center_value(X, ly.PLUS)[0, 1]
        minus = ly.center_value(X, ly.MINUS)[0, 1]
        means = []
        for scale in (1.0, 2.0):
            vals = []
            for t in range(args.trials):
                G = ly.relu_layer(X, ly.layer_weights(args.d, args.p, 3, scale, col_start=t * args.p))
                vals.append(float(np.sum((G[:, 0] - G[:, 1]) ** 2)))
            means.append(np.mean(vals))
        print(f"{theta:7.3f} {plus:8.4f} {minus:8.4f} {means[0]:10.4f} {means[1]:10.4f}")


if __name__ == "__main__":
    main()
