"""Command-line entry point.

Exit codes: 0 success, 2 invalid invocation or input, 3 a verification
check failed. A JSON report is written on 0 and 3 (to ``--report``, or
stdout when no path is given).
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np

from . import _rng
from . import ensemble as ens
from . import hypercube as hc
from . import io
from . import layers as lay
from . import linear_rp as lrp
from . import lowrank as lr
from . import rff
from . import rks
from .errors import SketchError, ShapeError
from .parallel import ordered_map, resolve_threads
from .random_matrices import REAL_KINDS, sample_projection

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CHECK_FAILED = 3


class Timer:
    """Wall milliseconds per named phase."""

    def __init__(self):
        self.phases: dict[str, float] = {}

    @contextmanager
    def phase(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.phases[name] = self.phases.get(name, 0.0) + 1000.0 * (time.perf_counter() - t0)


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _unit_interval(text: str) -> float:
    v = float(text)
    if not (0.0 < v < 1.0):
        raise argparse.ArgumentTypeError(f"expected a value in (0, 1), got {text}")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _seed(text: str) -> int:
    v = int(text, 0)
    if not (0 <= v < 2**64):
        raise argparse.ArgumentTypeError("seed must fit in 64 bits")
    return v


def _pair(text: str) -> tuple[str, str]:
    parts = text.split(",")
    if len(parts) != 2 or not all(parts):
        raise argparse.ArgumentTypeError(f"expected DATA,LABELS, got {text!r}")
    return parts[0], parts[1]


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


# ---- subcommands ----------------------------------------------------------
# Each handler returns (results, verified). ``verified`` False means exit 3.


def cmd_jl_bounds(args, timer):
    with timer.phase("compute"):
        params = lrp.JlParams.for_data(args.n, args.epsilon, args.p)
    return {
        "p_min": params.p_min,
        "p_used": args.p if args.p is not None else params.p_min,
        "pair_failure_bound": params.delta,
        "union_bound": params.union_bound,
    }, True


def _gaussian_data(n: int, d: int, seed: int) -> np.ndarray:
    return _rng.numpy_generator(seed, 81).normal(size=(d, n))


def cmd_jl_verify(args, timer):
    with timer.phase("load"):
        X = io.load_matrix(args.input) if args.input else _gaussian_data(args.n, args.d, args.seed)
    d, n = X.shape
    if args.identity:
        p = d
    else:
        p = args.p if args.p is not None else lrp.jl_min_dimension(n, args.epsilon)

    def one(rep: int) -> dict:
        if args.identity:
            Y = X.copy()
        else:
            U = sample_projection(d, p, args.dist, _rng.derive_seed(args.seed, 82, rep))
            Y = lrp.project(X, U, normalized=args.dist == "gaussian-unit")
        rep_ = lrp.distortion_report(X, Y, args.epsilon)
        out = rep_.to_dict()
        out["repeat"] = rep
        return out

    with timer.phase("verify"):
        runs = ordered_map(one, range(args.repeats), args.threads)
    allowance = 3.0 * n * (n - 1) * lrp.jl_failure_bound(p, args.epsilon)
    ok = all(r["violation_fraction"] <= allowance for r in runs)
    return {"n": n, "d": d, "p": p, "allowed_violation_fraction": allowance, "runs": runs}, ok


def cmd_tail_check(args, timer):
    with timer.phase("verify"):
        res = lrp.chi_square_tail_check(args.p, args.d, args.ratio, args.trials, args.seed)
    ok = res["empirical_prob"] <= res["bound"] + 3 * res["std_error"]
    return res, ok


def cmd_rip_check(args, timer):
    p = args.p if args.p is not None else lrp.rip_dimension(args.d, args.k, args.epsilon)
    with timer.phase("verify"):
        U = sample_projection(args.d, p, "gaussian", args.seed)
        res = lrp.rip_check(U, args.k, args.epsilon, args.trials, _rng.derive_seed(args.seed, 83))
    res["max_violating_fraction"] = args.max_fraction
    return res, res["violating_fraction"] <= args.max_fraction


def cmd_norm_gap(args, timer):
    with timer.phase("compute"):
        series = lrp.norm_concentration_experiment(args.n, args.d_list, args.r, args.seed, args.repeats)
    gaps = [g for _, g in series]
    exponent = 1.0 / args.r - 0.5
    if exponent > 0:
        trend, ok = "increasing", all(b > a for a, b in zip(gaps, gaps[1:]))
    elif exponent < 0:
        trend, ok = "decreasing", all(b < a for a, b in zip(gaps, gaps[1:]))
    else:
        trend = "bounded"
        ok = 0.5 <= gaps[-1] / gaps[0] <= 2.0
    return {"series": [{"d": d, "mean_gap": g} for d, g in series], "expected_trend": trend,
            "growth_exponent": exponent}, ok


def cmd_lowrank(args, timer):
    with timer.phase("load"):
        X = io.load_matrix(args.input)
    with timer.phase("approximate"):
        res = lr.lowrank_approximate(X, args.rank, args.seed)
    with timer.phase("verify"):
        report = lr.lowrank_error_report(X, res, args.epsilon, args.c)
    if args.approx_output:
        io.save_matrix(args.approx_output, res.approx)
    report["sketch_dimension_for_epsilon"] = lr.sketch_dimension(X.shape[1], args.epsilon, args.c)
    return report, bool(report["holds"] and report["energy_holds"])


def cmd_ann_build(args, timer):
    with timer.phase("load"):
        data = io.load_bits(args.input)
    with timer.phase("build"):
        index = hc.build_index(data, args.epsilon, args.K, args.seed)
    with timer.phase("write"):
        Path(args.index).write_bytes(index.to_bytes())
    return {
        "n": index.n,
        "d": index.d,
        "p": index.p,
        "levels": [lv.width for lv in index.levels],
        "stored_code_bits": index.stored_code_bits,
    }, True


def cmd_ann_query(args, timer):
    with timer.phase("load"):
        index = hc.HypercubeIndex.from_bytes(Path(args.index).read_bytes())
        queries = io.load_bits(args.queries)
    eps = args.epsilon if args.epsilon is not None else index.epsilon
    out = []
    sound = True
    with timer.phase("query"):
        for i, q in enumerate(queries):
            r = index.query(q, eps)
            if r.found:
                sound &= r.distance <= (1 + eps) * r.certified_radius
            out.append({"query": i, "found": r.found, "index": r.index,
                        "certified_radius": r.certified_radius, "distance": r.distance})
    return {"epsilon": eps, "results": out, "found": sum(r["found"] for r in out)}, sound


def _kernel(args) -> rff.KernelSpec:
    return rff.KernelSpec(args.kernel, args.sigma)


def cmd_rff(args, timer):
    with timer.phase("load"):
        X = io.load_matrix(args.input)
    with timer.phase("features"):
        fm = rff.sample_spectral(_kernel(args), X.shape[0], args.p, args.seed)
        Z = rff.feature_map(X, fm)
    with timer.phase("write"):
        io.save_matrix(args.output, Z)
    return {"d": X.shape[0], "n": X.shape[1], "features": Z.shape[0], "output": args.output}, True


def cmd_rff_verify(args, timer):
    kernel = _kernel(args)
    with timer.phase("hoeffding"):
        res = rff.hoeffding_check(kernel, args.d, args.p, args.epsilon, args.trials, args.seed)
    with timer.phase("sup_error"):
        if args.input:
            X = io.load_matrix(args.input)
        else:
            X = _rng.numpy_generator(args.seed, 84).normal(scale=kernel.sigma / math.sqrt(args.d),
                                                           size=(args.d, args.n))
        res["sup_error"] = rff.sup_error_estimate(kernel, X, args.p, _rng.derive_seed(args.seed, 85))
    return res, bool(res["holds"])


def cmd_rks_train(args, timer):
    with timer.phase("load"):
        X = io.load_matrix(args.train[0])
        y = io.load_labels(args.train[1])
    if y.size != X.shape[1]:
        raise ShapeError(f"{y.size} labels for {X.shape[1]} samples")
    with timer.phase("fit"):
        model = rks.RksModel.create(X.shape[0], args.p, args.activation, args.lam, args.seed).fit(X, y)
    with timer.phase("write"):
        Path(args.model).write_text(model.to_json())
    pred = model.predict(X)
    return {
        "n": X.shape[1],
        "d": X.shape[0],
        "classes": model.classes,
        "training_accuracy": float(np.mean(pred == y)),
        "empirical_risk": rks.squared_risk(model, X, rks.one_hot(y, model.classes)),
        "bounded_activation": model.activation.bounded,
    }, True


def _labels_result(pred, truth_path):
    out = {"predictions": np.asarray(pred)}
    if truth_path:
        truth = io.load_labels(truth_path)
        out["accuracy"] = float(np.mean(np.asarray(pred) == truth))
    return out


def cmd_rks_predict(args, timer):
    with timer.phase("load"):
        model = rks.RksModel.from_json(Path(args.model).read_text())
        X = io.load_matrix(args.input)
    with timer.phase("predict"):
        pred = model.predict(X)
    if args.predictions:
        io.save_labels(args.predictions, pred)
    return _labels_result(pred, args.labels), True


def cmd_layers_verify(args, timer):
    X = lay.sphere_points(args.n, args.d, args.seed)
    s = _rng.derive_seed(args.seed, 86)
    tasks = {
        "distance": lambda: lay.distance_preservation_check(X, args.p, args.delta, args.trials, s),
        "sandwich": lambda: lay.sandwich_check(X, args.p, args.delta, args.trials, s),
        "angle": lambda: lay.angle_preservation_check(X, args.p, args.angle_delta, 1.0, args.trials, s),
    }
    with timer.phase("verify"):
        names = list(tasks)
        outs = ordered_map(lambda k: tasks[k](), names, args.threads)
    res = dict(zip(names, outs))
    res["distance"].pop("reports")
    res["threshold"] = args.min_pass
    ok = all(res[k]["pass_fraction"] >= args.min_pass for k in names)
    return res, ok


def cmd_ensemble_train(args, timer):
    with timer.phase("load"):
        X = io.load_matrix(args.train[0])
        y = io.load_labels(args.train[1])
    with timer.phase("fit"):
        if args.blocks:
            model = ens.train_ensemble_validated(X, y, args.blocks, args.m, args.p, args.seed,
                                                 args.validation_fraction)
        else:
            model = ens.train_ensemble(X, y, args.m, args.p, args.seed)
    with timer.phase("write"):
        Path(args.model).write_text(model.to_json())
    return {"variant": model.variant, "members": model.m, "p": model.p,
            "validation_errors": model.validation_errors}, True


def cmd_ensemble_predict(args, timer):
    with timer.phase("load"):
        model = ens.EnsembleModel.from_json(Path(args.model).read_text())
        X = io.load_matrix(args.input)
    with timer.phase("predict"):
        pred = ens.predict_ensemble(model, X)
    if args.predictions:
        io.save_labels(args.predictions, pred)
    return _labels_result(pred, args.labels), True


# ---- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=0, help="64-bit master seed (default 0)")
    common.add_argument("--threads", type=_positive_int, default=None,
                        help="worker threads (fallback: $SKETCHBENCH_THREADS, then 1)")

    def report_opts(p, output_is_report=True):
        p.add_argument("--report", default=None, help="JSON report path (default: stdout)")
        if output_is_report:
            p.add_argument("--output", dest="report", help="alias of --report")

    parser = argparse.ArgumentParser(prog="sketchbench", description="Random projection experiments.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def add(name, fn, help_text, parent=sub, output_is_report=True):
        p = parent.add_parser(name, parents=[common], help=help_text)
        report_opts(p, output_is_report)
        p.set_defaults(handler=fn, subcommand=name)
        return p

    p = add("jl-bounds", cmd_jl_bounds, "target dimension and failure bounds")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--epsilon", type=_unit_interval, required=True)
    p.add_argument("--p", type=_positive_int, default=None)

    p = add("jl-verify", cmd_jl_verify, "pairwise distortion of a random projection")
    p.add_argument("--input", default=None, help="data file; default: Gaussian points")
    p.add_argument("--n", type=_positive_int, default=200)
    p.add_argument("--d", type=_positive_int, default=1000)
    p.add_argument("--epsilon", type=_unit_interval, default=0.5)
    p.add_argument("--p", type=_positive_int, default=None)
    p.add_argument("--dist", choices=REAL_KINDS, default="gaussian")
    p.add_argument("--repeats", type=_positive_int, default=1)
    p.add_argument("--identity", action="store_true", help="use the identity map as projection")

    p = add("tail-check", cmd_tail_check, "projected-length tail versus its bound")
    p.add_argument("--p", type=_positive_int, default=20)
    p.add_argument("--d", type=_positive_int, default=400)
    p.add_argument("--ratio", type=_positive_float, default=0.5)
    p.add_argument("--trials", type=_positive_int, default=200_000)

    p = add("rip-check", cmd_rip_check, "isometry on random sparse vectors")
    p.add_argument("--d", type=_positive_int, default=256)
    p.add_argument("--k", type=_positive_int, default=4)
    p.add_argument("--epsilon", type=_unit_interval, default=0.5)
    p.add_argument("--p", type=_positive_int, default=None)
    p.add_argument("--trials", type=_positive_int, default=1000)
    p.add_argument("--max-fraction", type=float, default=0.05)

    p = add("norm-gap", cmd_norm_gap, "spread of l_r norms of uniform points")
    p.add_argument("--n", type=_positive_int, default=100)
    p.add_argument("--d-list", type=_int_list, default=[10, 100, 1000])
    p.add_argument("--r", type=_positive_float, default=2.0)
    p.add_argument("--repeats", type=_positive_int, default=50)

    p = add("lowrank", cmd_lowrank, "randomized rank-p approximation")
    p.add_argument("--input", required=True)
    p.add_argument("--rank", type=_positive_int, required=True)
    p.add_argument("--epsilon", type=_unit_interval, default=0.5)
    p.add_argument("--c", type=_positive_float, default=lr.DEFAULT_C)
    p.add_argument("--approx-output", default=None)

    ann = sub.add_parser("ann", help="hypercube nearest-neighbour index")
    ann_sub = ann.add_subparsers(dest="ann_command", metavar="ACTION")
    ann_sub.required = True
    p = add("build", cmd_ann_build, "build an index from 0/1 data", parent=ann_sub)
    p.set_defaults(subcommand="ann build")
    p.add_argument("--input", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--epsilon", type=_unit_interval, default=0.5)
    p.add_argument("--K", type=_positive_int, default=4)
    p = add("query", cmd_ann_query, "query an index", parent=ann_sub)
    p.set_defaults(subcommand="ann query")
    p.add_argument("--index", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--epsilon", type=_unit_interval, default=None)

    p = add("rff", cmd_rff, "random Fourier features of a data file", output_is_report=False)
    p.add_argument("--kernel", choices=[rff.GAUSSIAN, rff.LAPLACIAN], default=rff.GAUSSIAN)
    p.add_argument("--sigma", type=_positive_float, default=1.0)
    p.add_argument("--p", type=_positive_int, default=512)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True, help="feature matrix output (CSV)")

    p = add("rff-verify", cmd_rff_verify, "kernel approximation error checks")
    p.add_argument("--kernel", choices=[rff.GAUSSIAN, rff.LAPLACIAN], default=rff.GAUSSIAN)
    p.add_argument("--sigma", type=_positive_float, default=1.0)
    p.add_argument("--d", type=_positive_int, default=8)
    p.add_argument("--p", type=_positive_int, default=200)
    p.add_argument("--epsilon", type=_positive_float, default=0.2)
    p.add_argument("--trials", type=_positive_int, default=10_000)
    p.add_argument("--n", type=_positive_int, default=50, help="points for the sup-error estimate")
    p.add_argument("--input", default=None)

    rk = sub.add_parser("rks", help="random features plus ridge read-out")
    rk_sub = rk.add_subparsers(dest="rks_command", metavar="ACTION")
    rk_sub.required = True
    p = add("train", cmd_rks_train, "fit a classifier", parent=rk_sub)
    p.set_defaults(subcommand="rks train")
    p.add_argument("--activation", choices=rks.ACTIVATIONS, default=rks.COS)
    p.add_argument("--p", type=_positive_int, default=200)
    p.add_argument("--lambda", dest="lam", type=_positive_float, default=1e-3)
    p.add_argument("--train", type=_pair, required=True, help="DATA,LABELS")
    p.add_argument("--model", required=True)
    p = add("predict", cmd_rks_predict, "predict with a fitted model", parent=rk_sub)
    p.set_defaults(subcommand="rks predict")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--labels", default=None, help="optional true labels for accuracy")
    p.add_argument("--predictions", default=None)

    ly = sub.add_parser("layers", help="random ReLU layers")
    ly_sub = ly.add_subparsers(dest="layers_command", metavar="ACTION")
    ly_sub.required = True
    p = add("verify", cmd_layers_verify, "distance/angle checks on sphere points", parent=ly_sub)
    p.set_defaults(subcommand="layers verify")
    p.add_argument("--n", type=_positive_int, default=20)
    p.add_argument("--d", type=_positive_int, default=64)
    p.add_argument("--p", type=_positive_int, default=4096)
    p.add_argument("--delta", type=_positive_float, default=0.1)
    p.add_argument("--angle-delta", type=_positive_float, default=0.05)
    p.add_argument("--trials", type=_positive_int, default=5)
    p.add_argument("--min-pass", type=float, default=0.95)

    en = sub.add_parser("ensemble", help="random projection ensembles")
    en_sub = en.add_subparsers(dest="ensemble_command", metavar="ACTION")
    en_sub.required = True
    p = add("train", cmd_ensemble_train, "fit a majority-vote ensemble", parent=en_sub)
    p.set_defaults(subcommand="ensemble train")
    p.add_argument("--train", type=_pair, required=True, help="DATA,LABELS")
    p.add_argument("--m", type=_positive_int, default=11)
    p.add_argument("--p", type=_positive_int, default=5)
    p.add_argument("--blocks", type=_positive_int, default=None, help="use the block-validated variant")
    p.add_argument("--validation-fraction", type=_unit_interval, default=0.2)
    p.add_argument("--model", required=True)
    p = add("predict", cmd_ensemble_predict, "predict with an ensemble", parent=en_sub)
    p.set_defaults(subcommand="ensemble predict")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--labels", default=None)
    p.add_argument("--predictions", default=None)
    return parser


_INTERNAL = {"handler", "command", "ann_command", "rks_command", "layers_command", "ensemble_command"}


def resolved_config(args) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in _INTERNAL}
    if isinstance(cfg.get("train"), tuple):
        cfg["train"] = list(cfg["train"])
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    timer = Timer()
    try:
        args.threads = resolve_threads(args.threads)
        results, verified = args.handler(args, timer)
    except (SketchError, ValueError, OSError) as exc:
        print(f"sketchbench {args.subcommand}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = io.make_report(args.subcommand, resolved_config(args), results, timer.phases)
    report["results"]["verified"] = bool(verified)
    io.write_report(args.report, report)
    return EXIT_OK if verified else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
