"""Random kitchen sinks / extreme learning machine: a random nonlinear
feature layer followed by a ridge-regularized linear read-out."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _rng
from .errors import InvalidParameterError, NotFittedError, ShapeError
from .linalg import as_matrix

COS = "cos"
RELU = "relu"
SIGN = "sign"
ACTIVATIONS = (COS, RELU, SIGN)


@dataclass(frozen=True)
class ActivationSpec:
    """``cos``: cos(w.x + b); ``relu``: max(0, w.x); ``sign``: sign(w.x) with sign(0) = 0."""

    kind: str

    def __post_init__(self):
        if self.kind not in ACTIVATIONS:
            raise InvalidParameterError(f"unknown activation {self.kind!r}; choose from {ACTIVATIONS}")

    @property
    def bounded(self) -> bool:
        return self.kind != RELU

    @property
    def uses_bias(self) -> bool:
        return self.kind == COS


def sample_parameters(d: int, p: int, activation: ActivationSpec | str, seed: int):
    """``(W, bias)`` with ``W`` a ``d x p`` standard normal matrix; the bias
    is uniform on ``[0, 2 pi)`` for the cosine activation and None otherwise."""
    act = ActivationSpec(activation) if isinstance(activation, str) else activation
    if d < 1 or p < 1:
        raise InvalidParameterError(f"dimensions must be positive, got d={d}, p={p}")
    W = _rng.normal_block(seed, "normal", d, p)
    bias = None
    if act.uses_bias:
        bias = 2.0 * math.pi * _rng.uniform_block(seed, "bias", p, 1)[:, 0]
    return W, bias


def features(X, W: np.ndarray, bias: np.ndarray | None, activation: ActivationSpec | str) -> np.ndarray:
    """``p x n`` feature matrix; column ``i`` is the random features of sample ``i``."""
    act = ActivationSpec(activation) if isinstance(activation, str) else activation
    X = as_matrix(X, "X")
    if X.shape[0] != W.shape[0]:
        raise ShapeError(f"X has {X.shape[0]} rows but the random layer expects {W.shape[0]}")
    pre = W.T @ X
    if act.kind == COS:
        return np.cos(pre + (0.0 if bias is None else bias[:, None]))
    if act.kind == RELU:
        return np.maximum(pre, 0.0)
    return np.sign(pre)


def ridge_objective(alpha, G, T, lam: float) -> float:
    """``(1/n) ||alpha^T G - T||_F^2 + lam ||alpha||_F^2``."""
    R = alpha.T @ G - T
    return float(np.sum(R * R) / G.shape[1] + lam * np.sum(alpha * alpha))


def ridge_gradient(alpha, G, T, lam: float) -> np.ndarray:
    n = G.shape[1]
    return (2.0 / n) * G @ (G.T @ alpha - T.T) + 2.0 * lam * alpha


def fit_ridge(G, T, lam: float) -> np.ndarray:
    """Closed-form minimiser ``(G G^T / n + lam I)^{-1} G T^T / n`` (``p x c``)."""
    G = as_matrix(G, "G")
    T = np.atleast_2d(np.asarray(T, dtype=np.float64))
    if T.shape[1] != G.shape[1]:
        raise ShapeError(f"targets have {T.shape[1]} columns, features have {G.shape[1]}")
    if not lam > 0:
        raise InvalidParameterError(f"ridge strength must be positive, got {lam}")
    n = G.shape[1]
    A = G @ G.T / n + lam * np.eye(G.shape[0])
    rhs = G @ T.T / n
    return np.linalg.solve(A, rhs)


def one_hot(labels, classes: np.ndarray) -> np.ndarray:
    """``c x n`` indicator matrix for ``labels`` against the sorted ``classes``."""
    idx = np.searchsorted(classes, labels)
    T = np.zeros((classes.size, len(labels)))
    T[idx, np.arange(len(labels))] = 1.0
    return T


@dataclass
class RksModel:
    d: int
    p: int
    activation: ActivationSpec
    lam: float
    seed: int
    W: np.ndarray = field(repr=False)
    bias: np.ndarray | None = field(default=None, repr=False)
    alpha: np.ndarray | None = field(default=None, repr=False)
    classes: np.ndarray | None = None

    @classmethod
    def create(cls, d: int, p: int, activation: str, lam: float, seed: int) -> "RksModel":
        act = ActivationSpec(activation)
        if not lam > 0:
            raise InvalidParameterError(f"ridge strength must be positive, got {lam}")
        W, bias = sample_parameters(d, p, act, seed)
        return cls(d, p, act, lam, seed, W, bias)

    def transform(self, X) -> np.ndarray:
        return features(X, self.W, self.bias, self.activation)

    def fit(self, X, targets) -> "RksModel":
        """Regression when ``targets`` is a ``c x n`` real array; classification
        (one-hot read-out) when it is a 1-D label vector."""
        G = self.transform(X)
        t = np.asarray(targets)
        if t.ndim == 1:
            self.classes = np.unique(t)
            T = one_hot(t, self.classes)
        else:
            self.classes = None
            T = t.astype(np.float64)
        self.alpha = fit_ridge(G, T, self.lam)
        return self

    def decision(self, X) -> np.ndarray:
        if self.alpha is None:
            raise NotFittedError("model has not been fitted")
        return self.alpha.T @ self.transform(X)

    def predict(self, X) -> np.ndarray:
        out = self.decision(X)
        if self.classes is None:
            return out
        # argmax keeps the lowest index on ties
        return self.classes[np.argmax(out, axis=0)]

    def to_json(self) -> str:
        if self.alpha is None:
            raise NotFittedError("model has not been fitted")
        return json.dumps(
            {
                "kind": "rks",
                "d": self.d,
                "p": self.p,
                "activation": self.activation.kind,
                "lambda": self.lam,
                "seed": self.seed,
                "alpha": self.alpha.tolist(),
                "classes": None if self.classes is None else self.classes.tolist(),
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "RksModel":
        obj = json.loads(text)
        if obj.get("kind") != "rks":
            raise InvalidParameterError("not an rks model file")
        model = cls.create(obj["d"], obj["p"], obj["activation"], obj["lambda"], obj["seed"])
        model.alpha = np.asarray(obj["alpha"], dtype=np.float64).reshape(obj["p"], -1)
        if obj["classes"] is not None:
            model.classes = np.asarray(obj["classes"])
        return model


@dataclass(frozen=True)
class RiskReport:
    empirical_risk: float
    holdout_risk: float
    loss: str
    n: int
    p: int
    bounded_activation: bool


def squared_risk(model: RksModel, X, T) -> float:
    """Mean over samples of the squared error summed over outputs."""
    R = model.decision(X) - T
    return float(np.sum(R * R) / R.shape[1])


def risk_report(model: RksModel, X_train, T_train, X_hold, T_hold) -> RiskReport:
    return RiskReport(
        empirical_risk=squared_risk(model, X_train, T_train),
        holdout_risk=squared_risk(model, X_hold, T_hold),
        loss="squared",
        n=np.asarray(X_train).shape[1],
        p=model.p,
        bounded_activation=model.activation.bounded,
    )


def two_clusters(n: int, d: int, seed: int, sample: int = 0, separation: float = 4.0, noise: float = 1.0):
    """Two Gaussian blobs centred at ``+-separation/2`` along a unit direction
    fixed by ``seed``; ``sample`` selects an independent draw from the same
    distribution (e.g. a holdout set). Returns ``(X, labels)`` with ``X`` of
    shape ``d x n`` and labels in {0, 1}."""
    direction = _rng.numpy_generator(seed, 51).normal(size=d)
    direction /= np.linalg.norm(direction)
    gen = _rng.numpy_generator(seed, 51, sample + 1)
    labels = gen.integers(0, 2, size=n)
    X = gen.normal(scale=noise, size=(d, n)) + np.outer(direction, (labels - 0.5) * separation)
    return X, labels


def sine_regression(n: int, seed: int, noise: float = 0.1, d: int = 2):
    """Smooth target ``sin(x_1) + cos(x_2) + ...`` on N(0, 1) inputs plus noise."""
    gen = _rng.numpy_generator(seed, 52)
    X = gen.normal(size=(d, n))
    phase = np.arange(d)[:, None] * (math.pi / 2)
    y = np.sin(X + phase).sum(axis=0) + noise * gen.normal(size=n)
    return X, y[None, :]


def risk_scaling_experiment(
    p_list, n_list, seed: int, repeats: int = 10, lam: float = 1e-2, activation: str = COS,
    n_holdout: int = 1000, generator=sine_regression, slack: float = 0.01,
) -> dict:
    """Mean holdout squared risk over ``repeats`` seeds on a ``(p, n)`` grid.

    Also checks the trend: along each axis, risk at a later grid point must
    not exceed the risk at an earlier one by more than ``slack``.
    """
    p_list, n_list = list(p_list), list(n_list)
    if not p_list or not n_list:
        raise InvalidParameterError("p_list and n_list must be non-empty")
    grid = np.zeros((len(p_list), len(n_list)))
    for r in range(repeats):
        rs = _rng.derive_seed(seed, 53, r)
        X_hold, T_hold = generator(n_holdout, _rng.derive_seed(rs, 0))
        for j, n in enumerate(n_list):
            X, T = generator(n, _rng.derive_seed(rs, 1, n))
            for i, p in enumerate(p_list):
                model = RksModel.create(X.shape[0], p, activation, lam, _rng.derive_seed(rs, 2, p))
                model.fit(X, T)
                grid[i, j] += squared_risk(model, X_hold, T_hold)
    grid /= repeats
    p_trend = bool(np.all(np.diff(grid, axis=0) <= slack))
    n_trend = bool(np.all(np.diff(grid, axis=1) <= slack))
    return {
        "p_list": p_list,
        "n_list": n_list,
        "mean_holdout_risk": grid.tolist(),
        "repeats": repeats,
        "lambda": lam,
        "activation": activation,
        "p_trend_holds": p_trend,
        "n_trend_holds": n_trend,
    }
