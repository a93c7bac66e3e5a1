"""Ensembles of random projections with one nearest-neighbour classifier per
member, combined by majority vote, plus a max-pooling transform."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import _rng
from .errors import InvalidParameterError, NotFittedError, ShapeError
from .linalg import as_matrix
from .random_matrices import GAUSSIAN_UNIT, real_entries

PLAIN = "plain"
VALIDATED = "block-validated"


def max_pool_projection(x, projections) -> np.ndarray:
    """Elementwise maximum of ``U_j^T x`` over the given ``d x p`` matrices."""
    mats = [np.asarray(U, dtype=np.float64) for U in projections]
    if not mats:
        raise InvalidParameterError("need at least one projection")
    shape = mats[0].shape
    if any(U.shape != shape for U in mats):
        raise ShapeError("all projections must share one shape")
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != shape[0]:
        raise ShapeError(f"input has dimension {x.shape[0]}, projections expect {shape[0]}")
    return np.max(np.stack([U.T @ x for U in mats]), axis=0)


def unit_column_projection(d: int, p: int, seed: int) -> np.ndarray:
    U = real_entries(d, p, GAUSSIAN_UNIT, seed)
    return U / np.linalg.norm(U, axis=0)


def nearest_neighbor_predict(train: np.ndarray, labels: np.ndarray, query: np.ndarray) -> np.ndarray:
    """1-NN labels for the columns of ``query``; distance ties go to the
    lowest training index."""
    sq_t = np.sum(train * train, axis=0)
    sq_q = np.sum(query * query, axis=0)
    D = sq_q[:, None] + sq_t[None, :] - 2.0 * (query.T @ train)
    return labels[np.argmin(D, axis=1)]


def majority_vote(votes: np.ndarray) -> np.ndarray:
    """Column-wise mode of an ``m x n`` vote array; ties go to the lowest label."""
    votes = np.asarray(votes)
    classes = np.unique(votes)
    idx = np.searchsorted(classes, votes)
    counts = np.zeros((classes.size, votes.shape[1]), dtype=np.int64)
    for row in idx:
        counts[row, np.arange(votes.shape[1])] += 1
    return classes[np.argmax(counts, axis=0)]


@dataclass
class EnsembleModel:
    seeds: list[int]
    p: int
    X: np.ndarray = field(repr=False)
    labels: np.ndarray = field(repr=False)
    variant: str = PLAIN
    seed: int = 0
    projections: list[np.ndarray] = field(default_factory=list, repr=False)
    projected: list[np.ndarray] = field(default_factory=list, repr=False)
    # injected matrices (not regenerable from a seed) are kept explicitly
    custom: dict[int, np.ndarray] = field(default_factory=dict, repr=False)
    validation_errors: list[float] = field(default_factory=list)
    chosen_members: list[int] = field(default_factory=list)

    def __post_init__(self):
        if not self.projections:
            d = self.X.shape[0]
            self.projections = [
                self.custom.get(k, unit_column_projection(d, self.p, s) if s is not None else None)
                for k, s in enumerate(self.seeds)
            ]
        self.projected = [U.T @ self.X for U in self.projections]

    @property
    def m(self) -> int:
        return len(self.projections)

    def member_votes(self, Q) -> np.ndarray:
        Q = as_matrix(Q, "queries")
        if Q.shape[0] != self.X.shape[0]:
            raise ShapeError(f"queries have dimension {Q.shape[0]}, model expects {self.X.shape[0]}")
        return np.stack(
            [nearest_neighbor_predict(P, self.labels, U.T @ Q) for U, P in zip(self.projections, self.projected)]
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "kind": "ensemble",
                "variant": self.variant,
                "seed": self.seed,
                "member_seeds": self.seeds,
                "d": int(self.X.shape[0]),
                "m": self.m,
                "p": self.p,
                "train": self.X.tolist(),
                "labels": self.labels.tolist(),
                "custom": {str(k): U.tolist() for k, U in sorted(self.custom.items())},
                "validation_errors": self.validation_errors,
                "chosen_members": self.chosen_members,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "EnsembleModel":
        obj = json.loads(text)
        if obj.get("kind") != "ensemble":
            raise InvalidParameterError("not an ensemble model file")
        X = np.asarray(obj["train"], dtype=np.float64).reshape(obj["d"], -1)
        custom = {int(k): np.asarray(v, dtype=np.float64) for k, v in obj.get("custom", {}).items()}
        return cls(
            obj["member_seeds"], obj["p"], X, np.asarray(obj["labels"]), obj["variant"], obj["seed"],
            custom=custom, validation_errors=obj.get("validation_errors", []),
            chosen_members=obj.get("chosen_members", []),
        )


def _check_data(X, labels):
    X = as_matrix(X, "X")
    labels = np.asarray(labels)
    if labels.ndim != 1 or labels.size != X.shape[1]:
        raise ShapeError(f"need one label per column: {labels.size} labels for {X.shape[1]} columns")
    return X, labels


def train_ensemble(X, labels, m: int, p: int, seed: int) -> EnsembleModel:
    X, labels = _check_data(X, labels)
    if m < 1 or p < 1:
        raise InvalidParameterError(f"need m >= 1 and p >= 1, got m={m}, p={p}")
    seeds = [_rng.derive_seed(seed, 71, k) for k in range(m)]
    return EnsembleModel(seeds, p, X, labels, PLAIN, seed)


def predict_ensemble(model: EnsembleModel | None, Q) -> np.ndarray:
    """Majority vote over members for each column of ``Q`` (or a single vector)."""
    if model is None:
        raise NotFittedError("no ensemble model")
    Q = np.asarray(Q, dtype=np.float64)
    single = Q.ndim == 1
    votes = model.member_votes(Q[:, None] if single else Q)
    out = majority_vote(votes)
    return out[0] if single else out


def train_ensemble_validated(
    X, labels, blocks: int, m: int, p: int, seed: int, validation_fraction: float = 0.2,
    candidates: dict | None = None,
) -> EnsembleModel:
    """Split a seeded shuffle of the data into ``blocks`` disjoint blocks.
    In each block, hold out the last ``validation_fraction`` of the columns,
    fit ``m`` projected 1-NN candidates on the rest and keep the one with the
    lowest validation error (first on ties). The survivors vote over the
    full training set.

    ``candidates`` optionally maps ``(block, k)`` to an explicit projection
    matrix replacing the seeded one; it exists for testing the selection.
    """
    X, labels = _check_data(X, labels)
    if blocks < 1 or m < 1 or p < 1:
        raise InvalidParameterError("need blocks, m and p all >= 1")
    if not (0.0 < validation_fraction < 1.0):
        raise InvalidParameterError(f"validation fraction must lie in (0, 1), got {validation_fraction}")
    n = X.shape[1]
    order = _rng.numpy_generator(seed, 72).permutation(n)
    parts = np.array_split(order, blocks)
    chosen_seeds: list[int | None] = []
    custom: dict[int, np.ndarray] = {}
    errors = []
    chosen = []
    for b, part in enumerate(parts):
        n_val = int(round(validation_fraction * part.size))
        if n_val < 1 or part.size - n_val < 1:
            raise InvalidParameterError(f"block {b} has {part.size} columns, too few to split")
        fit_idx, val_idx = part[: part.size - n_val], part[part.size - n_val :]
        best = None
        for k in range(m):
            s = _rng.derive_seed(seed, 73, b, k)
            U = candidates.get((b, k)) if candidates else None
            U = unit_column_projection(X.shape[0], p, s) if U is None else np.asarray(U, dtype=np.float64)
            pred = nearest_neighbor_predict(U.T @ X[:, fit_idx], labels[fit_idx], U.T @ X[:, val_idx])
            err = float(np.mean(pred != labels[val_idx]))
            if best is None or err < best[0]:
                best = (err, k, s, U)
        errors.append(best[0])
        chosen.append(best[1])
        if candidates and (b, best[1]) in candidates:
            custom[b] = best[3]
            chosen_seeds.append(None)
        else:
            chosen_seeds.append(best[2])
    return EnsembleModel(
        chosen_seeds, p, X, labels, VALIDATED, seed, custom=custom,
        validation_errors=errors, chosen_members=chosen,
    )


def accuracy(pred, truth) -> float:
    return float(np.mean(np.asarray(pred) == np.asarray(truth)))


def ensemble_benchmark(model: EnsembleModel, Q, truth) -> dict:
    """Ensemble accuracy together with each member's own accuracy."""
    votes = model.member_votes(Q)
    members = [accuracy(v, truth) for v in votes]
    return {
        "ensemble_accuracy": accuracy(majority_vote(votes), truth),
        "member_accuracies": members,
        "mean_member_accuracy": float(np.mean(members)),
        "worst_member_accuracy": float(np.min(members)),
    }
