"""Classifiers: standardizer, L2 logistic regression trained by batch gradient
descent with backtracking line search, threshold rules, and the baselines."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .corpus import CLEAR, UNCLEAR
from .retrieval import ScoredHit


@dataclass
class Standardizer:
    """Per-feature mean and population standard deviation (zero stds become 1)."""

    mean: np.ndarray
    std: np.ndarray


def standardize_fit(matrix: np.ndarray) -> Standardizer:
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.size == 0:
        raise ValueError("cannot fit a standardizer on an empty matrix")
    mean = matrix.mean(axis=0)
    std = matrix.std(axis=0)  # population std; constant columns map to 0
    std = np.where(std == 0.0, 1.0, std)
    return Standardizer(mean=mean, std=std)


def standardize_apply(standardizer: Standardizer, matrix: np.ndarray) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.shape[-1] != standardizer.mean.shape[0]:
        raise ValueError(f"feature dimension mismatch: "
                         f"{matrix.shape[-1]} != {standardizer.mean.shape[0]}")
    return (matrix - standardizer.mean) / standardizer.std


@dataclass
class LogRegModel:
    weights: np.ndarray
    bias: float
    c_reg: float
    feature_names: tuple[str, ...] = ()
    n_iterations: int = 0
    converged: bool = False


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _margins(X, weights, bias):
    z = X @ weights + bias
    return np.asarray(z).ravel()


def lr_objective(X, y_signed: np.ndarray, weights: np.ndarray, bias: float,
                 c_reg: float) -> float:
    """0.5*||w||^2 + C * sum(ln(1 + exp(-y*(w.x + b)))), bias unpenalized."""
    margins = y_signed * _margins(X, weights, bias)
    return 0.5 * float(weights @ weights) + c_reg * float(np.logaddexp(0.0, -margins).sum())


def lr_gradient(X, y_signed: np.ndarray, weights: np.ndarray, bias: float,
                c_reg: float) -> tuple[np.ndarray, float]:
    margins = y_signed * _margins(X, weights, bias)
    coeff = -y_signed * sigmoid(-margins)  # d/dz ln(1 + exp(-y z)) = -y * sigma(-y z)
    grad_w = weights + c_reg * np.asarray(X.T @ coeff).ravel()
    grad_b = c_reg * float(coeff.sum())
    return grad_w, grad_b


def lr_train(X, labels, c_reg: float = 1.0, feature_names: tuple[str, ...] = (),
             max_iter: int = 1000, tol: float = 1e-5,
             on_iteration=None) -> LogRegModel:
    """Deterministic full-batch gradient descent from zero initialization.

    Backtracking (Armijo) line search keeps the objective nonincreasing; stops
    when the gradient infinity-norm falls below tol. on_iteration, if given,
    receives the objective value after every accepted step.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if not sparse.issparse(X):
        X = np.asarray(X, dtype=np.float64)
    classes = np.unique(labels)
    if classes.size < 2:
        raise ValueError("training labels contain a single class")
    if not set(classes.tolist()) <= {0, 1}:
        raise ValueError(f"labels must be 0/1, got {classes.tolist()}")
    if c_reg <= 0:
        raise ValueError(f"C must be positive, got {c_reg}")
    y_signed = np.where(labels == 1, 1.0, -1.0)

    n_features = X.shape[1]
    weights = np.zeros(n_features, dtype=np.float64)
    bias = 0.0
    step = 1.0
    converged = False
    iterations = 0
    objective = lr_objective(X, y_signed, weights, bias, c_reg)
    for iterations in range(1, max_iter + 1):
        grad_w, grad_b = lr_gradient(X, y_signed, weights, bias, c_reg)
        grad_norm = max(float(np.abs(grad_w).max(initial=0.0)), abs(grad_b))
        if grad_norm < tol:
            converged = True
            iterations -= 1
            break
        descent = float(grad_w @ grad_w) + grad_b * grad_b
        t = step
        while True:
            new_w = weights - t * grad_w
            new_b = bias - t * grad_b
            new_objective = lr_objective(X, y_signed, new_w, new_b, c_reg)
            if new_objective <= objective - 1e-4 * t * descent:
                break
            t *= 0.5
            if t < 1e-20:  # no representable progress left
                return LogRegModel(weights=weights, bias=bias, c_reg=c_reg,
                                   feature_names=tuple(feature_names),
                                   n_iterations=iterations, converged=True)
        weights, bias, objective = new_w, new_b, new_objective
        step = t * 2.0
        if on_iteration is not None:
            on_iteration(objective)
    return LogRegModel(weights=weights, bias=bias, c_reg=c_reg,
                       feature_names=tuple(feature_names),
                       n_iterations=iterations, converged=converged)


def lr_predict_proba(model: LogRegModel, X):
    if not sparse.issparse(X):
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != model.weights.shape[0]:
        raise ValueError(f"feature dimension mismatch: "
                         f"{X.shape[1]} != {model.weights.shape[0]}")
    return sigmoid(_margins(X, model.weights, model.bias))


def lr_predict(model: LogRegModel, X) -> np.ndarray:
    return (lr_predict_proba(model, X) >= 0.5).astype(np.int64)


# ---------------------------------------------------------------------------
# Threshold classifier over a single clarity-score feature


@dataclass
class ThresholdModel:
    """Predicts clear (0) iff the feature value is >= gamma, unclear otherwise."""

    feature_name: str
    gamma: float
    dev_accuracy: float = 0.0

    def predict(self, value: float) -> int:
        return CLEAR if value >= self.gamma else UNCLEAR


def threshold_fit(values, labels, feature_name: str) -> ThresholdModel:
    """Pick gamma among midpoints of consecutive distinct dev values (plus
    +/-inf sentinels) maximizing dev accuracy; ties go to the smallest gamma."""
    values = [float(v) for v in values]
    labels = [int(y) for y in labels]
    if not values or len(values) != len(labels):
        raise ValueError("need equal-length, nonempty dev values and labels")
    distinct = sorted(set(values))
    candidates = [-math.inf]
    candidates += [(a + b) / 2.0 for a, b in zip(distinct, distinct[1:])]
    candidates += [math.inf]

    best_gamma = candidates[0]
    best_correct = -1
    for gamma in candidates:
        correct = sum(1 for v, y in zip(values, labels)
                      if (CLEAR if v >= gamma else UNCLEAR) == y)
        if correct > best_correct:
            best_correct = correct
            best_gamma = gamma
    return ThresholdModel(feature_name=feature_name, gamma=best_gamma,
                          dev_accuracy=best_correct / len(values))


# ---------------------------------------------------------------------------
# Baselines


def simq_majority(hits: list[ScoredHit], k: int = 10, fallback: int = UNCLEAR) -> int:
    """Most common label among the top-k hits; ties and empty sets fall back to
    the global training majority class."""
    prefix = hits[:k]
    if not prefix:
        return fallback
    unclear = sum(1 for hit in prefix if hit.label == UNCLEAR)
    clear = len(prefix) - unclear
    if unclear > clear:
        return UNCLEAR
    if clear > unclear:
        return CLEAR
    return fallback


def majority_baseline() -> int:
    return UNCLEAR


def random_labels(n: int, seed: int) -> np.ndarray:
    """Fair-coin predictions from a seeded generator."""
    rng = random.Random(seed)
    return np.array([rng.randrange(2) for _ in range(n)], dtype=np.int64)
