"""Credibility-score regression: mean baseline and a small MLP.

The MLP (two ReLU hidden layers, Adam, full batch) trains with seeded
uniform fan-in initialization and early-stops on validation MAE, so a
(config, data, seed) triple reproduces the identical report.  The
labeled set is small enough that full-batch steps beat minibatching on
determinism at no cost.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import InputError
from .embeddings import EmbeddingMatrix
from .labels import CredibilityLabel, RegressionSplit


@dataclass
class MlpConfig:
    hidden_dims: tuple[int, ...] = (128, 64)
    learning_rate: float = 0.001
    max_iterations: int = 200
    patience: int = 20
    seed: int = 0


@dataclass
class RegressionReport:
    target: str
    mae_test: float
    mae_val: float
    baseline_mae_test: float
    seed: int
    config: dict

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1, sort_keys=True)


class MeanModel:
    """Predicts the training-label mean everywhere."""

    def __init__(self, mean: float):
        self.mean = float(mean)

    def predict(self, features: np.ndarray) -> np.ndarray:
        return np.full(len(features), self.mean)


def mean_predictor(train_labels: np.ndarray | list[float]) -> MeanModel:
    train_labels = np.asarray(train_labels, dtype=np.float64)
    if train_labels.size == 0:
        raise InputError("mean predictor needs a non-empty train set")
    return MeanModel(train_labels.mean())


class MlpModel:
    """Feed-forward regressor; predictions are clamped to [0, 1]."""

    def __init__(self, weights: list[np.ndarray], biases: list[np.ndarray]):
        self.weights = weights
        self.biases = biases

    def _forward(self, x: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
        activations = [x]
        h = x
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            h = np.maximum(h @ w + b, 0.0)
            activations.append(h)
        out = (h @ self.weights[-1] + self.biases[-1]).ravel()
        return out, activations

    def predict(self, features: np.ndarray) -> np.ndarray:
        out, _ = self._forward(np.asarray(features, dtype=np.float64))
        return np.clip(out, 0.0, 1.0)

    def save(self, path: str | Path) -> None:
        arrays = {}
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            arrays[f"w{i}"] = w
            arrays[f"b{i}"] = b
        np.savez(Path(path), layers=len(self.weights), **arrays)

    @classmethod
    def load(cls, path: str | Path) -> "MlpModel":
        data = np.load(Path(path))
        n = int(data["layers"])
        return cls(
            weights=[data[f"w{i}"] for i in range(n)],
            biases=[data[f"b{i}"] for i in range(n)],
        )


def _init_params(dims: list[int], seed: int) -> tuple[list[np.ndarray], list[np.ndarray]]:
    rng = np.random.Generator(np.random.PCG64(seed))
    weights, biases = [], []
    for fan_in, fan_out in zip(dims, dims[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return weights, biases


def evaluate_mae(model, features: np.ndarray, targets: np.ndarray) -> float:
    """Mean absolute error with predictions clamped to [0, 1]."""
    targets = np.asarray(targets, dtype=np.float64)
    if targets.size == 0:
        raise InputError("MAE is undefined on an empty node list")
    preds = np.clip(model.predict(np.asarray(features, dtype=np.float64)), 0.0, 1.0)
    return float(np.mean(np.abs(preds - targets)))


def fit_mlp(
    x_train: np.ndarray,
    y_train: np.ndarray,
    x_val: np.ndarray,
    y_val: np.ndarray,
    config: MlpConfig,
) -> tuple[MlpModel, float]:
    """Full-batch Adam on squared error, early-stopped on validation MAE.

    Returns the model restored to its best-validation parameters and
    that best validation MAE.
    """
    x_train = np.asarray(x_train, dtype=np.float64)
    y_train = np.asarray(y_train, dtype=np.float64)
    dims = [x_train.shape[1], *config.hidden_dims, 1]
    weights, biases = _init_params(dims, config.seed)
    biases[-1][:] = y_train.mean()  # head starts at the mean predictor
    model = MlpModel(weights, biases)

    beta1, beta2, eps = 0.9, 0.999, 1e-8
    m_w = [np.zeros_like(w) for w in weights]
    v_w = [np.zeros_like(w) for w in weights]
    m_b = [np.zeros_like(b) for b in biases]
    v_b = [np.zeros_like(b) for b in biases]

    best_val = np.inf
    best_params = ([w.copy() for w in weights], [b.copy() for b in biases])
    stale = 0
    n = len(x_train)

    for step in range(1, config.max_iterations + 1):
        out, activations = model._forward(x_train)
        delta = (2.0 / n) * (out - y_train)[:, None]

        grads_w: list[np.ndarray] = [None] * len(weights)
        grads_b: list[np.ndarray] = [None] * len(biases)
        for layer in range(len(weights) - 1, -1, -1):
            grads_w[layer] = activations[layer].T @ delta
            grads_b[layer] = delta.sum(axis=0)
            if layer > 0:
                delta = (delta @ weights[layer].T) * (activations[layer] > 0)

        correction1 = 1.0 - beta1**step
        correction2 = 1.0 - beta2**step
        for i in range(len(weights)):
            m_w[i] = beta1 * m_w[i] + (1 - beta1) * grads_w[i]
            v_w[i] = beta2 * v_w[i] + (1 - beta2) * grads_w[i] ** 2
            weights[i] -= config.learning_rate * (m_w[i] / correction1) / (
                np.sqrt(v_w[i] / correction2) + eps
            )
            m_b[i] = beta1 * m_b[i] + (1 - beta1) * grads_b[i]
            v_b[i] = beta2 * v_b[i] + (1 - beta2) * grads_b[i] ** 2
            biases[i] -= config.learning_rate * (m_b[i] / correction1) / (
                np.sqrt(v_b[i] / correction2) + eps
            )

        val_mae = evaluate_mae(model, x_val, y_val)
        if val_mae < best_val:
            best_val = val_mae
            best_params = ([w.copy() for w in weights], [b.copy() for b in biases])
            stale = 0
        else:
            stale += 1
            if stale > config.patience:
                break

    model.weights, model.biases = best_params
    return model, float(best_val)


def _gather(
    features: EmbeddingMatrix | dict[str, np.ndarray],
    labels: dict[str, CredibilityLabel],
    target: str,
    keys: list[str],
) -> tuple[np.ndarray, np.ndarray]:
    rows = features.rows if isinstance(features, EmbeddingMatrix) else features
    x, y = [], []
    for key in keys:
        if key not in rows:
            raise InputError(f"no feature row for split node {key}")
        label = labels.get(key)
        score = label.score(target) if label else None
        if score is None:
            raise InputError(f"no {target} label for split node {key}")
        x.append(rows[key])
        y.append(score)
    return np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64)


def train_mlp(
    features: EmbeddingMatrix | dict[str, np.ndarray],
    labels: dict[str, CredibilityLabel],
    split: RegressionSplit,
    config: MlpConfig,
) -> tuple[MlpModel, RegressionReport]:
    """Train on the split's train set, early-stop on val, report test MAE."""
    x_train, y_train = _gather(features, labels, split.target, split.train)
    x_val, y_val = _gather(features, labels, split.target, split.val)
    x_test, y_test = _gather(features, labels, split.target, split.test)

    model, best_val = fit_mlp(x_train, y_train, x_val, y_val, config)
    baseline = mean_predictor(y_train)
    report = RegressionReport(
        target=split.target,
        mae_test=evaluate_mae(model, x_test, y_test),
        mae_val=best_val,
        baseline_mae_test=evaluate_mae(baseline, x_test, y_test),
        seed=config.seed,
        config={
            "hidden_dims": list(config.hidden_dims),
            "learning_rate": config.learning_rate,
            "max_iterations": config.max_iterations,
            "patience": config.patience,
        },
    )
    return model, report


# ----------------------------------------------------------------- plot data

@dataclass
class PlotData:
    pairs: list[tuple[float, float]]             # (true, predicted)
    bins: list[tuple[float, float, int, int]]    # (lo, hi, count_true, count_pred)
    n_bins: int = 20


def export_plot_data(model, features: np.ndarray, targets: np.ndarray,
                     n_bins: int = 20) -> PlotData:
    """Predicted-vs-true pairs plus score histograms for external plotting."""
    targets = np.asarray(targets, dtype=np.float64)
    preds = np.clip(model.predict(np.asarray(features, dtype=np.float64)), 0.0, 1.0)
    edges = np.linspace(0.0, 1.0, n_bins + 1)
    count_true, _ = np.histogram(targets, bins=edges)
    count_pred, _ = np.histogram(preds, bins=edges)
    bins = [
        (float(edges[i]), float(edges[i + 1]), int(count_true[i]), int(count_pred[i]))
        for i in range(n_bins)
    ]
    pairs = [(float(t), float(p)) for t, p in zip(targets, preds)]
    return PlotData(pairs=pairs, bins=bins, n_bins=n_bins)


def write_plot_csv(plot: PlotData, pairs_path: str | Path, hist_path: str | Path) -> None:
    with Path(pairs_path).open("w", newline="\n") as out:
        out.write("true,predicted\n")
        for true, pred in plot.pairs:
            out.write(f"{true:.6f},{pred:.6f}\n")
    with Path(hist_path).open("w", newline="\n") as out:
        out.write("bin_low,bin_high,count_true,count_pred\n")
        for lo, hi, ct, cp in plot.bins:
            out.write(f"{lo:.6f},{hi:.6f},{ct},{cp}\n")
