"""Small multi-label perceptron for explanation selection, written in NumPy.

Architecture is fixed at 7 -> 8 -> 7 -> 6 with the logistic function at
every layer; each output is the probability that one explanation of the
selection subset should be shown. Inputs are standardised with statistics
of the training split, which are stored alongside the weights.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, InputError, ParseError, VersionError
from .explanations import (CO2_INDEX, ExplanationDescriptor, FEATURE_NAMES, Scenario,
                           compute_value, extract_features)
from .roadnet import read_csv_rows

LAYER_SIZES = (7, 8, 7, 6)
MODEL_FORMAT_VERSION = 1
CLIP = 1e-12


@dataclass
class MLPModel:
    layer_sizes: tuple[int, ...]
    weights: list[np.ndarray]  # weights[l] has shape (layer_sizes[l], layer_sizes[l+1])
    biases: list[np.ndarray]
    feature_means: np.ndarray
    feature_stds: np.ndarray
    activation: str = "logistic"

    def __post_init__(self):
        self.layer_sizes = tuple(int(s) for s in self.layer_sizes)
        if len(self.weights) != len(self.layer_sizes) - 1 or len(self.biases) != len(self.weights):
            raise ConfigurationError("layer count does not match layer_sizes")
        for l, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (self.layer_sizes[l], self.layer_sizes[l + 1]):
                raise ConfigurationError(f"layer {l} weight shape {w.shape} does not chain")
            if b.shape != (self.layer_sizes[l + 1],):
                raise ConfigurationError(f"layer {l} bias shape {b.shape} does not chain")
        if self.feature_means.shape != (self.n_inputs,) or self.feature_stds.shape != (self.n_inputs,):
            raise ConfigurationError("normalisation vectors must match the input width")
        if not np.all(self.feature_stds > 0):
            raise ConfigurationError("feature_stds must be strictly positive")
        if self.activation != "logistic":
            raise ConfigurationError(f"unsupported activation {self.activation!r}")

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_outputs(self) -> int:
        return self.layer_sizes[-1]

    def params(self) -> list[np.ndarray]:
        return [p for pair in zip(self.weights, self.biases) for p in pair]

    def copy(self) -> "MLPModel":
        return MLPModel(self.layer_sizes, [w.copy() for w in self.weights],
                        [b.copy() for b in self.biases], self.feature_means.copy(),
                        self.feature_stds.copy(), self.activation)


@dataclass
class LabeledScenario:
    scenario_id: int
    features: np.ndarray
    labels: np.ndarray


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    batch_size: int = 32
    max_epochs: int = 2000
    patience: int = 20
    validation_fraction: float = 0.10
    test_fraction: float = 0.40
    seed: int = 0

    def __post_init__(self):
        for name in ("validation_fraction", "test_fraction"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ConfigurationError(f"{name} must lie in (0, 1), got {v}")
        if self.validation_fraction + self.test_fraction >= 1:
            raise ConfigurationError("validation and test fractions must sum below 1")
        if self.learning_rate <= 0 or self.batch_size < 1 or self.max_epochs < 1 or self.patience < 1:
            raise ConfigurationError("learning_rate, batch_size, max_epochs and patience must be positive")

    @classmethod
    def load(cls, path) -> "TrainConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(f"cannot read training config {path}: {exc}") from exc
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigurationError(f"training config {path}: {exc}") from exc


@dataclass
class History:
    train_loss: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    best_epoch: int = -1
    best_val_loss: float = math.inf
    stopped_early: bool = False
    test_loss: float = math.nan
    test_label_accuracy: float = math.nan
    test_exact_match: float = math.nan
    test_per_output_accuracy: list[float] = field(default_factory=list)
    split_sizes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def sigmoid(z):
    # split by sign so exp never overflows
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def init(seed: int = 0, layer_sizes: Sequence[int] = LAYER_SIZES) -> MLPModel:
    """Glorot-uniform weights, zero biases, identity normalisation."""
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:]):
        bound = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    n = layer_sizes[0]
    return MLPModel(tuple(layer_sizes), weights, biases, np.zeros(n), np.ones(n))


def _as_batch(model: MLPModel, features) -> np.ndarray:
    x = np.asarray(features, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != model.n_inputs:
        raise ConfigurationError(f"expected {model.n_inputs} features, got shape {np.shape(features)}")
    return x


def _activations(model: MLPModel, x: np.ndarray) -> list[np.ndarray]:
    a = (x - model.feature_means) / model.feature_stds
    acts = [a]
    for w, b in zip(model.weights, model.biases):
        a = sigmoid(a @ w + b)
        acts.append(a)
    return acts


def forward(model: MLPModel, features) -> np.ndarray:
    """Output probabilities; a single 7-vector gives a 6-vector, a batch gives a matrix."""
    single = np.asarray(features).ndim == 1
    out = _activations(model, _as_batch(model, features))[-1]
    return out[0] if single else out


def bce(probs: np.ndarray, labels: np.ndarray) -> float:
    p = np.clip(probs, CLIP, 1.0 - CLIP)
    return float(-np.mean(labels * np.log(p) + (1.0 - labels) * np.log(1.0 - p)))


def loss_and_gradient(model: MLPModel, x, y) -> tuple[float, list[np.ndarray]]:
    """Mean binary cross-entropy over batch and outputs, with exact gradients.

    Gradients are returned in :meth:`MLPModel.params` order (w0, b0, w1, ...).
    The clip only affects the reported loss; with a logistic output the
    gradient w.r.t. the pre-activation is ``(p - y)`` scaled by the mean.
    """
    x = _as_batch(model, x)
    y = np.asarray(y, dtype=float)
    if len(x) == 0:
        raise InputError("empty batch")
    acts = _activations(model, x)
    p = acts[-1]
    loss = bce(p, y)
    delta = (p - y) / y.size
    grads: list[np.ndarray] = []
    for l in range(len(model.weights) - 1, -1, -1):
        a_prev = acts[l]
        grads.append(delta.sum(axis=0))
        grads.append(a_prev.T @ delta)
        if l > 0:
            delta = (delta @ model.weights[l].T) * a_prev * (1.0 - a_prev)
    grads.reverse()
    return loss, grads


def _split(n: int, cfg: TrainConfig, rng: np.random.Generator):
    order = rng.permutation(n)
    n_test = int(round(cfg.test_fraction * n))
    n_val = int(round(cfg.validation_fraction * n))
    test = order[:n_test]
    val = order[n_test:n_test + n_val]
    train = order[n_test + n_val:]
    return train, val, test


def evaluate(model: MLPModel, x: np.ndarray, y: np.ndarray) -> dict:
    p = forward(model, x)
    pred = (p >= 0.5).astype(float)
    correct = pred == y
    return {
        "loss": bce(p, y),
        "label_accuracy": float(correct.mean()),
        "exact_match": float(correct.all(axis=1).mean()),
        "per_output_accuracy": correct.mean(axis=0).tolist(),
    }


def train(data: Sequence[LabeledScenario], cfg: TrainConfig = TrainConfig(),
          layer_sizes: Sequence[int] = LAYER_SIZES) -> tuple[MLPModel, History]:
    if len(data) < 20:
        raise InputError(f"need at least 20 labelled scenarios, got {len(data)}")
    x = np.stack([np.asarray(d.features, dtype=float) for d in data])
    y = np.stack([np.asarray(d.labels, dtype=float) for d in data])
    if x.shape[1] != layer_sizes[0] or y.shape[1] != layer_sizes[-1]:
        raise ConfigurationError(f"data shapes {x.shape}/{y.shape} do not fit layers {tuple(layer_sizes)}")

    rng = np.random.default_rng(cfg.seed)
    tr, va, te = _split(len(data), cfg, rng)
    model = init(int(rng.integers(2**31)), layer_sizes)
    model.feature_means = x[tr].mean(axis=0)
    std = x[tr].std(axis=0)
    model.feature_stds = np.where(std > 0, std, 1.0)

    hist = History(split_sizes={"train": len(tr), "validation": len(va), "test": len(te)})
    best = model.copy()
    bad_epochs = 0
    for epoch in range(cfg.max_epochs):
        order = rng.permutation(tr)
        for start in range(0, len(order), cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            _, grads = loss_and_gradient(model, x[idx], y[idx])
            for p, g in zip(model.params(), grads):
                p -= cfg.learning_rate * g
        hist.train_loss.append(bce(forward(model, x[tr]), y[tr]))
        val_loss = bce(forward(model, x[va]), y[va])
        hist.val_loss.append(val_loss)
        if val_loss < hist.best_val_loss:
            hist.best_val_loss, hist.best_epoch = val_loss, epoch
            best = model.copy()
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs >= cfg.patience:
                hist.stopped_early = True
                break

    scores = evaluate(best, x[te], y[te])
    hist.test_loss = scores["loss"]
    hist.test_label_accuracy = scores["label_accuracy"]
    hist.test_exact_match = scores["exact_match"]
    hist.test_per_output_accuracy = scores["per_output_accuracy"]
    return best, hist


# -- synthetic teacher ------------------------------------------------------

#: minimum favourable value for each default-subset explanation to be chosen
DEFAULT_TEACHER_THRESHOLDS = {
    0: 3.0,    # private cost, absolute, USD
    3: 50.0,   # private cost, relative, percent
    4: -5.0,   # private time, absolute: shared at most 5 min slower
    12: 5.0,   # public time, absolute, minutes
    11: 0.0,   # public cost, relative: favourable at all
    CO2_INDEX: 1.0,  # kg
}


def teacher_labels(s: Scenario, subset: Sequence[int], thresholds=None) -> np.ndarray:
    thresholds = DEFAULT_TEACHER_THRESHOLDS if thresholds is None else thresholds
    out = np.zeros(len(subset))
    for k, idx in enumerate(subset):
        if idx not in thresholds:
            raise ConfigurationError(f"no teacher threshold for descriptor {idx}")
        value = compute_value(ExplanationDescriptor.from_index(idx), s)
        out[k] = 1.0 if value >= thresholds[idx] else 0.0
    return out


def synth_labels(scenarios: Sequence[Scenario], subset: Sequence[int], thresholds=None,
                 noise_rate: float = 0.0, seed: int = 0) -> list[LabeledScenario]:
    """Label scenarios with the threshold teacher, flipping each label w.p. ``noise_rate``."""
    if not 0.0 <= noise_rate < 0.5:
        raise InputError(f"noise_rate must lie in [0, 0.5), got {noise_rate}")
    thresholds = DEFAULT_TEACHER_THRESHOLDS if thresholds is None else dict(thresholds)
    if any(not math.isfinite(t) for t in thresholds.values()):
        raise InputError("teacher thresholds must be finite")
    rng = np.random.default_rng(seed)
    out = []
    for s in scenarios:
        y = teacher_labels(s, subset, thresholds)
        flips = rng.random(len(subset)) < noise_rate
        y = np.where(flips, 1.0 - y, y)
        out.append(LabeledScenario(s.scenario_id, extract_features(s), y))
    return out


# -- persistence ------------------------------------------------------------

def model_to_dict(model: MLPModel) -> dict:
    return {
        "format": "ridexplain-mlp",
        "version": MODEL_FORMAT_VERSION,
        "layer_sizes": list(model.layer_sizes),
        "activation": model.activation,
        "weights": [w.tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
        "feature_means": model.feature_means.tolist(),
        "feature_stds": model.feature_stds.tolist(),
    }


def model_from_dict(doc: dict) -> MLPModel:
    if not isinstance(doc, dict) or doc.get("format") != "ridexplain-mlp":
        raise ParseError("not a ridexplain model document")
    if doc.get("version") != MODEL_FORMAT_VERSION:
        raise VersionError(f"model format version {doc.get('version')!r} is not "
                           f"{MODEL_FORMAT_VERSION}")
    try:
        return MLPModel(
            tuple(doc["layer_sizes"]),
            [np.array(w, dtype=float) for w in doc["weights"]],
            [np.array(b, dtype=float) for b in doc["biases"]],
            np.array(doc["feature_means"], dtype=float),
            np.array(doc["feature_stds"], dtype=float),
            doc.get("activation", "logistic"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed model document: {exc}") from exc


def save(model: MLPModel, path) -> None:
    # json writes floats with repr, which round-trips exactly
    Path(path).write_text(json.dumps(model_to_dict(model), indent=1) + "\n")


def load(path) -> MLPModel:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"cannot read model {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"model {path} is not valid JSON: {exc}", line=exc.lineno) from exc
    return model_from_dict(doc)


def labeled_header(subset: Sequence[int]) -> list[str]:
    return ["scenario_id", *FEATURE_NAMES, *(f"label_{i}" for i in subset)]


def save_labeled(data: Sequence[LabeledScenario], subset: Sequence[int], path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(labeled_header(subset))
        for d in data:
            w.writerow([d.scenario_id, *(repr(float(v)) for v in d.features),
                        *(int(v) for v in d.labels)])


def load_labeled(path) -> tuple[list[LabeledScenario], tuple[int, ...]]:
    with Path(path).open(newline="") as fh:
        first = next(csv.reader(fh), None)
    if not first:
        raise ParseError(f"{path} is empty", line=1)
    label_cols = [c for c in first if c.startswith("label_")]
    try:
        subset = tuple(int(c[len("label_"):]) for c in label_cols)
    except ValueError as exc:
        raise ParseError(f"bad label column: {exc}", line=1) from exc
    out = []
    for line, row in read_csv_rows(path, labeled_header(subset)):
        try:
            feats = np.array([float(v) for v in row[1:1 + len(FEATURE_NAMES)]])
            labels = np.array([float(v) for v in row[1 + len(FEATURE_NAMES):]])
            sid = int(row[0])
        except ValueError as exc:
            raise ParseError(f"bad labelled row: {exc}", line=line) from exc
        if not np.all((labels == 0) | (labels == 1)):
            raise ParseError("labels must be 0 or 1", line=line)
        out.append(LabeledScenario(sid, feats, labels))
    return out, subset
