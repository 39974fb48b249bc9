"""Gaussian Naive Bayes and a Pegasos-trained linear SVM for the Yes/No gate.

Labels are 0/1 integers throughout (1 = Yes, the simplification is good).
Both classifiers resolve exact ties to No, which keeps the original sentence.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import NO, YES, DataError

VAR_FLOOR = 1e-9
MODEL_FORMAT_VERSION = 1


class ModelFormatError(DataError):
    """A model file is truncated, malformed or of an unknown version."""


@dataclass(frozen=True)
class Prediction:
    label: str
    score: float  # NB: posterior p(Yes|x); SVM: signed margin

    @property
    def y(self) -> int:
        return 1 if self.label == YES else 0


def _check_training_set(X, y) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y).astype(np.int64)
    if X.ndim != 2 or X.shape[0] != y.shape[0]:
        raise ValueError(f"feature matrix {X.shape} does not match {y.shape[0]} labels")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be 0 (No) or 1 (Yes)")
    if X.shape[0] < 2 or len(np.unique(y)) < 2:
        raise DataError("degenerate training set: both Yes and No examples are required")
    if not np.isfinite(X).all():
        raise ValueError("feature matrix contains non-finite values")
    return X, y


def _check_input(x, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != dim:
        raise ValueError(f"expected {dim} features, got {x.shape[0]}")
    if not np.isfinite(x).all():
        raise ValueError("input vector contains non-finite values")
    return x


@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, X) -> "Standardizer":
        X = np.asarray(X, dtype=np.float64)
        return cls(X.mean(axis=0), np.maximum(X.std(axis=0), VAR_FLOOR))

    def transform(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.mean) / self.std


# -- Gaussian Naive Bayes ---------------------------------------------------


@dataclass(frozen=True)
class NBModel:
    prior_yes: float
    prior_no: float
    mean_yes: np.ndarray
    var_yes: np.ndarray
    mean_no: np.ndarray
    var_no: np.ndarray

    kind = "nb"

    @property
    def n_features(self) -> int:
        return self.mean_yes.shape[0]

    def predict(self, x) -> Prediction:
        return predict_nb(self, x)

    def to_json(self) -> dict:
        return {
            "prior_yes": self.prior_yes,
            "prior_no": self.prior_no,
            "mean_yes": self.mean_yes.tolist(),
            "var_yes": self.var_yes.tolist(),
            "mean_no": self.mean_no.tolist(),
            "var_no": self.var_no.tolist(),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "NBModel":
        arrays = {k: np.asarray(doc[k], dtype=np.float64) for k in ("mean_yes", "var_yes", "mean_no", "var_no")}
        return cls(float(doc["prior_yes"]), float(doc["prior_no"]), **arrays)


def train_nb(X, y) -> NBModel:
    """Fit class priors and per-class, per-feature Gaussians (population variance).

    Each variance is floored at ``VAR_FLOOR`` times the feature's overall
    variance (or 1, whichever is larger), so constant columns stay usable.
    """
    X, y = _check_training_set(X, y)
    floor = VAR_FLOOR * np.maximum(X.var(axis=0), 1.0)
    yes, no = X[y == 1], X[y == 0]
    n = X.shape[0]
    return NBModel(
        prior_yes=yes.shape[0] / n,
        prior_no=no.shape[0] / n,
        mean_yes=yes.mean(axis=0),
        var_yes=np.maximum(yes.var(axis=0), floor),
        mean_no=no.mean(axis=0),
        var_no=np.maximum(no.var(axis=0), floor),
    )


def _log_gaussian(x, mean, var) -> float:
    return float(np.sum(-0.5 * np.log(2.0 * np.pi * var) - (x - mean) ** 2 / (2.0 * var)))


def nb_posteriors(model: NBModel, x) -> tuple[float, float]:
    """(p(Yes|x), p(No|x)), normalized in log space."""
    x = _check_input(x, model.n_features)
    log_yes = math.log(model.prior_yes) + _log_gaussian(x, model.mean_yes, model.var_yes)
    log_no = math.log(model.prior_no) + _log_gaussian(x, model.mean_no, model.var_no)
    top = max(log_yes, log_no)
    e_yes, e_no = math.exp(log_yes - top), math.exp(log_no - top)
    total = e_yes + e_no
    return e_yes / total, e_no / total


def predict_nb(model: NBModel, x) -> Prediction:
    p_yes, _ = nb_posteriors(model, x)
    return Prediction(YES if p_yes > 0.5 else NO, p_yes)


# -- Linear SVM (Pegasos) ---------------------------------------------------


@dataclass(frozen=True)
class SVMHyper:
    lam: float = 1e-3
    epochs: int = 50
    seed: int = 13


@dataclass(frozen=True)
class SVMModel:
    weights: np.ndarray
    bias: float
    standardizer: Standardizer
    hyper: SVMHyper = SVMHyper()
    objective_history: tuple = field(default=(), repr=False)

    kind = "svm"

    @property
    def n_features(self) -> int:
        return self.weights.shape[0]

    def margin(self, x) -> float:
        x = _check_input(x, self.n_features)
        return float(np.dot(self.weights, self.standardizer.transform(x)) + self.bias)

    def predict(self, x) -> Prediction:
        return predict_svm(self, x)

    def to_json(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "standardizer": {"mean": self.standardizer.mean.tolist(), "std": self.standardizer.std.tolist()},
            "hyper": {"lambda": self.hyper.lam, "epochs": self.hyper.epochs, "seed": self.hyper.seed},
            "objective_history": list(self.objective_history),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "SVMModel":
        std = doc["standardizer"]
        hyper = doc["hyper"]
        return cls(
            weights=np.asarray(doc["weights"], dtype=np.float64),
            bias=float(doc["bias"]),
            standardizer=Standardizer(np.asarray(std["mean"], dtype=np.float64), np.asarray(std["std"], dtype=np.float64)),
            hyper=SVMHyper(float(hyper["lambda"]), int(hyper["epochs"]), int(hyper["seed"])),
            objective_history=tuple(float(v) for v in doc.get("objective_history", ())),
        )


def svm_objective(w: np.ndarray, b: float, Z: np.ndarray, s: np.ndarray, lam: float) -> float:
    """lam/2 * (|w|^2 + b^2) + mean hinge loss, on standardized inputs and +/-1 labels."""
    margins = s * (Z @ w + b)
    return 0.5 * lam * (float(w @ w) + b * b) + float(np.mean(np.maximum(0.0, 1.0 - margins)))


def train_svm(X, y, hyper: SVMHyper | None = None) -> SVMModel:
    """Primal stochastic subgradient descent on the regularized hinge loss.

    One epoch visits every example once in a seeded random order; the step
    at update t is 1/(lam*t). The bias is an extra regularized coordinate on
    a constant input. After each step the iterate is projected onto the ball
    of radius 1/sqrt(lam).
    """
    hyper = hyper or SVMHyper()
    if hyper.lam <= 0:
        raise ValueError("lambda must be positive")
    if hyper.epochs < 1:
        raise ValueError("epochs must be >= 1")
    X, y = _check_training_set(X, y)
    scaler = Standardizer.fit(X)
    Z = scaler.transform(X)
    s = np.where(y == 1, 1.0, -1.0)
    n, d = Z.shape
    lam = hyper.lam
    radius = 1.0 / math.sqrt(lam)
    w = np.zeros(d)
    b = 0.0
    rng = np.random.default_rng(hyper.seed)
    t = 0
    history = []
    for _ in range(hyper.epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (lam * t)
            violated = s[i] * (Z[i] @ w + b) < 1.0
            w *= 1.0 - eta * lam
            b *= 1.0 - eta * lam
            if violated:
                w += eta * s[i] * Z[i]
                b += eta * s[i]
            norm = math.sqrt(float(w @ w) + b * b)
            if norm > radius:
                w *= radius / norm
                b *= radius / norm
        history.append(svm_objective(w, b, Z, s, lam))
    return SVMModel(w.copy(), float(b), scaler, hyper, tuple(history))


def predict_svm(model: SVMModel, x) -> Prediction:
    score = model.margin(x)
    return Prediction(YES if score > 0.0 else NO, score)


# -- Batch helpers and persistence -----------------------------------------


def predict_batch(model, X) -> list[Prediction]:
    return [model.predict(row) for row in np.asarray(X, dtype=np.float64)]


def train(kind: str, X, y, hyper: SVMHyper | None = None):
    if kind == "nb":
        return train_nb(X, y)
    if kind == "svm":
        return train_svm(X, y, hyper)
    raise ValueError(f"unknown classifier {kind!r}; expected 'nb' or 'svm'")


def model_to_json(model, extra: dict | None = None) -> dict:
    doc = {"format": "simplegate-model", "version": MODEL_FORMAT_VERSION, "kind": model.kind}
    doc.update(model.to_json())
    if extra:
        doc["meta"] = extra
    return doc


def model_from_json(doc) -> NBModel | SVMModel:
    if not isinstance(doc, dict) or doc.get("format") != "simplegate-model":
        raise ModelFormatError("not a classifier model document")
    if doc.get("version") != MODEL_FORMAT_VERSION:
        raise ModelFormatError(f"unsupported model version {doc.get('version')!r}")
    kind = doc.get("kind")
    try:
        if kind == "nb":
            return NBModel.from_json(doc)
        if kind == "svm":
            return SVMModel.from_json(doc)
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed {kind} model: {exc}") from None
    raise ModelFormatError(f"unknown model kind {kind!r}")


def save_model(model, path, extra: dict | None = None) -> None:
    """Write ``model`` as versioned JSON. Floats are written with repr, so a
    reload gives bit-identical parameters."""
    Path(path).write_text(json.dumps(model_to_json(model, extra), indent=1, sort_keys=True) + "\n", encoding="utf-8")


def load_model(path) -> NBModel | SVMModel:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise ModelFormatError(f"model file not found: {path}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: truncated or invalid model file ({exc.msg})") from None
    return model_from_json(doc)


def load_model_meta(path) -> dict:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return doc.get("meta", {}) if isinstance(doc, dict) else {}
