"""Built-in learners that power model split nodes.

Two kinds: an exhaustive-search decision stump (information gain, Shannon
entropy in bits) and a full-batch gradient-descent logistic regression over
standardized features. Both are deterministic: identical inputs produce
bit-identical models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import MISSING, DatasetSchema, Kind, Label, Sample
from .errors import DegenerateData, KindMismatch, NonFiniteLoss, SchemaViolation, UnknownFeature


@dataclass(frozen=True)
class LearnerSpec:
    kind: str  # "stump" | "logreg"
    feature_subset: tuple[str, ...]
    learning_rate: float = 0.1
    epochs: int = 200
    l2: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("stump", "logreg"):
            raise ValueError(f"unknown learner kind {self.kind!r}")
        if not self.feature_subset:
            raise ValueError("feature_subset must be non-empty")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.l2 < 0:
            raise ValueError("l2 must be >= 0")


@dataclass(frozen=True)
class StumpModel:
    feature: str
    threshold: float
    left_label: Label
    p_left: float  # Laplace-smoothed positive rate, value < threshold side
    p_right: float

    @property
    def kind(self) -> str:
        return "stump"

    @property
    def required_features(self) -> tuple[str, ...]:
        return (self.feature,)


@dataclass(frozen=True)
class LogRegModel:
    features: tuple[str, ...]  # surviving features, constants dropped
    weights: tuple[float, ...]
    bias: float
    means: tuple[float, ...]
    stds: tuple[float, ...]
    warnings: tuple[str, ...] = field(default=(), compare=False)

    @property
    def kind(self) -> str:
        return "logreg"

    @property
    def required_features(self) -> tuple[str, ...]:
        return self.features


TrainedModel = StumpModel | LogRegModel


def sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def _sigmoid_vec(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def entropy_bits(positive: int, total: int) -> float:
    """Shannon entropy of a binary mix, in bits. 0 for empty or pure sets."""
    if total == 0 or positive == 0 or positive == total:
        return 0.0
    p = positive / total
    q = 1.0 - p
    return -(p * math.log2(p) + q * math.log2(q))


def _numeric_indices(schema: DatasetSchema, subset) -> list[tuple[str, int]]:
    pairs = []
    for name in subset:
        f = schema.feature(name)
        if f is None:
            raise UnknownFeature(f"feature {name!r} not in dataset")
        if f.kind is not Kind.NUMERIC:
            raise KindMismatch(f"feature {name!r} is categorical; learners need numeric features")
        pairs.append((name, f.index))
    return pairs


def train_stump(samples, subset, schema: DatasetSchema) -> StumpModel:
    """Best (feature, midpoint threshold) by information gain.

    Candidate thresholds are midpoints between consecutive distinct sorted
    values. Rows missing a feature are excluded from that feature's scoring.
    Gain ties break toward the lower feature column index, then the lower
    threshold.
    """
    pairs = _numeric_indices(schema, subset)
    labels = {s.label for s in samples}
    if len(labels) < 2:
        raise DegenerateData("training data holds a single class")

    best = None  # (gain, feature_index, threshold, name, left_counts, right_counts)
    for name, idx in sorted(pairs, key=lambda p: p[1]):
        rows = [(s.values[idx], 1 if s.label is Label.POSITIVE else 0)
                for s in samples if s.values[idx] is not MISSING]
        if len(rows) < 2:
            continue
        rows.sort(key=lambda r: r[0])
        n = len(rows)
        total_pos = sum(y for _, y in rows)
        parent = entropy_bits(total_pos, n)
        left_n = 0
        left_pos = 0
        for i in range(n - 1):
            left_n += 1
            left_pos += rows[i][1]
            if rows[i][0] == rows[i + 1][0]:
                continue
            threshold = (rows[i][0] + rows[i + 1][0]) / 2.0
            right_n = n - left_n
            right_pos = total_pos - left_pos
            gain = parent - (left_n / n) * entropy_bits(left_pos, left_n) \
                - (right_n / n) * entropy_bits(right_pos, right_n)
            key = (-gain, idx, threshold)
            if best is None or key < best[0]:
                best = (key, name, threshold, gain,
                        (left_pos, left_n), (right_pos, right_n))
    if best is None:
        raise DegenerateData("no usable feature: need >=2 rows with distinct values")

    _, name, threshold, gain, (lp, ln), (rp, rn) = best
    p_left = (lp + 1) / (ln + 2)
    p_right = (rp + 1) / (rn + 2)
    return StumpModel(
        feature=name,
        threshold=threshold,
        left_label=Label.POSITIVE if p_left >= 0.5 else Label.NEGATIVE,
        p_left=p_left,
        p_right=p_right,
    )


def logreg_loss(X: np.ndarray, y: np.ndarray, w: np.ndarray, b: float, l2: float) -> float:
    z = X @ w + b
    return float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * float(w @ w))


def train_logreg(samples, spec: LearnerSpec, schema: DatasetSchema) -> LogRegModel:
    """Full-batch gradient descent on mean NLL + l2*||w||^2/2.

    Features are standardized with training-set mean/stddev (population
    stddev); constant features are dropped with a warning. Rows missing any
    subset feature are dropped. Weights and bias start at zero.
    """
    pairs = _numeric_indices(schema, spec.feature_subset)
    rows = [s for s in samples if all(s.values[i] is not MISSING for _, i in pairs)]
    if len(rows) < 2:
        raise DegenerateData("need >=2 rows with the full feature subset present")
    y = np.array([1.0 if s.label is Label.POSITIVE else 0.0 for s in rows])
    if y.min() == y.max():
        raise DegenerateData("training data holds a single class")
    X = np.array([[s.values[i] for _, i in pairs] for s in rows], dtype=float)

    means = X.mean(axis=0)
    stds = X.std(axis=0)
    keep = stds > 0
    warnings = tuple(
        f"feature {name!r} is constant in the training rows; dropped"
        for (name, _), k in zip(pairs, keep) if not k
    )
    if not keep.any():
        raise DegenerateData("every subset feature is constant")
    names = tuple(name for (name, _), k in zip(pairs, keep) if k)
    Xs = (X[:, keep] - means[keep]) / stds[keep]

    n, d = Xs.shape
    w = np.zeros(d)
    b = 0.0
    with np.errstate(over="ignore", invalid="ignore"):  # divergence detected below
        for _ in range(spec.epochs):
            z = Xs @ w + b
            p = _sigmoid_vec(z)
            grad_w = Xs.T @ (p - y) / n + spec.l2 * w
            grad_b = float(np.mean(p - y))
            w = w - spec.learning_rate * grad_w
            b = b - spec.learning_rate * grad_b
            if not (np.isfinite(w).all() and math.isfinite(b)):
                raise NonFiniteLoss("parameters diverged; lower the learning rate")
        if not math.isfinite(logreg_loss(Xs, y, w, b, spec.l2)):
            raise NonFiniteLoss("loss diverged; lower the learning rate")

    return LogRegModel(
        features=names,
        weights=tuple(float(v) for v in w),
        bias=float(b),
        means=tuple(float(v) for v in means[keep]),
        stds=tuple(float(v) for v in stds[keep]),
        warnings=warnings,
    )


def logreg_gradient(X: np.ndarray, y: np.ndarray, w: np.ndarray, b: float, l2: float):
    """Analytic gradient of logreg_loss; exposed for gradient checking."""
    n = len(y)
    p = _sigmoid_vec(X @ w + b)
    return X.T @ (p - y) / n + l2 * w, float(np.mean(p - y))


def model_score(model: TrainedModel, sample: Sample, schema: DatasetSchema) -> float:
    """Positive-class probability; requires the model's features non-missing."""
    if isinstance(model, StumpModel):
        f = schema.feature(model.feature)
        v = sample.values[f.index]
        return model.p_left if v < model.threshold else model.p_right
    z = model.bias
    for name, w, mean, std in zip(model.features, model.weights, model.means, model.stds):
        f = schema.feature(name)
        z += w * (sample.values[f.index] - mean) / std
    return sigmoid(z)


# --- JSON ------------------------------------------------------------------

def model_to_json(model: TrainedModel) -> dict:
    if isinstance(model, StumpModel):
        return {
            "kind": "stump",
            "feature": model.feature,
            "threshold": model.threshold,
            "left_label": model.left_label.value,
            "p_left": model.p_left,
            "p_right": model.p_right,
        }
    return {
        "kind": "logreg",
        "features": list(model.features),
        "weights": list(model.weights),
        "bias": model.bias,
        "means": list(model.means),
        "stds": list(model.stds),
    }


def _need(doc: dict, keys: set, path: str):
    if not isinstance(doc, dict):
        raise SchemaViolation(f"expected object at {path}", location=path)
    extra = set(doc) - keys
    if extra:
        raise SchemaViolation(f"unknown fields {sorted(extra)}", location=path)
    missing = keys - set(doc)
    if missing:
        raise SchemaViolation(f"missing fields {sorted(missing)}", location=path)


def _finite(v, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise SchemaViolation("expected a finite number", location=path)
    return float(v)


def model_from_json(doc: dict, path: str = "$") -> TrainedModel:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise SchemaViolation("model needs a 'kind'", location=path + ".kind")
    kind = doc["kind"]
    if kind == "stump":
        _need(doc, {"kind", "feature", "threshold", "left_label", "p_left", "p_right"}, path)
        if doc["left_label"] not in ("positive", "negative"):
            raise SchemaViolation("left_label must be 'positive' or 'negative'",
                                  location=path + ".left_label")
        return StumpModel(
            feature=str(doc["feature"]),
            threshold=_finite(doc["threshold"], path + ".threshold"),
            left_label=Label(doc["left_label"]),
            p_left=_finite(doc["p_left"], path + ".p_left"),
            p_right=_finite(doc["p_right"], path + ".p_right"),
        )
    if kind == "logreg":
        _need(doc, {"kind", "features", "weights", "bias", "means", "stds"}, path)
        names = doc["features"]
        if not isinstance(names, list) or not names or not all(isinstance(x, str) for x in names):
            raise SchemaViolation("features must be a non-empty list of names",
                                  location=path + ".features")
        vecs = {}
        for key in ("weights", "means", "stds"):
            arr = doc[key]
            if not isinstance(arr, list) or len(arr) != len(names):
                raise SchemaViolation(f"{key} must align with features", location=f"{path}.{key}")
            vecs[key] = tuple(_finite(v, f"{path}.{key}[{i}]") for i, v in enumerate(arr))
        return LogRegModel(
            features=tuple(names),
            weights=vecs["weights"],
            bias=_finite(doc["bias"], path + ".bias"),
            means=vecs["means"],
            stds=vecs["stds"],
        )
    raise SchemaViolation(f"unknown model kind {kind!r}", location=path + ".kind")
