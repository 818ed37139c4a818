"""Tree quality measurement: accuracy, AUC, confusion matrix, per-leaf stats.

Three protocols: fit-and-score on the whole dataset (flagged as optimistic),
fit on one dataset and score a companion test set, or a seeded stratified
percentage split. AUC uses the tree's smoothed leaf probabilities as scores,
with midrank half-credit for ties.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

from .dataset import Dataset, DatasetSchema, Label, Sample, percentage_split, subset
from .errors import (
    BadFraction,
    NotFound,
    OneClassOnly,
    SchemaViolation,
    SignatureMismatch,
    ValidationFailed,
)
from .tree import (
    EMPTY_RESOLVER,
    DecisionTree,
    TreeResolver,
    fit_leaf_stats,
    iter_leaves,
    predict,
    predict_with_path,
    validate_tree,
)

TRAINING_SET_WARNING = "training-set evaluation may overfit"


@dataclass(frozen=True)
class TrainingSet:
    pass


@dataclass(frozen=True)
class TestSet:
    test_dataset_id: str


@dataclass(frozen=True)
class PercentageSplit:
    fraction: float
    seed: int


EvalMode = TrainingSet | TestSet | PercentageSplit


class Library(Protocol):
    """Read-only snapshot the evaluator resolves references through."""

    def resolve_tree(self, tree_id: str) -> DecisionTree: ...

    def resolve_dataset(self, dataset_id: str) -> Dataset: ...


class _NullLibrary:
    def resolve_tree(self, tree_id: str) -> DecisionTree:
        return EMPTY_RESOLVER.resolve_tree(tree_id)

    def resolve_dataset(self, dataset_id: str) -> Dataset:
        raise NotFound(f"no dataset with id {dataset_id!r}")


NULL_LIBRARY = _NullLibrary()


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total


@dataclass(frozen=True)
class LeafStat:
    path: str  # Left/Right walk from the root, "" for a bare-leaf tree
    eval_count: int
    eval_fraction: float
    leaf_accuracy: float | None  # absent when no sample reached the leaf
    label: Label


@dataclass(frozen=True)
class EvaluationReport:
    mode: EvalMode
    accuracy: float
    auc: float
    confusion: ConfusionMatrix
    leaf_stats: tuple[LeafStat, ...]
    warnings: tuple[str, ...]


def auc(scores, labels) -> float:
    """Mann-Whitney AUC with midrank tie handling, O(n log n).

    Equal to the pairwise definition: the fraction of (positive, negative)
    pairs ordered correctly, ties counting half. Computed from exact integer
    half-rank sums; the smaller tail is divided and the larger derived as its
    complement, which makes auc(s, y) + auc(s, not y) == 1.0 exact in floats.
    """
    n = len(scores)
    if n != len(labels):
        raise ValueError("scores and labels must align")
    n_pos = sum(1 for y in labels if y is Label.POSITIVE)
    n_neg = n - n_pos
    if n_pos == 0 or n_neg == 0:
        raise OneClassOnly("AUC needs both classes present")

    order = sorted(range(n), key=lambda i: scores[i])
    two_rank_pos = 0  # twice the positive midrank sum (exact integer)
    i = 0
    while i < n:
        j = i
        while j < n and scores[order[j]] == scores[order[i]]:
            j += 1
        group_pos = sum(1 for k in range(i, j) if labels[order[k]] is Label.POSITIVE)
        two_rank_pos += (i + 1 + j) * group_pos  # 2 * midrank of 1-based ranks [i+1 .. j]
        i = j

    two_u = two_rank_pos - n_pos * (n_pos + 1)
    two_d = 2 * n_pos * n_neg
    if 2 * two_u <= two_d:
        return two_u / two_d
    return 1.0 - (two_d - two_u) / two_d


def _assess(fitted: DecisionTree, samples, schema: DatasetSchema, lib,
            mode: EvalMode, warnings) -> tuple[EvaluationReport, list[float], list[Label]]:
    counts: dict[str, int] = {}
    correct: dict[str, int] = {}
    scores: list[float] = []
    truths: list[Label] = []
    tp = fp = fn = tn = 0
    for s in samples:
        label, score, path = predict_with_path(fitted, s, schema, lib)
        scores.append(score)
        truths.append(s.label)
        counts[path] = counts.get(path, 0) + 1
        if label == s.label:
            correct[path] = correct.get(path, 0) + 1
        if label is Label.POSITIVE:
            if s.label is Label.POSITIVE:
                tp += 1
            else:
                fp += 1
        else:
            if s.label is Label.NEGATIVE:
                tn += 1
            else:
                fn += 1

    total = len(samples)
    leaf_stats = tuple(
        LeafStat(
            path=path,
            eval_count=counts.get(path, 0),
            eval_fraction=counts.get(path, 0) / total,
            leaf_accuracy=(correct.get(path, 0) / counts[path]) if counts.get(path) else None,
            label=leaf.label,
        )
        for path, leaf in iter_leaves(fitted.root)
    )
    report = EvaluationReport(
        mode=mode,
        accuracy=(tp + tn) / total,
        auc=auc(scores, truths),
        confusion=ConfusionMatrix(tp, fp, fn, tn),
        leaf_stats=leaf_stats,
        warnings=tuple(warnings),
    )
    return report, scores, truths


def evaluate_detailed(tree: DecisionTree, d: Dataset, mode: EvalMode,
                      lib: Library = NULL_LIBRARY):
    """evaluate() plus the per-sample scores/labels (for ROC rendering)."""
    if tree.dataset_signature != d.signature:
        raise SignatureMismatch("tree was built against a different dataset signature")
    issues = validate_tree(tree, d.schema, lib)
    if issues:
        raise ValidationFailed(issues)

    warnings: list[str] = []
    if isinstance(mode, TrainingSet):
        fitted = fit_leaf_stats(tree, list(d.samples), d.schema, lib)
        eval_samples = d.samples
        warnings.append(TRAINING_SET_WARNING)
    elif isinstance(mode, TestSet):
        test_d = lib.resolve_dataset(mode.test_dataset_id)
        if test_d.signature != d.signature:
            raise SignatureMismatch("test dataset signature differs from the training dataset")
        fitted = fit_leaf_stats(tree, list(d.samples), d.schema, lib)
        eval_samples = test_d.samples
    elif isinstance(mode, PercentageSplit):
        part = percentage_split(d, mode.fraction, mode.seed)
        fitted = fit_leaf_stats(tree, list(subset(d, part.train_indices)), d.schema, lib)
        eval_samples = subset(d, part.test_indices)
        warnings.extend(part.warnings)
    else:
        raise TypeError(f"unknown evaluation mode {type(mode).__name__}")

    return _assess(fitted, eval_samples, d.schema, lib, mode, warnings)


def evaluate(tree: DecisionTree, d: Dataset, mode: EvalMode,
             lib: Library = NULL_LIBRARY) -> EvaluationReport:
    report, _, _ = evaluate_detailed(tree, d, mode, lib)
    return report


def ensemble_predict(trees, sample: Sample, schema: DatasetSchema,
                     lib: TreeResolver = EMPTY_RESOLVER) -> Label:
    """Unweighted majority vote; vote ties fall to the mean-score side."""
    if not trees:
        raise ValueError("ensemble needs >= 1 tree")
    sigs = {t.dataset_signature for t in trees}
    if len(sigs) > 1:
        raise SignatureMismatch("ensemble members disagree on dataset signature")
    votes = 0
    score_sum = 0.0
    for t in trees:
        label, score = predict(t, sample, schema, lib)
        votes += 1 if label is Label.POSITIVE else -1
        score_sum += score
    if votes > 0:
        return Label.POSITIVE
    if votes < 0:
        return Label.NEGATIVE
    mean = score_sum / len(trees)
    return Label.POSITIVE if mean >= 0.5 else Label.NEGATIVE


def ensemble_evaluate(trees, d: Dataset, mode: EvalMode,
                      lib: Library = NULL_LIBRARY) -> EvaluationReport:
    """Evaluate a majority-vote ensemble under the same protocols.

    Every member is refitted on the training side; the AUC score of a sample
    is the mean of the members' leaf scores. The report carries no leaf
    stats (an ensemble has no single leaf structure).
    """
    if not trees:
        raise ValueError("ensemble needs >= 1 tree")
    for t in trees:
        if t.dataset_signature != d.signature:
            raise SignatureMismatch("ensemble member built against a different dataset signature")
        issues = validate_tree(t, d.schema, lib)
        if issues:
            raise ValidationFailed(issues)

    warnings: list[str] = []
    if isinstance(mode, TrainingSet):
        train_samples, eval_samples = list(d.samples), d.samples
        warnings.append(TRAINING_SET_WARNING)
    elif isinstance(mode, TestSet):
        test_d = lib.resolve_dataset(mode.test_dataset_id)
        if test_d.signature != d.signature:
            raise SignatureMismatch("test dataset signature differs from the training dataset")
        train_samples, eval_samples = list(d.samples), test_d.samples
    elif isinstance(mode, PercentageSplit):
        part = percentage_split(d, mode.fraction, mode.seed)
        train_samples = list(subset(d, part.train_indices))
        eval_samples = subset(d, part.test_indices)
        warnings.extend(part.warnings)
    else:
        raise TypeError(f"unknown evaluation mode {type(mode).__name__}")

    fitted = [fit_leaf_stats(t, train_samples, d.schema, lib) for t in trees]
    tp = fp = fn = tn = 0
    scores: list[float] = []
    truths: list[Label] = []
    for s in eval_samples:
        votes = 0
        score_sum = 0.0
        for t in fitted:
            label, score = predict(t, s, d.schema, lib)
            votes += 1 if label is Label.POSITIVE else -1
            score_sum += score
        mean = score_sum / len(fitted)
        if votes > 0:
            pred = Label.POSITIVE
        elif votes < 0:
            pred = Label.NEGATIVE
        else:
            pred = Label.POSITIVE if mean >= 0.5 else Label.NEGATIVE
        scores.append(mean)
        truths.append(s.label)
        if pred is Label.POSITIVE:
            if s.label is Label.POSITIVE:
                tp += 1
            else:
                fp += 1
        else:
            if s.label is Label.NEGATIVE:
                tn += 1
            else:
                fn += 1

    total = len(eval_samples)
    return EvaluationReport(
        mode=mode,
        accuracy=(tp + tn) / total,
        auc=auc(scores, truths),
        confusion=ConfusionMatrix(tp, fp, fn, tn),
        leaf_stats=(),
        warnings=tuple(warnings),
    )


# --- JSON ----------------------------------------------------------------

def mode_to_json(mode: EvalMode) -> dict:
    if isinstance(mode, TrainingSet):
        return {"trainingSet": {}}
    if isinstance(mode, TestSet):
        return {"testSet": {"datasetId": mode.test_dataset_id}}
    if isinstance(mode, PercentageSplit):
        return {"percentageSplit": {"fraction": mode.fraction, "seed": mode.seed}}
    raise TypeError(f"unknown evaluation mode {type(mode).__name__}")


def mode_from_json(doc) -> EvalMode:
    if not isinstance(doc, dict) or len(doc) != 1:
        raise SchemaViolation(
            "mode is one of {'trainingSet':{}}, {'testSet':{...}}, {'percentageSplit':{...}}",
            location="$")
    kind, body = next(iter(doc.items()))
    if not isinstance(body, dict):
        raise SchemaViolation("mode body must be an object", location=f"$.{kind}")
    if kind == "trainingSet":
        if body:
            raise SchemaViolation("trainingSet takes no fields", location="$.trainingSet")
        return TrainingSet()
    if kind == "testSet":
        if set(body) != {"datasetId"} or not isinstance(body["datasetId"], str):
            raise SchemaViolation("testSet needs a 'datasetId' string",
                                  location="$.testSet.datasetId")
        return TestSet(body["datasetId"])
    if kind == "percentageSplit":
        if set(body) != {"fraction", "seed"}:
            raise SchemaViolation("percentageSplit needs 'fraction' and 'seed'",
                                  location="$.percentageSplit")
        fraction = body["fraction"]
        seed = body["seed"]
        if isinstance(fraction, bool) or not isinstance(fraction, (int, float)) \
                or not 0 < fraction < 1:
            raise BadFraction(f"fraction must be in (0,1), got {fraction!r}")
        if isinstance(seed, bool) or not isinstance(seed, int):
            raise SchemaViolation("seed must be an integer", location="$.percentageSplit.seed")
        return PercentageSplit(float(fraction), seed)
    raise SchemaViolation(f"unknown mode {kind!r}", location="$")


def report_to_doc(report: EvaluationReport) -> dict:
    leaves = []
    for ls in report.leaf_stats:
        entry = {"path": ls.path, "count": ls.eval_count, "fraction": ls.eval_fraction,
                 "label": ls.label.value}
        if ls.leaf_accuracy is not None:
            entry["accuracy"] = ls.leaf_accuracy
        leaves.append(entry)
    c = report.confusion
    return {
        "mode": mode_to_json(report.mode),
        "accuracy": report.accuracy,
        "auc": report.auc,
        "confusion": {"tp": c.tp, "fp": c.fp, "fn": c.fn, "tn": c.tn},
        "leaves": leaves,
        "warnings": list(report.warnings),
    }
