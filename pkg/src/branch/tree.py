"""Decision trees assembled by hand from five kinds of split rules.

Internal nodes route a sample Left or Right; leaves carry a predicted class
plus the training counts behind it. Conventions, fixed for portability:

* Left is the "low" side: numeric value < threshold, custom-feature score
  < threshold, category in the rule's left set, model probability >= 0.5
  (Left = predicted-positive), referenced tree predicting positive, point
  inside a polygon. Equality on numeric thresholds routes Right.
* A rule whose required feature is missing yields MissingInput; prediction
  then descends into the child subtree with the larger training total
  (tie toward Left).
* Leaf scores are Laplace-smoothed positive rates (pos+1)/(total+2).
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Protocol

from .canonical import canonical_dumps
from .dataset import MISSING, DatasetSchema, Kind, Label, Sample
from .errors import (
    CyclicReference,
    KindMismatch,
    SchemaViolation,
    SignatureMismatch,
    UnknownFeature,
    UnresolvableTreeRef,
)
from .learners import TrainedModel, model_from_json, model_score, model_to_json
from .polygon import point_in_any


# --- rules -------------------------------------------------------------------

@dataclass(frozen=True)
class FeatureRule:
    """Single-feature split: numeric threshold or categorical left-set."""

    feature: str
    threshold: float | None = None
    left_categories: frozenset[str] | None = None

    def __post_init__(self):
        if (self.threshold is None) == (self.left_categories is None):
            raise ValueError("exactly one of threshold / left_categories must be set")
        if self.threshold is not None:
            object.__setattr__(self, "threshold", float(self.threshold))
        if self.left_categories is not None:
            cats = frozenset(self.left_categories)
            if not cats:
                raise ValueError("left_categories must be non-empty")
            object.__setattr__(self, "left_categories", cats)


@dataclass(frozen=True)
class CustomFeatureRule:
    """Linear combination of numeric features compared against a threshold.

    An empty weight map is legal: the score is just the offset, so the rule
    routes every sample to one fixed side and never reports missing input.
    """

    weights: tuple[tuple[str, float], ...]
    offset: float
    threshold: float

    def __post_init__(self):
        items = dict(self.weights) if not isinstance(self.weights, dict) else self.weights
        object.__setattr__(
            self, "weights", tuple(sorted((str(k), float(v)) for k, v in items.items()))
        )
        object.__setattr__(self, "offset", float(self.offset))
        object.__setattr__(self, "threshold", float(self.threshold))

    @property
    def weight_map(self) -> dict[str, float]:
        return dict(self.weights)


@dataclass(frozen=True)
class ModelRule:
    """Split by a trained model's positive probability (>= 0.5 routes Left)."""

    model: TrainedModel
    feature_subset: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "feature_subset", tuple(self.feature_subset))
        if not self.feature_subset:
            raise ValueError("feature_subset must be non-empty")


@dataclass(frozen=True)
class TreeRefRule:
    """Delegate routing to a stored tree: predicted positive routes Left."""

    tree_id: str

    def __post_init__(self):
        if not self.tree_id:
            raise ValueError("tree_id must be non-empty")


@dataclass(frozen=True)
class VisualRule:
    """Hand-drawn decision region: inside any polygon (even-odd) routes Left."""

    feature_x: str
    feature_y: str
    polygons: tuple[tuple[tuple[float, float], ...], ...]

    def __post_init__(self):
        polys = []
        for poly in self.polygons:
            verts = tuple((float(x), float(y)) for x, y in poly)
            if len(verts) < 3:
                raise ValueError("polygons need >= 3 vertices")
            if not all(math.isfinite(x) and math.isfinite(y) for x, y in verts):
                raise ValueError("polygon vertices must be finite")
            polys.append(verts)
        if not polys:
            raise ValueError("visual rule needs >= 1 polygon")
        object.__setattr__(self, "polygons", tuple(polys))


SplitRule = FeatureRule | CustomFeatureRule | ModelRule | TreeRefRule | VisualRule


@dataclass(frozen=True)
class CustomFeatureDef:
    """Reusable named linear combination (e.g. a recurrence-score recipe)."""

    name: str
    weights: tuple[tuple[str, float], ...]
    offset: float = 0.0

    def __post_init__(self):
        items = dict(self.weights) if not isinstance(self.weights, dict) else self.weights
        norm = tuple(sorted((str(k), float(v)) for k, v in items.items()))
        if not norm:
            raise ValueError("a custom feature needs >= 1 weight")
        object.__setattr__(self, "weights", norm)

    def as_rule(self, threshold: float) -> CustomFeatureRule:
        return CustomFeatureRule(dict(self.weights), self.offset, threshold)


# --- nodes ---------------------------------------------------------------------

@dataclass(frozen=True)
class Leaf:
    label: Label
    train_total: int = 0
    train_positive: int = 0

    def __post_init__(self):
        if not 0 <= self.train_positive <= self.train_total:
            raise ValueError("leaf counts need 0 <= positive <= total")

    @property
    def score(self) -> float:
        return (self.train_positive + 1) / (self.train_total + 2)


@dataclass(frozen=True)
class Split:
    rule: SplitRule
    left: "Node"
    right: "Node"


Node = Leaf | Split


@dataclass(frozen=True)
class DecisionTree:
    id: str
    name: str
    dataset_signature: str
    root: Node


class Routed(enum.Enum):
    LEFT = "left"
    RIGHT = "right"
    MISSING = "missing"


class TreeResolver(Protocol):
    def resolve_tree(self, tree_id: str) -> DecisionTree: ...


class MappingResolver:
    """Dict-backed resolver; the store provides the persistent counterpart."""

    def __init__(self, trees: dict[str, DecisionTree] | None = None):
        self._trees = dict(trees or {})

    def add(self, tree: DecisionTree) -> None:
        self._trees[tree.id] = tree

    def resolve_tree(self, tree_id: str) -> DecisionTree:
        try:
            return self._trees[tree_id]
        except KeyError:
            raise UnresolvableTreeRef(f"no tree with id {tree_id!r}") from None


EMPTY_RESOLVER = MappingResolver()


# --- routing and prediction -----------------------------------------------------

def route(rule: SplitRule, sample: Sample, schema: DatasetSchema,
          resolver: TreeResolver = EMPTY_RESOLVER) -> Routed:
    if isinstance(rule, FeatureRule):
        f = schema.feature(rule.feature)
        v = sample.values[f.index]
        if v is MISSING:
            return Routed.MISSING
        if rule.threshold is not None:
            return Routed.LEFT if v < rule.threshold else Routed.RIGHT
        return Routed.LEFT if v in rule.left_categories else Routed.RIGHT

    if isinstance(rule, CustomFeatureRule):
        score = rule.offset
        for name, w in rule.weights:
            v = sample.values[schema.feature(name).index]
            if v is MISSING:
                return Routed.MISSING
            score += w * v
        return Routed.LEFT if score < rule.threshold else Routed.RIGHT

    if isinstance(rule, ModelRule):
        for name in rule.model.required_features:
            if sample.values[schema.feature(name).index] is MISSING:
                return Routed.MISSING
        p = model_score(rule.model, sample, schema)
        return Routed.LEFT if p >= 0.5 else Routed.RIGHT

    if isinstance(rule, TreeRefRule):
        ref = resolver.resolve_tree(rule.tree_id)
        label, _ = predict(ref, sample, schema, resolver)
        return Routed.LEFT if label is Label.POSITIVE else Routed.RIGHT

    if isinstance(rule, VisualRule):
        fx = sample.values[schema.feature(rule.feature_x).index]
        fy = sample.values[schema.feature(rule.feature_y).index]
        if fx is MISSING or fy is MISSING:
            return Routed.MISSING
        return Routed.LEFT if point_in_any((fx, fy), rule.polygons) else Routed.RIGHT

    raise TypeError(f"unknown rule type {type(rule).__name__}")


def subtree_total(node: Node) -> int:
    if isinstance(node, Leaf):
        return node.train_total
    return subtree_total(node.left) + subtree_total(node.right)


def _descend(node: Node, sample: Sample, schema: DatasetSchema,
             resolver: TreeResolver) -> tuple[Leaf, str]:
    path = []
    while isinstance(node, Split):
        side = route(node.rule, sample, schema, resolver)
        if side is Routed.MISSING:
            side = (Routed.LEFT if subtree_total(node.left) >= subtree_total(node.right)
                    else Routed.RIGHT)
        if side is Routed.LEFT:
            path.append("L")
            node = node.left
        else:
            path.append("R")
            node = node.right
    return node, "".join(path)


def predict(tree: DecisionTree, sample: Sample, schema: DatasetSchema,
            resolver: TreeResolver = EMPTY_RESOLVER) -> tuple[Label, float]:
    leaf, _ = _descend(tree.root, sample, schema, resolver)
    return leaf.label, leaf.score


def predict_with_path(tree: DecisionTree, sample: Sample, schema: DatasetSchema,
                      resolver: TreeResolver = EMPTY_RESOLVER) -> tuple[Label, float, str]:
    leaf, path = _descend(tree.root, sample, schema, resolver)
    return leaf.label, leaf.score, path


def iter_leaves(node: Node, path: str = "") -> list[tuple[str, Leaf]]:
    if isinstance(node, Leaf):
        return [(path, node)]
    return iter_leaves(node.left, path + "L") + iter_leaves(node.right, path + "R")


# --- fitting ---------------------------------------------------------------------

def fit_leaf_stats(tree: DecisionTree, train: list[Sample], schema: DatasetSchema,
                   resolver: TreeResolver = EMPTY_RESOLVER) -> DecisionTree:
    """Recompute every leaf's counts and label from the given training samples.

    Samples with missing split input follow the side that received more
    non-missing samples at that node (tie toward Left). Label ties break
    toward the majority class of the whole training collection, then
    Positive; unreached leaves get (0, 0) and the prior label.
    """
    prior_pos = sum(1 for s in train if s.label is Label.POSITIVE)
    prior_label = Label.POSITIVE if prior_pos >= len(train) - prior_pos else Label.NEGATIVE

    def leaf_label(pos: int, total: int) -> Label:
        if 2 * pos > total:
            return Label.POSITIVE
        if 2 * pos < total:
            return Label.NEGATIVE
        return prior_label

    def fit(node: Node, samples: list[Sample]) -> Node:
        if isinstance(node, Leaf):
            total = len(samples)
            pos = sum(1 for s in samples if s.label is Label.POSITIVE)
            return Leaf(leaf_label(pos, total), train_total=total, train_positive=pos)
        lefts, rights, missing = [], [], []
        for s in samples:
            side = route(node.rule, s, schema, resolver)
            (lefts if side is Routed.LEFT else rights if side is Routed.RIGHT else missing).append(s)
        if missing:
            (lefts if len(lefts) >= len(rights) else rights).extend(missing)
        return Split(node.rule, fit(node.left, lefts), fit(node.right, rights))

    return DecisionTree(tree.id, tree.name, tree.dataset_signature, fit(tree.root, list(train)))


# --- validation -----------------------------------------------------------------

def validate_tree(tree: DecisionTree, schema: DatasetSchema,
                  resolver: TreeResolver = EMPTY_RESOLVER) -> list:
    """Accumulate rule/feature/kind errors, TreeRef signature mismatches
    (transitively) and reference cycles. Empty list means valid."""
    errors: list = []

    def need_numeric(name: str, path: str):
        f = schema.feature(name)
        if f is None:
            errors.append(UnknownFeature(f"feature {name!r} not in dataset", location=path))
        elif f.kind is not Kind.NUMERIC:
            errors.append(KindMismatch(f"feature {name!r} must be numeric", location=path))

    def check_rule(rule: SplitRule, path: str):
        if isinstance(rule, FeatureRule):
            f = schema.feature(rule.feature)
            if f is None:
                errors.append(UnknownFeature(f"feature {rule.feature!r} not in dataset",
                                             location=path))
                return
            if rule.threshold is not None and f.kind is not Kind.NUMERIC:
                errors.append(KindMismatch(f"threshold rule on categorical {rule.feature!r}",
                                           location=path))
            if rule.left_categories is not None:
                if f.kind is not Kind.CATEGORICAL:
                    errors.append(KindMismatch(f"category rule on numeric {rule.feature!r}",
                                               location=path))
                else:
                    cats = set(f.categories)
                    unknown = rule.left_categories - cats
                    if unknown:
                        errors.append(KindMismatch(
                            f"categories {sorted(unknown)} not in feature {rule.feature!r}",
                            location=path))
                    elif rule.left_categories >= cats:
                        errors.append(KindMismatch(
                            f"left_categories must be a proper subset for {rule.feature!r}",
                            location=path))
        elif isinstance(rule, CustomFeatureRule):
            for name, _ in rule.weights:
                need_numeric(name, path)
        elif isinstance(rule, ModelRule):
            for name in dict.fromkeys(rule.feature_subset + rule.model.required_features):
                need_numeric(name, path)
        elif isinstance(rule, VisualRule):
            need_numeric(rule.feature_x, path)
            need_numeric(rule.feature_y, path)
        elif isinstance(rule, TreeRefRule):
            check_ref(rule.tree_id, path, [tree.id])

    def check_ref(tree_id: str, path: str, stack: list[str]):
        if tree_id in stack:
            chain = " -> ".join(stack + [tree_id])
            errors.append(CyclicReference(f"tree reference cycle: {chain}", location=path))
            return
        try:
            ref = resolver.resolve_tree(tree_id)
        except UnresolvableTreeRef as exc:
            errors.append(UnresolvableTreeRef(exc.message, location=path))
            return
        if ref.dataset_signature != schema.signature:
            errors.append(SignatureMismatch(
                f"tree {tree_id!r} was built against a different dataset signature",
                location=path))
        for _, rule in _iter_rules(ref.root, path):
            if isinstance(rule, TreeRefRule):
                check_ref(rule.tree_id, path, stack + [tree_id])

    for path, rule in _iter_rules(tree.root, "$.root"):
        check_rule(rule, path)
    return errors


def _iter_rules(node: Node, path: str):
    if isinstance(node, Leaf):
        return
    yield path + ".rule", node.rule
    yield from _iter_rules(node.left, path + ".left")
    yield from _iter_rules(node.right, path + ".right")


# --- TreeRef inlining --------------------------------------------------------------

# Routes every sample Left and requires no features, so its right child is
# unreachable; used to hang count-padding leaves that steer missing-value
# descent without being reachable themselves.
_ALWAYS_LEFT = CustomFeatureRule({}, offset=0.0, threshold=1.0)


def _pad(child: Node, extra: int) -> Node:
    return Split(_ALWAYS_LEFT, child, Leaf(Label.NEGATIVE, train_total=extra, train_positive=0))


def _directed_split(rule: SplitRule, left: Node, right: Node, want_left: bool) -> Split:
    """Split whose missing-input descent goes the requested way.

    Prediction descends toward the larger subtree total (tie Left); when the
    natural totals disagree with the requested direction, the must-win side
    is padded with an unreachable branch.
    """
    tl, tr = subtree_total(left), subtree_total(right)
    if want_left and tl < tr:
        left = _pad(left, tr - tl)
    elif not want_left and tr <= tl:
        right = _pad(right, tl - tr + 1)
    return Split(rule, left, right)


def inline_tree_refs(tree: DecisionTree, resolver: TreeResolver = EMPTY_RESOLVER) -> DecisionTree:
    """Expand every TreeRef into plain structure with identical predictions.

    Each referenced tree's positive leaves are grafted with the outer node's
    left subtree and its negative leaves with the right subtree; every split's
    missing-value descent direction is then restored, so (label, score) agree
    with the original for every possible sample, missing values included.
    """
    cache: dict[str, Node] = {}
    in_progress: set[str] = set()

    def inlined_root(tree_id: str) -> Node:
        if tree_id in cache:
            return cache[tree_id]
        if tree_id in in_progress:
            raise CyclicReference(f"tree reference cycle through {tree_id!r}")
        in_progress.add(tree_id)
        root = process(resolver.resolve_tree(tree_id).root)
        in_progress.discard(tree_id)
        cache[tree_id] = root
        return root

    def graft(bnode: Node, onto_left: Node, onto_right: Node) -> Node:
        if isinstance(bnode, Leaf):
            return onto_left if bnode.label is Label.POSITIVE else onto_right
        el = graft(bnode.left, onto_left, onto_right)
        er = graft(bnode.right, onto_left, onto_right)
        want_left = subtree_total(bnode.left) >= subtree_total(bnode.right)
        return _directed_split(bnode.rule, el, er, want_left)

    def process(node: Node) -> Node:
        if isinstance(node, Leaf):
            return node
        if isinstance(node.rule, TreeRefRule):
            body = inlined_root(node.rule.tree_id)
            return graft(body, process(node.left), process(node.right))
        left = process(node.left)
        right = process(node.right)
        if left is node.left and right is node.right:
            return node
        want_left = subtree_total(node.left) >= subtree_total(node.right)
        return _directed_split(node.rule, left, right, want_left)

    new_root = process(tree.root)
    if new_root is tree.root:
        return tree
    return DecisionTree(tree.id, tree.name, tree.dataset_signature, new_root)


def has_tree_refs(node: Node) -> bool:
    return any(isinstance(rule, TreeRefRule) for _, rule in _iter_rules(node, "$"))


# --- JSON ------------------------------------------------------------------------

def rule_to_json(rule: SplitRule) -> dict:
    if isinstance(rule, FeatureRule):
        if rule.threshold is not None:
            return {"kind": "feature", "feature": rule.feature, "threshold": rule.threshold}
        return {"kind": "feature", "feature": rule.feature,
                "left_categories": sorted(rule.left_categories)}
    if isinstance(rule, CustomFeatureRule):
        return {"kind": "custom", "weights": dict(rule.weights),
                "offset": rule.offset, "threshold": rule.threshold}
    if isinstance(rule, ModelRule):
        return {"kind": "model", "model": model_to_json(rule.model),
                "feature_subset": list(rule.feature_subset)}
    if isinstance(rule, TreeRefRule):
        return {"kind": "treeref", "tree_id": rule.tree_id}
    if isinstance(rule, VisualRule):
        return {"kind": "visual", "feature_x": rule.feature_x, "feature_y": rule.feature_y,
                "polygons": [[[x, y] for x, y in poly] for poly in rule.polygons]}
    raise TypeError(f"unknown rule type {type(rule).__name__}")


def node_to_json(node: Node) -> dict:
    if isinstance(node, Leaf):
        return {"leaf": {"label": node.label.value, "total": node.train_total,
                         "positive": node.train_positive}}
    return {"split": {"rule": rule_to_json(node.rule),
                      "left": node_to_json(node.left),
                      "right": node_to_json(node.right)}}


def tree_to_doc(tree: DecisionTree) -> dict:
    return {"id": tree.id, "name": tree.name,
            "dataset_signature": tree.dataset_signature, "root": node_to_json(tree.root)}


def tree_to_json(tree: DecisionTree) -> str:
    return canonical_dumps(tree_to_doc(tree))


def _expect_keys(doc, keys: set, path: str):
    if not isinstance(doc, dict):
        raise SchemaViolation(f"expected an object at {path}", location=path)
    extra = set(doc) - keys
    if extra:
        raise SchemaViolation(f"unknown fields {sorted(extra)}", location=path)
    missing = keys - set(doc)
    if missing:
        raise SchemaViolation(f"missing fields {sorted(missing)}", location=path)


def _num(v, path: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise SchemaViolation("expected a finite number", location=path)
    return float(v)


def _count(v, path: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise SchemaViolation("expected a non-negative integer", location=path)
    return v


def _str(v, path: str) -> str:
    if not isinstance(v, str):
        raise SchemaViolation("expected a string", location=path)
    return v


def rule_from_json(doc, path: str) -> SplitRule:
    if not isinstance(doc, dict) or "kind" not in doc:
        raise SchemaViolation("rule needs a 'kind'", location=path + ".kind")
    kind = doc["kind"]
    if kind == "feature":
        if "threshold" in doc:
            _expect_keys(doc, {"kind", "feature", "threshold"}, path)
            return FeatureRule(_str(doc["feature"], path + ".feature"),
                               threshold=_num(doc["threshold"], path + ".threshold"))
        _expect_keys(doc, {"kind", "feature", "left_categories"}, path)
        cats = doc["left_categories"]
        if not isinstance(cats, list) or not cats or not all(isinstance(c, str) for c in cats):
            raise SchemaViolation("left_categories must be a non-empty list of strings",
                                  location=path + ".left_categories")
        return FeatureRule(_str(doc["feature"], path + ".feature"),
                           left_categories=frozenset(cats))
    if kind == "custom":
        _expect_keys(doc, {"kind", "weights", "offset", "threshold"}, path)
        if not isinstance(doc["weights"], dict):
            raise SchemaViolation("weights must be an object", location=path + ".weights")
        weights = {f: _num(w, f"{path}.weights.{f}") for f, w in doc["weights"].items()}
        return CustomFeatureRule(weights, _num(doc["offset"], path + ".offset"),
                                 _num(doc["threshold"], path + ".threshold"))
    if kind == "model":
        _expect_keys(doc, {"kind", "model", "feature_subset"}, path)
        subset = doc["feature_subset"]
        if not isinstance(subset, list) or not subset or not all(isinstance(f, str) for f in subset):
            raise SchemaViolation("feature_subset must be a non-empty list of names",
                                  location=path + ".feature_subset")
        return ModelRule(model_from_json(doc["model"], path + ".model"), tuple(subset))
    if kind == "treeref":
        _expect_keys(doc, {"kind", "tree_id"}, path)
        tid = _str(doc["tree_id"], path + ".tree_id")
        if not tid:
            raise SchemaViolation("tree_id must be non-empty", location=path + ".tree_id")
        return TreeRefRule(tid)
    if kind == "visual":
        _expect_keys(doc, {"kind", "feature_x", "feature_y", "polygons"}, path)
        polys = doc["polygons"]
        if not isinstance(polys, list) or not polys:
            raise SchemaViolation("polygons must be a non-empty list", location=path + ".polygons")
        parsed = []
        for i, poly in enumerate(polys):
            ppath = f"{path}.polygons[{i}]"
            if not isinstance(poly, list) or len(poly) < 3:
                raise SchemaViolation("a polygon needs >= 3 vertices", location=ppath)
            verts = []
            for j, pt in enumerate(poly):
                if not isinstance(pt, list) or len(pt) != 2:
                    raise SchemaViolation("a vertex is [x, y]", location=f"{ppath}[{j}]")
                verts.append((_num(pt[0], f"{ppath}[{j}][0]"), _num(pt[1], f"{ppath}[{j}][1]")))
            parsed.append(tuple(verts))
        return VisualRule(_str(doc["feature_x"], path + ".feature_x"),
                          _str(doc["feature_y"], path + ".feature_y"), tuple(parsed))
    raise SchemaViolation(f"unknown rule kind {kind!r}", location=path + ".kind")


def node_from_json(doc, path: str) -> Node:
    if not isinstance(doc, dict) or len(doc) != 1 or next(iter(doc)) not in ("leaf", "split"):
        raise SchemaViolation("a node is {'leaf': ...} or {'split': ...}", location=path)
    if "leaf" in doc:
        body = doc["leaf"]
        _expect_keys(body, {"label", "total", "positive"}, path)
        label = body["label"]
        if label not in ("positive", "negative"):
            raise SchemaViolation("label must be 'positive' or 'negative'",
                                  location=path + ".label")
        total = _count(body["total"], path + ".total")
        positive = _count(body["positive"], path + ".positive")
        if positive > total:
            raise SchemaViolation("positive exceeds total", location=path + ".positive")
        return Leaf(Label(label), train_total=total, train_positive=positive)
    body = doc["split"]
    _expect_keys(body, {"rule", "left", "right"}, path)
    return Split(rule_from_json(body["rule"], path + ".rule"),
                 node_from_json(body["left"], path + ".left"),
                 node_from_json(body["right"], path + ".right"))


def tree_from_doc(doc) -> DecisionTree:
    _expect_keys(doc, {"id", "name", "dataset_signature", "root"}, "$")
    return DecisionTree(
        id=_str(doc["id"], "$.id"),
        name=_str(doc["name"], "$.name"),
        dataset_signature=_str(doc["dataset_signature"], "$.dataset_signature"),
        root=node_from_json(doc["root"], "$.root"),
    )


def tree_from_json(text: str) -> DecisionTree:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"not valid JSON: {exc}", location="$") from exc
    return tree_from_doc(doc)
