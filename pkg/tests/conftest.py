"""Shared fixtures: seeded random datasets and trees mixing all rule kinds."""

from __future__ import annotations

import random

import pytest

from branch.dataset import (
    MISSING,
    ClassLabeling,
    Dataset,
    FeatureDescriptor,
    Kind,
    Label,
    Sample,
)
from branch.errors import NotFound
from branch.learners import StumpModel
from branch.tree import (
    CustomFeatureRule,
    DecisionTree,
    FeatureRule,
    Leaf,
    ModelRule,
    Split,
    TreeRefRule,
    VisualRule,
)


class MemLibrary:
    """In-memory tree+dataset resolver for evaluator tests."""

    def __init__(self):
        self.trees = {}
        self.datasets = {}

    def add_tree(self, tree: DecisionTree):
        self.trees[tree.id] = tree
        return tree

    def add_dataset(self, d: Dataset):
        self.datasets[d.id] = d
        return d

    def resolve_tree(self, tree_id: str) -> DecisionTree:
        from branch.errors import UnresolvableTreeRef

        if tree_id not in self.trees:
            raise UnresolvableTreeRef(f"no tree with id {tree_id!r}")
        return self.trees[tree_id]

    def resolve_dataset(self, dataset_id: str) -> Dataset:
        if dataset_id not in self.datasets:
            raise NotFound(f"no dataset with id {dataset_id!r}")
        return self.datasets[dataset_id]


def make_dataset(rows, labels, *, kinds=None, name="fixture", dataset_id="fixture",
                 positive="pos", negative="neg", feature_names=None) -> Dataset:
    """Build a dataset from literal rows; None cells become missing."""
    width = len(rows[0])
    feature_names = feature_names or [f"f{i}" for i in range(width)]
    if kinds is None:
        kinds = []
        for col in range(width):
            vals = [r[col] for r in rows if r[col] is not None]
            kinds.append(Kind.CATEGORICAL if any(isinstance(v, str) for v in vals)
                         else Kind.NUMERIC)
    features = []
    for col, (fname, kind) in enumerate(zip(feature_names, kinds)):
        if kind is Kind.CATEGORICAL:
            cats = []
            for r in rows:
                v = r[col]
                if v is not None and v not in cats:
                    cats.append(v)
            features.append(FeatureDescriptor(fname, kind, tuple(cats), col))
        else:
            features.append(FeatureDescriptor(fname, kind, (), col))
    samples = tuple(
        Sample(
            tuple(MISSING if v is None else (float(v) if not isinstance(v, str) else v)
                  for v in row),
            Label.POSITIVE if lab else Label.NEGATIVE,
        )
        for row, lab in zip(rows, labels)
    )
    return Dataset(dataset_id, name, tuple(features), samples,
                   ClassLabeling(positive, negative))


def random_dataset(rng: random.Random, *, n=30, numeric=3, categorical=1,
                   missing_rate=0.1, dataset_id="rand", name="rand") -> Dataset:
    cats = ["a", "b", "c"]
    rows = []
    labels = []
    for i in range(n):
        row = []
        for _ in range(numeric):
            row.append(None if rng.random() < missing_rate
                       else round(rng.uniform(-10, 10), 3))
        for _ in range(categorical):
            row.append(None if rng.random() < missing_rate else rng.choice(cats))
        rows.append(row)
        labels.append(rng.random() < 0.5)
    labels[0], labels[1] = True, False  # both classes always present
    kinds = [Kind.NUMERIC] * numeric + [Kind.CATEGORICAL] * categorical
    # categorical features must list every category so random left-sets validate
    feature_names = [f"g{i}" for i in range(numeric)] + [f"c{i}" for i in range(categorical)]
    d = make_dataset(rows, labels, kinds=kinds, dataset_id=dataset_id, name=name,
                     feature_names=feature_names)
    features = list(d.features)
    for col in range(numeric, numeric + categorical):
        f = features[col]
        features[col] = FeatureDescriptor(f.name, f.kind, tuple(cats), f.index)
    return Dataset(d.id, d.name, tuple(features), d.samples, d.labeling)


def random_rule(rng: random.Random, d: Dataset, ref_ids=()):
    numeric = [f for f in d.features if f.kind is Kind.NUMERIC]
    categorical = [f for f in d.features if f.kind is Kind.CATEGORICAL]
    kinds = ["feature_num", "custom", "model", "visual"]
    if categorical:
        kinds.append("feature_cat")
    if ref_ids:
        kinds += ["treeref", "treeref"]
    kind = rng.choice(kinds)
    if kind == "feature_num":
        f = rng.choice(numeric)
        return FeatureRule(f.name, threshold=round(rng.uniform(-10, 10), 3))
    if kind == "feature_cat":
        f = rng.choice(categorical)
        k = rng.randrange(1, len(f.categories))
        return FeatureRule(f.name, left_categories=frozenset(rng.sample(f.categories, k)))
    if kind == "custom":
        chosen = rng.sample(numeric, rng.randrange(1, min(3, len(numeric)) + 1))
        return CustomFeatureRule(
            {f.name: round(rng.uniform(-2, 2), 3) for f in chosen},
            offset=round(rng.uniform(-1, 1), 3),
            threshold=round(rng.uniform(-5, 5), 3),
        )
    if kind == "model":
        f = rng.choice(numeric)
        p_left = rng.random()
        return ModelRule(
            StumpModel(f.name, round(rng.uniform(-10, 10), 3),
                       Label.POSITIVE if p_left >= 0.5 else Label.NEGATIVE,
                       p_left, rng.random()),
            feature_subset=(f.name,),
        )
    if kind == "treeref":
        return TreeRefRule(rng.choice(list(ref_ids)))
    fx, fy = rng.sample(numeric, 2) if len(numeric) >= 2 else (numeric[0], numeric[0])
    polys = []
    for _ in range(rng.randrange(1, 3)):
        cx, cy = rng.uniform(-8, 8), rng.uniform(-8, 8)
        pts = []
        for k in range(rng.randrange(3, 6)):
            pts.append((round(cx + rng.uniform(-4, 4), 3), round(cy + rng.uniform(-4, 4), 3)))
        polys.append(tuple(pts))
    return VisualRule(fx.name, fy.name, tuple(polys))


def random_node(rng: random.Random, d: Dataset, depth: int, ref_ids=()):
    if depth <= 0 or rng.random() < 0.3:
        total = rng.randrange(0, 20)
        pos = rng.randrange(0, total + 1) if total else 0
        label = Label.POSITIVE if rng.random() < 0.5 else Label.NEGATIVE
        return Leaf(label, train_total=total, train_positive=pos)
    return Split(
        random_rule(rng, d, ref_ids),
        random_node(rng, d, depth - 1, ref_ids),
        random_node(rng, d, depth - 1, ref_ids),
    )


def random_tree(rng: random.Random, d: Dataset, *, depth=3, ref_ids=(),
                tree_id=None, name="random") -> DecisionTree:
    root = random_node(rng, d, depth, ref_ids)
    if isinstance(root, Leaf):
        root = Split(random_rule(rng, d, ref_ids), root,
                     random_node(rng, d, max(depth - 1, 0), ref_ids))
    return DecisionTree(tree_id or f"t{rng.randrange(10**9)}", name, d.signature, root)


@pytest.fixture
def rng():
    return random.Random(20260808)
