"""Synthetic walkthrough fixture: a small biomedical-flavored dataset plus
the majority-vote starter tree (7 of 10 samples positive, so training-set
evaluation of the bare leaf reads accuracy 0.7, AUC 0.5)."""

from __future__ import annotations

from .dataset import Dataset, Label, parse_csv
from .tree import DecisionTree, Leaf, fit_leaf_stats

DEMO_CSV = """\
gene_a,gene_b,grade,outcome
8.1,2.4,high,recurrence
7.6,1.9,high,recurrence
9.2,3.1,low,recurrence
6.8,2.2,high,recurrence
7.9,NA,low,recurrence
8.8,2.9,high,recurrence
7.2,2.6,low,recurrence
2.1,2.8,low,good
3.4,1.7,low,good
1.8,2.0,high,good
"""


def demo_dataset() -> Dataset:
    return parse_csv(DEMO_CSV, class_column="outcome", positive_name="recurrence",
                     name="demo", dataset_id="demo")


def demo_tree(d: Dataset) -> DecisionTree:
    bare = DecisionTree(
        id="demo-tree",
        name="majority leaf",
        dataset_signature=d.signature,
        root=Leaf(Label.POSITIVE),
    )
    return fit_leaf_stats(bare, list(d.samples), d.schema)
