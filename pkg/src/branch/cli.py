"""Headless driver: import datasets, evaluate tree files, train model nodes,
serve the HTTP API, and generate the demo fixture.

Exit codes: 0 success, 2 usage errors (including a malformed --mode spec),
1 data or validation errors. ``evaluate`` prints exactly the bytes the
evaluate endpoint would return, so reports can be diffed across the two.
"""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click

from .canonical import canonical_dumps
from .dataset import Dataset, parse_csv
from .demo import demo_dataset, demo_tree
from .errors import BranchError, NotFound, UnresolvableTreeRef
from .evaluation import (
    EvaluationReport,
    EvalMode,
    PercentageSplit,
    TestSet,
    TrainingSet,
    evaluate_detailed,
    mode_to_json,
    report_to_doc,
)
from .learners import LearnerSpec, model_to_json, train_logreg, train_stump
from .service import ServiceConfig, serve
from .store import LibraryStore
from .tree import tree_from_json, tree_to_json

MODE_GRAMMAR = "train | test:<dataset-id-or-path> | split:<fraction>:<seed>"


def parse_mode_spec(spec: str) -> EvalMode:
    if spec == "train":
        return TrainingSet()
    if spec.startswith("test:") and len(spec) > len("test:"):
        return TestSet(spec[len("test:"):])
    if spec.startswith("split:"):
        parts = spec.split(":")
        if len(parts) != 3:
            raise click.UsageError(f"bad --mode {spec!r}; grammar: {MODE_GRAMMAR}")
        try:
            fraction = float(parts[1])
            seed = int(parts[2])
        except ValueError:
            raise click.UsageError(f"bad --mode {spec!r}; grammar: {MODE_GRAMMAR}") from None
        if not 0 < fraction < 1:
            raise click.UsageError(f"BadFraction: split fraction must be in (0,1), got {parts[1]}")
        return PercentageSplit(fraction, seed)
    raise click.UsageError(f"bad --mode {spec!r}; grammar: {MODE_GRAMMAR}")


class _CliLibrary:
    """Resolver over an optional on-disk store plus ad-hoc CSV test sets."""

    def __init__(self, store: LibraryStore | None = None):
        self.store = store
        self.extra: dict[str, Dataset] = {}

    def add_dataset(self, d: Dataset) -> None:
        self.extra[d.id] = d

    def resolve_tree(self, tree_id: str):
        if self.store is not None:
            return self.store.resolve_tree(tree_id)
        raise UnresolvableTreeRef(f"no tree with id {tree_id!r} (no --store configured)")

    def resolve_dataset(self, dataset_id: str) -> Dataset:
        if dataset_id in self.extra:
            return self.extra[dataset_id]
        if self.store is not None:
            return self.store.resolve_dataset(dataset_id)
        raise NotFound(f"no dataset with id {dataset_id!r} (no --store configured)")


def _fail(exc: BranchError):
    click.echo(f"{exc.code}: {exc.message}", err=True)
    sys.exit(1)


def render_table(report: EvaluationReport, d: Dataset) -> str:
    c = report.confusion
    pos, neg = d.labeling.positive_name, d.labeling.negative_name
    mode = mode_to_json(report.mode)
    kind, body = next(iter(mode.items()))
    lines = [
        "mode\t" + kind + ("" if not body else "\t" + "\t".join(f"{k}={v}" for k, v in sorted(body.items()))),
        f"accuracy\t{report.accuracy:.3f}",
        f"auc\t{report.auc:.3f}",
        "",
        "confusion\tpred " + pos + "\tpred " + neg,
        f"true {pos}\t{c.tp}\t{c.fn}",
        f"true {neg}\t{c.fp}\t{c.tn}",
        "",
        "leaf\tcount\tfraction\taccuracy\tlabel",
    ]
    for ls in report.leaf_stats:
        acc = f"{ls.leaf_accuracy:.3f}" if ls.leaf_accuracy is not None else "-"
        lines.append(f"{ls.path or '(root)'}\t{ls.eval_count}\t{ls.eval_fraction:.3f}"
                     f"\t{acc}\t{d.labeling.name_of(ls.label)}")
    for w in report.warnings:
        lines.append(f"warning\t{w}")
    return "\n".join(lines) + "\n"


def _emit_report(report, scores, truths, d: Dataset, fmt: str, figures_dir: str | None):
    if figures_dir:
        from .figures import save_report_figures

        save_report_figures(report, scores, truths, d.labeling, figures_dir)
    if fmt == "json":
        sys.stdout.write(canonical_dumps(report_to_doc(report)))
    else:
        sys.stdout.write(render_table(report, d))


@click.group()
def main():
    """Compose, evaluate, and share decision trees over tabular datasets."""


@main.command("import")
@click.option("--store", "store_path", envvar="BRANCH_STORE", required=True,
              type=click.Path(file_okay=False))
@click.option("--csv", "csv_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--class", "class_column", required=True)
@click.option("--positive", "positive_name", required=True)
@click.option("--name", default="")
@click.option("--description", default="")
@click.option("--test-csv", "test_csv_path", type=click.Path(exists=True, dir_okay=False))
def import_cmd(store_path, csv_path, class_column, positive_name, name, description,
               test_csv_path):
    """Import a CSV (optionally with a companion test CSV) into the library."""
    try:
        store = LibraryStore(store_path)
        companion = Path(test_csv_path).read_text(encoding="utf-8-sig") if test_csv_path else None
        rec = store.import_dataset(
            Path(csv_path).read_text(encoding="utf-8-sig"),
            class_column, positive_name,
            name=name or Path(csv_path).stem, description=description,
            companion_csv=companion,
        )
        doc = {
            "id": rec.dataset.id,
            "name": rec.dataset.name,
            "signature": rec.dataset.signature,
            "companion_test_dataset_id": rec.companion_test_dataset_id,
        }
        sys.stdout.write(canonical_dumps(doc))
    except BranchError as exc:
        _fail(exc)


@main.command()
@click.option("--dataset", "dataset_csv", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--class", "class_column", required=True)
@click.option("--positive", "positive_name", required=True)
@click.option("--tree", "tree_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", "mode_spec", required=True, help=f"one of: {MODE_GRAMMAR}")
@click.option("--format", "fmt", type=click.Choice(["json", "table"]), default="json")
@click.option("--figures", "figures_dir", type=click.Path(file_okay=False),
              help="also render roc.png and confusion.png into this directory")
@click.option("--store", "store_path", envvar="BRANCH_STORE", type=click.Path(file_okay=False))
def evaluate(dataset_csv, class_column, positive_name, tree_path, mode_spec, fmt,
             figures_dir, store_path):
    """Evaluate a tree JSON file against a CSV dataset."""
    mode = parse_mode_spec(mode_spec)
    try:
        d = parse_csv(Path(dataset_csv).read_text(encoding="utf-8-sig"),
                      class_column, positive_name, name=Path(dataset_csv).stem)
        tree = tree_from_json(Path(tree_path).read_text(encoding="utf-8"))
        lib = _CliLibrary(LibraryStore(store_path) if store_path else None)
        if isinstance(mode, TestSet) and os.path.exists(mode.test_dataset_id):
            test_d = parse_csv(Path(mode.test_dataset_id).read_text(encoding="utf-8-sig"),
                               class_column, positive_name, name="test")
            lib.add_dataset(test_d)
            mode = TestSet(test_d.id)
        report, scores, truths = evaluate_detailed(tree, d, mode, lib)
        _emit_report(report, scores, truths, d, fmt, figures_dir)
    except BranchError as exc:
        _fail(exc)


@main.command("train-model")
@click.option("--dataset", "dataset_csv", required=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--class", "class_column", required=True)
@click.option("--positive", "positive_name", required=True)
@click.option("--kind", type=click.Choice(["stump", "logreg"]), required=True)
@click.option("--features", required=True, help="comma-separated numeric feature names")
@click.option("--learning-rate", type=float, default=0.1, show_default=True)
@click.option("--epochs", type=int, default=200, show_default=True)
@click.option("--l2", type=float, default=0.0, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def train_model(dataset_csv, class_column, positive_name, kind, features,
                learning_rate, epochs, l2, seed):
    """Train a stump or logistic-regression model for use in a model node."""
    subset = tuple(f.strip() for f in features.split(",") if f.strip())
    if not subset:
        raise click.UsageError("--features needs at least one name")
    try:
        d = parse_csv(Path(dataset_csv).read_text(encoding="utf-8-sig"),
                      class_column, positive_name)
        if kind == "stump":
            model = train_stump(d.samples, subset, d.schema)
            warnings: tuple = ()
        else:
            spec = LearnerSpec(kind="logreg", feature_subset=subset,
                               learning_rate=learning_rate, epochs=epochs, l2=l2, seed=seed)
            model = train_logreg(d.samples, spec, d.schema)
            warnings = model.warnings
        sys.stdout.write(canonical_dumps({"model": model_to_json(model),
                                          "warnings": list(warnings)}))
    except BranchError as exc:
        _fail(exc)


@main.command("serve")
@click.option("--port", envvar="BRANCH_PORT", type=int, default=8000, show_default=True)
@click.option("--store", "store_path", envvar="BRANCH_STORE", required=True,
              type=click.Path(file_okay=False))
@click.option("--assets", "assets_path", envvar="BRANCH_ASSETS",
              type=click.Path(exists=True, file_okay=False))
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--demo", "seed_demo", is_flag=True,
              help="seed an empty store with the demo dataset")
def serve_cmd(port, store_path, assets_path, host, seed_demo):
    """Run the HTTP service (API plus the web UI bundle, when configured)."""
    try:
        serve(ServiceConfig(store_path=store_path, port=port, host=host,
                            assets_path=assets_path, seed_demo=seed_demo))
    except BranchError as exc:
        _fail(exc)
    except OSError as exc:
        click.echo(f"startup failed: {exc}", err=True)
        sys.exit(1)


@main.command()
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default="demo",
              show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "table"]), default="json")
@click.option("--figures", "figures_dir", type=click.Path(file_okay=False))
def demo(out_dir, fmt, figures_dir):
    """Write the synthetic walkthrough dataset and example tree, then evaluate."""
    from .demo import DEMO_CSV

    try:
        d = demo_dataset()
        t = demo_tree(d)
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "demo.csv").write_text(DEMO_CSV, encoding="utf-8")
        (out / "demo_tree.json").write_text(tree_to_json(t), encoding="utf-8")
        report, scores, truths = evaluate_detailed(t, d, TrainingSet())
        _emit_report(report, scores, truths, d, fmt, figures_dir)
    except BranchError as exc:
        _fail(exc)


if __name__ == "__main__":
    main()
