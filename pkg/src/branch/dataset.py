"""Tabular datasets: CSV ingestion with column typing, stratified splits, search.

A dataset is a single immutable table. Every row carries the values for the
feature columns plus one binary class label. Columns are typed all-or-nothing:
a column is numeric only if every non-missing cell parses as a finite number,
otherwise it is categorical. The missing-value tokens are the empty cell and
the literal ``NA`` (case-sensitive).
"""

from __future__ import annotations

import csv
import enum
import hashlib
import io
import json
import math
from dataclasses import dataclass, field, replace

from .errors import (
    BadClassColumn,
    BadFraction,
    EmptyDataset,
    MalformedCsv,
    SchemaViolation,
    TooFewSamples,
)
from .rng import SplitMix64

MISSING_TOKENS = ("", "NA")


class _MissingType:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "MISSING"


MISSING = _MissingType()


class Label(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"


class Kind(enum.Enum):
    NUMERIC = "numeric"
    CATEGORICAL = "categorical"


@dataclass(frozen=True)
class FeatureDescriptor:
    name: str
    kind: Kind
    categories: tuple[str, ...]  # empty for numeric, first-appearance order
    index: int

    def __post_init__(self):
        if not self.name:
            raise ValueError("feature name must be non-empty")
        if self.kind is Kind.NUMERIC and self.categories:
            raise ValueError(f"numeric feature {self.name!r} cannot carry categories")
        if self.kind is Kind.CATEGORICAL and not self.categories:
            raise ValueError(f"categorical feature {self.name!r} needs >=1 category")


@dataclass(frozen=True)
class ClassLabeling:
    positive_name: str
    negative_name: str

    def __post_init__(self):
        if self.positive_name == self.negative_name:
            raise ValueError("class names must be distinct")
        if not self.positive_name or not self.negative_name:
            raise ValueError("class names must be non-empty")

    def name_of(self, label: Label) -> str:
        return self.positive_name if label is Label.POSITIVE else self.negative_name


@dataclass(frozen=True)
class Sample:
    values: tuple
    label: Label


@dataclass(frozen=True)
class DatasetSchema:
    """The part of a dataset a tree validates against.

    ``signature`` hashes (feature names, kinds, class names) and is invariant
    under feature reordering by name; categories and rows do not contribute.
    """

    features: tuple[FeatureDescriptor, ...]
    labeling: ClassLabeling
    signature: str = field(init=False)

    def __post_init__(self):
        doc = {
            "classes": [self.labeling.positive_name, self.labeling.negative_name],
            "features": sorted([f.name, f.kind.value] for f in self.features),
        }
        digest = hashlib.sha256(
            json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")
        ).hexdigest()
        object.__setattr__(self, "signature", digest)

    def feature(self, name: str) -> FeatureDescriptor | None:
        for f in self.features:
            if f.name == name:
                return f
        return None


@dataclass(frozen=True)
class Dataset:
    id: str
    name: str
    features: tuple[FeatureDescriptor, ...]
    samples: tuple[Sample, ...]
    labeling: ClassLabeling
    schema: DatasetSchema = field(init=False)

    def __post_init__(self):
        if not self.features:
            raise EmptyDataset("dataset has no feature columns")
        if not self.samples:
            raise EmptyDataset("dataset has no samples")
        names = [f.name for f in self.features]
        if len(set(names)) != len(names):
            raise ValueError("feature names must be unique")
        for f, expected in zip(self.features, range(len(self.features))):
            if f.index != expected:
                raise ValueError(f"feature {f.name!r} has index {f.index}, expected {expected}")
        for row, s in enumerate(self.samples):
            if len(s.values) != len(self.features):
                raise ValueError(f"sample {row} has {len(s.values)} values, expected {len(self.features)}")
            for f in self.features:
                v = s.values[f.index]
                if v is MISSING:
                    continue
                if f.kind is Kind.CATEGORICAL and v not in f.categories:
                    raise ValueError(f"sample {row}: {v!r} not a category of {f.name!r}")
        object.__setattr__(self, "schema", DatasetSchema(self.features, self.labeling))

    @property
    def signature(self) -> str:
        return self.schema.signature

    def class_counts(self) -> tuple[int, int]:
        pos = sum(1 for s in self.samples if s.label is Label.POSITIVE)
        return pos, len(self.samples) - pos

    def value(self, sample: Sample, feature_name: str):
        f = self.schema.feature(feature_name)
        if f is None:
            raise KeyError(feature_name)
        return sample.values[f.index]


@dataclass(frozen=True)
class DataPartition:
    train_indices: tuple[int, ...]
    test_indices: tuple[int, ...]
    seed: int
    fraction: float
    warnings: tuple[str, ...] = ()


def _parse_number(cell: str) -> float | None:
    try:
        v = float(cell)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def dataset_id_for(text: str) -> str:
    return "d" + hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]


def parse_csv(text: str, class_column: str, positive_name: str, *, name: str = "",
              dataset_id: str | None = None) -> Dataset:
    """Parse a UTF-8, comma-separated, quote-aware table into a Dataset.

    The first row is the header. Cells equal to one of MISSING_TOKENS are
    missing; missing cells are forbidden in the class column, which must hold
    exactly two distinct values, one of them ``positive_name``.
    """
    if not text.strip():
        raise EmptyDataset("empty CSV input")
    rows = [r for r in csv.reader(io.StringIO(text)) if r]
    header, data = rows[0], rows[1:]
    if len(set(header)) != len(header):
        raise MalformedCsv("duplicate column names in header")
    for i, r in enumerate(data):
        if len(r) != len(header):
            raise MalformedCsv(f"row {i + 2} has {len(r)} cells, header has {len(header)}")
    if class_column not in header:
        raise BadClassColumn(f"class column {class_column!r} not in header")
    if not data:
        raise EmptyDataset("no data rows")

    class_idx = header.index(class_column)
    class_values = []
    for i, r in enumerate(data):
        cell = r[class_idx]
        if cell in MISSING_TOKENS:
            raise BadClassColumn(f"missing class value in row {i + 2}")
        class_values.append(cell)
    distinct = sorted(set(class_values))
    if len(distinct) != 2:
        raise BadClassColumn(f"class column has {len(distinct)} distinct values, need exactly 2")
    if positive_name not in distinct:
        raise BadClassColumn(f"positive class {positive_name!r} not present in class column")
    negative_name = distinct[0] if distinct[1] == positive_name else distinct[1]
    labeling = ClassLabeling(positive_name, negative_name)

    feature_cols = [(pos, h) for pos, h in enumerate(header) if pos != class_idx]
    if not feature_cols:
        raise EmptyDataset("no feature columns besides the class column")

    features = []
    columns = []
    for out_idx, (col, colname) in enumerate(feature_cols):
        cells = [r[col] for r in data]
        numeric = all(cell in MISSING_TOKENS or _parse_number(cell) is not None for cell in cells)
        if numeric:
            values = [MISSING if c in MISSING_TOKENS else _parse_number(c) for c in cells]
            features.append(FeatureDescriptor(colname, Kind.NUMERIC, (), out_idx))
        else:
            # reached only when some non-missing cell failed to parse, so the
            # category list is never empty
            categories = []
            values = []
            for c in cells:
                if c in MISSING_TOKENS:
                    values.append(MISSING)
                    continue
                if c not in categories:
                    categories.append(c)
                values.append(c)
            features.append(FeatureDescriptor(colname, Kind.CATEGORICAL, tuple(categories), out_idx))
        columns.append(values)

    samples = tuple(
        Sample(
            values=tuple(columns[j][i] for j in range(len(features))),
            label=Label.POSITIVE if class_values[i] == positive_name else Label.NEGATIVE,
        )
        for i in range(len(data))
    )
    return Dataset(
        id=dataset_id if dataset_id is not None else dataset_id_for(text),
        name=name or class_column,
        features=tuple(features),
        samples=samples,
        labeling=labeling,
    )


def _half_up(x: float) -> int:
    return math.floor(x + 0.5)


def percentage_split(d: Dataset, fraction: float, seed: int) -> DataPartition:
    """Stratified train/test partition, deterministic in (dataset, fraction, seed).

    Per class the train count is round(fraction * n) with half-up rounding,
    clamped to [1, n-1] for classes of >=2 samples. A single-sample class goes
    wholly to train and is reported in the partition warnings. Membership
    comes from a Fisher-Yates shuffle under splitmix64 (see branch.rng); the
    positive class is drawn first.
    """
    if not isinstance(fraction, (int, float)) or math.isnan(fraction) or not 0 < fraction < 1:
        raise BadFraction(f"fraction must be in (0,1), got {fraction!r}")
    rng = SplitMix64(seed)
    train: list[int] = []
    test: list[int] = []
    warnings: list[str] = []
    for label in (Label.POSITIVE, Label.NEGATIVE):
        idxs = [i for i, s in enumerate(d.samples) if s.label is label]
        cname = d.labeling.name_of(label)
        if not idxs:
            raise TooFewSamples(f"class {cname!r} has no samples")
        if len(idxs) == 1:
            train.extend(idxs)
            warnings.append(f"class {cname!r} has a single sample; routed to train")
            continue
        rng.shuffle(idxs)
        k = min(max(_half_up(fraction * len(idxs)), 1), len(idxs) - 1)
        train.extend(idxs[:k])
        test.extend(idxs[k:])
    return DataPartition(
        train_indices=tuple(sorted(train)),
        test_indices=tuple(sorted(test)),
        seed=seed,
        fraction=fraction,
        warnings=tuple(warnings),
    )


def subset(d: Dataset, indices) -> tuple[Sample, ...]:
    return tuple(d.samples[i] for i in indices)


def search_features(d: Dataset, query: str) -> list[FeatureDescriptor]:
    """Case-insensitive substring search, ordered by (match position, name)."""
    q = query.lower()
    hits = []
    for f in d.features:
        pos = f.name.lower().find(q)
        if pos >= 0:
            hits.append((pos, f.name, f))
    return [f for _, _, f in sorted(hits, key=lambda t: (t[0], t[1]))]


# --- JSON mirror and CSV round-trip ---------------------------------------

def dataset_to_json(d: Dataset) -> dict:
    """Canonical mirror: rows carry feature values in column order, class name last."""
    return {
        "id": d.id,
        "name": d.name,
        "features": [
            {"name": f.name, "kind": f.kind.value, "categories": list(f.categories)}
            for f in d.features
        ],
        "class": {"positive": d.labeling.positive_name, "negative": d.labeling.negative_name},
        "rows": [
            [None if v is MISSING else v for v in s.values] + [d.labeling.name_of(s.label)]
            for s in d.samples
        ],
    }


def dataset_from_json(doc: dict) -> Dataset:
    try:
        features = tuple(
            FeatureDescriptor(
                f["name"],
                Kind(f["kind"]),
                tuple(f["categories"]),
                i,
            )
            for i, f in enumerate(doc["features"])
        )
        labeling = ClassLabeling(doc["class"]["positive"], doc["class"]["negative"])
        samples = []
        for row in doc["rows"]:
            *values, cname = row
            if cname == labeling.positive_name:
                label = Label.POSITIVE
            elif cname == labeling.negative_name:
                label = Label.NEGATIVE
            else:
                raise SchemaViolation(f"unknown class name {cname!r}", location="$.rows")
            samples.append(Sample(tuple(MISSING if v is None else v for v in values), label))
        return Dataset(doc["id"], doc["name"], features, tuple(samples), labeling)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaViolation(f"malformed dataset document: {exc}") from exc


def _csv_cell(v) -> str:
    if v is MISSING:
        return ""
    if isinstance(v, float):
        return repr(int(v)) if v.is_integer() else repr(v)
    return str(v)


def dataset_to_csv(d: Dataset, class_column: str = "class") -> str:
    """Inverse of parse_csv up to numeric formatting; class column written last."""
    if any(f.name == class_column for f in d.features):
        class_column = class_column + "_label"
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow([f.name for f in d.features] + [class_column])
    for s in d.samples:
        w.writerow([_csv_cell(v) for v in s.values] + [d.labeling.name_of(s.label)])
    return out.getvalue()


def with_id(d: Dataset, new_id: str) -> Dataset:
    return replace(d, id=new_id)
