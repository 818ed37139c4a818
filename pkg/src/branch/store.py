"""Persistent library of datasets, trees, and custom feature definitions.

Layout on disk:

    <root>/datasets/<id>.json   canonical dataset mirror
    <root>/trees/<id>.json      canonical tree document
    <root>/index.json           metadata: ownership, visibility, timestamps,
                                companion links, custom feature definitions

All documents are canonical JSON (sorted keys, LF); writes go through a
temp-file-and-rename so readers never see torn records. One process-wide
lock serializes mutations; records themselves are immutable values, so
concurrent readers always observe a consistent snapshot.

Ownership is a bearer token, stored only as sha256(salt + token). Private
records are visible to their owner alone; resolution of tree references
during evaluation deliberately ignores visibility so that stored trees stay
evaluable.
"""

from __future__ import annotations

import hashlib
import json
import os
import secrets
import threading
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path

from .canonical import canonical_dumps
from .dataset import Dataset, dataset_from_json, dataset_to_json, parse_csv, with_id
from .errors import (
    AuthRequired,
    InUse,
    NotFound,
    NotOwner,
    SchemaViolation,
    SignatureMismatch,
    UnresolvableTreeRef,
    ValidationFailed,
)
from .tree import (
    CustomFeatureDef,
    DecisionTree,
    TreeRefRule,
    _iter_rules,
    tree_from_doc,
    tree_to_doc,
    validate_tree,
)

PUBLIC = "public"
PRIVATE = "private"
MIN_TOKEN_LEN = 16


@dataclass(frozen=True)
class TreeRecord:
    tree: DecisionTree
    owner_token_hash: str
    visibility: str
    created_at: str
    updated_at: str


@dataclass(frozen=True)
class DatasetRecord:
    dataset: Dataset
    description: str
    companion_test_dataset_id: str | None
    created_at: str


@dataclass(frozen=True)
class CustomFeatureRecord:
    id: str
    defn: CustomFeatureDef
    owner_token_hash: str
    visibility: str
    created_at: str


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


class LibraryStore:
    """Directory-backed store; doubles as the evaluator's Library."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._trees_dir = self.root / "trees"
        self._datasets_dir = self.root / "datasets"
        self._index_path = self.root / "index.json"
        self._lock = threading.RLock()
        self._trees: dict[str, TreeRecord] = {}
        self._datasets: dict[str, DatasetRecord] = {}
        self._custom: dict[str, CustomFeatureRecord] = {}
        self._last_stamp = ""
        self._trees_dir.mkdir(parents=True, exist_ok=True)
        self._datasets_dir.mkdir(parents=True, exist_ok=True)
        if self._index_path.exists():
            self._load()
        else:
            self._salt = secrets.token_hex(16)
            self._flush_index()

    # --- loading / persistence ---------------------------------------

    def _load(self) -> None:
        index = json.loads(self._index_path.read_text(encoding="utf-8"))
        self._salt = index["salt"]
        for did, meta in index["datasets"].items():
            doc = json.loads((self._datasets_dir / f"{did}.json").read_text(encoding="utf-8"))
            self._datasets[did] = DatasetRecord(
                dataset=dataset_from_json(doc),
                description=meta["description"],
                companion_test_dataset_id=meta["companion_test_dataset_id"],
                created_at=meta["created_at"],
            )
        for tid, meta in index["trees"].items():
            doc = json.loads((self._trees_dir / f"{tid}.json").read_text(encoding="utf-8"))
            self._trees[tid] = TreeRecord(
                tree=tree_from_doc(doc),
                owner_token_hash=meta["owner"],
                visibility=meta["visibility"],
                created_at=meta["created_at"],
                updated_at=meta["updated_at"],
            )
        for cid, meta in index.get("custom_features", {}).items():
            self._custom[cid] = CustomFeatureRecord(
                id=cid,
                defn=CustomFeatureDef(meta["name"], dict(meta["weights"]), meta["offset"]),
                owner_token_hash=meta["owner"],
                visibility=meta["visibility"],
                created_at=meta["created_at"],
            )
        stamps = [r.updated_at for r in self._trees.values()]
        stamps += [r.created_at for r in self._datasets.values()]
        stamps += [r.created_at for r in self._custom.values()]
        self._last_stamp = max(stamps, default="")

    def _flush_index(self) -> None:
        index = {
            "salt": self._salt,
            "datasets": {
                did: {
                    "name": rec.dataset.name,
                    "signature": rec.dataset.signature,
                    "description": rec.description,
                    "companion_test_dataset_id": rec.companion_test_dataset_id,
                    "created_at": rec.created_at,
                }
                for did, rec in self._datasets.items()
            },
            "trees": {
                tid: {
                    "name": rec.tree.name,
                    "signature": rec.tree.dataset_signature,
                    "owner": rec.owner_token_hash,
                    "visibility": rec.visibility,
                    "created_at": rec.created_at,
                    "updated_at": rec.updated_at,
                }
                for tid, rec in self._trees.items()
            },
            "custom_features": {
                cid: {
                    "name": rec.defn.name,
                    "weights": dict(rec.defn.weights),
                    "offset": rec.defn.offset,
                    "owner": rec.owner_token_hash,
                    "visibility": rec.visibility,
                    "created_at": rec.created_at,
                }
                for cid, rec in self._custom.items()
            },
        }
        _atomic_write(self._index_path, canonical_dumps(index))

    def _now(self) -> str:
        stamp = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")
        if self._last_stamp and stamp <= self._last_stamp:
            # timestamps must stay strictly monotone even for back-to-back writes
            prev = datetime.strptime(self._last_stamp, "%Y-%m-%dT%H:%M:%S.%fZ")
            stamp = (prev + timedelta(microseconds=1)).strftime("%Y-%m-%dT%H:%M:%S.%fZ")
        self._last_stamp = stamp
        return stamp

    # --- tokens -------------------------------------------------------

    def token_hash(self, token: str | None) -> str | None:
        if token is None:
            return None
        return hashlib.sha256((self._salt + token).encode("utf-8")).hexdigest()

    def require_token(self, token: str | None) -> str:
        if token is None:
            raise AuthRequired("a bearer token is required for writes")
        if len(token.encode("utf-8")) < MIN_TOKEN_LEN:
            raise AuthRequired(f"bearer tokens must be at least {MIN_TOKEN_LEN} bytes")
        return self.token_hash(token)

    # --- datasets -------------------------------------------------------

    def import_dataset(self, csv_text: str, class_column: str, positive_name: str, *,
                       name: str = "", description: str = "",
                       companion_csv: str | None = None) -> DatasetRecord:
        d = parse_csv(csv_text, class_column, positive_name, name=name)
        with self._lock:
            d = with_id(d, "d" + secrets.token_hex(6))
            companion_id = None
            companion_rec = None
            if companion_csv is not None:
                test_d = parse_csv(companion_csv, class_column, positive_name,
                                   name=(name + " (test)") if name else "test")
                if test_d.signature != d.signature:
                    raise SignatureMismatch("companion test set signature differs")
                test_d = with_id(test_d, "d" + secrets.token_hex(6))
                companion_id = test_d.id
                companion_rec = DatasetRecord(test_d, description="", created_at=self._now(),
                                              companion_test_dataset_id=None)
            rec = DatasetRecord(d, description=description, created_at=self._now(),
                                companion_test_dataset_id=companion_id)
            if companion_rec is not None:
                self._datasets[companion_id] = companion_rec
                _atomic_write(self._datasets_dir / f"{companion_id}.json",
                              canonical_dumps(dataset_to_json(companion_rec.dataset)))
            self._datasets[d.id] = rec
            _atomic_write(self._datasets_dir / f"{d.id}.json",
                          canonical_dumps(dataset_to_json(d)))
            self._flush_index()
            return rec

    def list_datasets(self) -> list[DatasetRecord]:
        return sorted(self._datasets.values(), key=lambda r: (r.created_at, r.dataset.id))

    def get_dataset(self, dataset_id: str) -> DatasetRecord:
        rec = self._datasets.get(dataset_id)
        if rec is None:
            raise NotFound(f"no dataset with id {dataset_id!r}")
        return rec

    def resolve_dataset(self, dataset_id: str) -> Dataset:
        return self.get_dataset(dataset_id).dataset

    def datasets_with_signature(self, signature: str) -> list[DatasetRecord]:
        return [r for r in self.list_datasets() if r.dataset.signature == signature]

    # --- trees ----------------------------------------------------------

    def resolve_tree(self, tree_id: str) -> DecisionTree:
        rec = self._trees.get(tree_id)
        if rec is None:
            raise UnresolvableTreeRef(f"no tree with id {tree_id!r}")
        return rec.tree

    def _schema_for_signature(self, signature: str):
        matches = self.datasets_with_signature(signature)
        if not matches:
            return None
        return matches[-1].dataset.schema  # newest import wins on category drift

    def save_tree(self, tree: DecisionTree, token: str | None, visibility: str) -> TreeRecord:
        owner = self.require_token(token)
        if visibility not in (PUBLIC, PRIVATE):
            raise SchemaViolation(f"visibility must be public or private, got {visibility!r}")
        with self._lock:
            existing = self._trees.get(tree.id) if tree.id else None
            if existing is not None and existing.owner_token_hash != owner:
                raise NotOwner("only the owner may update a stored tree")
            if existing is None:
                tree = DecisionTree("t" + secrets.token_hex(6), tree.name,
                                    tree.dataset_signature, tree.root)

            schema = self._schema_for_signature(tree.dataset_signature)
            if schema is None:
                raise ValidationFailed([SignatureMismatch(
                    "no stored dataset matches the tree's dataset signature")])
            issues = validate_tree(tree, schema, self)
            if issues:
                raise ValidationFailed(issues)
            for _, rule in _iter_rules(tree.root, "$"):
                if isinstance(rule, TreeRefRule):
                    ref = self._trees[rule.tree_id]
                    if ref.visibility == PRIVATE and ref.owner_token_hash != owner:
                        raise ValidationFailed([UnresolvableTreeRef(
                            f"no tree with id {rule.tree_id!r}")])

            now = self._now()
            rec = TreeRecord(
                tree=tree,
                owner_token_hash=owner,
                visibility=visibility,
                created_at=existing.created_at if existing else now,
                updated_at=now,
            )
            self._trees[tree.id] = rec
            _atomic_write(self._trees_dir / f"{tree.id}.json",
                          canonical_dumps(tree_to_doc(tree)))
            self._flush_index()
            return rec

    def get_tree(self, tree_id: str, token: str | None = None) -> TreeRecord:
        rec = self._trees.get(tree_id)
        if rec is None or (rec.visibility == PRIVATE
                           and rec.owner_token_hash != self.token_hash(token)):
            raise NotFound(f"no tree with id {tree_id!r}")
        return rec

    def list_trees(self, token: str | None = None,
                   dataset_signature: str | None = None) -> list[TreeRecord]:
        caller = self.token_hash(token)
        records = [
            rec for rec in self._trees.values()
            if rec.visibility == PUBLIC or rec.owner_token_hash == caller
        ]
        if dataset_signature is not None:
            records = [r for r in records if r.tree.dataset_signature == dataset_signature]
        return sorted(records, key=lambda r: (r.updated_at, r.tree.id), reverse=True)

    def delete_tree(self, tree_id: str, token: str | None) -> None:
        owner = self.require_token(token)
        with self._lock:
            rec = self._trees.get(tree_id)
            if rec is None:
                raise NotFound(f"no tree with id {tree_id!r}")
            if rec.owner_token_hash != owner:
                raise NotOwner("only the owner may delete a stored tree")
            for other_id, other in self._trees.items():
                if other_id == tree_id:
                    continue
                for _, rule in _iter_rules(other.tree.root, "$"):
                    if isinstance(rule, TreeRefRule) and rule.tree_id == tree_id:
                        raise InUse(f"tree {tree_id!r} is referenced by {other_id!r}")
            del self._trees[tree_id]
            (self._trees_dir / f"{tree_id}.json").unlink(missing_ok=True)
            self._flush_index()

    # --- custom features ---------------------------------------------------

    def save_custom_feature(self, defn: CustomFeatureDef, token: str | None,
                            visibility: str = PUBLIC) -> CustomFeatureRecord:
        owner = self.require_token(token)
        with self._lock:
            rec = CustomFeatureRecord(
                id="cf" + secrets.token_hex(6),
                defn=defn,
                owner_token_hash=owner,
                visibility=visibility,
                created_at=self._now(),
            )
            self._custom[rec.id] = rec
            self._flush_index()
            return rec

    def list_custom_features(self, token: str | None = None) -> list[CustomFeatureRecord]:
        caller = self.token_hash(token)
        return sorted(
            (rec for rec in self._custom.values()
             if rec.visibility == PUBLIC or rec.owner_token_hash == caller),
            key=lambda r: (r.created_at, r.id),
        )
