"""HTTP surface for datasets, trees, training, evaluation, and the library.

Every response body is the canonical JSON of the corresponding core result,
so transport adds nothing: scripted clients, the CLI, and the web UI all see
identical bytes. Errors map to ``{"error": {code, message, location?}}`` with
the stable machine code of the underlying core error.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass, replace

import anyio
from fastapi import FastAPI, File, Form, Request, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.responses import HTMLResponse, Response
from fastapi.staticfiles import StaticFiles

from .canonical import canonical_dumps
from .dataset import Dataset, Kind, dataset_to_json, search_features
from .errors import (
    AmbiguousDataset,
    BranchError,
    EvaluationTimeout,
    NotFound,
    SchemaViolation,
    ValidationFailed,
)
from .evaluation import ensemble_evaluate, evaluate, mode_from_json, report_to_doc
from .learners import LearnerSpec, model_to_json, train_logreg, train_stump
from .store import LibraryStore, TreeRecord
from .tree import (
    DecisionTree,
    Label,
    Leaf,
    Routed,
    Split,
    route,
    rule_from_json,
    tree_from_doc,
    tree_to_doc,
    validate_tree,
)

_FALLBACK_PAGE = """<!doctype html>
<html><head><title>branch</title></head>
<body><h1>branch service</h1>
<p>No UI bundle configured (start with --assets). The JSON API lives under /api/.</p>
</body></html>
"""


def _json(obj, status: int = 200) -> Response:
    return Response(canonical_dumps(obj), status_code=status, media_type="application/json")


def _token(request: Request) -> str | None:
    auth = request.headers.get("authorization", "")
    if auth.lower().startswith("bearer "):
        return auth[7:].strip() or None
    return None


async def _body_json(request: Request):
    try:
        return await request.json()
    except Exception as exc:
        raise SchemaViolation(f"request body is not valid JSON: {exc}", location="$") from exc


def _dataset_descriptor(rec) -> dict:
    d = rec.dataset
    return {
        "id": d.id,
        "name": d.name,
        "signature": d.signature,
        "feature_count": len(d.features),
        "sample_count": len(d.samples),
        "class": {"positive": d.labeling.positive_name, "negative": d.labeling.negative_name},
        "description": rec.description,
        "companion_test_dataset_id": rec.companion_test_dataset_id,
        "created_at": rec.created_at,
    }


def _tree_record_doc(rec: TreeRecord, caller_hash: str | None) -> dict:
    return {
        "tree": tree_to_doc(rec.tree),
        "visibility": rec.visibility,
        "created_at": rec.created_at,
        "updated_at": rec.updated_at,
        "mine": rec.owner_token_hash == caller_hash,
    }


def create_app(store: LibraryStore, assets_dir: str | None = None,
               evaluate_timeout_s: float = 30.0) -> FastAPI:
    app = FastAPI(title="branch", docs_url=None, redoc_url=None)

    @app.exception_handler(BranchError)
    async def _branch_error(request: Request, exc: BranchError):
        return _json({"error": exc.to_json()}, exc.http_status)

    async def _bounded(fn, *args):
        # evaluation is synchronous; run it off the event loop under a deadline
        try:
            with anyio.fail_after(evaluate_timeout_s):
                return await anyio.to_thread.run_sync(fn, *args, abandon_on_cancel=True)
        except TimeoutError:
            raise EvaluationTimeout(
                f"evaluation exceeded the {evaluate_timeout_s:g}s request timeout") from None

    @app.exception_handler(RequestValidationError)
    async def _request_error(request: Request, exc: RequestValidationError):
        return _json({"error": {"code": "SchemaViolation", "message": str(exc.errors())}}, 422)

    def _dataset_for(tree: DecisionTree, dataset_id: str | None) -> Dataset:
        if dataset_id is not None:
            d = store.get_dataset(dataset_id).dataset
            return d
        matches = store.datasets_with_signature(tree.dataset_signature)
        if not matches:
            raise NotFound("no stored dataset matches the tree's dataset signature")
        if len(matches) > 1:
            ids = [m.dataset.id for m in matches]
            raise AmbiguousDataset(
                f"several datasets match the tree's signature {ids}; pass ?dataset_id=")
        return matches[0].dataset

    # --- datasets -----------------------------------------------------

    @app.get("/api/datasets")
    def list_datasets():
        return _json([_dataset_descriptor(rec) for rec in store.list_datasets()])

    @app.post("/api/datasets")
    async def import_dataset(
        request: Request,
        csv: UploadFile = File(...),
        class_column: str = Form(...),
        positive_name: str = Form(...),
        name: str = Form(""),
        description: str = Form(""),
        test_csv: UploadFile | None = File(None),
    ):
        store.require_token(_token(request))
        text = (await csv.read()).decode("utf-8-sig")
        companion = (await test_csv.read()).decode("utf-8-sig") if test_csv is not None else None
        rec = store.import_dataset(text, class_column, positive_name, name=name,
                                   description=description, companion_csv=companion)
        return _json(_dataset_descriptor(rec), 201)

    @app.get("/api/datasets/{dataset_id}")
    def get_dataset(dataset_id: str):
        return _json(dataset_to_json(store.get_dataset(dataset_id).dataset))

    @app.get("/api/datasets/{dataset_id}/features")
    def dataset_features(dataset_id: str, query: str = ""):
        d = store.get_dataset(dataset_id).dataset
        out = []
        for f in search_features(d, query):
            entry = {"name": f.name, "kind": f.kind.value, "categories": list(f.categories)}
            if f.kind is Kind.NUMERIC:
                values = [v for v in (s.values[f.index] for s in d.samples)
                          if isinstance(v, float)]
                entry["median"] = statistics.median(values) if values else None
            out.append(entry)
        return _json(out)

    @app.post("/api/datasets/{dataset_id}/preview")
    async def preview_rule(dataset_id: str, request: Request):
        d = store.get_dataset(dataset_id).dataset
        body = await _body_json(request)
        if not isinstance(body, dict) or "rule" not in body:
            raise SchemaViolation("body must be {'rule': ...}", location="$.rule")
        rule = rule_from_json(body["rule"], "$.rule")
        probe = DecisionTree("preview", "preview", d.signature,
                             Split(rule, Leaf(Label.POSITIVE), Leaf(Label.NEGATIVE)))
        issues = validate_tree(probe, d.schema, store)
        if issues:
            raise ValidationFailed(issues)
        code = {Routed.LEFT: "L", Routed.RIGHT: "R", Routed.MISSING: "M"}
        sides = [code[route(rule, s, d.schema, store)] for s in d.samples]
        return _json({
            "left": sides.count("L"),
            "right": sides.count("R"),
            "missing": sides.count("M"),
            "sides": sides,
            "labels": [d.labeling.name_of(s.label) for s in d.samples],
        })

    # --- trees --------------------------------------------------------

    @app.get("/api/trees")
    def list_trees(request: Request, signature: str | None = None):
        token = _token(request)
        records = store.list_trees(token, signature)
        caller = store.token_hash(token)
        return _json([_tree_record_doc(rec, caller) for rec in records])

    @app.post("/api/trees")
    async def save_tree(request: Request):
        token = _token(request)
        body = await _body_json(request)
        if not isinstance(body, dict) or "tree" not in body:
            raise SchemaViolation("body must be {'tree': ..., 'visibility'?: ...}",
                                  location="$.tree")
        tree = tree_from_doc(body["tree"])
        visibility = body.get("visibility", "private")
        rec = store.save_tree(tree, token, visibility)
        return _json(_tree_record_doc(rec, store.token_hash(token)), 201)

    @app.put("/api/trees/{tree_id}")
    async def update_tree(tree_id: str, request: Request):
        token = _token(request)
        body = await _body_json(request)
        if not isinstance(body, dict) or "tree" not in body:
            raise SchemaViolation("body must be {'tree': ..., 'visibility'?: ...}",
                                  location="$.tree")
        store.get_tree(tree_id, token)  # 404 before any owner check leaks info
        tree = replace(tree_from_doc(body["tree"]), id=tree_id)
        visibility = body.get("visibility", "private")
        rec = store.save_tree(tree, token, visibility)
        return _json(_tree_record_doc(rec, store.token_hash(token)))

    @app.get("/api/trees/{tree_id}")
    def get_tree(tree_id: str, request: Request):
        token = _token(request)
        rec = store.get_tree(tree_id, token)
        return _json(_tree_record_doc(rec, store.token_hash(token)))

    @app.post("/api/trees/{tree_id}/evaluate")
    async def evaluate_tree(tree_id: str, request: Request, dataset_id: str | None = None):
        token = _token(request)
        rec = store.get_tree(tree_id, token)
        mode = mode_from_json(await _body_json(request))
        d = _dataset_for(rec.tree, dataset_id)
        report = await _bounded(evaluate, rec.tree, d, mode, store)
        return _json(report_to_doc(report))

    # --- learners and ensembles ------------------------------------------

    @app.post("/api/models/train")
    async def train_model(request: Request):
        body = await _body_json(request)
        if not isinstance(body, dict):
            raise SchemaViolation("body must be an object", location="$")
        for key in ("dataset_id", "kind", "feature_subset"):
            if key not in body:
                raise SchemaViolation(f"missing field {key!r}", location=f"$.{key}")
        d = store.get_dataset(body["dataset_id"]).dataset
        subset = body["feature_subset"]
        if not isinstance(subset, list) or not subset:
            raise SchemaViolation("feature_subset must be a non-empty list",
                                  location="$.feature_subset")
        try:
            spec = LearnerSpec(
                kind=body["kind"],
                feature_subset=tuple(subset),
                learning_rate=body.get("learning_rate", 0.1),
                epochs=body.get("epochs", 200),
                l2=body.get("l2", 0.0),
                seed=body.get("seed", 0),
            )
        except ValueError as exc:
            raise SchemaViolation(str(exc), location="$") from exc
        if spec.kind == "stump":
            model = train_stump(d.samples, spec.feature_subset, d.schema)
            warnings: tuple = ()
        else:
            model = train_logreg(d.samples, spec, d.schema)
            warnings = model.warnings
        return _json({"model": model_to_json(model), "warnings": list(warnings)})

    @app.post("/api/ensemble/evaluate")
    async def evaluate_ensemble(request: Request):
        token = _token(request)
        body = await _body_json(request)
        if not isinstance(body, dict):
            raise SchemaViolation("body must be an object", location="$")
        for key in ("tree_ids", "dataset_id", "mode"):
            if key not in body:
                raise SchemaViolation(f"missing field {key!r}", location=f"$.{key}")
        ids = body["tree_ids"]
        if not isinstance(ids, list) or not ids or not all(isinstance(t, str) for t in ids):
            raise SchemaViolation("tree_ids must be a non-empty list of ids",
                                  location="$.tree_ids")
        trees = [store.get_tree(tid, token).tree for tid in ids]
        d = store.get_dataset(body["dataset_id"]).dataset
        mode = mode_from_json(body["mode"])
        report = await _bounded(ensemble_evaluate, trees, d, mode, store)
        return _json(report_to_doc(report))

    # --- UI bundle ------------------------------------------------------

    if assets_dir:
        app.mount("/", StaticFiles(directory=assets_dir, html=True), name="ui")
    else:
        @app.get("/")
        def index():
            return HTMLResponse(_FALLBACK_PAGE)

    return app


@dataclass
class ServiceConfig:
    store_path: str
    port: int = 8000
    host: str = "127.0.0.1"
    assets_path: str | None = None
    seed_demo: bool = False
    evaluate_timeout_s: float = 30.0


def serve(config: ServiceConfig) -> None:
    """Run the service until interrupted; raises on startup failure."""
    import uvicorn

    store = LibraryStore(config.store_path)
    if config.seed_demo and not store.list_datasets():
        from .demo import DEMO_CSV

        store.import_dataset(DEMO_CSV, "outcome", "recurrence", name="demo",
                             description="synthetic walkthrough dataset")
    app = create_app(store, config.assets_path, config.evaluate_timeout_s)
    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
