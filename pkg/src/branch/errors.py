"""Error hierarchy shared by the engine, the store, the HTTP layer and the CLI.

Every error carries a stable machine ``code`` (its class name) and the HTTP
status the service layer maps it to. 4xx codes mark caller faults.
"""

from __future__ import annotations


class BranchError(Exception):
    """Base class for all domain errors."""

    http_status = 500

    def __init__(self, message: str, *, location: str | None = None):
        super().__init__(message)
        self.message = message
        self.location = location  # JSON path for document errors, else None

    @property
    def code(self) -> str:
        return type(self).__name__

    def to_json(self) -> dict:
        body = {"code": self.code, "message": self.message}
        if self.location is not None:
            body["location"] = self.location
        return body


# dataset ingestion

class MalformedCsv(BranchError):
    http_status = 422


class BadClassColumn(BranchError):
    http_status = 422


class EmptyDataset(BranchError):
    http_status = 422


# partitioning

class BadFraction(BranchError):
    http_status = 422


class TooFewSamples(BranchError):
    http_status = 422


# tree validation / routing

class UnknownFeature(BranchError):
    http_status = 422


class KindMismatch(BranchError):
    http_status = 422


class SignatureMismatch(BranchError):
    http_status = 409


class CyclicReference(BranchError):
    http_status = 422


class UnresolvableTreeRef(BranchError):
    http_status = 422


class SchemaViolation(BranchError):
    http_status = 422


class ValidationFailed(BranchError):
    """Aggregate of validate_tree issues, raised by store/service on save."""

    http_status = 422

    def __init__(self, issues):
        self.issues = list(issues)
        detail = "; ".join(f"{e.code}: {e.message}" for e in self.issues)
        super().__init__(f"tree failed validation: {detail}")

    def to_json(self) -> dict:
        body = super().to_json()
        body["issues"] = [e.to_json() for e in self.issues]
        return body


# learners

class DegenerateData(BranchError):
    http_status = 422


class NonFiniteLoss(BranchError):
    http_status = 422


# evaluation

class OneClassOnly(BranchError):
    http_status = 422


# library store

class NotOwner(BranchError):
    http_status = 403


class NotFound(BranchError):
    http_status = 404


class InUse(BranchError):
    http_status = 409


class AuthRequired(BranchError):
    http_status = 401


class AmbiguousDataset(BranchError):
    http_status = 409


# HTTP layer only: the configurable evaluation deadline expired

class EvaluationTimeout(BranchError):
    http_status = 504
