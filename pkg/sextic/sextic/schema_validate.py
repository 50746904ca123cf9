"""Validation of classification reports against shared/report.schema.json."""
import json
from functools import lru_cache
from pathlib import Path

from jsonschema import Draft202012Validator

from .errors import InternalInconsistency

REPORT_SCHEMA_PATH = Path(__file__).resolve().parents[2] / "shared" / "report.schema.json"


@lru_cache(maxsize=1)
def report_validator() -> Draft202012Validator:
    with REPORT_SCHEMA_PATH.open("r", encoding="utf-8") as f:
        schema = json.load(f)
    Draft202012Validator.check_schema(schema)
    return Draft202012Validator(schema)


def _location(path) -> str:
    return "/".join(str(p) for p in path) or "<root>"


def validate_report(payload: dict) -> tuple[bool, str | None]:
    """(ok, message); the message names the JSON path of the first violation."""
    errors = sorted(report_validator().iter_errors(payload), key=lambda e: list(map(str, e.absolute_path)))
    if not errors:
        return True, None
    first = errors[0]
    more = f" (+{len(errors) - 1} more)" if len(errors) > 1 else ""
    return False, f"{_location(first.absolute_path)}: {first.message}{more}"


def require_valid_report(payload: dict) -> dict:
    ok, message = validate_report(payload)
    if not ok:
        raise InternalInconsistency(f"report does not match the schema: {message}")
    return payload
