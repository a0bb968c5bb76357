"""Scenario and report record formats, with their published JSON schemas."""

import dataclasses
import json
import re
from typing import Any

from mskit.exceptions import ValidationError
from mskit.records import SCHEMA_VERSION, TASKS, VERDICTS

_MATRIX_SCHEMA: dict[str, Any] = {
    "oneOf": [
        {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
        {
            "type": "object",
            "required": ["re"],
            "properties": {
                "re": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
                "im": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
            },
        },
    ]
}

_INNER_SCHEMA: dict[str, Any] = {
    "type": "object",
    "required": ["type"],
    "properties": {
        "type": {"enum": ["monomial", "bp", "crofoot", "random_bp"]},
        "n": {"type": "integer", "minimum": 1},
        "d": {"type": "integer", "minimum": 1},
        "degree": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer"},
        "factors": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["w", "P"],
                "properties": {"w": {"type": "array", "items": {"type": "number"}}, "P": _MATRIX_SCHEMA},
            },
        },
        "base": {"$ref": "#/definitions/inner"},
        "W": _MATRIX_SCHEMA,
    },
}

SCENARIO_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "mskit scenario",
    "type": "object",
    "required": ["d", "theta1", "theta2", "tasks"],
    "definitions": {"inner": _INNER_SCHEMA, "matrix": _MATRIX_SCHEMA},
    "properties": {
        "name": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0},
        "M": {"type": "integer", "description": "grid size, a power of two in [4, 65536]"},
        "d": {"type": "integer", "minimum": 1},
        "theta1": {"$ref": "#/definitions/inner"},
        "theta2": {"$ref": "#/definitions/inner"},
        "symbol": {
            "oneOf": [
                {
                    "type": "object",
                    "required": ["coeffs"],
                    "properties": {"coeffs": {"type": "array", "items": {"type": "array", "minItems": 2, "maxItems": 2}}},
                },
                {
                    "type": "object",
                    "required": ["random"],
                    "properties": {
                        "random": {
                            "type": "object",
                            "properties": {"degree": {"type": "integer", "minimum": 0}, "scale": {"type": "number"}},
                        }
                    },
                },
            ]
        },
        "tasks": {"type": "array", "items": {"enum": list(TASKS)}, "minItems": 1},
        "tolerances": {"type": "object", "additionalProperties": {"type": "number"}},
        "crofoot": {
            "type": "object",
            "properties": {"W1": {"$ref": "#/definitions/matrix"}, "W2": {"$ref": "#/definitions/matrix"}},
        },
    },
    "additionalProperties": False,
}

REPORT_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "mskit report record",
    "type": "object",
    "required": ["task", "scenario", "instance", "metrics", "verdict", "runtime_ms", "schema_version", "findings"],
    "properties": {
        "task": {"enum": list(TASKS)},
        "scenario": {"type": "string"},
        "instance": {
            "type": "object",
            "required": ["seed", "digest"],
            "properties": {"seed": {"type": "integer"}, "digest": {"type": "string"}},
        },
        "metrics": {"type": "object", "additionalProperties": {"type": ["number", "null"]}},
        "verdict": {"enum": list(VERDICTS)},
        "runtime_ms": {"type": "number", "minimum": 0},
        "schema_version": {"const": SCHEMA_VERSION},
        "error": {"type": "string"},
        "findings": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["check", "instance_seed", "lhs", "rhs", "tolerance", "verdict"],
                "properties": {
                    "check": {"type": "string"},
                    "instance_seed": {"type": "integer"},
                    "lhs": {"type": ["number", "null"]},
                    "rhs": {"type": ["number", "null"]},
                    "tolerance": {"type": "number"},
                    "verdict": {"enum": list(VERDICTS)},
                },
            },
        },
    },
}

_SCENARIO_KEYS = set(SCENARIO_SCHEMA["properties"])


@dataclasses.dataclass(frozen=True)
class Scenario:
    name: str
    seed: int | None
    grid: int | None
    d: int
    theta1: dict[str, Any]
    theta2: dict[str, Any]
    symbol: dict[str, Any]
    tasks: tuple[str, ...]
    tolerances: dict[str, float]
    crofoot: dict[str, Any] | None
    raw: dict[str, Any]


def _locate(text: str | None, key: str) -> tuple[int | None, int | None]:
    """Line and column of the first occurrence of a member name in the source text."""
    if not text:
        return None, None
    match = re.search(rf'"{re.escape(key)}"\s*:', text)
    if match is None:
        return None, None
    line = text.count("\n", 0, match.start()) + 1
    column = match.start() - (text.rfind("\n", 0, match.start()) + 1) + 1
    return line, column


def _fail(message: str, text: str | None, key: str) -> ValidationError:
    line, column = _locate(text, key)
    where = f" (line {line}, column {column})" if line is not None else ""
    return ValidationError(f"{message}{where}", line=line, column=column)


def parse_json(text: str, source: str = "<scenario>") -> Any:
    """Decode JSON, turning syntax errors into ValidationError with a position."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(
            f"{source}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}", line=e.lineno, column=e.colno
        ) from e


def _require_int(payload: dict[str, Any], key: str, text: str | None, minimum: int | None = None) -> int:
    value = payload[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise _fail(f"'{key}' must be an integer", text, key)
    if minimum is not None and value < minimum:
        raise _fail(f"'{key}' must be at least {minimum}", text, key)
    return value


def _check_inner(spec: Any, key: str, text: str | None) -> dict[str, Any]:
    if not isinstance(spec, dict) or "type" not in spec:
        raise _fail(f"'{key}' must be an inner function object with a 'type'", text, key)
    kind = spec["type"]
    required = {"monomial": ("n", "d"), "bp": ("d", "factors"), "random_bp": ("d", "degree", "seed"), "crofoot": ("base", "W")}
    if kind not in required:
        raise _fail(f"'{key}' has unknown type '{kind}'", text, key)
    missing = [member for member in required[kind] if member not in spec]
    if missing:
        raise _fail(f"'{key}' of type '{kind}' is missing {missing}", text, key)
    if kind == "crofoot":
        _check_inner(spec["base"], "base", text)
    return spec


def _check_symbol(spec: Any, text: str | None) -> dict[str, Any]:
    if not isinstance(spec, dict) or not ({"coeffs", "random"} & set(spec)):
        raise _fail("'symbol' must be {\"coeffs\": [...]} or {\"random\": {...}}", text, "symbol")
    if "coeffs" in spec:
        entries = spec["coeffs"]
        if not isinstance(entries, list) or not all(isinstance(e, list) and len(e) == 2 for e in entries):
            raise _fail("'symbol.coeffs' must be a list of [k, matrix] pairs", text, "coeffs")
    else:
        random = spec["random"]
        if not isinstance(random, dict):
            raise _fail("'symbol.random' must be an object", text, "random")
        degree = random.get("degree", 2)
        if isinstance(degree, bool) or not isinstance(degree, int) or degree < 0:
            raise _fail("'symbol.random.degree' must be a nonnegative integer", text, "degree")
    return spec


def validate_scenario(
    payload: Any, text: str | None = None, name: str = "scenario"
) -> Scenario:
    """Check a decoded scenario against the schema and return it as a Scenario."""
    if not isinstance(payload, dict):
        raise ValidationError("Scenario must be a JSON object", line=1, column=1)
    unknown = sorted(set(payload) - _SCENARIO_KEYS)
    if unknown:
        raise _fail(f"Unknown scenario members {unknown}", text, unknown[0])
    for key in ("d", "theta1", "theta2", "tasks"):
        if key not in payload:
            raise ValidationError(f"Scenario is missing required member '{key}'", line=1, column=1)
    d = _require_int(payload, "d", text, minimum=1)
    seed = _require_int(payload, "seed", text, minimum=0) if "seed" in payload else None
    grid = _require_int(payload, "M", text, minimum=4) if "M" in payload else None
    tasks = payload["tasks"]
    if not isinstance(tasks, list) or not tasks or not all(isinstance(t, str) for t in tasks):
        raise _fail("'tasks' must be a nonempty list of task names", text, "tasks")
    bad = [t for t in tasks if t not in TASKS]
    if bad:
        raise _fail(f"Unknown tasks {bad}; choose from {list(TASKS)}", text, "tasks")
    tolerances = payload.get("tolerances", {})
    if not isinstance(tolerances, dict) or not all(
        isinstance(v, int | float) and not isinstance(v, bool) for v in tolerances.values()
    ):
        raise _fail("'tolerances' must map names to numbers", text, "tolerances")
    crofoot = payload.get("crofoot")
    if crofoot is not None and (not isinstance(crofoot, dict) or set(crofoot) - {"W1", "W2"}):
        raise _fail("'crofoot' may only contain 'W1' and 'W2'", text, "crofoot")
    return Scenario(
        name=str(payload.get("name", name)),
        seed=seed,
        grid=grid,
        d=d,
        theta1=_check_inner(payload["theta1"], "theta1", text),
        theta2=_check_inner(payload["theta2"], "theta2", text),
        symbol=_check_symbol(payload.get("symbol", {"random": {"degree": 2, "scale": 1.0}}), text),
        tasks=tuple(tasks),
        tolerances={key: float(value) for key, value in tolerances.items()},
        crofoot=crofoot,
        raw=payload,
    )


def validate_report_record(record: dict[str, Any]) -> None:
    """Check a serialized report line against REPORT_SCHEMA's required structure."""
    missing = [key for key in REPORT_SCHEMA["required"] if key not in record]
    if missing:
        raise ValidationError(f"Report record is missing {missing}")
    if record["task"] not in TASKS or record["verdict"] not in VERDICTS:
        raise ValidationError(f"Report record has bad task or verdict: {record['task']!r}, {record['verdict']!r}")
    if record["schema_version"] != SCHEMA_VERSION:
        raise ValidationError(f"Unsupported schema version {record['schema_version']}")
    if not {"seed", "digest"} <= set(record["instance"]):
        raise ValidationError("Report instance needs 'seed' and 'digest'")
    for finding in record["findings"]:
        if set(REPORT_SCHEMA["properties"]["findings"]["items"]["required"]) - set(finding):
            raise ValidationError(f"Finding record is incomplete: {finding}")
