"""JSON schema for problem documents and a validator that reports error locations."""

from __future__ import annotations

import jsonschema
from jsonschema.exceptions import best_match

from .errors import SchemaError

RATIONAL = {
    "oneOf": [
        {"type": "integer"},
        {"type": "string", "pattern": r"^\s*-?\d+\s*(/\s*[1-9]\d*\s*)?$"},
    ]
}

_LINE = {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1, "uniqueItems": True}
_LINES = {"type": "array", "items": _LINE, "minItems": 1}
_MODE = {"enum": ["cubical", "affine"]}
_DISTINCT = {"enum": ["all", "line", "none"]}
_SYMMETRY = {"enum": ["none", "cubical", "affine"]}

PROBLEM_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "insideout problem document",
    "type": "object",
    "properties": {
        "builtin": {
            "type": "object",
            "properties": {
                "family": {"enum": ["magic", "semimagic", "pandiagonal", "magilatin_square", "magilatin_rectangle"]},
                "params": {"type": "array", "items": {"type": "integer", "minimum": 1}, "minItems": 1, "maxItems": 2},
                "mode": _MODE,
                "distinctness": _DISTINCT,
                "symmetry": _SYMMETRY,
            },
            "required": ["family", "params"],
            "additionalProperties": False,
        },
        "explicit": {
            "type": "object",
            "properties": {
                "name": {"type": "string"},
                "d": {"type": "integer", "minimum": 1},
                "mode": _MODE,
                "distinctness": _DISTINCT,
                "symmetry": _SYMMETRY,
                "lines": _LINES,
                "classes": {"type": "array", "items": _LINES, "minItems": 1},
                "forms": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "object",
                        "properties": {
                            "coeffs": {"type": "array", "items": RATIONAL, "minItems": 1},
                            "target": RATIONAL,
                            "class": {"type": "integer", "minimum": 1},
                        },
                        "required": ["coeffs"],
                        "additionalProperties": False,
                    },
                },
            },
            "required": ["d"],
            "oneOf": [
                {"required": ["lines"]},
                {"required": ["classes"]},
                {"required": ["forms"]},
            ],
            "additionalProperties": False,
        },
        "budgets": {
            "type": "object",
            "properties": {
                "max_points": {"type": "integer", "minimum": 1},
                "max_orientations": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "range": {
            "type": "object",
            "properties": {
                "t_min": {"type": "integer", "minimum": 0},
                "t_max": {"type": "integer", "minimum": 0},
            },
            "additionalProperties": False,
        },
    },
    "oneOf": [{"required": ["builtin"]}, {"required": ["explicit"]}],
    "additionalProperties": False,
}

_VALIDATOR = jsonschema.Draft202012Validator(PROBLEM_SCHEMA)


def location(path) -> str:
    """Render a jsonschema path as ``a.b[0].c``."""
    out = ""
    for part in path:
        if isinstance(part, int):
            out += f"[{part}]"
        else:
            out += ("." if out else "") + str(part)
    return out or "<root>"


def validate(doc) -> None:
    """Raise SchemaError carrying the location of the most relevant violation."""
    best = best_match(_VALIDATOR.iter_errors(doc))
    if best is None:
        return
    raise SchemaError(best.message, location(best.absolute_path))
