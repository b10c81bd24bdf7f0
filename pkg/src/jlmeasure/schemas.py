"""JSON schemas for CLI inputs.

Copies live in ``docs/schemas``; regenerate them with
``python3 -m jlmeasure.schemas docs/schemas``.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import jsonschema

from .errors import InputError

_label = {"type": ["integer", "string"]}
_pos = {"type": "integer", "minimum": 1}

LOCAL_SPEC = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "LocalAlgebraSpec",
    "type": "object",
    "required": ["n", "d", "n_v", "d_v"],
    "properties": {
        "n": _pos, "d": _pos, "n_v": _pos, "d_v": _pos,
        "q": {"oneOf": [{"type": "integer", "minimum": 2}, {"const": "symbolic"}]},
        "local_disc_norm": _pos,
    },
    "additionalProperties": False,
}

GLOBAL_SETUP = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "GlobalSetup",
    "type": "object",
    "required": ["abs_discriminant", "signature", "torsion_order", "places", "S"],
    "properties": {
        "abs_discriminant": _pos,
        "signature": {
            "type": "object",
            "required": ["r1", "r2"],
            "properties": {"r1": {"type": "integer", "minimum": 0}, "r2": {"type": "integer", "minimum": 0}},
            "additionalProperties": False,
        },
        "torsion_order": _pos,
        "places": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label", "q"],
                "properties": {"label": _label, "q": {"type": "integer", "minimum": 2},
                               "local_disc_norm": _pos},
                "additionalProperties": False,
            },
        },
        "ram_set": {"type": "array", "items": _label},
        "S": {"type": "array", "items": _label},
    },
    "additionalProperties": False,
}

TAIL_RULE = {
    "type": "object",
    "required": ["rule"],
    "properties": {
        "rule": {"enum": ["one", "one_minus_q_pow", "euler_product"]},
        "exponent": {"type": "integer"},
        "exponents": {"type": "array", "items": {"type": "integer"}},
        "invert": {"type": "boolean"},
    },
    "additionalProperties": False,
}

INDEX_DATA = {
    "type": "object",
    "required": ["local_indices", "global_index", "mu_n_FS", "mu_n_OS"],
    "properties": {
        "local_indices": {"type": "array", "items": _pos},
        "global_index": _pos, "mu_n_FS": _pos, "mu_n_OS": _pos,
    },
    "additionalProperties": False,
}

COVOLUME_EXPR = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "CovolumeExpr",
    "type": "object",
    "properties": {
        "disc_factor": {
            "type": "object",
            "required": ["base", "half_exponent"],
            "properties": {"base": _pos, "half_exponent": {"type": "integer"}},
            "additionalProperties": False,
        },
        "tamagawa_number": {"type": ["string", "integer"]},
        "finite_factors": {"type": "object", "additionalProperties": {"type": ["string", "integer"]}},
        "residue_sizes": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 2}},
        "tail": TAIL_RULE,
        "S": {"type": "array", "items": _label},
        "index_data": INDEX_DATA,
        "tolerance": {"type": "number", "exclusiveMinimum": 0},
    },
    "additionalProperties": False,
}

COVOLUME_CHECK = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "CovolumeCheck",
    "type": "object",
    "required": ["setup", "left", "right"],
    "properties": {"setup": GLOBAL_SETUP, "left": COVOLUME_EXPR, "right": COVOLUME_EXPR},
    "additionalProperties": False,
}

TEMPERED_PARAM = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "ArchTemperedParam",
    "type": "object",
    "required": ["blocks"],
    "properties": {
        "target": {"enum": ["real_group", "quaternionic_group"]},
        "blocks": {
            "type": "array",
            "minItems": 1,
            "items": {
                "oneOf": [
                    {"type": "object", "required": ["type", "k"],
                     "properties": {"type": {"const": "DS2"}, "k": _pos, "omega": {}},
                     "additionalProperties": False},
                    {"type": "object", "required": ["type", "sign"],
                     "properties": {"type": {"const": "CH1"}, "sign": {"enum": ["+", "-"]},
                                    "t": {"type": "number"}, "label": {}},
                     "additionalProperties": False},
                ]
            },
        },
    },
    "additionalProperties": False,
}

JL_SETUP = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "JLSetup",
    "type": "object",
    "required": ["setup", "local_specs"],
    "properties": {
        "setup": GLOBAL_SETUP,
        "local_specs": {"type": "object", "additionalProperties": LOCAL_SPEC},
    },
    "additionalProperties": False,
}

SCHEMAS = {
    "local_spec": LOCAL_SPEC,
    "global_setup": GLOBAL_SETUP,
    "covolume_expr": COVOLUME_EXPR,
    "covolume_check": COVOLUME_CHECK,
    "tempered_param": TEMPERED_PARAM,
    "jl_setup": JL_SETUP,
}


def validate(data, name: str) -> None:
    """Raise InputError naming the JSON pointer of the first violation."""
    validator = jsonschema.Draft202012Validator(SCHEMAS[name])
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        pointer = "".join(f"/{p}" for p in err.absolute_path) or "/"
        raise InputError(f"{name} schema violation at {pointer}: {err.message}")


def write_all(directory: str | Path) -> None:
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    for name, schema in SCHEMAS.items():
        (out / f"{name}.schema.json").write_text(json.dumps(schema, indent=2) + "\n")


if __name__ == "__main__":
    write_all(sys.argv[1] if len(sys.argv) > 1 else "docs/schemas")
