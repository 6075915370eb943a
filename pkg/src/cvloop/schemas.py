"""JSON schemas for every document the package reads or writes."""

from __future__ import annotations

import jsonschema

_NUM = {"type": "number"}
_MATRIX = {"type": "array", "items": {"type": "array", "items": _NUM}}
_VECTOR = {"type": "array", "items": _NUM}
_FN = {
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "fn": {"const": "affine"},
                "gains": {"type": "object", "additionalProperties": _NUM},
                "offset": _NUM,
            },
            "required": ["fn", "gains", "offset"],
        },
        {
            "type": "object",
            "properties": {"fn": {"const": "arctan_scaled"}, "scale": _NUM, "source": {"type": "string"}},
            "required": ["fn", "scale", "source"],
        },
        {
            "type": "object",
            "properties": {
                "fn": {"const": "sec_scaled"},
                "scale": _NUM,
                "sources": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2},
            },
            "required": ["fn", "scale", "sources"],
        },
    ]
}
_ANGLE = {"oneOf": [_NUM, _FN]}

CIRCUIT = {
    "type": "object",
    "properties": {
        "format": {"const": "cvloop-circuit/1"},
        "n_inputs": {"type": "integer", "minimum": 1},
        "instructions": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"op": {"enum": ["rotation", "squeeze", "beamsplitter", "displace", "cubic"]}},
                "required": ["op"],
            },
        },
        "input_state": {
            "oneOf": [
                {"const": "vacuum"},
                {"type": "object", "properties": {"mean": _VECTOR, "cov": _MATRIX}, "required": ["mean", "cov"]},
                {
                    "type": "object",
                    "properties": {"coherent": {"type": "array", "items": {"type": "array", "items": _NUM}}},
                    "required": ["coherent"],
                },
            ]
        },
    },
    "required": ["format", "n_inputs", "instructions"],
}

_EVENT = {
    "type": "object",
    "properties": {
        "tick": {"type": "integer"},
        "kind": {"enum": ["SWITCH1", "SWITCH2", "VBS", "PHASE1", "PHASE2", "MEASURE", "FEEDFORWARD"]},
        "mode": {"enum": ["admit", "recirculate", "readout"]},
        "route": {"enum": ["to_detector", "to_outer"]},
        "bin": {"type": "integer"},
        "output": {"type": "integer"},
        "T": {"type": "number", "minimum": 0, "maximum": 1},
        "theta": _NUM,
        "phi": _ANGLE,
        "angle": _ANGLE,
        "label": {"type": "string"},
        "target_bin": {"type": "integer"},
        "quadrature": {"enum": ["x", "p"]},
        "fn": _FN,
    },
    "required": ["tick", "kind"],
}

PROGRAM = {
    "type": "object",
    "properties": {
        "format": {"const": "cvloop-program/1"},
        "tau": {"type": "integer"},
        "tau_prime": {"type": "integer", "minimum": 1},
        "n": {"type": "integer", "minimum": 1},
        "m": {"type": "integer", "minimum": 0},
        "ancilla_schedule": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "bin": {"type": "integer"},
                    "kind": {"enum": ["SQUEEZED", "CUBIC"]},
                    "gamma": _NUM,
                    "squeezing_db": _NUM,
                },
                "required": ["bin", "kind"],
            },
        },
        "events": {"type": "array", "items": _EVENT},
    },
    "required": ["format", "tau_prime", "n", "m", "ancilla_schedule", "events"],
}

MATRIX = {
    "oneOf": [
        _MATRIX,
        {
            "type": "object",
            "properties": {"format": {"const": "cvloop-matrix/1"}, "matrix": _MATRIX, "displacement": _VECTOR},
            "required": ["format", "matrix"],
        },
    ]
}

_STATE = {
    "type": "object",
    "properties": {"n_modes": {"type": "integer"}, "mean": _VECTOR, "cov": _MATRIX, "inf_cov": _MATRIX},
    "required": ["mean", "cov"],
}

TRANSCRIPT = {
    "type": "object",
    "properties": {
        "format": {"const": "cvloop-transcript/1"},
        "seed": {"type": ["integer", "null"]},
        "ticks": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"tick": {"type": "integer"}, "events": {"type": "array"}, "positions": {"type": "object"}},
                "required": ["tick", "events"],
            },
        },
        "outcomes": {"type": "object", "additionalProperties": _NUM},
        "output_state": {"oneOf": [{"type": "null"}, _STATE]},
    },
    "required": ["format", "seed", "ticks", "outcomes", "output_state"],
}

DECOMPOSITION = {
    "type": "object",
    "properties": {
        "format": {"const": "cvloop-decomposition/1"},
        "kind": {"enum": ["euler", "bloch_messiah"]},
        "reconstruction_error": _NUM,
    },
    "required": ["format", "kind", "reconstruction_error"],
}

REPORT = {
    "type": "object",
    "properties": {
        "format": {"const": "cvloop-report/1"},
        "command": {"type": "string"},
        "config": {"type": "object"},
        "metrics": {"type": "object"},
        "pass": {"type": ["boolean", "null"]},
        "artifacts": {"type": "object", "additionalProperties": {"type": "string"}},
    },
    "required": ["format", "command", "config", "metrics", "pass"],
}

SCHEMAS = {
    "cvloop-circuit/1": CIRCUIT,
    "cvloop-program/1": PROGRAM,
    "cvloop-matrix/1": MATRIX,
    "cvloop-transcript/1": TRANSCRIPT,
    "cvloop-decomposition/1": DECOMPOSITION,
    "cvloop-report/1": REPORT,
}


def schema_for(document):
    """Schema matching a document's ``format`` field (a bare list is a matrix)."""
    if isinstance(document, list):
        return MATRIX
    fmt = document.get("format") if isinstance(document, dict) else None
    if fmt not in SCHEMAS:
        raise jsonschema.ValidationError(f"unknown or missing format {fmt!r}")
    return SCHEMAS[fmt]


def check(document):
    """Validate ``document`` against its schema; raises ``jsonschema.ValidationError``."""
    jsonschema.validate(document, schema_for(document))
