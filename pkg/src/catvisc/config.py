"""Experiment configuration files: JSON schema, loading and object construction."""

import json

import jsonschema
import numpy as np

from catvisc.errors import ConfigError, GeometryError
from catvisc.glued import GluedPoint, GluedSpace
from catvisc.maps import Homothety, Identity, Rotation, SegmentProjection
from catvisc.model_spaces import Plane, Sphere
from catvisc.projections import Segment
from catvisc.viscosity import ConstantSeq, Harmonic, IterationConfig, SequencePair, Table

_point = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 3}
_positive = {"type": "number", "exclusiveMinimum": 0}

_sequence = {
    "oneOf": [
        {
            "type": "object",
            "properties": {"kind": {"const": "harmonic"}, "c": _positive, "p": _positive},
            "required": ["kind"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"kind": {"const": "constant"}, "value": {"type": "number"}},
            "required": ["kind", "value"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "kind": {"const": "table"},
                "values": {"type": "array", "items": {"type": "number"}, "minItems": 1},
            },
            "required": ["kind", "values"],
            "additionalProperties": False,
        },
    ]
}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "space": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["plane", "sphere", "glued"]},
                "kappa": {"type": "number", "minimum": 0},
                "cap-center": _point,
                "cap-radius": _positive,
            },
            "required": ["kind"],
            "additionalProperties": False,
        },
        "T": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["identity", "rotation", "segment-projection"]},
                "axis": _point,
                "angle": {"type": "number"},
                "segment": {"type": "array", "items": _point, "minItems": 2, "maxItems": 2},
            },
            "required": ["kind"],
            "additionalProperties": False,
        },
        "f": {
            "type": "object",
            "properties": {
                "kind": {"const": "homothety"},
                "anchor": _point,
                "k": {"type": "number"},
            },
            "required": ["kind", "anchor", "k"],
            "additionalProperties": False,
        },
        "u": _point,
        "sequences": {
            "type": "object",
            "properties": {"t": _sequence, "b": _sequence},
            "required": ["t", "b"],
            "additionalProperties": False,
        },
        "M": _positive,
        "max_iter": {"type": "integer", "minimum": 1},
        "report_every": {"type": "integer", "minimum": 1},
        "output": {
            "type": "object",
            "properties": {"trace": {"type": "string"}, "summary": {"type": "string"}},
            "additionalProperties": False,
        },
    },
    "required": ["space", "T", "f", "u", "sequences", "max_iter"],
    "additionalProperties": False,
}


def _pointer(path):
    return "/" + "/".join(str(p) for p in path)


def validate_schema(doc, schema=CONFIG_SCHEMA):
    """Raise :class:`ConfigError` carrying the JSON pointer of the first error."""
    validator = jsonschema.Draft202012Validator(schema)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        raise ConfigError(f"schema: {err.message}", "schema", _pointer(err.absolute_path))


def load_config(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}", "file") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}", "file") from exc
    return doc


def _sequence_obj(spec):
    kind = spec["kind"]
    if kind == "harmonic":
        return Harmonic(c=spec.get("c", 1.0), p=spec.get("p", 1.0))
    if kind == "constant":
        return ConstantSeq(spec["value"])
    return Table(tuple(spec["values"]))


def build_space(spec):
    kind = spec["kind"]
    try:
        if kind == "plane":
            return Plane()
        if kind == "glued":
            return GluedSpace()
        kw = {"kappa": spec.get("kappa", 1.0)}
        if "cap-center" in spec:
            kw["center"] = tuple(spec["cap-center"])
        if "cap-radius" in spec:
            kw["radius"] = spec["cap-radius"]
        return Sphere(**kw)
    except (GeometryError, ValueError) as exc:
        raise ConfigError(str(exc), "space", "/space") from exc


def build_point(space, coords, pointer):
    try:
        if isinstance(space, GluedSpace):
            if len(coords) != 3:
                raise ValueError("glued points are [face, u, w]")
            return space.check_point(GluedPoint(int(coords[0]), coords[1], coords[2]))
        return space.check_point(np.asarray(coords, dtype=float))
    except (GeometryError, ValueError) as exc:
        raise ConfigError(f"bad point: {exc}", "point", pointer) from exc


def build_map(space, spec, pointer):
    kind = spec["kind"]
    try:
        if kind == "identity":
            return Identity(space)
        if kind == "rotation":
            return Rotation(space, np.asarray(spec["axis"], dtype=float), spec["angle"])
        if kind == "segment-projection":
            a, b = (build_point(space, p, f"{pointer}/segment/{i}")
                    for i, p in enumerate(spec["segment"]))
            return SegmentProjection(space, Segment(a, b))
        anchor = build_point(space, spec["anchor"], f"{pointer}/anchor")
        return Homothety(space, anchor, spec["k"])
    except KeyError as exc:
        raise ConfigError(f"missing parameter {exc}", "map", pointer) from exc
    except GeometryError as exc:
        raise ConfigError(str(exc), "map", pointer) from exc


def build_config(doc, seed=0):
    """Schema-check ``doc`` and turn it into an :class:`IterationConfig`."""
    validate_schema(doc)
    space = build_space(doc["space"])
    T = build_map(space, doc["T"], "/T")
    f = build_map(space, doc["f"], "/f")
    u = build_point(space, doc["u"], "/u")
    seqs = doc["sequences"]
    pair = SequencePair(_sequence_obj(seqs["t"]), _sequence_obj(seqs["b"]))
    return IterationConfig(
        space=space, T=T, f=f, u=u, sequences=pair,
        max_iter=doc["max_iter"], report_every=doc.get("report_every", 1),
        M=doc.get("M"), seed=seed,
    )


# -- output schemas --------------------------------------------------------------

_num = {"type": "number"}
_vec = {"type": "array", "items": _num}

SUMMARY_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "mode": {"enum": ["viscosity", "halpern"]},
        "space": {"type": "string"},
        "kappa": _num,
        "iterations": {"type": "integer"},
        "q": _vec,
        "q_residual": _num,
        "final": {
            "type": "object",
            "properties": {"x": _vec, "d_q": _num, "r_fix": _num, "r_xy": _num},
            "required": ["x", "d_q", "r_fix", "r_xy"],
        },
        "tail": {"type": "object"},
        "hypotheses": {"type": "object"},
        "exploratory": {"type": "boolean"},
    },
    "required": ["mode", "space", "kappa", "iterations", "q", "final", "tail", "hypotheses"],
}

COUNTEREXAMPLE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "points": {"type": "object"},
        "projections": {"type": "object"},
        "distances": {"type": "object", "additionalProperties": _num},
        "checks": {"type": "object", "additionalProperties": {"type": "boolean"}},
        "gap": _num,
        "verdict": {"enum": ["VIOLATED", "HOLDS"]},
    },
    "required": ["points", "projections", "distances", "checks", "verdict"],
}

LEMMA_REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "seed": {"type": "integer"},
        "trials": {"type": "integer"},
        "passed": {"type": "boolean"},
        "suites": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {
                    "name": {"type": "string"},
                    "trials": {"type": "integer"},
                    "tolerance": _num,
                    "worst_margin": _num,
                    "failures": {"type": "array"},
                    "failure_count": {"type": "integer"},
                    "passed": {"type": "boolean"},
                },
                "required": ["name", "trials", "tolerance", "worst_margin", "failures", "passed"],
            },
        },
    },
    "required": ["seed", "trials", "passed", "suites"],
}
