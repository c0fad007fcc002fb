"""JSON documents for maps and reports.

Complex numbers are ``[re, im]`` pairs and floats are printed with 17
significant digits, so a map survives ``parse(serialize(m))`` bit for bit.
"""

import hashlib
import json
import math

import jsonschema
import numpy as np

from .errors import ValidationError
from .maps import PolynomialSphereMap, RationalSphereMap

_PAIR = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 2,
    "maxItems": 2,
}

MAP_SCHEMA = {
    "type": "object",
    "required": ["kind", "target_dim", "numerator"],
    "properties": {
        "kind": {"enum": ["polynomial", "rational"]},
        "target_dim": {"type": "integer", "minimum": 1},
        "numerator": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "array", "minItems": 1, "items": _PAIR},
        },
        "denominator": {"type": "array", "minItems": 1, "items": _PAIR},
        "metadata": {"type": "object", "additionalProperties": {"type": "string"}},
    },
    "additionalProperties": False,
}

GRAM_SCHEMA = {
    "type": "object",
    "required": ["kind", "matrix"],
    "properties": {
        "kind": {"const": "gram"},
        "matrix": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "array", "minItems": 1, "items": _PAIR},
        },
        "metadata": {"type": "object", "additionalProperties": {"type": "string"}},
    },
    "additionalProperties": False,
}


# -- writing ------------------------------------------------------------------------


def _fmt_float(x):
    x = float(x)
    if not math.isfinite(x):
        raise ValidationError(f"cannot serialise non-finite number {x}")
    return "%.17g" % x


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return f"[{_fmt_float(obj.real)}, {_fmt_float(obj.imag)}]"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        parts = [_encode(v, indent, level + 1) for v in obj]
        # keep short numeric rows on one line
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) or _is_pair(v) for v in obj) and len(obj) <= 8:
            return "[" + ", ".join(parts) + "]"
        return "[\n" + ",\n".join(pad + p for p in parts) + "\n" + end + "]"
    raise ValidationError(f"cannot serialise object of type {type(obj).__name__}")


def _is_pair(v):
    return isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v)


def dumps(obj, indent=2):
    """Deterministic JSON text (floats at 17 significant digits)."""
    return _encode(obj, indent, 0) + "\n"


def digest(*blobs):
    h = hashlib.sha256()
    for b in blobs:
        h.update(b if isinstance(b, bytes) else str(b).encode())
    return h.hexdigest()


def _pairs(values):
    return [[float(v.real), float(v.imag)] for v in np.asarray(values, dtype=complex).ravel()]


def map_to_document(F, metadata=None):
    """MapDocument dict for a polynomial or rational map."""
    if isinstance(F, PolynomialSphereMap):
        doc = {"kind": "polynomial", "target_dim": F.target_dim}
        num = F.coeffs
    else:
        doc = {"kind": "rational", "target_dim": F.target_dim}
        num = F.numerator
    doc["numerator"] = [_pairs(num[:, i]) for i in range(num.shape[1])]
    if not isinstance(F, PolynomialSphereMap):
        doc["denominator"] = _pairs(F.denominator)
    if metadata:
        doc["metadata"] = {str(k): str(v) for k, v in metadata.items()}
    return doc


def gram_to_document(B, metadata=None):
    B = np.asarray(B, dtype=complex)
    doc = {"kind": "gram", "matrix": [_pairs(row) for row in B]}
    if metadata:
        doc["metadata"] = {str(k): str(v) for k, v in metadata.items()}
    return doc


def serialize_map(F, metadata=None):
    return dumps(map_to_document(F, metadata))


# -- reading ------------------------------------------------------------------------


def loads(text):
    """Parse JSON; integers come back as floats so ``-0`` keeps its sign."""
    try:
        return json.loads(text, parse_int=float)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _schema_check(doc, schema):
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        where = "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in exc.absolute_path)
        raise ValidationError(f"document{where}: {exc.message}") from None


def _complex_array(rows):
    arr = np.asarray(rows, dtype=float)
    out = np.empty(arr.shape[:-1], dtype=complex)
    out.real = arr[..., 0]
    out.imag = arr[..., 1]  # direct assignment keeps the sign of zero
    return out


def parse_map_document(doc):
    """Map object from a MapDocument dict.

    Raises:
        ValidationError: schema violation, ragged arrays or inconsistent
            ``target_dim``; the message names the offending field.
    """
    if isinstance(doc, dict) and isinstance(doc.get("target_dim"), float) and doc["target_dim"].is_integer():
        doc = dict(doc, target_dim=int(doc["target_dim"]))
    _schema_check(doc, MAP_SCHEMA)
    num = doc["numerator"]
    if len(num) != doc["target_dim"]:
        raise ValidationError(
            f"document.numerator: {len(num)} components but target_dim is {doc['target_dim']}"
        )
    width = len(num[0])
    for i, row in enumerate(num):
        if len(row) != width:
            raise ValidationError(
                f"document.numerator[{i}]: ragged row of length {len(row)}, expected {width} (pad with [0, 0])"
            )
    coeffs = _complex_array(num).T
    if doc["kind"] == "polynomial":
        if "denominator" in doc:
            raise ValidationError("document.denominator: not allowed for kind 'polynomial'")
        return PolynomialSphereMap(coeffs)
    if "denominator" not in doc:
        raise ValidationError("document.denominator: required for kind 'rational'")
    return RationalSphereMap(coeffs, _complex_array(doc["denominator"]))


def parse_gram_document(doc):
    _schema_check(doc, GRAM_SCHEMA)
    rows = doc["matrix"]
    n = len(rows)
    for i, row in enumerate(rows):
        if len(row) != n:
            raise ValidationError(f"document.matrix[{i}]: row of length {len(row)}, expected {n}")
    return _complex_array(rows)


def parse_map(text):
    return parse_map_document(loads(text))


def read_document(path):
    """``(parsed JSON, raw bytes)`` of a document file."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise ValidationError(f"{path}: {exc.strerror}") from None
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        raise ValidationError(f"{path}: not UTF-8 text") from None
    try:
        return loads(text), raw
    except ValidationError as exc:
        raise ValidationError(f"{path}: {exc}") from None


def grid_csv(rows):
    """CSV text with header ``t,theta,residual``, ``t`` outermost."""
    lines = ["t,theta,residual"]
    lines += [f"{_fmt_float(t)},{_fmt_float(th)},{_fmt_float(r)}" for t, th, r in rows]
    return "\n".join(lines) + "\n"
