"""Text serialization shared by state, POVM and report files.

Machine files are JSON with every float written to 17 significant digits,
which is round-trip exact for IEEE doubles.  Each file carries a
``schema_version`` string ``"MAJOR.MINOR"``; readers reject unknown majors.
"""

import json
import math

import numpy as np

from discord_bound.errors import ValidationError

SCHEMA_VERSION = "1.0"
SUPPORTED_MAJOR = 1


def format_float(x, digits=17):
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        # JSON has no literal for these
        return json.dumps(str(x))
    if x == 0.0:
        return "0.0"
    s = f"{x:.{digits}g}"
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def dumps(obj, digits=17, indent=2):
    """JSON text with fixed-precision floats and stable key order."""
    return _dump(obj, digits, indent, 0) + "\n"


def _dump(obj, digits, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj, digits)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_dump(v, digits, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_dump(v, digits, indent, level + 1) for v in obj) + "]"
        items = [pad + _dump(v, digits, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, complex):
        return _dump([obj.real, obj.imag], digits, indent, level)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def check_schema(doc, kind):
    if not isinstance(doc, dict):
        raise ValidationError("schema", f"{kind} file must hold a JSON object")
    version = doc.get("schema_version", SCHEMA_VERSION)
    try:
        major = int(str(version).split(".")[0])
    except ValueError:
        raise ValidationError("schema", f"unparseable schema_version {version!r}") from None
    if major != SUPPORTED_MAJOR:
        raise ValidationError("schema", f"unsupported {kind} schema_version {version!r}")


def matrix_to_pairs(m):
    """Row-major list of ``[re, im]`` pairs."""
    m = np.asarray(m, dtype=complex)
    return [[float(z.real), float(z.imag)] for z in m.ravel()]


def pairs_to_matrix(pairs, side):
    try:
        arr = np.asarray(pairs, dtype=float)
    except (TypeError, ValueError):
        raise ValidationError("format", "matrix must be an array of [re, im] pairs") from None
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] != side * side:
        raise ValidationError(
            "format", f"expected {side * side} [re, im] pairs for a {side}x{side} matrix"
        )
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(side, side)
