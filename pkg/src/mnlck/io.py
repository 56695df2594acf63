"""JSON formats for complexes and cochains.

Complex: ``{"vertices": n, "simplices": [[0, 1, 2], ...]}`` listing top (or
any) simplices; faces are added automatically.

Cochain: ``{"degree": k, "values": {"v0,v1,...": scalar}}`` keyed by
simplices in ascending vertex order.  Exact scalars are ``"p/q"`` strings
(or JSON integers); floats are JSON numbers.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from .complex import Cochain, ComplexError, SimplicialComplex, build_complex
from .library import LIBRARY, named


class InputError(ValueError):
    """Malformed user input (bad JSON, wrong schema, unparseable scalar)."""


def parse_scalar(v):
    if isinstance(v, bool):
        raise InputError(f"booleans are not scalars: {v!r}")
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, float):
        return v
    if isinstance(v, str):
        try:
            return Fraction(v.strip())
        except (ValueError, ZeroDivisionError):
            raise InputError(f"cannot parse rational scalar {v!r}") from None
    raise InputError(f"unsupported scalar {v!r}")


def format_scalar(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, int):
        return f"{v}/1"
    return float(v)


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None


def complex_from_json(data) -> SimplicialComplex:
    if not isinstance(data, dict) or "vertices" not in data or "simplices" not in data:
        raise InputError('complex JSON needs keys "vertices" and "simplices"')
    n, simplices = data["vertices"], data["simplices"]
    if not isinstance(n, int) or isinstance(n, bool) or not isinstance(simplices, list):
        raise InputError('"vertices" must be an integer and "simplices" a list')
    if not all(isinstance(s, list) and all(isinstance(v, int) and not isinstance(v, bool) for v in s) for s in simplices):
        raise InputError("every simplex must be a list of integer vertex ids")
    try:
        return build_complex(n, simplices)
    except ComplexError as e:
        raise InputError(str(e)) from None


def complex_to_json(K: SimplicialComplex) -> dict:
    return {"vertices": K.vertex_count, "simplices": [list(s) for s in K.top_simplices()]}


def load_complex(ref: str) -> SimplicialComplex:
    """Read a complex from a JSON file, or take a built-in by name (``torus9`` or ``torus9.json``)."""
    path = Path(ref)
    if path.is_file():
        return complex_from_json(_read_json(path))
    stem = path.name[: -len(".json")] if path.name.endswith(".json") else path.name
    if stem in LIBRARY and path.parent == Path("."):
        return named(stem)
    raise InputError(f"{ref}: no such file and not a built-in complex ({', '.join(sorted(LIBRARY))})")


def cochain_from_json(K: SimplicialComplex, data, degree: int | None = None) -> Cochain:
    if not isinstance(data, dict) or "values" not in data or not isinstance(data["values"], dict):
        raise InputError('cochain JSON needs an object "values"')
    k = data.get("degree", degree)
    if not isinstance(k, int) or isinstance(k, bool):
        raise InputError('"degree" must be an integer')
    if degree is not None and k != degree:
        raise InputError(f"expected a {degree}-cochain, got degree {k}")
    values = {}
    for key, v in data["values"].items():
        try:
            simplex = tuple(int(x) for x in key.split(","))
        except ValueError:
            raise InputError(f"bad simplex key {key!r}; use comma-separated vertex ids") from None
        if list(simplex) != sorted(simplex):
            raise InputError(f"simplex key {key!r} must list vertices in ascending order")
        values[simplex] = parse_scalar(v)
    try:
        return Cochain.from_mapping(K, k, values)
    except ComplexError as e:
        raise InputError(str(e)) from None


def cochain_to_json(c: Cochain) -> dict:
    return {
        "degree": c.degree,
        "values": {",".join(map(str, s)): format_scalar(v) for s, v in c.as_dict().items()},
    }


def load_cochain(path, K: SimplicialComplex, degree: int | None = None) -> Cochain:
    return cochain_from_json(K, _read_json(path), degree)
