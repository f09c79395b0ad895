"""JSON problem files: validation and construction of problem objects."""
from __future__ import annotations

import json
import math
from dataclasses import replace
from pathlib import Path

import jsonschema
import numpy as np

from .finite import polynomial_problem
from .jacobi import JacobiProblem, piecewise_constant_problem, zero_problem
from .problems import CvProblem, build_cv_jacobi, build_lq, free_particle, oscillator

_matrix = {"type": "array", "items": {"type": "array", "items": {"type": "number"}}}
_vector = {"type": "array", "items": {"type": "number"}}

_matfn = {
    "type": "object",
    "additionalProperties": False,
    "required": ["kind"],
    "properties": {
        "kind": {"enum": ["piecewise-constant", "sampled"]},
        "times": _vector,
        "values": {"type": "array", "items": _matrix},
    },
}

_term = {
    "type": "object",
    "additionalProperties": False,
    "required": ["coef", "powers"],
    "properties": {"coef": {"type": "number"}, "powers": {"type": "array", "items": {"type": "integer", "minimum": 0}}},
}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["type"],
    "properties": {
        "type": {"enum": ["jacobi", "finite"]},
        "name": {"enum": ["oscillator", "zero", "free-particle", "lq", "cv"]},
        "params": {"type": "object"},
        "problem": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n": {"type": "integer", "minimum": 1},
                "k": {"type": "integer", "minimum": 1},
                "t1": {"type": "number", "exclusiveMinimum": 0},
                "X": _matfn,
                "b": _matfn,
                "P": _matfn,
                "quadrature": {"enum": ["midpoint", "exact-pc"]},
                "m": {"type": "integer", "minimum": 1},
                "phi": {"type": "array", "items": _term},
                "Phi": {"type": "array", "minItems": 1, "items": {"type": "array", "items": _term}},
            },
        },
        "point": {
            "type": "object",
            "additionalProperties": False,
            "required": ["u", "p"],
            "properties": {"u": _vector, "p": _vector, "newton": {"type": "boolean"}},
        },
        "partition": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"N": {"type": "integer", "minimum": 1}, "points": _vector},
        },
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"eig": {"type": "number", "exclusiveMinimum": 0}, "refine": {"type": "number", "exclusiveMinimum": 0}},
        },
        "oracle": {"type": "boolean"},
    },
}


class SpecError(ValueError):
    """Invalid problem file; the message names the offending field."""


def _where(err: jsonschema.ValidationError) -> str:
    path = "/".join(str(p) for p in err.absolute_path)
    return path or "<root>"


def validate(doc: dict) -> dict:
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as err:
        raise SpecError(f"field '{_where(err)}': {err.message}") from None
    if doc["type"] == "jacobi" and "name" not in doc and "problem" not in doc:
        raise SpecError("field 'problem': a jacobi spec needs either 'name' or 'problem'")
    if doc["type"] == "finite" and ("problem" not in doc or "point" not in doc):
        raise SpecError("field 'problem': a finite spec needs 'problem' and 'point'")
    return doc


def load(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise SpecError(f"malformed JSON at line {err.lineno} column {err.colno}: {err.msg}") from None
    if not isinstance(doc, dict):
        raise SpecError("field '<root>': expected a JSON object")
    return validate(doc)


def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2)


def _matfn_from(spec: dict, field: str, t1: float):
    values = [np.asarray(v, dtype=float) for v in spec.get("values", [])]
    times = np.asarray(spec.get("times", []), dtype=float)
    if not values:
        raise SpecError(f"field '{field}/values': at least one matrix is required")
    if any(v.shape != values[0].shape for v in values):
        raise SpecError(f"field '{field}/values': matrices have different shapes")
    if spec["kind"] == "piecewise-constant":
        if len(times) != len(values) + 1 or not math.isclose(times[0], 0.0) or not math.isclose(times[-1], t1):
            raise SpecError(f"field '{field}/times': need breaks 0 = t_0 < ... < t_m = t1, one more than values")
        return ("pc", times, values)
    if len(times) != len(values) or len(times) < 2 or np.any(np.diff(times) <= 0):
        raise SpecError(f"field '{field}/times': need increasing sample times, one per value")
    stack = np.stack(values)

    def f(t):
        idx = int(np.clip(np.searchsorted(times, t) - 1, 0, len(times) - 2))
        w = np.clip((t - times[idx]) / (times[idx + 1] - times[idx]), 0.0, 1.0)
        return (1 - w) * stack[idx] + w * stack[idx + 1]

    return ("fn", f)


def _as_fn(m):
    if m[0] == "fn":
        return m[1]
    _, times, values = m

    def f(t):
        return values[int(np.clip(np.searchsorted(times, t, side="right") - 1, 0, len(values) - 1))]

    return f


def build_jacobi(doc: dict) -> JacobiProblem:
    name = doc.get("name")
    params = dict(doc.get("params", {}))
    try:
        if name == "oscillator":
            return oscillator(float(params.get("t1", 1.5 * math.pi)), float(params.get("omega", 1.0)))
        if name == "zero":
            return zero_problem(int(params.get("n", 1)), int(params.get("k", 1)), float(params.get("t1", 1.0)))
        if name == "free-particle":
            return free_particle(float(params.get("t1", 1.0)), int(params.get("n", 1)))
        if name == "lq":
            return build_lq(params["A"], params["B"], params["R"], params["W"], float(params["t1"]))
        if name == "cv":
            return build_cv_jacobi(CvProblem(params["R"], params["W"], float(params["t1"]), params.get("C")))
    except KeyError as err:
        raise SpecError(f"field 'params/{err.args[0]}': required by builtin '{name}'") from None
    except (TypeError, ValueError) as err:
        raise SpecError(f"field 'params': {err}") from None
    prob = doc["problem"]
    for key in ("n", "k", "t1", "X", "b"):
        if key not in prob:
            raise SpecError(f"field 'problem/{key}': required")
    t1 = float(prob["t1"])
    X = _matfn_from(prob["X"], "problem/X", t1)
    b = _matfn_from(prob["b"], "problem/b", t1)
    P = _matfn_from(prob["P"], "problem/P", t1) if "P" in prob else None
    quad = prob.get("quadrature", "exact-pc" if X[0] == "pc" and b[0] == "pc" else "midpoint")
    breaks = set()
    for m in (X, b, P):
        if m is not None and m[0] == "pc":
            breaks.update(float(s) for s in m[1][1:-1])
    try:
        if X[0] == "pc" and b[0] == "pc" and P is None and np.array_equal(X[1], b[1]):
            out = piecewise_constant_problem(t1, X[1], X[2], b[2])
            if quad == "midpoint":
                out = replace(out, quadrature="midpoint")
        else:
            out = JacobiProblem(int(prob["n"]), int(prob["k"]), t1, _as_fn(X), _as_fn(b),
                                None if P is None else _as_fn(P), quadrature=quad, breakpoints=tuple(sorted(breaks)))
    except ValueError as err:
        raise SpecError(f"field 'problem': {err}") from None
    if out.n != prob["n"] or out.k != prob["k"]:
        raise SpecError("field 'problem/X': matrix shape disagrees with n and k")
    return out


def build_finite(doc: dict):
    prob = doc["problem"]
    for key in ("m", "phi", "Phi"):
        if key not in prob:
            raise SpecError(f"field 'problem/{key}': required")
    m = int(prob["m"])
    for i, t in enumerate(prob["phi"]):
        if len(t["powers"]) != m:
            raise SpecError(f"field 'problem/phi/{i}/powers': expected {m} entries")
    for j, comp in enumerate(prob["Phi"]):
        for i, t in enumerate(comp):
            if len(t["powers"]) != m:
                raise SpecError(f"field 'problem/Phi/{j}/{i}/powers': expected {m} entries")
    return polynomial_problem(m, prob["phi"], prob["Phi"])


def partition_for(doc: dict, t1: float, default_N: int = 64) -> np.ndarray:
    part = doc.get("partition", {})
    if "points" in part:
        pts = np.asarray(part["points"], dtype=float)
        if len(pts) < 2 or not math.isclose(pts[0], 0.0) or not math.isclose(pts[-1], t1) or np.any(np.diff(pts) <= 0):
            raise SpecError("field 'partition/points': need 0 = s_0 < ... < s_N = t1")
        return pts
    return np.linspace(0.0, t1, int(part.get("N", default_N)) + 1)
