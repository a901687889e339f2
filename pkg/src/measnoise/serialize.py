"""JSON encodings for complex arrays, families, processes and reports.

Complex scalars are ``[re, im]`` pairs and matrices are row-major nested
lists of such pairs.  Matrix entries keep full double precision so they
round-trip exactly; report scalars are rounded to 12 significant digits.
"""

from __future__ import annotations

import numbers

import numpy as np

from .dilation import MeasuringProcess
from .errors import ScenarioError
from .measurement import JointFamily, MeasurementFamily
from .relations import RelationReport


def sig12(x: float) -> float:
    return float(f"{float(x):.12g}")


def complex_to_json(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def vector_to_json(v) -> list:
    return [complex_to_json(z) for z in np.asarray(v).reshape(-1)]


def matrix_to_json(m) -> list:
    return [vector_to_json(row) for row in np.asarray(m)]


def parse_complex(x, where: str = "") -> complex:
    if isinstance(x, numbers.Real) and not isinstance(x, bool):
        return complex(float(x), 0.0)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(
        isinstance(c, numbers.Real) and not isinstance(c, bool) for c in x
    ):
        return complex(float(x[0]), float(x[1]))
    raise ScenarioError(f"expected a number or [re, im] pair, got {x!r}", where)


def parse_vector(x, where: str = "") -> np.ndarray:
    if not isinstance(x, list) or not x:
        raise ScenarioError("expected a non-empty list of complex entries", where)
    return np.array([parse_complex(z, f"{where}[{i}]") for i, z in enumerate(x)], dtype=complex)


def parse_matrix(x, where: str = "") -> np.ndarray:
    if not isinstance(x, list) or not x:
        raise ScenarioError("expected a non-empty list of rows", where)
    rows = [parse_vector(r, f"{where}[{i}]") for i, r in enumerate(x)]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ScenarioError(f"matrix is not square ({n} rows)", where)
    return np.stack(rows)


def family_to_json(f: MeasurementFamily | JointFamily) -> dict:
    outcomes = []
    for label, op in f:
        lab = list(label) if isinstance(label, tuple) else label
        outcomes.append({"label": lab, "matrix": matrix_to_json(op)})
    return {"dim": f.dim, "outcomes": outcomes}


def _parse_outcomes(payload, where: str, joint: bool):
    if not isinstance(payload, dict) or "outcomes" not in payload:
        raise ScenarioError("family needs an 'outcomes' list", where)
    outcomes = payload["outcomes"]
    if not isinstance(outcomes, list) or not outcomes:
        raise ScenarioError("'outcomes' must be a non-empty list", where)
    pairs = []
    for i, item in enumerate(outcomes):
        loc = f"{where}.outcomes[{i}]"
        if not isinstance(item, dict) or "label" not in item or "matrix" not in item:
            raise ScenarioError("outcome needs 'label' and 'matrix'", loc)
        label = item["label"]
        if joint:
            if not (isinstance(label, list) and len(label) == 2):
                raise ScenarioError("joint label must be [a, b]", loc)
            label = (float(label[0]), float(label[1]))
        elif not isinstance(label, numbers.Real) or isinstance(label, bool):
            raise ScenarioError("label must be a real number", loc)
        op = parse_matrix(item["matrix"], f"{loc}.matrix")
        if "dim" in payload and op.shape[0] != payload["dim"]:
            raise ScenarioError(f"matrix dimension {op.shape[0]} != declared {payload['dim']}", loc)
        pairs.append((label, op))
    return pairs


def family_from_json(payload, where: str = "family") -> MeasurementFamily:
    pairs = _parse_outcomes(payload, where, joint=False)
    try:
        return MeasurementFamily(pairs)
    except ValueError as exc:
        raise ScenarioError(str(exc), where) from exc


def joint_family_from_json(payload, where: str = "joint_family") -> JointFamily:
    pairs = _parse_outcomes(payload, where, joint=True)
    try:
        return JointFamily(pairs)
    except ValueError as exc:
        raise ScenarioError(str(exc), where) from exc


def process_to_json(p: MeasuringProcess) -> dict:
    return {
        "system_dim": p.system_dim,
        "ancilla_dim": p.ancilla_dim,
        "xi": vector_to_json(p.xi),
        "u": matrix_to_json(p.u),
        "meter": {
            "matrix": matrix_to_json(p.meter.op),
            "eigenvalues": list(p.meter.eigenvalues),
        },
    }


def report_to_json(r: RelationReport) -> dict:
    return {
        "relation_id": r.relation_id,
        "lhs": sig12(r.lhs),
        "rhs": sig12(r.rhs),
        "margin": sig12(r.margin),
        "margin_hex": float(r.margin).hex(),
        "pass": r.passed,
        "applicable": r.applicable,
        "inputs_digest": r.inputs_digest,
    }
