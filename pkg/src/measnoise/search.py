"""Randomized sweeps for the smallest margin of a relation.

Sample ``i`` of a search with seed ``s`` is drawn from its own stream
``rng_stream(s, i)``, so results do not depend on how samples are split
between workers.  The minimum is taken over ``(margin, index)`` which makes
the aggregation order-insensitive.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import hilbert as hb
from . import relations as rel
from .errors import DegenerateSigma, ScenarioError
from .measurement import (
    JointFamily,
    MeasurementFamily,
    marginals,
    projective_family,
    random_family,
    random_joint_family,
)
from .serialize import family_to_json, matrix_to_json, vector_to_json

FAMILY_RELATIONS = ("heisenberg_nd", "universal", "universal_dimensionless", "thm8", "ndm", "nlm")
JOINT_RELATIONS = ("arthurs_goodman", "ishikawa_ozawa", "thm4_joint")
SEARCHABLE = ("robertson", "lemma6") + FAMILY_RELATIONS + JOINT_RELATIONS
FAMILY_SOURCES = ("random", "projective_random")
MAX_OUTCOMES = 6


@dataclass
class SearchResult:
    relation_id: str
    dim: int
    samples: int
    seed: int
    family_source: str
    min_margin: float | None
    argmin_index: int | None
    argmin: dict | None
    violation_count: int
    evaluated: int

    @property
    def is_defect(self) -> bool:
        return self.relation_id in rel.GUARANTEED and self.violation_count > 0


@dataclass
class _Partial:
    min_margin: float = np.inf
    min_index: int = -1
    violations: int = 0
    evaluated: int = 0

    def merge(self, other: "_Partial") -> "_Partial":
        best = min((self.min_margin, self.min_index), (other.min_margin, other.min_index))
        return _Partial(best[0], best[1], self.violations + other.violations,
                        self.evaluated + other.evaluated)


def draw_sample(relation_id: str, dim: int, seed: int, index: int,
                family_source: str = "random", fixed_family=None) -> dict:
    """Inputs for sample ``index``; keys depend on the relation."""
    rng = hb.rng_stream(seed, index)
    if relation_id in JOINT_RELATIONS:
        if isinstance(fixed_family, JointFamily):
            j = fixed_family
        else:
            j = random_joint_family(dim, int(rng.integers(1, 4)), int(rng.integers(1, 4)), rng)
        pa, pb = marginals(j)
        return {"family": j, "a": pa.first_moment(), "b": pb.first_moment(),
                "psi": hb.haar_random_ket(j.dim, rng)}
    if relation_id == "robertson":
        return {"a": hb.random_hermitian(dim, rng), "b": hb.random_hermitian(dim, rng),
                "psi": hb.haar_random_ket(dim, rng)}
    if isinstance(fixed_family, MeasurementFamily):
        f = fixed_family
        a = hb.random_hermitian(f.dim, rng)
    elif family_source == "projective_random":
        a = hb.random_hermitian(dim, rng)
        f = projective_family(a)
    elif family_source == "random":
        f = random_family(dim, int(rng.integers(1, MAX_OUTCOMES + 1)), rng)
        a = hb.random_hermitian(dim, rng)
    else:
        raise ScenarioError(f"unknown family source {family_source!r}", "search.family_source")
    b = hb.random_hermitian(f.dim, rng)
    psi = hb.haar_random_ket(f.dim, rng)
    return {"family": f, "a": a, "b": b, "psi": psi}


def evaluate(relation_id: str, s: dict) -> rel.RelationReport | None:
    """Report for one sample, or ``None`` when the relation does not apply."""
    if relation_id == "robertson":
        return rel.robertson(s["a"], s["b"], s["psi"])
    if relation_id == "lemma6":
        return rel.lemma6(s["family"], s["b"], s["psi"])
    if relation_id in ("ndm", "nlm"):
        ndm, nlm = rel.thm11_checks(s["family"], s["a"], s["b"], s["psi"])
        r = ndm if relation_id == "ndm" else nlm
        return r if r.applicable else None
    if relation_id == "universal_dimensionless":
        try:
            return rel.universal_dimensionless(s["family"], s["a"], s["b"], s["psi"])
        except DegenerateSigma:
            return None
    func = getattr(rel, relation_id)
    return func(s["family"], s["a"], s["b"], s["psi"])


def _scan(args) -> _Partial:
    relation_id, dim, seed, start, stop, family_source, fixed_family = args
    part = _Partial()
    for i in range(start, stop):
        r = evaluate(relation_id, draw_sample(relation_id, dim, seed, i, family_source, fixed_family))
        if r is None:
            continue
        part.evaluated += 1
        if not r.passed:
            part.violations += 1
        if r.margin < part.min_margin:
            part.min_margin, part.min_index = r.margin, i
    return part


def sample_to_json(s: dict) -> dict:
    out = {}
    for key, value in s.items():
        if isinstance(value, (MeasurementFamily, JointFamily)):
            out[key] = family_to_json(value)
        elif np.ndim(value) == 1:
            out[key] = vector_to_json(value)
        else:
            out[key] = matrix_to_json(value)
    return out


def search_min_margin(relation_id: str, dim: int, samples: int, seed: int,
                      family_source: str = "random", fixed_family=None,
                      workers: int = 1) -> SearchResult:
    if relation_id not in SEARCHABLE:
        raise ScenarioError(f"relation {relation_id!r} cannot be searched", "search.relation")
    if samples < 1:
        raise ScenarioError("samples must be at least 1", "search.samples")
    if dim < 1:
        raise ScenarioError("dim must be positive", "search.dim")
    if family_source not in FAMILY_SOURCES and fixed_family is None:
        raise ScenarioError(f"unknown family source {family_source!r}", "search.family_source")
    workers = max(1, min(workers, samples))
    bounds = np.linspace(0, samples, workers + 1).astype(int)
    chunks = [(relation_id, dim, seed, int(lo), int(hi), family_source, fixed_family)
              for lo, hi in zip(bounds[:-1], bounds[1:])]
    if workers == 1:
        parts = [_scan(c) for c in chunks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_scan, chunks))
    total = _Partial()
    for p in parts:
        total = total.merge(p)
    if total.evaluated == 0:
        min_margin = argmin_index = argmin = None
    else:
        min_margin, argmin_index = float(total.min_margin), int(total.min_index)
        argmin = sample_to_json(draw_sample(relation_id, dim, seed, argmin_index,
                                            family_source, fixed_family))
    return SearchResult(relation_id, dim, samples, seed,
                        "fixed" if fixed_family is not None else family_source,
                        min_margin, argmin_index, argmin, total.violations, total.evaluated)
