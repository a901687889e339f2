"""Command-line front end: scenario checks, margin searches and dilations.

Usage::

    measnoise check  --scenario pauli.json --out report.json
    measnoise search --relation universal --dim 2 --samples 10000 --seed 7 --out search.json
    measnoise dilate --scenario pauli.json --family meas_z --out process.json

Exit status is 0 when every guaranteed relation holds, 1 when one fails
(an implementation defect) and 2 for malformed input.  Violations of the
Heisenberg-type relation are findings and never change the exit status.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from . import hilbert as hb
from . import relations as rel
from .dilation import dilate, verify_realization
from .errors import MeasNoiseError, ScenarioError
from .measurement import projective_family, unbiased_zx_family
from .search import SEARCHABLE, SearchResult, search_min_margin
from .serialize import (
    family_from_json,
    joint_family_from_json,
    parse_matrix,
    parse_vector,
    process_to_json,
    report_to_json,
    sig12,
)

log = logging.getLogger("measnoise")

KINDS = ("ket", "observable", "family", "joint_family")

_QUBIT_KETS = {
    "ket_0": [1, 0],
    "ket_1": [0, 1],
    "ket_plus": [1, 1],
    "ket_minus": [1, -1],
    "ket_y_plus": [1, 1j],
    "ket_y_minus": [1, -1j],
}
_PAULIS = {"pauli_x": hb.PAULI_X, "pauli_y": hb.PAULI_Y, "pauli_z": hb.PAULI_Z}

# relation id -> kinds of its positional arguments
SIGNATURES = {
    "robertson": ("observable", "observable", "ket"),
    "lemma6": ("family", "observable", "ket"),
    **{r: ("family", "observable", "observable", "ket")
       for r in ("heisenberg_nd", "universal", "universal_dimensionless", "thm8", "ndm", "nlm")},
    **{r: ("joint_family", "observable", "observable", "ket")
       for r in ("arthurs_goodman", "ishikawa_ozawa", "thm4_joint")},
}


def builtin(name: str, dim: int, where: str):
    """Resolve a built-in name to ``(kind, value)``."""
    if name == "identity":
        return "observable", np.eye(dim, dtype=complex)
    if name in _PAULIS or name in _QUBIT_KETS or name == "unbiased_zx":
        if dim != 2:
            raise ScenarioError(f"built-in {name!r} needs dim 2, scenario has dim {dim}", where)
        if name in _PAULIS:
            return "observable", _PAULIS[name]
        if name == "unbiased_zx":
            return "joint_family", unbiased_zx_family()
        return "ket", hb.ket(_QUBIT_KETS[name])
    raise ScenarioError(f"unknown built-in {name!r}", where)


@dataclass
class Scenario:
    dim: int
    objects: dict
    checks: list
    search: dict | None = None

    def resolve(self, name, kind: str, where: str):
        if not isinstance(name, str):
            raise ScenarioError(f"object reference must be a string, got {name!r}", where)
        if name in self.objects:
            got, value = self.objects[name]
        else:
            try:
                got, value = builtin(name, self.dim, where)
            except ScenarioError:
                raise ScenarioError(f"undefined name {name!r}", where) from None
        if got != kind:
            raise ScenarioError(f"{name!r} is a {got}, expected a {kind}", where)
        return value


def _parse_object(name: str, entry, dim: int, defined: dict):
    where = f"objects.{name}"
    if not isinstance(entry, dict):
        raise ScenarioError("object must be a JSON object", where)
    if "builtin" in entry:
        kind, value = builtin(entry["builtin"], dim, where)
        if "kind" in entry and entry["kind"] != kind:
            raise ScenarioError(f"built-in {entry['builtin']!r} is a {kind}", where)
        return kind, value
    kind = entry.get("kind")
    if kind not in KINDS:
        raise ScenarioError(f"kind must be one of {KINDS}, got {kind!r}", where)
    try:
        if kind == "ket":
            if "amplitudes" not in entry:
                raise ScenarioError("ket needs 'amplitudes'", where)
            value = hb.ket(parse_vector(entry["amplitudes"], f"{where}.amplitudes"))
            size = value.shape[0]
        elif kind == "observable":
            if "matrix" not in entry:
                raise ScenarioError("observable needs 'matrix'", where)
            value = hb.spectral(parse_matrix(entry["matrix"], f"{where}.matrix")).op
            size = value.shape[0]
        elif kind == "family":
            if "projective" in entry:
                ref = entry["projective"]
                got, obs = defined[ref] if ref in defined else builtin(ref, dim, where)
                if got != "observable":
                    raise ScenarioError(f"{ref!r} is a {got}, expected an observable", f"{where}.projective")
                value = projective_family(obs)
            else:
                value = family_from_json(entry, where)
            size = value.dim
        else:
            value = joint_family_from_json(entry, where)
            size = value.dim
    except ScenarioError:
        raise
    except (MeasNoiseError, ValueError, KeyError) as exc:
        raise ScenarioError(str(exc), where) from exc
    if size != dim:
        raise ScenarioError(f"dimension {size} does not match scenario dim {dim}", where)
    return kind, value


def parse_scenario(data) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a JSON object", "$")
    dim = data.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ScenarioError("'dim' must be a positive integer", "dim")
    objects: dict = {}
    raw_objects = data.get("objects", {})
    if not isinstance(raw_objects, dict):
        raise ScenarioError("'objects' must map names to objects", "objects")
    for name, entry in raw_objects.items():
        objects[name] = _parse_object(name, entry, dim, objects)
    checks = data.get("checks", [])
    if not isinstance(checks, list):
        raise ScenarioError("'checks' must be a list", "checks")
    scenario = Scenario(dim, objects, checks, data.get("search"))
    for i, check in enumerate(checks):
        _check_args(scenario, check, f"checks[{i}]")
    if scenario.search is not None:
        _search_args(scenario, scenario.search)
    return scenario


def load_scenario(path) -> Scenario:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioError(str(exc), str(path)) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc}", str(path)) from exc
    return parse_scenario(data)


def _check_args(scenario: Scenario, check, where: str):
    if not isinstance(check, dict) or "relation" not in check:
        raise ScenarioError("check needs a 'relation'", where)
    rid = check["relation"]
    if rid not in SIGNATURES:
        raise ScenarioError(f"unknown relation {rid!r}", f"{where}.relation")
    kinds = SIGNATURES[rid]
    args = check.get("args", [])
    if not isinstance(args, list) or len(args) != len(kinds):
        raise ScenarioError(f"{rid} takes {len(kinds)} arguments {kinds}", f"{where}.args")
    return rid, [scenario.resolve(n, k, f"{where}.args[{i}]") for i, (n, k) in enumerate(zip(args, kinds))]


def _search_args(scenario: Scenario, search) -> dict:
    where = "search"
    if not isinstance(search, dict):
        raise ScenarioError("'search' must be an object", where)
    out = {}
    rid = search.get("relation")
    if rid not in SEARCHABLE:
        raise ScenarioError(f"relation must be one of {SEARCHABLE}", f"{where}.relation")
    out["relation_id"] = rid
    for key, default in (("dim", scenario.dim), ("samples", None), ("seed", None)):
        value = search.get(key, default)
        if not isinstance(value, int) or isinstance(value, bool) or value < (0 if key == "seed" else 1):
            raise ScenarioError(f"'{key}' must be a non-negative integer", f"{where}.{key}")
        out[key] = value
    source = search.get("family_source", "random")
    if source in ("random", "projective_random"):
        out["family_source"] = source
    else:
        kind = "joint_family" if rid in ("arthurs_goodman", "ishikawa_ozawa", "thm4_joint") else "family"
        out["fixed_family"] = scenario.resolve(source, kind, f"{where}.family_source")
    return out


def run_check(scenario: Scenario, check, where: str) -> list[rel.RelationReport]:
    rid, args = _check_args(scenario, check, where)
    if rid in ("ndm", "nlm"):
        ndm, nlm = rel.thm11_checks(*args)
        return [ndm if rid == "ndm" else nlm]
    return [getattr(rel, rid)(*args)]


def search_to_json(s: SearchResult) -> dict:
    return {
        "relation_id": s.relation_id,
        "dim": s.dim,
        "samples": s.samples,
        "seed": s.seed,
        "family_source": s.family_source,
        "evaluated": s.evaluated,
        "min_margin": None if s.min_margin is None else sig12(s.min_margin),
        "min_margin_hex": None if s.min_margin is None else float(s.min_margin).hex(),
        "argmin_index": s.argmin_index,
        "argmin": s.argmin,
        "violation_count": s.violation_count,
        "guaranteed": s.relation_id in rel.GUARANTEED,
    }


@dataclass
class RunReport:
    checks: list = field(default_factory=list)
    searches: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    @property
    def defects(self) -> int:
        return sum(r.is_defect for r in self.checks) + sum(s.is_defect for s in self.searches)

    @property
    def exit_code(self) -> int:
        if self.errors:
            return 2
        return 1 if self.defects else 0

    def to_json(self, timestamp: bool = True) -> dict:
        out = {
            "tool": "measnoise",
            "version": __version__,
            "numpy_version": np.__version__,
            "checks": [report_to_json(r) for r in self.checks],
            "searches": [search_to_json(s) for s in self.searches],
            "defects": self.defects,
            "errors": self.errors,
            "exit_code": self.exit_code,
        }
        if timestamp:
            out["generated_at"] = datetime.now(timezone.utc).isoformat()
        return out


def run_scenario(path, workers: int = 1) -> RunReport:
    """Run every check and the optional search of a scenario file.

    Input errors are recorded in the report (exit code 2) rather than raised.
    """
    report = RunReport()
    try:
        scenario = load_scenario(path)
        for i, check in enumerate(scenario.checks):
            report.checks.extend(run_check(scenario, check, f"checks[{i}]"))
        if scenario.search is not None:
            kwargs = _search_args(scenario, scenario.search)
            rid = kwargs.pop("relation_id")
            report.searches.append(search_min_margin(rid, workers=workers, **kwargs))
    except ScenarioError as exc:
        report.errors.append({"location": exc.location, "message": str(exc)})
    except MeasNoiseError as exc:
        report.errors.append({"location": "", "message": str(exc)})
    return report


def dump(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _cmd_check(args) -> int:
    report = run_scenario(args.scenario, workers=args.workers)
    for e in report.errors:
        log.error("%s", e["message"])
    for r in report.checks:
        log.info("%-24s margin=%.12g pass=%s", r.relation_id, r.margin, r.passed)
    dump(report.to_json(timestamp=not args.no_timestamp), args.out)
    return report.exit_code


def _cmd_search(args) -> int:
    report = RunReport()
    try:
        report.searches.append(search_min_margin(
            args.relation, args.dim, args.samples, args.seed,
            family_source=args.family_source, workers=args.workers,
        ))
    except ScenarioError as exc:
        log.error("%s", exc)
        report.errors.append({"location": exc.location, "message": str(exc)})
    dump(report.to_json(timestamp=not args.no_timestamp), args.out)
    return report.exit_code


def _cmd_dilate(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
        family = scenario.resolve(args.family, "family", "--family")
    except ScenarioError as exc:
        log.error("%s", exc)
        return 2
    process = dilate(family)
    residual = verify_realization(process, family)
    dump({
        "tool": "measnoise",
        "version": __version__,
        "family": args.family,
        "process": process_to_json(process),
        "realization_residual": sig12(residual),
        "realization_residual_hex": float(residual).hex(),
    }, args.out)
    return 0 if residual <= 1e-9 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="measnoise", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="evaluate the checks (and search) of a scenario file")
    p.add_argument("--scenario", required=True)
    p.add_argument("--out", default=None, help="report path (default: stdout)")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("search", help="randomized minimum-margin search for one relation")
    p.add_argument("--relation", required=True, choices=SEARCHABLE)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--family-source", default="random", choices=("random", "projective_random"))
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None)
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser("dilate", help="build and verify a measuring process for a family")
    p.add_argument("--scenario", required=True)
    p.add_argument("--family", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_dilate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
