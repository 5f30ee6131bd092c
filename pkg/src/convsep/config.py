"""Declarative experiment configs: schema, expansion into instances, report rows."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

import jsonschema

from .bodies import body_from_json
from .counters import (exact_mhat_over_pool, exact_mtilde_over_pool,
                       exact_separated_over_pool, greedy_cover, packing_from_separated)
from .duality import theorem_tild_check
from .pools import CandidatePool, make_instance, pool_from_spec
from .scalar import dump_number, to_fraction

QUANTITY_ORDER = ("N", "M_sep", "M", "Mhat", "Mtilde", "theorem")
QUANTITY_ALIASES = {"Msep": "M_sep"}


def canonical_quantities(names) -> list:
    return [QUANTITY_ALIASES.get(q, q) for q in names]

_number = {"oneOf": [{"type": "number"}, {"type": "string"}]}
_body = {"type": "object", "required": ["type"],
         "properties": {"type": {"enum": ["hpolytope", "vpolytope", "ellipsoid", "lpball"]}}}
_pool = {"type": "object",
         "properties": {"kind": {"enum": ["grid", "sample", "points"]},
                        "step": _number, "count": {"type": "integer", "minimum": 0},
                        "seed": {"type": "integer"}, "points": {"type": "array"}}}

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "instances": {"type": "array", "items": {
            "type": "object", "required": ["K", "B"],
            "properties": {"id": {"type": "string"}, "K": _body, "B": _body, "pool": _pool}}},
        "family": {"type": "object", "required": ["name"], "additionalProperties": False,
                   "properties": {
                       "name": {"enum": ["polytope", "hpolytope", "ellipsoid", "mixed",
                                         "interval", "lp"]},
                       "dims": {"type": "array", "items": {"type": "integer", "minimum": 1,
                                                          "maximum": 8}},
                       "seeds": {"oneOf": [
                           {"type": "array", "items": {"type": "integer"}},
                           {"type": "object", "required": ["count"],
                            "properties": {"start": {"type": "integer"},
                                           "count": {"type": "integer", "minimum": 0}}}]},
                       "pool_size": {"type": "integer", "minimum": 1}}},
        "quantities": {"type": "array", "items": {"enum": list(QUANTITY_ORDER) + list(QUANTITY_ALIASES)}},
        "scales": {"type": "array", "items": _number},
        "format": {"enum": ["json", "csv"]},
        "mode": {"enum": ["auto", "exact", "float"]},
        "timing": {"type": "boolean"},
    },
}

CSV_COLUMNS = ("instance", "quantity", "scale", "lower", "upper", "method", "backend",
               "verdict", "runtime")


class ConfigError(ValueError):
    pass


@dataclass
class ReportRow:
    instance: str
    quantity: str
    scale: str
    lower: int
    upper: object
    method: str
    backend: str
    verdict: object = None
    runtime: object = None


def validate_config(config: dict) -> None:
    try:
        jsonschema.validate(config, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"config schema violation: {exc.message}") from None


def expand_instances(config: dict, exact: bool = False) -> list:
    """Deterministic list of ``(id, K, B, pool)`` from a config."""
    out = []
    for k, spec in enumerate(config.get("instances", [])):
        K = body_from_json(spec["K"], exact=exact or None)
        B = body_from_json(spec["B"], exact=exact or None)
        pool = pool_from_spec(spec.get("pool", {"kind": "grid", "step": 1}), K)
        out.append((spec.get("id", f"instance-{k}"), K, B, pool))
    fam = config.get("family")
    if fam:
        seeds = fam.get("seeds", {"count": 1})
        if isinstance(seeds, dict):
            seeds = range(seeds.get("start", 0), seeds.get("start", 0) + seeds["count"])
        for dim in fam.get("dims", [2]):
            for seed in seeds:
                inst = make_instance(fam["name"], dim, seed, fam.get("pool_size", 10))
                if exact and not (inst.K.exact and inst.B.exact):
                    raise ConfigError(f"family {fam['name']!r} is not available in exact mode")
                out.append((f"{fam['name']}-d{dim}-s{seed}", inst.K, inst.B, inst.pool))
    return out


def _rows_for(job):
    ident, K, B, pool, quantities, scales, exact, timing = job
    rows = []
    for scale in scales:
        Bs = B if scale == 1 else B.scaled(scale)
        for q in QUANTITY_ORDER:
            if q not in quantities:
                continue
            t0 = time.perf_counter()
            verdict = None
            if q == "N":
                rep = greedy_cover(pool, Bs)
            elif q == "M_sep":
                rep = exact_separated_over_pool(pool, Bs, force_exact=exact)
            elif q == "M":
                # M(K, Bs) = M_sep(K, 2 Bs)
                rep = packing_from_separated(
                    exact_separated_over_pool(pool, Bs.scaled(2), force_exact=exact), Bs.scaled(2))
            elif q == "Mhat":
                rep = exact_mhat_over_pool(pool, K, Bs, force_exact=exact)
            elif q == "Mtilde":
                rep = exact_mtilde_over_pool(pool, Bs, force_exact=exact)
            else:
                dr = theorem_tild_check(K, Bs, pool)
                t_len, s_len = len(dr.transform.output), len(dr.segment.certificate)
                method = "transform" if t_len >= s_len else "segment"
                rhs = max(t_len, s_len)
                row = ReportRow(ident, q, dump_number(scale), dr.lhs_size, rhs * rhs, method,
                                dr.lhs.backend, dr.verdict)
                if timing:
                    row.runtime = round(time.perf_counter() - t0, 6)
                rows.append(row)
                continue
            row = ReportRow(ident, q, dump_number(scale), rep.lower, rep.upper, rep.method,
                            rep.backend, verdict)
            if timing:
                row.runtime = round(time.perf_counter() - t0, 6)
            rows.append(row)
    return rows


def run_config(config: dict, jobs: int = 1, exact: bool | None = None):
    """Expand and evaluate a config. Returns ``(rows, ok)``.

    ``ok`` is False iff some requested theorem check has a false verdict.
    """
    validate_config(config)
    if exact is None:
        exact = config.get("mode", "auto") == "exact"
    quantities = canonical_quantities(config.get("quantities", ["Mhat", "M_sep"]))
    scales = [to_fraction(s) if isinstance(s, (str, int)) else s for s in config.get("scales", [1])]
    timing = bool(config.get("timing", False))
    instances = expand_instances(config, exact)
    work = [(ident, K, B, pool, quantities, scales, exact, timing)
            for ident, K, B, pool in instances]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            chunks = list(ex.map(_rows_for, work))
    else:
        chunks = [_rows_for(w) for w in work]
    rows = [r for chunk in chunks for r in chunk]
    ok = all(r.verdict is not False for r in rows)
    return rows, ok


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return v


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        d = asdict(r)
        w.writerow([_cell(d[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def rows_to_json(rows) -> str:
    out = []
    for r in rows:
        d = asdict(r)
        if isinstance(d["upper"], float) and math.isinf(d["upper"]):
            d["upper"] = "inf"
        out.append(d)
    return json.dumps(out, indent=2) + "\n"


def render(rows, fmt: str) -> str:
    return rows_to_csv(rows) if fmt == "csv" else rows_to_json(rows)


def dicts_to_csv(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_cell(r.get(c)) for c in columns])
    return buf.getvalue()
