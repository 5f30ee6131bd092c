"""Command-line entry point: ``convsep <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .bodies import body_from_json, radius_witness
from .config import ConfigError, canonical_quantities, dicts_to_csv, render, run_config
from .counters import (CapExceeded, exact_mhat_over_pool, exact_mtilde_over_pool,
                       exact_separated_over_pool, greedy_cover, packing_from_separated)
from .duality import segment_trace, theorem_tild_check, transform_certificate
from .experiments import conjecture_probe, ellipsoid_gap_experiment, reverify, search_gap
from .oracle import ConvexSeparationCertificate, certificate_from_json, check_certificate
from .pools import pool_from_spec
from .scalar import dump_number, to_fraction

PROBE_COLUMNS = ("t", "a", "logN_lower", "logN_upper", "logN_dual_lower", "logN_dual_upper",
                 "method")
GAP_COLUMNS = ("seed", "family", "dim", "p", "pool_size", "c", "msep_lower", "msep_upper",
               "mhat_lower", "mhat_upper", "log_msep", "log_mhat", "ratio", "method", "backend")


def _load(arg: str):
    if arg == "-":
        return json.load(sys.stdin)
    if arg.lstrip().startswith("{"):
        return json.loads(arg)
    return json.loads(Path(arg).read_text())


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _number(s: str):
    return to_fraction(s) if "/" in s or "." not in s else float(s)


def _instance(args):
    d = _load(args.instance)
    K = body_from_json(d["K"], exact=args.exact or None)
    B = body_from_json(d["B"], exact=args.exact or None)
    return d, K, B


def cmd_bodies(args) -> int:
    body = body_from_json(_load(args.body), exact=args.exact or None)
    if args.action == "polar":
        _emit(_json(body.polar().to_json()), args.out)
        return 0
    info = {"body": body.to_json(), "dim": body.dim, "backend": body.backend,
            "degenerate": body.degenerate,
            "extents": [dump_number(body.support(tuple(int(i == k) for i in range(body.dim))))
                        for k in range(body.dim)]}
    if args.point:
        x = tuple(_number(v) for v in args.point.split(","))
        info["gauge"] = dump_number(body.gauge(x))
        info["support"] = dump_number(body.support(x))
    _emit(_json(info), args.out)
    return 0


def cmd_count(args) -> int:
    d, K, B = _instance(args)
    spec = d.get("pool", {"kind": "grid", "step": 1})
    if args.seed is not None and spec.get("kind") == "sample":
        spec = dict(spec, seed=args.seed)
    pool = pool_from_spec(spec, K)
    reports = []
    for q in canonical_quantities(d.get("quantities", ["Mhat", "M_sep"])):
        if q == "N":
            reports.append(greedy_cover(pool, B))
        elif q == "M_sep":
            reports.append(exact_separated_over_pool(pool, B, force_exact=args.exact))
        elif q == "M":
            B2 = B.scaled(2)
            reports.append(packing_from_separated(
                exact_separated_over_pool(pool, B2, force_exact=args.exact), B2))
        elif q == "Mhat":
            reports.append(exact_mhat_over_pool(pool, K, B, force_exact=args.exact))
        elif q == "Mtilde":
            reports.append(exact_mtilde_over_pool(pool, B, force_exact=args.exact))
        else:
            raise ConfigError(f"unknown quantity {q!r}")
    _emit(_json([r.to_json() for r in reports]), args.out)
    return 0


def cmd_duality(args) -> int:
    if args.action == "transform":
        d = _load(args.instance)
        if d.get("kind") == "convex_separation":
            cert = certificate_from_json(d)
        else:
            _, K, B = _instance(args)
            pool = pool_from_spec(d.get("pool", {"kind": "grid", "step": 1}), K)
            cert = exact_mhat_over_pool(pool, K, B).certificate
        trace = transform_certificate(cert, use_sequence_radius=args.sequence_radius)
        _emit(_json(trace.to_json()), args.out)
        return 0 if trace.check.valid else 1
    if args.action == "segment":
        _, K, B = _instance(args)
        trace = segment_trace(K, B)
        _emit(_json(trace.to_json()), args.out)
        return 0 if trace.check.valid else 1
    if args.action == "check":
        d, K, B = _instance(args)
        pool = pool_from_spec(d.get("pool", {"kind": "grid", "step": 1}), K)
        report = theorem_tild_check(K, B, pool, use_sequence_radius=args.sequence_radius)
        _emit(_json(report.to_json(full=args.full)), args.out)
        return 0 if report.verdict else 1
    # probe
    d, K, B = _instance(args)
    scales = [_number(s) for s in args.scales.split(",")] if args.scales else d.get("scales", [1])
    spec = d.get("pool")
    rows = conjecture_probe(K, B, scales, pool_spec=spec)
    _emit(dicts_to_csv(rows, PROBE_COLUMNS), args.out)
    return 0


def cmd_experiment(args) -> int:
    c_values = [_number(s) for s in args.c.split(",")]
    rows = ellipsoid_gap_experiment(args.dim, args.trials, c_values, args.pool_size,
                                    args.family, args.seed or 0)
    _emit(dicts_to_csv(rows, GAP_COLUMNS), args.out)
    return 0


def cmd_search_gap(args) -> int:
    if args.reverify:
        cands = _load(args.reverify)
        results = [{"seed": c["seed"], "rank": c["rank"], "reproduced": reverify(c)} for c in cands]
        _emit(_json(results), args.out)
        return 0 if all(r["reproduced"] for r in results) else 1
    cands = search_gap(args.family, args.budget, _number(args.c), args.dim, args.pool_size,
                       args.seed or 0, args.top)
    _emit(_json(cands), args.out)
    return 0


def cmd_verify(args) -> int:
    cert = certificate_from_json(_load(args.certificate))
    report = check_certificate(cert)
    _emit(_json(report.to_json()), args.out)
    return 0 if report.valid else 1


def cmd_run(args) -> int:
    config = _load(args.config)
    rows, ok = run_config(config, jobs=args.jobs, exact=True if args.exact else None)
    _emit(render(rows, config.get("format", "json")), args.out)
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--exact", action="store_true",
                        help="require rational arithmetic and exact algorithms; error otherwise")
    common.add_argument("--seed", type=int, default=None, help="base seed for sampled pools/instances")
    common.add_argument("--jobs", type=int, default=1, help="parallel instances (run only)")
    common.add_argument("--out", default=None, help="write output here instead of stdout")

    p = argparse.ArgumentParser(prog="convsep", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bodies", parents=[common], help="inspect a body descriptor")
    b.add_argument("action", choices=["info", "polar"])
    b.add_argument("body", help="body JSON (file, inline, or - for stdin)")
    b.add_argument("--point", help="comma-separated point for gauge/support values")
    b.set_defaults(func=cmd_bodies)

    c = sub.add_parser("count", parents=[common], help="pool-relative N, M_sep, M, Mhat, Mtilde")
    c.add_argument("instance")
    c.set_defaults(func=cmd_count)

    d = sub.add_parser("duality", parents=[common], help="duality certificates")
    d.add_argument("action", choices=["transform", "segment", "check", "probe"])
    d.add_argument("instance", help="instance JSON, or a certificate JSON for transform")
    d.add_argument("--sequence-radius", action="store_true",
                   help="bucket with max |<y_j, x_j>| instead of radius(K, B)")
    d.add_argument("--full", action="store_true", help="include all certificates in check output")
    d.add_argument("--scales", help="comma-separated t values for probe")
    d.set_defaults(func=cmd_duality)

    e = sub.add_parser("experiment", parents=[common], help="observational sweeps")
    e.add_argument("kind", choices=["ellipsoid"])
    e.add_argument("--dim", type=int, default=2)
    e.add_argument("--trials", type=int, default=10)
    e.add_argument("--c", default="1", help="comma-separated scale values c")
    e.add_argument("--pool-size", type=int, default=10)
    e.add_argument("--family", choices=["ellipsoid", "lp"], default="ellipsoid")
    e.set_defaults(func=cmd_experiment)

    s = sub.add_parser("search-gap", parents=[common], help="rank instances by log M_sep / log Mhat")
    s.add_argument("--family", default="polytope")
    s.add_argument("--budget", type=int, default=20)
    s.add_argument("--c", default="1")
    s.add_argument("--dim", type=int, default=2)
    s.add_argument("--pool-size", type=int, default=10)
    s.add_argument("--top", type=int, default=None)
    s.add_argument("--reverify", help="candidate JSON file to regenerate and compare")
    s.set_defaults(func=cmd_search_gap)

    v = sub.add_parser("verify", parents=[common], help="check a certificate JSON")
    v.add_argument("certificate")
    v.set_defaults(func=cmd_verify)

    r = sub.add_parser("run", parents=[common], help="run an experiment config")
    r.add_argument("config")
    r.set_defaults(func=cmd_run)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, CapExceeded, ValueError) as exc:
        print(f"convsep: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
