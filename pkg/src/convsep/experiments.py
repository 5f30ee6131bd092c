"""Observational sweeps: covering-number duality probe, gap experiments, gap search.

Nothing here asserts an inequality. The rows record pool-relative bounds with
enough provenance to regenerate every number.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .bodies import ConvexBody, radius_witness
from .counters import exact_mhat_over_pool, exact_separated_over_pool, greedy_cover
from .pools import CandidatePool, dedupe, make_instance, pool_from_spec
from .scalar import dump_number, neg

DEFAULT_PROBE_POOL = {"kind": "sample", "count": 16, "seed": 0}


def _log2(v):
    if v == math.inf:
        return math.inf
    return math.log2(v) if v > 0 else -math.inf


def _with_origin(pool: CandidatePool, dim: int) -> CandidatePool:
    zero = tuple(Fraction(0) for _ in range(dim))
    return CandidatePool(dedupe((zero,) + pool.points),
                         dict(pool.provenance, origin=True))


def log_ratio(top: int, bottom: int) -> float:
    """``log top / log bottom`` with ``0/0 = 1`` and ``x/0 = inf``."""
    lt, lb = _log2(top), _log2(bottom)
    if lb == 0:
        return 1.0 if lt == 0 else math.inf
    return lt / lb


def conjecture_probe(K: ConvexBody, B: ConvexBody, scales, a_values=(1, 2, 4),
                     pool_spec: dict | None = None) -> list:
    """Pool-relative ``log N(K, tB)`` next to ``log N(B polar, K polar / (t a))``.

    Pools include the origin, so ``N = 1`` whenever the body fits in one
    translate. No pass/fail judgement is made.
    """
    spec = pool_spec or DEFAULT_PROBE_POOL
    primal_pool = _with_origin(pool_from_spec(spec, K), K.dim)
    Bp, Kp = B.polar(), K.polar()
    dual_pool = _with_origin(pool_from_spec(spec, Bp), K.dim)
    rows = []
    for t in scales:
        primal = greedy_cover(primal_pool, B.scaled(t))
        for a in a_values:
            dual = greedy_cover(dual_pool, Kp.scaled(1 / (t * a) if not isinstance(t, Fraction)
                                                      else Fraction(1) / (t * a)))
            rows.append({
                "t": dump_number(t), "a": a,
                "logN_lower": _log2(primal.lower), "logN_upper": _log2(primal.upper),
                "logN_dual_lower": _log2(dual.lower), "logN_dual_upper": _log2(dual.upper),
                "method": primal.method if primal.method == dual.method else "mixed",
                "primal_pool": primal_pool.provenance, "dual_pool": dual_pool.provenance,
            })
    return rows


def gap_row(K, B, pool, c, ident: dict) -> dict:
    msep = exact_separated_over_pool(pool, B)
    mhat = exact_mhat_over_pool(pool, K, B.scaled(c))
    return dict(ident, c=dump_number(c), msep_lower=msep.lower, msep_upper=msep.upper,
                mhat_lower=mhat.lower, mhat_upper=mhat.upper,
                log_msep=_log2(msep.lower), log_mhat=_log2(mhat.lower),
                ratio=log_ratio(msep.lower, mhat.lower),
                method=msep.method if msep.method == mhat.method else "mixed",
                backend=mhat.backend)


def _anchored_pool(K, B, count, seed):
    from .pools import sample_pool
    pool = sample_pool(K, count, seed)
    x = radius_witness(K, B).point
    x = tuple(Fraction(v).limit_denominator(1 << 20) if not isinstance(v, Fraction) else v
              for v in x)
    # pull the anchor slightly inside so it stays in K after rounding
    shrink = Fraction(999, 1000)
    x = tuple(shrink * v for v in x)
    pts = dedupe(pool.points + (x, neg(x)))
    return CandidatePool(pts, dict(pool.provenance, anchors="radius"))


def ellipsoid_gap_experiment(dim: int, trials: int, c_values, pool_size: int = 10,
                             family: str = "ellipsoid", seed0: int = 0) -> list:
    """Compare ``log M_sep(E, B)`` with ``log Mhat(E, cB)`` on seeded random pairs.

    ``family="lp"`` runs the l_p-ball variant instead. Each pool is a seeded
    sample of ``E`` plus an antipodal pair along the radius direction, so
    ``Mhat >= 2`` whenever ``2R >= c`` and the ratio stays finite.
    """
    rows = []
    for k in range(trials):
        seed = seed0 + k
        inst = make_instance(family, dim, seed, pool_size)
        pool = _anchored_pool(inst.K, inst.B, pool_size, seed)
        ident = {"seed": seed, "family": family, "dim": dim, "pool_size": len(pool)}
        if family == "lp":
            ident["p"] = inst.K.p
        for c in c_values:
            rows.append(gap_row(inst.K, inst.B, pool, c, ident))
    rows.sort(key=lambda r: (r["seed"], float(Fraction(r["c"])) if isinstance(r["c"], str) else r["c"]))
    return rows


def search_gap(family: str, budget: int, c, dim: int = 2, pool_size: int = 10,
               seed0: int = 0, top: int | None = None, bodies=None) -> list:
    """Rank seeded instances by ``log M_sep(K, B) / log Mhat(K, cB)``, largest first.

    ``bodies=(K, B)`` pins the bodies and varies only the pool seed.
    Every candidate carries the provenance :func:`reverify` needs.
    """
    cands = []
    for k in range(budget):
        seed = seed0 + k
        if bodies is None:
            inst = make_instance(family, dim, seed, pool_size)
            K, B, pool = inst.K, inst.B, inst.pool
            prov = dict(inst.provenance)
        else:
            from .pools import sample_pool
            K, B = bodies
            pool = sample_pool(K, pool_size, seed)
            prov = {"family": "fixed", "dim": K.dim, "seed": seed, "pool_size": pool_size,
                    "K": K.to_json(), "B": B.to_json()}
        row = gap_row(K, B, pool, c, {"seed": seed})
        row["provenance"] = prov
        cands.append(row)
    cands.sort(key=lambda r: (-r["ratio"], r["seed"]))
    for rank, row in enumerate(cands):
        row["rank"] = rank
    return cands[:top] if top else cands


def reverify(candidate: dict) -> bool:
    """Regenerate a search candidate from provenance and compare its counts."""
    from .bodies import body_from_json
    from .pools import sample_pool
    prov = candidate["provenance"]
    c = candidate["c"]
    c = Fraction(c) if isinstance(c, str) else c
    if prov["family"] == "fixed":
        K, B = body_from_json(prov["K"]), body_from_json(prov["B"])
        pool = sample_pool(K, prov["pool_size"], prov["seed"])
    else:
        inst = make_instance(prov["family"], prov["dim"], prov["seed"], prov["pool_size"])
        K, B, pool = inst.K, inst.B, inst.pool
    row = gap_row(K, B, pool, c, {"seed": prov["seed"]})
    keys = ("msep_lower", "msep_upper", "mhat_lower", "mhat_upper")
    return all(row[k] == candidate[k] for k in keys)
