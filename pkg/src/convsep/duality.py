"""Duality certificates for convexly separated sequences.

Given a B-convexly separated sequence ``x_1..x_N`` in ``K`` with witnesses
``y_j`` in the polar of ``B``, :func:`transform_certificate` produces a
``(K polar)/2``-convexly separated sequence of those witnesses in ``B polar``:
bucket the diagonal values ``<y_j, x_j>`` into ``ceil(4R)`` intervals of
length at most 1/2, keep the fullest bucket, and list its witnesses in
reverse order, certified by ``2 x_j``. :func:`segment_certificate` gives
the complementary bound ``floor(4R) + 1`` from a longest segment of
``B polar``. Together they show ``Mhat(K, B) <= Mhat(B polar, K polar / 2)^2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .bodies import ConvexBody, radius_witness
from .counters import BoundReport, exact_mhat_over_pool
from .oracle import (CheckReport, ConvexSeparationCertificate, OracleError,
                     check_convex_separation, convex_separation_witness)
from .pools import CandidatePool
from .scalar import ceil, dot, dump_number, floor, is_exact, smul


def _half(body: ConvexBody):
    return body.scaled(Fraction(1, 2) if body.exact else 0.5)


def dual_bodies(K: ConvexBody, B: ConvexBody):
    """``(B polar, K polar / 2)``: the body pair on the other side of the inequality."""
    return B.polar(), _half(K.polar())


@dataclass
class TransformTrace:
    input: ConvexSeparationCertificate
    R: object
    radius_source: str
    n_buckets: int
    boundaries: tuple
    diagonal: tuple
    bucket_of: tuple
    chosen_bucket: int
    members: tuple
    output: ConvexSeparationCertificate
    check: CheckReport
    reversed_order: bool = True

    @property
    def bound(self) -> int:
        """``ceil(N / ceil(4R))``, the guaranteed output length."""
        n = len(self.input)
        return -(-n // self.n_buckets)

    def to_json(self):
        return {"R": dump_number(self.R), "radius_source": self.radius_source,
                "n_buckets": self.n_buckets,
                "boundaries": [dump_number(b) for b in self.boundaries],
                "diagonal": [dump_number(v) for v in self.diagonal],
                "bucket_of": list(self.bucket_of), "chosen_bucket": self.chosen_bucket,
                "members": list(self.members), "reversed": self.reversed_order,
                "input_length": len(self.input), "output_length": len(self.output),
                "bound": self.bound, "check": self.check.to_json(),
                "input": self.input.to_json(), "output": self.output.to_json()}


def _bucket_index(v, R, width, nb) -> int:
    k = floor((v + R) / width)
    return min(max(k, 0), nb - 1)


def transform_certificate(cert: ConvexSeparationCertificate, use_sequence_radius: bool = False,
                          reverse: bool = True) -> TransformTrace:
    """Map a certificate for ``(K, B)`` to one for ``(B polar, K polar / 2)``.

    ``use_sequence_radius`` replaces ``R = radius(K, B)`` by the smaller
    ``max_j |<y_j, x_j>|``; both bound the diagonal values. ``reverse=False``
    keeps the original order and exists only to show that the reversal matters.
    """
    if len(cert.witnesses) != len(cert.points):
        cert = cert.with_witnesses()
    report = check_convex_separation(cert)
    if not report.valid:
        raise ValueError(f"input certificate is invalid: {report.reason}")
    K, B = cert.K, cert.B
    diag = tuple(dot(y, x) for x, y in zip(cert.points, cert.witnesses))
    seq_R = max((abs(v) for v in diag), default=0)
    if use_sequence_radius:
        R, source = seq_R, "sequence"
    else:
        rr = radius_witness(K, B)
        R, source = rr.value, "radius"
        if not rr.closed_form and seq_R > R:
            R, source = seq_R, "radius-lower-bound+sequence"
    if not R > 0:
        if use_sequence_radius and cert.points:
            R = Fraction(1, 4)
        else:
            raise ValueError("radius of K with respect to B is zero")
    nb = ceil(4 * R)
    width = 2 * R / nb
    boundaries = tuple(-R + k * width for k in range(nb + 1))
    bucket_of = tuple(_bucket_index(v, R, width, nb) for v in diag)
    counts = [0] * nb
    for k in bucket_of:
        counts[k] += 1
    chosen = max(range(nb), key=lambda k: (counts[k], -k))
    members = tuple(j for j, k in enumerate(bucket_of) if k == chosen)
    order = tuple(reversed(members)) if reverse else members
    out_points = [cert.witnesses[j] for j in order]
    zero = tuple(0 for _ in range(K.dim))
    out_witnesses = [zero] + [smul(2, cert.points[j]) for j in order[1:]]
    dK, dB = dual_bodies(K, B)
    out = ConvexSeparationCertificate(dK, dB, out_points, out_witnesses)
    return TransformTrace(cert, R, source, nb, boundaries, diag, bucket_of, chosen,
                          members, out, check_convex_separation(out), reverse)


@dataclass
class SegmentTrace:
    R: object
    direction: tuple
    approximate: bool
    certificate: ConvexSeparationCertificate
    check: CheckReport

    def to_json(self):
        return {"R": dump_number(self.R), "direction": [dump_number(v) for v in self.direction],
                "approximate": self.approximate, "length": len(self.certificate),
                "check": self.check.to_json(), "certificate": self.certificate.to_json()}


def segment_trace(K: ConvexBody, B: ConvexBody) -> SegmentTrace:
    rr = radius_witness(K, B)
    R = rr.value
    if not R > 0:
        raise ValueError("radius of K with respect to B is zero")
    dK, dB = dual_bodies(K, B)
    # y in B polar with <y, x*> = gauge_B(x*) = R, so the K-polar gauge of y is R
    y = dK.support_point(rr.point)
    count = floor(4 * R) + 1
    step = 1 / (2 * R)
    points = [smul(-1 + k * step, y) for k in range(count)]
    witnesses = []
    for j, p in enumerate(points):
        # collinear and sorted: the hull of the earlier points is their end segment
        prior = [] if j == 0 else [points[0], points[j - 1]]
        w = convex_separation_witness(p, prior, dB)
        if w is None:
            raise OracleError(f"segment point {j} is not separated; radius maximizer is inaccurate")
        witnesses.append(w)
    witnesses[0] = tuple(0 for _ in range(K.dim))
    cert = ConvexSeparationCertificate(dK, dB, points, witnesses)
    return SegmentTrace(R, y, not rr.closed_form, cert,
                        check_convex_separation(cert))


def segment_certificate(K: ConvexBody, B: ConvexBody) -> ConvexSeparationCertificate:
    """``floor(4R) + 1`` equally spaced points on a longest segment of ``B polar``."""
    return segment_trace(K, B).certificate


@dataclass
class DualityReport:
    instance: dict
    lhs: BoundReport
    transform: TransformTrace
    segment: SegmentTrace
    verdict: bool
    notes: list = field(default_factory=list)

    @property
    def lhs_size(self):
        return self.lhs.lower

    def to_json(self, full: bool = False):
        d = {"instance": self.instance, "lhs_size": self.lhs_size, "lhs_method": self.lhs.method,
             "transform_size": len(self.transform.output),
             "transform_bound": self.transform.bound,
             "transform_valid": self.transform.check.valid,
             "segment_size": len(self.segment.certificate),
             "segment_valid": self.segment.check.valid,
             "R": dump_number(self.transform.R), "n_buckets": self.transform.n_buckets,
             "backend": self.lhs.backend, "verdict": self.verdict, "notes": self.notes}
        if full:
            d["lhs_certificate"] = self.lhs.certificate.to_json()
            d["transform"] = self.transform.to_json()
            d["segment"] = self.segment.to_json()
        return d


def theorem_tild_check(K: ConvexBody, B: ConvexBody, pool: CandidatePool,
                       use_sequence_radius: bool = False) -> DualityReport:
    """Check ``Mhat(K, B) <= Mhat(B polar, K polar / 2)^2`` on a pool.

    The left side is the pool-exact ``Mhat``; the right side is witnessed by
    the transformed and segment certificates, both re-checked from scratch.
    """
    lhs = exact_mhat_over_pool(pool, K, B)
    if lhs.certificate is None:
        raise ValueError("pool is empty")
    tr = transform_certificate(lhs.certificate, use_sequence_radius)
    seg = segment_trace(K, B)
    notes = []
    if not tr.check.valid:
        notes.append(f"transform output failed: {tr.check.reason}")
    if len(tr.output) < tr.bound:
        notes.append("transform output shorter than ceil(N / ceil(4R))")
    if not seg.check.valid:
        notes.append(f"segment certificate failed: {seg.check.reason}")
    if seg.approximate:
        notes.append("radius computed numerically; segment is approximate")
    rhs = max(len(tr.output) if tr.check.valid else 0,
              len(seg.certificate) if seg.check.valid else 0)
    verdict = rhs * rhs >= lhs.lower and tr.check.valid and len(tr.output) >= tr.bound
    return DualityReport(lhs.instance, lhs, tr, seg, verdict, notes)
