import json
import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from convsep.bodies import HPolytope, LpBall, VPolytope
from convsep.counters import (BoundReport, CapExceeded, cover_from_separated,
                              exact_mhat_over_pool, exact_mtilde_over_pool,
                              exact_separated_over_pool, greedy_cover, mtilde_admissible,
                              packing_from_separated)
from convsep.oracle import check_certificate, check_cover, check_separated
from convsep.pools import CandidatePool, grid_pool, make_instance, make_rng, sample_pool

from oracles import brute_cover, brute_mhat, brute_msep, brute_mtilde, float_gauge

I = HPolytope([[1]])
SQUARE_VERTS = [(1, 1), (1, -1), (-1, 1), (-1, -1)]


def pool(*pts):
    return CandidatePool([tuple(p) if isinstance(p, (tuple, list)) else (p,) for p in pts])


def line(lo, hi):
    return pool(*range(lo, hi + 1))


class TestMhat:
    def test_grid(self):
        rep = exact_mhat_over_pool(line(-2, 2), I.scaled(2), I)
        assert rep.lower == rep.upper == 5 and rep.method == "pool-exact"
        assert check_certificate(rep.certificate).valid

    def test_single_point(self):
        assert exact_mhat_over_pool(pool(0), I, I).lower == 1

    def test_empty(self):
        assert exact_mhat_over_pool(CandidatePool([]), I, I).upper == 0

    def test_square_vertices_disc(self, disc):
        K = HPolytope([[1, 0], [0, 1]])
        rep = exact_mhat_over_pool(CandidatePool(SQUARE_VERTS), K, disc)
        assert rep.lower == 4
        assert brute_mhat(SQUARE_VERTS, float_gauge(disc)) == 4

    def test_pool_outside_K(self):
        with pytest.raises(ValueError):
            exact_mhat_over_pool(pool(0, 5), I, I)

    def test_duplicates_removed(self):
        assert exact_mhat_over_pool(pool(0, 0, 1, 1), I, I).lower == 2

    def test_greedy_fallback_tagged(self):
        p = grid_pool(I.scaled(3), F(1, 4))
        rep = exact_mhat_over_pool(p, I.scaled(3), I, cap=10)
        assert rep.method == "greedy" and rep.lower <= rep.upper
        assert check_certificate(rep.certificate).valid
        with pytest.raises(CapExceeded):
            exact_mhat_over_pool(p, I.scaled(3), I, cap=10, force_exact=True)


class TestSeparated:
    def test_grid(self):
        rep = exact_separated_over_pool(line(-2, 2), I)
        assert rep.lower == 5 and check_separated(rep.certificate).valid

    def test_conflict(self):
        assert exact_separated_over_pool(pool(0, F(1, 2)), I).lower == 1

    def test_empty(self):
        rep = exact_separated_over_pool(CandidatePool([]), I)
        assert rep.lower == rep.upper == 0

    def test_greedy_fallback(self):
        p = grid_pool(I.scaled(6), F(1, 4))
        rep = exact_separated_over_pool(p, I, cap=10)
        assert rep.method == "greedy" and rep.lower == 13
        with pytest.raises(CapExceeded):
            exact_separated_over_pool(p, I, cap=10, force_exact=True)


class TestMtilde:
    @pytest.mark.parametrize("R", [1, F(3, 2), 2, 5])
    def test_collinear_triple(self, R):
        rep = exact_mtilde_over_pool(pool(-R, 0, R), I)
        assert rep.lower == rep.upper == 2
        assert brute_mtilde([(-R,), (0,), (R,)], float_gauge(I)) == 2

    def test_single(self):
        assert exact_mtilde_over_pool(pool(3), I).lower == 1

    def test_square_vertices_disc(self, disc):
        assert exact_mtilde_over_pool(CandidatePool(SQUARE_VERTS), disc).lower == 4
        assert mtilde_admissible(SQUARE_VERTS, disc)

    def test_members_admissible(self):
        rep = exact_mtilde_over_pool(line(-3, 3), I)
        assert mtilde_admissible(rep.certificate.points, I)

    def test_greedy_fallback(self):
        rep = exact_mtilde_over_pool(line(-3, 3), I, cap=3)
        assert rep.method == "greedy" and rep.lower == 2


class TestCover:
    def test_center_covers_all(self):
        rep = greedy_cover(line(-1, 1), I)
        assert rep.lower == rep.upper == 1

    def test_grid(self):
        rep = greedy_cover(line(-2, 2), I)
        assert rep.upper == 2 and rep.method == "exhaustive"
        assert rep.extra["greedy"] in (2, 3)
        assert check_cover(rep.certificate).valid

    def test_single(self):
        assert greedy_cover(pool(7), I).upper == 1

    def test_empty_pool_rejected(self):
        with pytest.raises(ValueError):
            greedy_cover(CandidatePool([]), I)

    def test_large_pool_greedy(self):
        rep = greedy_cover(grid_pool(I.scaled(6), F(1, 2)), I, cap=10)
        assert rep.method == "greedy" and rep.lower <= rep.upper
        assert check_cover(rep.certificate).valid


class TestPacking:
    def test_relabel(self):
        rep = exact_separated_over_pool(line(-2, 2), I)
        pk = packing_from_separated(rep, I)
        assert pk.quantity == "M" and pk.lower == 5
        assert pk.instance["B"] == I.scaled(F(1, 2)).to_json()

    def test_rescale(self):
        rep = exact_separated_over_pool(line(-2, 2), I.scaled(2))
        assert rep.lower == 3
        assert packing_from_separated(rep, I.scaled(2)).lower == 3

    def test_empty(self):
        assert packing_from_separated(None, I) is None

    def test_wrong_quantity(self):
        with pytest.raises(ValueError):
            packing_from_separated(exact_mhat_over_pool(pool(0), I, I), I)


def test_bound_report_order():
    with pytest.raises(ValueError):
        BoundReport("N", 3, 2, "greedy")


# -- brute-force agreement on small pools ------------------------------------------

def _small_instance(seed):
    family = ["polytope", "hpolytope", "ellipsoid"][seed % 3]
    return make_instance(family, 2, seed, pool_size=6)


@pytest.mark.parametrize("seed", range(12))
def test_counts_match_brute_force(seed):
    inst = _small_instance(seed)
    pts = list(inst.pool.points)
    g = float_gauge(inst.B)
    assert exact_separated_over_pool(inst.pool, inst.B).lower == brute_msep(pts, g)
    assert exact_mhat_over_pool(inst.pool, inst.K, inst.B).lower == brute_mhat(pts, g)
    assert exact_mtilde_over_pool(inst.pool, inst.B).lower == brute_mtilde(pts, g)
    assert greedy_cover(inst.pool, inst.B).upper == brute_cover(pts, g)


# -- invariants ----------------------------------------------------------------------

@pytest.mark.parametrize("seed", range(10))
def test_mhat_at_most_msep(seed):
    inst = make_instance(["polytope", "ellipsoid"][seed % 2], 2 + seed % 2, seed, pool_size=10)
    assert (exact_mhat_over_pool(inst.pool, inst.K, inst.B).lower
            <= exact_separated_over_pool(inst.pool, inst.B).lower)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-12, 12), min_size=1, max_size=10), st.sampled_from([1, 2, 3]))
def test_one_dimension_coincidence(ks, denom):
    p = CandidatePool([(F(k, denom),) for k in ks])
    K = I.scaled(12)
    assert exact_mhat_over_pool(p, K, I).lower == exact_separated_over_pool(p, I).lower


@pytest.mark.parametrize("seed", range(10))
def test_maximal_separated_set_covers(seed):
    inst = make_instance("polytope", 2, seed, pool_size=12)
    assert check_cover(cover_from_separated(inst.pool.points, inst.B)).valid


@pytest.mark.parametrize("seed", range(10))
def test_cover_packing_chain(seed):
    inst = make_instance(["polytope", "hpolytope"][seed % 2], 2, seed, pool_size=12)
    B2 = inst.B.scaled(2)
    shrunk = B2.scaled(F(999999, 1000000))
    assert greedy_cover(inst.pool, B2).upper <= exact_separated_over_pool(inst.pool, shrunk).lower


@pytest.mark.parametrize("seed", range(8))
def test_mtilde_at_most_msep(seed):
    inst = make_instance("polytope", 2, seed, pool_size=9)
    rep = exact_mtilde_over_pool(inst.pool, inst.B)
    assert check_separated(rep.certificate).valid
    assert rep.lower <= exact_separated_over_pool(inst.pool, inst.B).lower


def test_determinism():
    def run():
        inst = make_instance("mixed", 2, 5, pool_size=10)
        reps = [exact_mhat_over_pool(inst.pool, inst.K, inst.B),
                exact_separated_over_pool(inst.pool, inst.B),
                exact_mtilde_over_pool(inst.pool, inst.B),
                greedy_cover(inst.pool, inst.B)]
        return json.dumps([r.to_json() for r in reps], sort_keys=True)
    assert run() == run()


def test_sample_pool_deterministic():
    a = sample_pool(I.scaled(2), 8, seed=3)
    b = sample_pool(I.scaled(2), 8, seed=3)
    assert a == b and a.provenance["seed"] == 3
