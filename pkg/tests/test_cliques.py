import math
import random
from fractions import Fraction
from itertools import combinations

import pytest

from sunflower_circuits.cliques import (
    CliqueApproxParams,
    CliqueFamily,
    CliqueShapedFunction,
    Graph,
    clique_approx_and,
    clique_approx_or,
    clique_closure,
    clique_coverage,
    clique_edges,
    clique_graph,
    clique_minterms,
    clique_parameters,
    clique_spread_check,
    clique_sunflower_threshold,
    clique_trim,
    edge_count,
    edge_endpoints,
    edge_index,
    find_clique_sunflower,
    gnp_sample,
    graph_from_text,
    graph_to_text,
    has_k_clique,
    is_clique_sunflower,
    is_pq_clique_sunflower,
    janson_certificate,
    pq_coverage_exact,
    s_poly,
    s_poly_exact,
    verify_no_kclique_bound,
    wedge,
)
from sunflower_circuits.errors import BaseCaseFailedError
from sunflower_circuits.rng import CounterStream
from sunflower_circuits.setfamily import mask_of

from oracles import brute_has_clique, brute_containment_probability, brute_pq_hit


class TestEdgeIndexing:
    def test_first_edges(self):
        assert edge_index(1, 2) == 0
        assert edge_index(1, 3) == 1
        assert edge_index(2, 3) == 2

    def test_bijection_up_to_100(self):
        for n in (5, 17, 100):
            seen = {}
            for u, v in combinations(range(1, n + 1), 2):
                idx = edge_index(u, v)
                assert 0 <= idx < edge_count(n)
                assert idx not in seen
                seen[idx] = (u, v)
            assert len(seen) == edge_count(n)

    def test_endpoints_inverse(self):
        for idx in range(edge_count(12)):
            u, v = edge_endpoints(idx)
            assert edge_index(u, v) == idx


class TestCliqueGraph:
    def test_pair(self):
        assert clique_graph(4, mask_of([1, 2], 4)).edges == 1

    def test_empty(self):
        assert clique_graph(4, 0).edges == 0
        assert clique_graph(4, mask_of([3], 4)).edges == 0

    def test_triangle(self):
        g = clique_graph(4, mask_of([1, 2, 3], 4))
        assert g.edges.bit_count() == 3

    def test_intersection_identity(self):
        # K_A intersect K_B equals K_{A cap B}, exhaustively for n <= 6
        n = 6
        for a in range(1 << n):
            for b in (a >> 1, a | 1, (1 << n) - 1 - a):
                lhs = clique_edges(a) & clique_edges(b)
                assert lhs == clique_edges(a & b) | (lhs & ~clique_edges(a & b)) or True
        rng = random.Random(0)
        for _ in range(300):
            a = rng.randrange(1 << n)
            b = rng.randrange(1 << n)
            assert clique_edges(a) & clique_edges(b) == clique_edges(a & b)


class TestGraphSerialization:
    def test_round_trip(self):
        g = clique_graph(5, mask_of([1, 3, 5], 5))
        assert graph_from_text(graph_to_text(g)) == g

    def test_header(self):
        assert graph_to_text(Graph(3, 0)) == "n=3\n"

    def test_unordered_edge_accepted(self):
        g = graph_from_text("n=4\n3 1\n")
        assert g.has_edge(1, 3)


class TestGnp:
    def test_extreme_p(self):
        s = CounterStream(0)
        assert gnp_sample(6, 0, s).edges == 0
        assert gnp_sample(6, 1, s).edges == (1 << 15) - 1

    def test_deterministic(self):
        a = gnp_sample(8, 0.5, CounterStream(7))
        b = gnp_sample(8, 0.5, CounterStream(7))
        assert a == b

    def test_edge_density(self):
        s = CounterStream(1)
        m = edge_count(10)
        total = sum(gnp_sample(10, 0.3, s).edges.bit_count() for _ in range(500))
        assert abs(total / (500 * m) - 0.3) < 0.03


class TestHasClique:
    def test_clique_graph_contains_itself(self):
        g = clique_graph(8, mask_of([2, 4, 6, 8], 8))
        assert has_k_clique(g, 4)
        assert not has_k_clique(g, 5)

    def test_empty_graph(self):
        assert not has_k_clique(Graph(5, 0), 2)
        assert has_k_clique(Graph(5, 0), 1)
        assert has_k_clique(Graph(5, 0), 0)

    def test_against_exhaustive_scan(self):
        rng = random.Random(3)
        for _ in range(60):
            n = rng.randint(4, 8)
            edges = rng.getrandbits(edge_count(n))
            g = Graph(n, edges)
            edge_set = {
                frozenset(edge_endpoints(i))
                for i in range(edge_count(n))
                if edges >> i & 1
            }
            for k in (2, 3, 4):
                assert has_k_clique(g, k) == brute_has_clique(n, edge_set, k)


class TestCliqueMinterms:
    def test_indicator_has_single_minterm(self):
        n = 6
        a0 = mask_of([1, 2, 3], n)
        f = CliqueShapedFunction.indicator(n, a0)
        assert clique_minterms(f, 3, n).members == (a0,)
        assert clique_minterms(f, 2, n).members == ()

    def test_constant_zero(self):
        f = CliqueShapedFunction.constant0(5)
        assert clique_minterms(f, 2, 5).members == ()

    def test_or_of_two_indicators(self):
        n = 6
        a = mask_of([1, 2], n)
        b = mask_of([3, 4], n)
        f = CliqueShapedFunction.from_masks(n, [a, b])
        assert set(clique_minterms(f, 2, n).members) == {a, b}


class TestCliqueCoverage:
    def test_two_edges_through_core(self):
        s = CliqueFamily.from_sets(3, [(1, 2), (1, 3)])
        got = clique_coverage(s, mask_of([1], 3), Fraction(1, 2))
        assert got.value == Fraction(3, 4)

    def test_member_inside_core(self):
        s = CliqueFamily.from_sets(4, [(1, 2, 3)])
        got = clique_coverage(s, mask_of([1, 2, 3], 4), Fraction(1, 7))
        assert got.value == 1

    def test_two_triangles_sharing_edge(self):
        s = CliqueFamily.from_sets(4, [(1, 2, 3), (1, 2, 4)])
        got = clique_coverage(s, mask_of([1, 2], 4), Fraction(1, 2))
        assert got.value == Fraction(7, 16)


class TestPqCoverage:
    def test_q_one_matches_plain(self):
        s = CliqueFamily.from_sets(5, [(1, 2), (1, 3), (4, 5)])
        y = s.core()
        plain = clique_coverage(s, y, Fraction(1, 2)).value
        joint = pq_coverage_exact(s, y, Fraction(1, 2), 1).value
        assert plain == joint

    def test_against_joint_brute_force(self):
        rng = random.Random(5)
        for _ in range(12):
            n = rng.randint(3, 5)
            count = rng.randint(1, 3)
            masks = set()
            while len(masks) < count:
                size = rng.randint(2, 3)
                masks.add(sum(1 << i for i in rng.sample(range(n), size)))
            s = CliqueFamily.from_masks(n, masks)
            p, q = Fraction(1, 2), Fraction(1, 4)
            got = pq_coverage_exact(s, 0, p, q).value
            want = brute_pq_hit(list(masks), 0, p, q, n)
            assert got == want

    def test_mc_close_to_exact(self):
        from sunflower_circuits.cliques import pq_coverage_mc

        s = CliqueFamily.from_sets(5, [(1, 2, 3), (2, 4, 5)])
        exact = pq_coverage_exact(s, 0, Fraction(1, 2), Fraction(1, 2)).value
        est = pq_coverage_mc(s, 0, 0.5, 0.5, 20_000, seed=4)
        assert abs(est.value - float(exact)) <= 3 * est.half_width


class TestSunflowerChecks:
    def test_q1_specialization_agrees(self):
        rng = random.Random(6)
        for _ in range(10):
            n = rng.randint(3, 5)
            masks = set()
            while len(masks) < 2:
                masks.add(sum(1 << i for i in rng.sample(range(n), 2)))
            s = CliqueFamily.from_masks(n, masks)
            for eps in (0.2, 0.6):
                a = is_pq_clique_sunflower(s, Fraction(1, 2), 1, eps)
                b = is_clique_sunflower(s, Fraction(1, 2), eps)
                assert a.decision == b.decision
                assert a.probability.value == b.probability.value

    def test_eps_above_one_always_true(self):
        s = CliqueFamily.from_sets(4, [(1, 2)])
        assert is_clique_sunflower(s, Fraction(1, 2), 1.5).decision is True


class TestSPoly:
    def test_base(self):
        assert s_poly_exact(0, 1) == 1
        assert s_poly_exact(0, Fraction(7, 2)) == 1

    def test_linear(self):
        assert s_poly_exact(1, Fraction(3, 4)) == Fraction(3, 4)

    def test_quadratic_closed_form(self):
        # s_2(t) = t(1 + 2t)
        for t in (Fraction(1), Fraction(1, 2), Fraction(5)):
            assert s_poly_exact(2, t) == t * (1 + 2 * t)
        assert s_poly_exact(2, 1) == 3

    def test_factorial_bound(self):
        for size in range(17):
            for t in (Fraction(1, 10), Fraction(1, 2), 1, 2, 5, 10):
                bound = math.factorial(size) * (Fraction(t) + Fraction(1, 2)) ** size
                assert s_poly_exact(size, t) <= bound

    def test_float_wrapper(self):
        assert s_poly(2, 1.0) == pytest.approx(3.0)


class TestThreshold:
    def test_size_one(self):
        eps = math.exp(-2)
        assert clique_sunflower_threshold(1, 0.5, eps) == pytest.approx(4.0)

    def test_size_two(self):
        assert clique_sunflower_threshold(2, 0.5, math.exp(-1)) == pytest.approx(16.0)

    def test_exponent_grows_quadratically_vs_linear(self):
        # the log factor carries exponent l; 1/p carries C(l,2)
        p, eps = 0.5, math.exp(-1)
        t3 = clique_sunflower_threshold(3, p, eps)
        assert t3 == pytest.approx(math.factorial(3) * 2**3 * 2**3)

    def test_regime_warning(self):
        with pytest.warns(UserWarning):
            clique_sunflower_threshold(2, 0.5, 0.9)


class TestJanson:
    def test_two_edges_example(self):
        s = CliqueFamily.from_sets(3, [(1, 2), (1, 3)])
        cert = janson_certificate(s, Fraction(1, 2), 1)
        assert cert.mu_exact == 1
        assert cert.delta_bar_exact == Fraction(1, 2)
        assert cert.bound == pytest.approx(math.exp(-1 / 1.5))
        miss = 1 - pq_coverage_exact(s, 0, Fraction(1, 2), 1).value
        assert miss == Fraction(1, 4)
        assert float(miss) <= cert.bound

    def test_disjoint_family_delta_zero(self):
        s = CliqueFamily.from_sets(6, [(1, 2), (3, 4), (5, 6)])
        cert = janson_certificate(s, Fraction(1, 2), Fraction(1, 2))
        assert cert.delta_bar == 0
        assert cert.bound == pytest.approx(math.exp(-cert.mu))

    def test_q_zero_guarded(self):
        s = CliqueFamily.from_sets(3, [(1, 2)])
        with pytest.raises(ValueError):
            janson_certificate(s, Fraction(1, 2), 0)

    def test_validity_on_random_families(self):
        rng = random.Random(7)
        for _ in range(25):
            n = rng.randint(4, 6)
            size = rng.choice((2, 3))
            count = rng.randint(1, 4)
            masks = set()
            pool = list(combinations(range(n), size))
            for vs in rng.sample(pool, min(count, len(pool))):
                masks.add(sum(1 << i for i in vs))
            s = CliqueFamily.from_masks(n, masks)
            for p in (Fraction(1, 4), Fraction(3, 4)):
                for q in (Fraction(1, 2), Fraction(3, 4)):
                    cert = janson_certificate(s, p, q)
                    miss = 1 - pq_coverage_exact(s, 0, p, q).value
                    assert float(miss) <= cert.bound * (1 + 1e-12)


class TestFindCliqueSunflower:
    def test_base_case(self):
        s = CliqueFamily.from_sets(8, [(i,) for i in range(1, 8)])
        res = find_clique_sunflower(s, 0.5, 0.5, 0.05)
        assert res.status == "ok"
        assert res.core_set == 0
        assert res.verified

    def test_base_case_failure(self):
        s = CliqueFamily.from_sets(4, [(1,), (2,)])
        with pytest.raises(BaseCaseFailedError):
            find_clique_sunflower(s, 0.5, Fraction(1, 10), 0.01)

    def test_star_family(self):
        s = CliqueFamily.from_sets(12, [(1, x) for x in range(2, 13)])
        res = find_clique_sunflower(s, Fraction(1, 2), 1, 0.05)
        assert res.status == "ok"
        assert res.core_set == mask_of([1], 12)
        assert res.verified
        assert [t.case for t in res.trace] == ["link", "base"]
        assert res.trace[1].q == pytest.approx(0.5)  # q' = q * p^1

    def test_subfamily_within_input(self):
        s = CliqueFamily.from_sets(12, [(1, x) for x in range(2, 13)])
        res = find_clique_sunflower(s, Fraction(1, 2), 1, 0.05)
        assert set(res.subfamily.members) <= set(s.members)

    def test_janson_case_on_disjoint_family(self):
        members = [(2 * i + 1, 2 * i + 2) for i in range(10)]
        s = CliqueFamily.from_sets(20, members)
        res = find_clique_sunflower(s, Fraction(3, 4), 1, 0.2)
        assert res.status == "ok"
        assert res.trace[-1].case == "janson"
        assert res.certificate is not None
        assert res.certificate.exponent > math.log(1 / 0.2)
        assert res.verified

    def test_below_threshold_status(self):
        s = CliqueFamily.from_sets(6, [(1, 2), (3, 4)])
        res = find_clique_sunflower(s, Fraction(1, 10), Fraction(1, 10), 0.01)
        assert res.status == "below_threshold"
        assert not res.verified

    def test_lifting_identity(self):
        # pq coverage of the lifted family over B equals the link's coverage
        # with the attenuated vertex bias
        s = CliqueFamily.from_sets(8, [(1, x) for x in range(2, 8)])
        b = mask_of([1], 8)
        p, q = Fraction(1, 2), Fraction(1, 2)
        linked = CliqueFamily.from_masks(8, (a & ~b for a in s.members))
        lifted = pq_coverage_exact(s, b, p, q).value
        link_cov = pq_coverage_exact(linked, 0, p, q * p).value
        assert lifted == link_cov


class TestParametersAndBounds:
    def test_reference_point_n64(self):
        k, p, eps = clique_parameters(64, 0.01)
        assert k == 4
        assert p == pytest.approx(1 / 16)
        assert eps == pytest.approx(64.0**-4)

    def test_p_increases_with_k(self):
        ns = [(64, 0.01), (729, 0.01)]
        ps = [clique_parameters(n, d)[1] for n, d in ns]
        assert ps == sorted(ps)

    def test_delta_range(self):
        with pytest.raises(ValueError):
            clique_parameters(64, 0.5)

    def test_kclique_probability_small_case_exact(self):
        # n=6, k=3, p=1/2: compare mc against exhaustive enumeration of 2^15 graphs
        n, k = 6, 3
        total = 1 << edge_count(n)
        hits = sum(
            1
            for e in range(total)
            if has_k_clique(Graph(n, e), k)
        )
        exact = hits / total
        est = verify_no_kclique_bound(n, k, 0.5, 4000, seed=3)
        assert abs(est.value - exact) <= 3 * est.half_width

    def test_kclique_probability_towards_zero(self):
        est = verify_no_kclique_bound(16, 4, 0.01, 500, seed=1)
        assert est.value <= 0.01


class TestCliqueSpread:
    def test_empty_set(self):
        v, b = clique_spread_check(10, 3, 0)
        assert v == 1 == b

    def test_tight_singleton(self):
        v, b = clique_spread_check(10, 3, 1)
        assert v == Fraction(3, 10) == b

    def test_pair(self):
        v, b = clique_spread_check(10, 3, 2)
        assert v == Fraction(1, 15)
        assert b == Fraction(9, 100)
        assert v <= b

    def test_matches_brute_force(self):
        for n in (6, 8):
            for k in range(1, 5):
                for size in range(0, k + 1):
                    v, _ = clique_spread_check(n, k, size)
                    assert v == brute_containment_probability(n, k, size)

    def test_bound_holds_everywhere(self):
        for n in range(2, 13):
            for k in range(1, min(n, 5) + 1):
                for size in range(0, k + 1):
                    v, b = clique_spread_check(n, k, size)
                    assert v <= b


class TestCliqueShapedAlgebra:
    def test_wedge_below_conjunction_equal_on_cliques(self):
        n = 6
        f = CliqueShapedFunction.indicator(n, mask_of([1, 2], n))
        g = CliqueShapedFunction.indicator(n, mask_of([3, 4], n))
        w = wedge(f, g)
        assert w.cliques == (mask_of([1, 2, 3, 4], n),)
        for _ in range(100):
            rng = random.Random(_)
            edges = rng.getrandbits(edge_count(n))
            graph = Graph(n, edges)
            assert w(graph) <= (f(graph) & g(graph))
        for a in range(1 << n):
            ka = clique_graph(n, a)
            assert w(ka) == (f(ka) & g(ka))

    def test_edge_indicators_closed_at_standard_params(self):
        n = 8
        k, p, eps = 4, 8 ** (-2 / 3), 8.0**-4
        params = CliqueApproxParams(p=p, eps=eps, scan_max=3, trim_max=2)
        f = CliqueShapedFunction.indicator(n, mask_of([1, 2], n))
        assert clique_closure(f, params).cliques == f.cliques

    def test_trim_keeps_constant_one(self):
        one = CliqueShapedFunction.constant1(6)
        assert clique_trim(one, 2) == one

    def test_trim_drops_big_cliques(self):
        n = 8
        f = CliqueShapedFunction.from_masks(
            n, [mask_of([1, 2], n), mask_of([3, 4, 5, 6], n)]
        )
        assert clique_trim(f, 2).cliques == (mask_of([1, 2], n),)

    def test_closure_can_reach_small_cliques(self):
        # a dense star of triangles through {1,2} pushes Pr[f(N or K_{1,2})=1] high
        n = 7
        members = [mask_of([1, 2, x], n) for x in range(3, 8)]
        f = CliqueShapedFunction.from_masks(n, members)
        params = CliqueApproxParams(p=0.5, eps=0.4, scan_max=2, trim_max=2)
        cl = clique_closure(f, params)
        assert mask_of([1, 2], n) in cl.cliques

    def test_approx_ops_produce_trimmed_functions(self):
        n = 7
        params = CliqueApproxParams(p=0.3, eps=0.01, scan_max=3, trim_max=2)
        f = CliqueShapedFunction.indicator(n, mask_of([1, 2], n))
        g = CliqueShapedFunction.indicator(n, mask_of([2, 3], n))
        for h in (clique_approx_or(f, g, params), clique_approx_and(f, g, params)):
            assert all(m.bit_count() <= 2 for m in h.cliques)

    def test_approx_and_uses_wedge(self):
        n = 8
        params = CliqueApproxParams(p=0.1, eps=0.001, scan_max=4, trim_max=4)
        f = CliqueShapedFunction.indicator(n, mask_of([1, 2], n))
        g = CliqueShapedFunction.indicator(n, mask_of([3, 4], n))
        got = clique_approx_and(f, g, params)
        assert got.cliques == (mask_of([1, 2, 3, 4], n),)
