import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from sunflower_circuits.monotone import (
    ClosureParams,
    MonotoneCircuit,
    MonotoneFunction,
    approx_and,
    approx_or,
    approximate_circuit,
    circuit_from_text,
    circuit_function,
    circuit_to_text,
    closed_minterm_bound_check,
    closure,
    closure_error_bound_check,
    is_closed,
    iter_masks_up_to,
    minterms_of_size,
    trim,
)
from sunflower_circuits.probability import PBiasedDistribution
from sunflower_circuits.setfamily import mask_of

from oracles import enumerate_antichains


def mf(n, *sets):
    return MonotoneFunction.from_masks(n, (mask_of(s, n) for s in sets))


def random_monotone(n, rng, max_minterms=6):
    masks = {rng.randrange(0, 1 << n) for _ in range(rng.randint(1, max_minterms))}
    return MonotoneFunction.from_masks(n, masks)


class TestEvalAndLattice:
    def test_constant_one(self):
        one = MonotoneFunction.constant1(4)
        assert all(one(x) for x in range(16))

    def test_minterm_accepts_superset(self):
        f = mf(4, (1, 2))
        assert f(mask_of([1, 2, 3], 4)) == 1
        assert f(mask_of([1, 3], 4)) == 0

    def test_or_absorption(self):
        assert (mf(4, (1,)) | mf(4, (1, 2))).minterms == mf(4, (1,)).minterms

    def test_and_of_singletons(self):
        assert (mf(4, (1,)) & mf(4, (2,))).minterms == mf(4, (1, 2)).minterms

    def test_and_identity(self):
        f = mf(4, (1, 3), (2,))
        assert (MonotoneFunction.constant1(4) & f) == f

    def test_truth_table_semantics(self):
        rng = random.Random(0)
        for _ in range(25):
            n = rng.randint(2, 6)
            f, g = random_monotone(n, rng), random_monotone(n, rng)
            h_or, h_and = f | g, f & g
            for x in range(1 << n):
                assert h_or(x) == (f(x) | g(x))
                assert h_and(x) == (f(x) & g(x))

    def test_minterms_of_size(self):
        f = mf(5, (1,), (2, 3))
        assert minterms_of_size(f, 1).as_sets() == [(1,)]
        assert minterms_of_size(f, 2).as_sets() == [(2, 3)]
        assert len(minterms_of_size(f, 3)) == 0


@settings(max_examples=60, deadline=None)
@given(
    st.integers(2, 8),
    st.sets(st.integers(0, 255), min_size=1, max_size=5),
    st.sets(st.integers(0, 255), min_size=1, max_size=5),
)
def test_or_and_commutative(n, aa, bb):
    full = (1 << n) - 1
    f = MonotoneFunction.from_masks(n, (m & full for m in aa))
    g = MonotoneFunction.from_masks(n, (m & full for m in bb))
    assert f | g == g | f
    assert f & g == g & f


@settings(max_examples=30, deadline=None)
@given(
    st.integers(2, 6),
    st.sets(st.integers(0, 63), min_size=1, max_size=4),
    st.sets(st.integers(0, 63), min_size=1, max_size=4),
    st.sets(st.integers(0, 63), min_size=1, max_size=4),
)
def test_or_and_associative(n, aa, bb, cc):
    full = (1 << n) - 1
    f, g, h = (
        MonotoneFunction.from_masks(n, (m & full for m in s)) for s in (aa, bb, cc)
    )
    assert (f | g) | h == f | (g | h)
    assert (f & g) & h == f & (g & h)


class TestClosed:
    def test_indicator_closed_at_standard_eps(self):
        n, c = 6, 2
        params = ClosureParams(eps=float(n) ** (-2 * c), c=c)
        assert is_closed(MonotoneFunction.indicator(n, 1), params).closed

    def test_constant_one_closed(self):
        params = ClosureParams(eps=0.01, c=2)
        assert is_closed(MonotoneFunction.constant1(5), params).closed

    def test_constant_zero_closed(self):
        params = ClosureParams(eps=0.01, c=2)
        assert is_closed(MonotoneFunction.constant0(5), params).closed

    def test_singletons_witness_empty_set(self):
        n = 8
        f = mf(n, *[(i,) for i in range(1, n + 1)])
        report = is_closed(f, ClosureParams(eps=0.9, c=1))
        assert not report.closed
        assert report.witness == 0
        assert report.probability.value == 1 - Fraction(1, 2) ** n


class TestClosure:
    def test_fixpoint_on_constant_one(self):
        params = ClosureParams(eps=0.1, c=2)
        one = MonotoneFunction.constant1(4)
        assert closure(one, params) == one

    def test_fixpoint_on_indicator(self):
        n, c = 6, 2
        params = ClosureParams(eps=float(n) ** (-2 * c), c=c)
        ind = MonotoneFunction.indicator(n, 2)
        assert closure(ind, params) == ind

    def test_singletons_close_to_constant_one(self):
        f = mf(4, (1,), (2,), (3,), (4,))
        cl = closure(f, ClosureParams(eps=0.9, c=2))
        assert cl.is_constant1

    def test_pointwise_dominates_input(self):
        rng = random.Random(1)
        for _ in range(10):
            n = rng.randint(3, 8)
            f = random_monotone(n, rng)
            cl = closure(f, ClosureParams(eps=0.2, c=2))
            assert f.le(cl)
            for x in range(1 << n):
                assert f(x) <= cl(x)

    def test_idempotent(self):
        rng = random.Random(2)
        params = ClosureParams(eps=0.15, c=2)
        for _ in range(10):
            f = random_monotone(6, rng)
            cl = closure(f, params)
            assert closure(cl, params) == cl

    def test_scan_order_invariance(self):
        rng = random.Random(3)
        params = ClosureParams(eps=0.25, c=2)
        for _ in range(15):
            n = rng.randint(3, 5)
            f = random_monotone(n, rng)
            assert closure(f, params) == closure(f, params, scan="reversed")

    def test_and_of_closed_is_closed(self):
        rng = random.Random(4)
        params = ClosureParams(eps=0.2, c=2)
        for _ in range(10):
            f = closure(random_monotone(6, rng), params)
            g = closure(random_monotone(6, rng), params)
            assert is_closed(f & g, params).closed

    def test_tiny_eps_means_no_additions(self):
        # nothing reaches probability > 1 - eps when eps is absurdly small
        rng = random.Random(5)
        params = ClosureParams(eps=1e-12, c=2)
        for _ in range(5):
            f = random_monotone(5, rng)
            if not any(m == 0 for m in f.minterms):
                assert closure(f, params) == f or f.le(closure(f, params))


class TestTrim:
    def test_keeps_small_minterms(self):
        f = mf(6, (1, 2), (3, 4, 5))
        assert trim(f, 2) == mf(6, (1, 2))

    def test_all_large_becomes_constant_zero(self):
        f = mf(6, (1, 2, 3), (4, 5, 6))
        assert trim(f, 2).is_constant0

    def test_constant_one_untouched(self):
        one = MonotoneFunction.constant1(6)
        assert trim(one, 1) == one

    def test_pointwise_below_and_idempotent(self):
        rng = random.Random(6)
        for _ in range(20):
            n = rng.randint(2, 7)
            f = random_monotone(n, rng)
            t = trim(f, 2)
            assert t.le(f)
            assert trim(t, 2) == t


class TestApproxOps:
    def test_or_of_indicators_already_closed(self):
        n, c = 6, 2
        params = ClosureParams(eps=float(n) ** (-2 * c), c=c)
        f = MonotoneFunction.indicator(n, 1)
        g = MonotoneFunction.indicator(n, 2)
        got = approx_or(f, g, params)
        assert got == (f | g)
        assert is_closed(f | g, params).closed

    def test_and_with_constant_zero(self):
        n = 6
        params = ClosureParams(eps=float(n) ** (-4), c=2)
        zero = MonotoneFunction.constant0(n)
        f = MonotoneFunction.indicator(n, 1)
        assert approx_and(zero, f, params).is_constant0

    def test_idempotent_on_algebra_members(self):
        n, c = 6, 2
        params = ClosureParams(eps=float(n) ** (-2 * c), c=c)
        f = approx_or(MonotoneFunction.indicator(n, 1), MonotoneFunction.indicator(n, 2), params)
        assert approx_or(f, f, params) == f


class TestCircuits:
    def test_single_input(self):
        c = circuit_from_text("INPUT 2\nOUTPUT 1\n", 4)
        assert c.eval(mask_of([2], 4)) == 1
        assert c.eval(mask_of([1], 4)) == 0
        assert c.size == 0

    def test_or_of_inputs(self):
        c = circuit_from_text("INPUT 1\nINPUT 2\nOR 1 2\nOUTPUT 3\n", 4)
        assert c.eval(mask_of([2], 4)) == 1
        assert c.eval(0) == 0

    def test_and_of_or(self):
        text = "INPUT 1\nINPUT 2\nINPUT 3\nOR 1 2\nAND 4 3\nOUTPUT 5\n"
        c = circuit_from_text(text, 3)
        assert c.eval(mask_of([1, 3], 3)) == 1
        assert c.eval(mask_of([1, 2], 3)) == 0
        assert c.size == 2

    def test_round_trip(self):
        text = "INPUT 1\nINPUT 2\nAND 1 2\nOUTPUT 3\n"
        c = circuit_from_text(text, 4)
        assert circuit_to_text(c) == text

    def test_forward_reference_rejected(self):
        with pytest.raises(ValueError):
            MonotoneCircuit(3, (("or", 1, 2), ("input", 1)), 1)

    def test_circuit_function_matches_eval(self):
        text = "INPUT 1\nINPUT 2\nINPUT 3\nOR 1 2\nAND 4 3\nOR 4 5\nOUTPUT 6\n"
        c = circuit_from_text(text, 3)
        f = circuit_function(c)
        for x in range(8):
            assert f(x) == c.eval(x)


class TestApproximateCircuit:
    def setup_method(self):
        self.pos = lambda n, p: PBiasedDistribution(n, Fraction(*p))
        self.neg = lambda n: PBiasedDistribution(n, Fraction(1, 2))

    def test_single_input_gate_no_errors(self):
        c = circuit_from_text("INPUT 1\nOUTPUT 1\n", 5)
        params = ClosureParams(eps=5.0 ** (-4), c=2)
        ap, ledger = approximate_circuit(
            c, params, self.pos(5, (1, 4)), self.neg(5)
        )
        assert ap == MonotoneFunction.indicator(5, 1)
        assert ledger.total_positive == 0 and ledger.total_negative == 0

    def test_or_gate_no_errors_when_closed(self):
        n, c_param = 6, 4
        c = circuit_from_text("INPUT 1\nINPUT 2\nOR 1 2\nOUTPUT 3\n", n)
        params = ClosureParams(eps=float(n) ** (-2 * c_param), c=c_param)
        ap, ledger = approximate_circuit(c, params, self.pos(n, (1, 4)), self.neg(n))
        assert ap == mf(n, (1,), (2,))
        assert ledger.total_positive == 0 and ledger.total_negative == 0

    def test_trimmed_joint_minterm_error_is_exact(self):
        # AND(AND(x1,x2), x3) at c=4 trims the size-3 joint minterm {1,2,3};
        # the positive error at the top gate is exactly Pr[y >= that minterm]
        n, c_param = 8, 4
        p_pos = Fraction(1, 4)
        text = "INPUT 1\nINPUT 2\nINPUT 3\nAND 1 2\nAND 4 3\nOUTPUT 5\n"
        circ = circuit_from_text(text, n)
        params = ClosureParams(eps=float(n) ** (-2 * c_param), c=c_param)
        ap, ledger = approximate_circuit(
            circ, params, self.pos(n, (1, 4)), self.neg(n)
        )
        assert ap.is_constant0
        top = ledger.entries[-1]
        assert top.positive_error == p_pos**3
        # trimming only helps on the negative side
        assert top.negative_error == 0
        # the trimming bound: sum over trimmed sizes of p^l * count
        assert top.positive_error <= sum(
            p_pos**l * len([m for m in [(1, 2, 3)] if len(m) == l]) for l in (2, 3, 4)
        )

    def test_ledger_csv_shape(self):
        c = circuit_from_text("INPUT 1\nINPUT 2\nAND 1 2\nOUTPUT 3\n", 6)
        params = ClosureParams(eps=6.0 ** (-8), c=4)
        _, ledger = approximate_circuit(c, params, self.pos(6, (1, 2)), self.neg(6))
        csv = ledger.to_csv()
        lines = csv.strip().splitlines()
        assert lines[0] == "gate,kind,pos_err,neg_err"
        assert len(lines) == 4

    def test_mc_engine_close_to_exact(self):
        n, c_param = 8, 4
        text = "INPUT 1\nINPUT 2\nINPUT 3\nAND 1 2\nAND 4 3\nOUTPUT 5\n"
        circ = circuit_from_text(text, n)
        params = ClosureParams(eps=float(n) ** (-2 * c_param), c=c_param)
        _, exact_ledger = approximate_circuit(
            circ, params, self.pos(n, (1, 4)), self.neg(n)
        )
        _, mc_ledger = approximate_circuit(
            circ, params, self.pos(n, (1, 4)), self.neg(n),
            engine="mc", samples=20_000, seed=9,
        )
        for ee, me in zip(exact_ledger.entries, mc_ledger.entries):
            assert abs(float(ee.positive_error) - me.positive_error) < 0.02
            assert abs(float(ee.negative_error) - me.negative_error) < 0.02


class TestClosureErrorBound:
    def test_closed_function_has_zero_error(self):
        n = 6
        params = ClosureParams(eps=float(n) ** (-4), c=2)
        f = MonotoneFunction.indicator(n, 1)
        lhs, rhs = closure_error_bound_check(f, params)
        assert lhs == 0

    def test_bound_holds_on_singletons(self):
        n = 6
        params = ClosureParams(eps=Fraction(1, 5), c=2)
        f = mf(n, *[(i,) for i in range(1, n + 1)])
        lhs, rhs = closure_error_bound_check(f, params)
        assert rhs == Fraction(1, 5) * (1 + 6 + 15)
        assert lhs <= rhs

    def test_random_functions_obey_bound(self):
        rng = random.Random(8)
        for _ in range(10):
            n = rng.randint(4, 8)
            f = random_monotone(n, rng)
            params = ClosureParams(eps=0.1, c=2)
            lhs, rhs = closure_error_bound_check(f, params)
            assert 0 <= lhs <= rhs


class TestClosedMintermBound:
    def test_constant_one_counts(self):
        params = ClosureParams(eps=0.1, c=3)
        rows = closed_minterm_bound_check(MonotoneFunction.constant1(8), params, B=1.0)
        assert [(size, count) for size, count, _ in rows] == [(1, 0), (2, 0), (3, 0)]

    def test_closure_of_pairs_counts(self):
        rng = random.Random(9)
        n = 10
        params = ClosureParams(eps=float(n) ** (-4), c=2)
        masks = set()
        while len(masks) < 6:
            a, b = rng.sample(range(n), 2)
            masks.add(1 << a | 1 << b)
        f = closure(MonotoneFunction.from_masks(n, masks), params)
        rows = closed_minterm_bound_check(f, params, B=64.0)
        for size, count, bound in rows:
            assert count == sum(1 for m in f.minterms if m.bit_count() == size)
            assert count <= bound  # generous B makes the bound comfortable


def test_antichain_enumeration_count_matches_dedekind():
    # cross-check the test oracle itself: 168 monotone functions on 4 variables
    assert len(enumerate_antichains(4)) == 168
    assert len(enumerate_antichains(3)) == 20


def test_iter_masks_canonical_order():
    got = list(iter_masks_up_to(4, 2))
    weights = [m.bit_count() for m in got]
    assert weights == sorted(weights)
    for w in set(weights):
        vals = [m for m in got if m.bit_count() == w]
        assert vals == sorted(vals)
    assert len(got) == 1 + 4 + 6
