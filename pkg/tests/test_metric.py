import itertools

import numpy as np
import pytest

from abfix.errors import DomainError, EvaluationError
from abfix.grid import GridFunction, uniform_grid
from abfix.metric import (DEFAULT_ALPHA_GRID, AlphaBetaParams, FiniteSet, GridSpace,
                          Interval, MetricSpace, RealLine, beta_frontier, builtin_space,
                          classify_space, estimate_min_beta_given_alpha,
                          estimate_min_symmetric_constant, sample_triples,
                          verify_axioms)


def brute_symmetric_constant(points, G):
    best = 1.0
    for x, y, z in itertools.product(points, repeat=3):
        den = G(x, z) + G(z, y)
        if den > 0:
            best = max(best, G(x, y) / den)
    return best


def brute_min_beta(points, G, alpha):
    best = 1.0
    for x, y, z in itertools.product(points, repeat=3):
        if G(z, y) > 0:
            best = max(best, (G(x, y) - alpha * G(x, z)) / G(z, y))
    return best


def sq(x, y):
    return (x - y) ** 2


class TestAlphaBetaParams:
    def test_defaults_are_metric(self):
        assert AlphaBetaParams() == AlphaBetaParams(1.0, 1.0)

    @pytest.mark.parametrize("alpha,beta", [(0.5, 1), (1, 0.99), (float("nan"), 1)])
    def test_rejects_below_one(self, alpha, beta):
        with pytest.raises(DomainError):
            AlphaBetaParams(alpha, beta)


class TestVerifyAxioms:
    def test_abs_is_metric(self, abs_unit):
        report = verify_axioms(abs_unit, AlphaBetaParams(1, 1), n_triples=10_000)
        assert report.passed
        assert report.violations == []
        assert report.triples_checked == 10_000

    def test_squared_counterexample_at_metric_constants(self):
        space = builtin_space("abs-squared")
        report = verify_axioms(space, AlphaBetaParams(1, 1), triples=[(0.0, 2.0, 1.0)])
        assert not report.passed
        (v,) = report.violations
        assert v.axiom == "triangle"
        assert v.witness == (0.0, 2.0, 1.0)
        assert (v.lhs, v.rhs) == (4.0, 2.0)

    def test_squared_passes_at_two_two_on_dense_grid(self):
        # (a + b)^2 <= 2a^2 + 2b^2; exhaustive over a 50^3 grid of triples
        pts = tuple(np.linspace(-5, 5, 50))
        space = builtin_space("abs-squared", FiniteSet(pts))
        report = verify_axioms(space, AlphaBetaParams(2, 2), n_triples=50 ** 3)
        assert report.triples_checked == 50 ** 3
        assert report.passed

    def test_squared_passes_at_two_two_sampled(self):
        space = builtin_space("abs-squared")
        assert verify_axioms(space, AlphaBetaParams(2, 2), n_triples=10_000).passed

    def test_passed_iff_no_violations(self):
        space = builtin_space("abs-squared")
        for params in (AlphaBetaParams(1, 1), AlphaBetaParams(1.5, 1.5), AlphaBetaParams(2, 2)):
            r = verify_axioms(space, params, n_triples=500)
            assert r.passed == (not r.violations)

    def test_asymmetric_distance_flagged(self):
        space = MetricSpace(Interval(0, 1), lambda x, y: abs(x - y) + max(x - y, 0))
        r = verify_axioms(space, AlphaBetaParams(5, 5), n_triples=200)
        assert not r.passed
        assert {v.axiom for v in r.violations} == {"symmetry"}

    def test_identity_and_separation(self):
        ident = MetricSpace(Interval(0, 1), lambda x, y: abs(x - y) + 1.0)
        r = verify_axioms(ident, AlphaBetaParams(1, 1), n_triples=50)
        assert any(v.axiom == "identity" for v in r.violations)
        sep = MetricSpace(Interval(0, 1), lambda x, y: 0.0)
        r = verify_axioms(sep, AlphaBetaParams(1, 1), n_triples=50)
        assert all(v.axiom == "separation" for v in r.violations) and r.violations

    def test_negative_distance_is_evaluation_error(self):
        space = MetricSpace(Interval(0, 1), lambda x, y: x - y)
        with pytest.raises(EvaluationError) as exc:
            verify_axioms(space, AlphaBetaParams(), n_triples=20)
        assert len(exc.value.witness) == 2

    def test_nonfinite_distance_is_evaluation_error(self):
        space = MetricSpace(Interval(0, 1), lambda x, y: float("inf"))
        with pytest.raises(EvaluationError):
            verify_axioms(space, AlphaBetaParams(), n_triples=5)

    def test_empty_domain(self):
        with pytest.raises(DomainError):
            FiniteSet(())
        with pytest.raises(DomainError):
            Interval(1.0, 0.0)

    def test_requires_a_triple(self, abs_unit):
        with pytest.raises(ValueError):
            verify_axioms(abs_unit, n_triples=0)

    def test_deterministic(self):
        space = builtin_space("abs-squared")
        a = verify_axioms(space, AlphaBetaParams(1, 1), n_triples=1000, seed=7)
        b = verify_axioms(space, AlphaBetaParams(1, 1), n_triples=1000, seed=7)
        assert a.to_dict() == b.to_dict()

    def test_sup_grid_space_is_metric(self):
        space = builtin_space("sup-grid")
        assert verify_axioms(space, AlphaBetaParams(1, 1), n_triples=300).passed


class TestSymmetricConstant:
    def test_abs_is_one(self, abs_unit):
        assert estimate_min_symmetric_constant(abs_unit, n_triples=5000) == 1.0

    def test_squared_over_012(self, squared_012):
        expected = brute_symmetric_constant((0.0, 1.0, 2.0), sq)
        assert expected == 2.0
        assert estimate_min_symmetric_constant(squared_012, n_triples=27) == expected

    def test_degenerate_triple_clamps_to_one(self):
        space = builtin_space("abs-squared")
        assert estimate_min_symmetric_constant(space, triples=[(0.0, 3.0, 0.0)]) == 1.0


class TestMinBeta:
    def test_abs_alpha_one(self, abs_unit):
        assert estimate_min_beta_given_alpha(abs_unit, 1.0, n_triples=5000) == 1.0

    @pytest.mark.parametrize("alpha", [1.0, 3.0])
    def test_squared_over_012(self, squared_012, alpha):
        expected = brute_min_beta((0.0, 1.0, 2.0), sq, alpha)
        assert expected == {1.0: 3.0, 3.0: 1.0}[alpha]
        assert estimate_min_beta_given_alpha(squared_012, alpha, n_triples=27) == expected

    def test_rejects_alpha_below_one(self, squared_012):
        with pytest.raises(DomainError):
            estimate_min_beta_given_alpha(squared_012, 0.5, n_triples=27)

    def test_frontier_is_nonincreasing(self):
        space = builtin_space("abs-squared")
        betas = [b for _, b in beta_frontier(space, n_triples=3000)]
        assert all(b2 <= b1 for b1, b2 in zip(betas, betas[1:]))
        assert len(betas) == len(DEFAULT_ALPHA_GRID)


class TestClassify:
    def test_abs_is_metric(self, abs_unit):
        assert classify_space(abs_unit, n_triples=3000).label == "metric"

    def test_squared_is_b_metric(self):
        dense = FiniteSet(tuple(np.linspace(-3, 3, 31)))
        space = builtin_space("abs-squared", dense)
        oracle = brute_symmetric_constant(dense.points, sq)
        c = classify_space(space, n_triples=31 ** 3)
        assert c.label == "b-metric"
        assert c.symmetric_constant == pytest.approx(oracle, abs=0)
        assert c.symmetric_constant == pytest.approx(2.0)

    def test_squared_accepted_above_two(self):
        space = builtin_space("abs-squared", Interval(-10, 10))
        assert verify_axioms(space, AlphaBetaParams(2.5, 2.5), n_triples=10_000).passed

    def test_three_point_b_metric(self):
        # needs (1, 2) for the strong-b form but S = 1.5 already certifies (S, S)
        pts = ("a", "b", "c")
        table = {("a", "b"): 3.0, ("a", "c"): 1.0, ("b", "c"): 1.0}

        def G(x, y):
            return 0.0 if x == y else table[tuple(sorted((x, y)))]

        space = MetricSpace(FiniteSet(pts), G)
        c = classify_space(space, n_triples=27)
        assert c.label == "b-metric"
        assert c.params == AlphaBetaParams(1.5, 1.5)
        assert estimate_min_beta_given_alpha(space, 1.0, n_triples=27) == 2.0

    def test_unknown_when_not_symmetric(self):
        space = MetricSpace(Interval(0, 1), lambda x, y: abs(x - y) + max(x - y, 0))
        assert classify_space(space, n_triples=200).label == "unknown"


class TestSampling:
    def test_finite_domain_enumerated_when_small(self):
        triples = sample_triples(builtin_space("abs", FiniteSet((0, 1))), 8)
        assert sorted(triples) == sorted(itertools.product((0, 1), repeat=3))

    def test_witnesses_appended(self, abs_unit):
        triples = sample_triples(abs_unit, 3, witnesses=[(0.0, 1.0, 0.5)])
        assert len(triples) == 4 and triples[-1] == (0.0, 1.0, 0.5)

    def test_grid_space_samples_grid_functions(self):
        dom = GridSpace(uniform_grid(0, 1, 10), (-2, 2))
        pts = dom.sample(np.random.default_rng(0), 5)
        assert all(isinstance(p, GridFunction) and dom.contains(p) for p in pts)
        assert all(np.all(np.abs(p.values) <= 2) for p in pts)

    def test_real_line_contains(self):
        assert RealLine().contains(1e9)
        assert not RealLine().contains(float("nan"))
