"""Self-checks of the reference implementations."""

import itertools

import numpy as np
import pytest

from graphprox import ProxProblem, QuadraticBinaryProblem, TooLarge, evaluate
from graphprox.oracle import (brute_force_minimizers, min_norm_reference,
                              prox_reference)
from conftest import random_submodular


class TestBruteForce:
    def test_positive_diag_empty_min(self):
        prob = QuadraticBinaryProblem.from_parts([1.0, 2.0, 0.5], {})
        mp = brute_force_minimizers(prob, 0.0)
        assert mp.s_min == mp.s_max == set()
        assert mp.value == 0.0

    def test_beyond_max_breakpoint_full_set(self):
        prob = QuadraticBinaryProblem.from_parts([1.0, 2.0], {(0, 1): -0.5})
        mp = brute_force_minimizers(prob, 100.0)
        assert mp.s_min == mp.s_max == {0, 1}

    def test_pair_at_beta_one(self):
        prob = QuadraticBinaryProblem.from_parts([0.5, 2.5], {(0, 1): -1.0})
        mp = brute_force_minimizers(prob, 1.0, np.ones(2))
        assert mp.s_min == mp.s_max == {0}

    def test_guard(self):
        prob = QuadraticBinaryProblem.from_parts(np.zeros(21), {})
        with pytest.raises(TooLarge):
            brute_force_minimizers(prob)

    def test_lattice_closure(self, rng):
        # the optimal family is closed under union and intersection
        for _ in range(10):
            n = int(rng.integers(2, 8))
            prob = random_submodular(rng, n)
            beta = float(rng.normal())
            vals = {}
            for k in range(n + 1):
                for s in itertools.combinations(range(n), k):
                    vals[frozenset(s)] = evaluate(prob, s, beta, np.ones(n))
            best = min(vals.values())
            opt = [s for s, v in vals.items() if v == best]
            for s in opt:
                for t in opt:
                    assert vals[s | t] == pytest.approx(best)
                    assert vals[s & t] == pytest.approx(best)


class TestMinNormReference:
    def test_no_edges(self):
        prob = QuadraticBinaryProblem.from_parts([1.0, -2.0], {})
        assert min_norm_reference(prob).r == pytest.approx([1.0, -2.0])

    def test_pair_kkt(self):
        prob = QuadraticBinaryProblem.from_parts([0.5, 2.5], {(0, 1): -1.0})
        assert min_norm_reference(prob).r == pytest.approx([0.5, 1.5],
                                                           abs=1e-9)

    def test_in_base_polytope(self, rng):
        # all subset inequalities hold, with equality on the full set
        for _ in range(8):
            n = int(rng.integers(1, 8))
            prob = random_submodular(rng, n)
            w = rng.uniform(0.3, 3, n)
            r = min_norm_reference(prob, w).r
            for k in range(n + 1):
                for s in itertools.combinations(range(n), k):
                    assert r[list(s)].sum() <= evaluate(prob, s) + 1e-8
            assert r.sum() == pytest.approx(evaluate(prob, range(n)), abs=1e-8)

    def test_rejects_zero_weights(self):
        prob = QuadraticBinaryProblem.from_parts([1.0, 1.0], {(0, 1): -0.5})
        with pytest.raises(ValueError):
            min_norm_reference(prob, np.array([1.0, 0.0]))


class TestProxReference:
    def test_lambda_zero(self):
        p = ProxProblem.from_edges([1.0, -1.0], {(0, 1): 1.0}, lam=0.0)
        assert prox_reference(p) == pytest.approx([1.0, -1.0])

    def test_two_node_closed_forms(self):
        p = ProxProblem.from_edges([0.0, 2.0], {(0, 1): 1.0}, lam=1.0)
        assert prox_reference(p) == pytest.approx([0.5, 1.5], abs=1e-8)
        p = ProxProblem.from_edges([0.0, 2.0], {(0, 1): 1.0}, lam=4.0)
        assert prox_reference(p) == pytest.approx([1.0, 1.0], abs=1e-8)

    def test_decoupled_penalty(self):
        from graphprox import PiecewiseLinearPenalty
        p = ProxProblem.from_edges([0.8], {}, lam=1.0,
                                   penalties={0: PiecewiseLinearPenalty.abs_value()})
        assert prox_reference(p) == pytest.approx([0.3], abs=1e-10)
