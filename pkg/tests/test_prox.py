"""Proximal operator: decomposition identities, closed forms, certificates."""

import numpy as np
import pytest

from graphprox import (NonConvexPenalty, PiecewiseLinearPenalty, ProxProblem,
                       build_prox_qbm, certificate, prox, prox_solve,
                       pwl_decompose)
from graphprox.oracle import prox_reference
from conftest import random_prox_problem

ABS = PiecewiseLinearPenalty.abs_value()


def pair(a0=0.0, a1=2.0, w=1.0, lam=1.0):
    return ProxProblem.from_edges([a0, a1], {(0, 1): w}, lam=lam)


class TestPwlDecompose:
    def check_identity(self, pen, points):
        c, anchors, const = pwl_decompose(pen)
        for u in points:
            recon = const + c * u + sum(k * abs(u - b) for b, k in anchors)
            assert recon == pytest.approx(pen.value(u), abs=1e-12)

    def test_absolute_value(self):
        c, anchors, const = pwl_decompose(ABS)
        assert c == 0.0
        assert anchors == [(0.0, 1.0)]
        self.check_identity(ABS, [-1.0, -0.3, 0.0, 0.7, 2.0])

    def test_pure_linear(self):
        pen = PiecewiseLinearPenalty(np.zeros(0), np.array([0.8]))
        c, anchors, const = pwl_decompose(pen)
        assert c == pytest.approx(0.8)
        assert anchors == []

    def test_hinge(self):
        pen = PiecewiseLinearPenalty(np.array([0.0]), np.array([0.0, 1.0]))
        c, anchors, const = pwl_decompose(pen)
        assert c == pytest.approx(0.5)
        assert anchors == [(0.0, 0.5)]
        assert pen.value(-1.0) == pytest.approx(0.0)
        assert pen.value(1.0) == pytest.approx(1.0)
        self.check_identity(pen, [-2.0, 0.0, 0.5, 3.0])

    def test_multi_kink_identity(self, rng):
        for _ in range(20):
            m = int(rng.integers(2, 6))
            b = np.unique(rng.normal(0, 2, m))
            th = np.sort(rng.normal(0, 1.5, len(b) + 1))
            pen = PiecewiseLinearPenalty(b, th)
            self.check_identity(pen, rng.normal(0, 3, 20))

    def test_nonconvex_rejected(self):
        with pytest.raises(NonConvexPenalty):
            PiecewiseLinearPenalty(np.array([0.0]), np.array([1.0, -1.0]))
        with pytest.raises(NonConvexPenalty):
            PiecewiseLinearPenalty(np.array([1.0, 1.0]),
                                   np.array([0.0, 0.5, 1.0]))


class TestBuildProxQbm:
    def test_lambda_zero_decouples(self):
        p = ProxProblem.from_edges([1.0, -2.0], {(0, 1): 1.0}, lam=0.0)
        build = build_prox_qbm(p)
        assert build.qbm.n_edges == 0
        assert prox(p) == pytest.approx([1.0, -2.0])

    def test_pair_energy_matches_at_sampled_thresholds(self, rng):
        # exhaustive check over binary labelings: the built problem's
        # objective at threshold beta matches the fused binary energy
        # (a - beta) x + (lam w / 2) [x_i != x_j] up to a constant
        p = pair()
        build = build_prox_qbm(p)
        from graphprox import evaluate
        for beta in rng.uniform(-2, 4, 20):
            vals = {}
            for x0 in (0, 1):
                for x1 in (0, 1):
                    direct = (p.a[0] - beta) * x0 + (p.a[1] - beta) * x1 \
                        + 0.5 * p.lam * 1.0 * (x0 != x1)
                    s = [i for i, x in enumerate((x0, x1)) if x]
                    enc = evaluate(build.qbm, s, beta, np.ones(2))
                    vals[(x0, x1)] = direct - enc
            assert np.ptp(list(vals.values())) < 1e-10

    def test_anchor_metadata(self):
        p = ProxProblem.from_edges([0.8], {}, lam=1.0, penalties={0: ABS})
        build = build_prox_qbm(p)
        assert build.qbm.n == 2
        assert build.anchor_mask.tolist() == [False, True]
        assert build.anchor_values[1] == 0.0
        assert abs(p.a[0]) < build.bound


class TestProxClosedForms:
    def test_pair_subgradient_solution(self):
        assert prox(pair()) == pytest.approx([0.5, 1.5], abs=1e-8)

    def test_pair_fusion_at_mean(self):
        for lam in (2.0, 2.5, 10.0):
            assert prox(pair(lam=lam)) == pytest.approx([1.0, 1.0], abs=1e-8)

    def test_soft_threshold(self):
        for a, expect in [(0.8, 0.3), (-0.8, -0.3), (0.3, 0.0), (-0.49, 0.0),
                          (0.5, 0.0), (1.7, 1.2)]:
            p = ProxProblem.from_edges([a], {}, lam=1.0, penalties={0: ABS})
            assert prox(p) == pytest.approx([expect], abs=1e-8)

    def test_denoise_pair(self):
        # 2 pixels (0, 1), lam 0.5, weight 1: pull together by lam*w/2
        p = pair(0.0, 1.0, w=1.0, lam=0.5)
        assert prox(p) == pytest.approx([0.25, 0.75], abs=1e-10)


class TestProxProperties:
    def test_matches_reference(self, rng):
        for t in range(30):
            n = int(rng.integers(2, 51))
            p = random_prox_problem(rng, n, with_penalties=(t % 2 == 0))
            u = prox(p)
            ref = prox_reference(p)
            assert np.abs(u - ref).max() < 1e-6
            assert certificate(p, u) < 1e-7

    def test_nonexpansive(self, rng):
        for _ in range(15):
            n = int(rng.integers(2, 30))
            p = random_prox_problem(rng, n, with_penalties=True)
            a2 = p.a + rng.normal(0, 1, n)
            p2 = ProxProblem(a2, p.edge_u, p.edge_v, p.edge_w, p.lam,
                             p.penalties)
            assert np.linalg.norm(prox(p) - prox(p2)) <= \
                np.linalg.norm(p.a - a2) + 1e-9

    def test_level_set_consistency(self, rng):
        # thresholding u* at beta between distinct values reproduces the
        # parametric level sets of the underlying solve
        for _ in range(10):
            n = int(rng.integers(2, 25))
            p = random_prox_problem(rng, n)
            u, sol, build = prox_solve(p)
            vals = np.unique(u)
            grid = np.concatenate([[vals.min() - 1], (vals[:-1] + vals[1:]) / 2,
                                   [vals.max() + 1]])
            for b in grid:
                from_u = {i for i in range(n) if u[i] <= b}
                assert {i for i in sol.u2(float(b)) if i < n} == from_u

    def test_monotone_fusion_in_lambda(self, rng):
        for _ in range(8):
            n = int(rng.integers(3, 20))
            p = random_prox_problem(rng, n)
            counts = []
            for lam in (0.05, 0.2, 0.8, 3.2, 12.8):
                q = ProxProblem(p.a, p.edge_u, p.edge_v, p.edge_w, lam)
                u = prox(q)
                counts.append(len(np.unique(np.round(u, 8))))
            assert all(a >= b for a, b in zip(counts, counts[1:]))


class TestCertificate:
    def test_zero_at_center_when_unregularized(self):
        p = ProxProblem.from_edges([1.0, 2.0], {(0, 1): 1.0}, lam=0.0)
        assert certificate(p, np.array([1.0, 2.0])) == 0.0

    def test_positive_at_center_with_regularization(self):
        p = pair()
        assert certificate(p, np.array([0.0, 2.0])) > 0.5

    def test_small_at_solver_output(self, rng):
        for _ in range(20):
            n = int(rng.integers(2, 50))
            p = random_prox_problem(rng, n, with_penalties=True)
            assert certificate(p, prox(p)) < 1e-7
