"""Amplitude PCA: eigenstructure, trace identity, scores, component paths."""
import numpy as np
import pytest

from landskew.elastic import Warp, karcher_mean, srvf, warp_landscape
from landskew.errors import DataError
from landskew.fpca import (
    amplitude_covariance,
    amplitude_pca,
    pc_path,
    pc_scores,
)
from landskew.landscape import Landscape


def trap_w(T):
    h = 1.0 / (T - 1)
    w = np.full(T, h)
    w[0] = w[-1] = 0.5 * h
    return w


def winner(f, g, w):
    return float(np.sum(np.sum(f * g, axis=0) * w))


def random_stack(n, K, T, seed):
    rng = np.random.default_rng(seed)
    t = np.linspace(0, 1, T)
    base = np.stack([np.sin((k + 1) * np.pi * t) for k in range(K)])
    out = np.empty((n, K, T))
    for i in range(n):
        coef = rng.normal(0, 0.3, (K, 3))
        wob = sum(coef[:, j][:, None] * np.sin((j + 1) * np.pi * t)[None, :]
                  for j in range(3))
        out[i] = base + wob
    return out


class TestRankOne:
    def test_two_curve_eigenvalue(self):
        # q_i = mu +/- v: single component with variance 2 ||v||^2
        T = 65
        t = np.linspace(0, 1, T)
        mu = np.vstack((np.sin(np.pi * t), np.cos(np.pi * t)))
        v = np.vstack((0.3 * np.sin(2 * np.pi * t), 0.1 * t))
        stack = np.stack((mu + v, mu - v))
        model = amplitude_pca(stack, n_components=5)
        w = trap_w(T)
        v2 = winner(v, v, w)
        assert model.B == 1  # capped at n - 1
        assert model.variances[0] == pytest.approx(2.0 * v2, rel=1e-12)
        # direction is v normalised, signed towards the first curve
        expect = v / np.sqrt(v2)
        np.testing.assert_allclose(model.directions[0], expect, atol=1e-10)
        assert model.fractions[0] == pytest.approx(1.0, rel=1e-12)

    def test_sign_convention_flips(self):
        T = 65
        t = np.linspace(0, 1, T)
        mu = np.sin(np.pi * t)[None, :]
        v = (0.2 * np.cos(np.pi * t))[None, :]
        # first curve sits at mu - v: the direction must point towards it
        stack = np.stack((mu - v, mu + v))
        model = amplitude_pca(stack)
        w = trap_w(T)
        assert winner(model.directions[0], stack[0] - model.mean_srvf, w) >= 0.0


class TestSpectrum:
    def test_trace_identity(self):
        stack = random_stack(7, 2, 64, seed=4)
        cov = amplitude_covariance(stack)
        model = amplitude_pca(cov, n_components=6)
        # total variance equals the average squared distance to the mean
        w = cov.weights
        mean = stack.mean(axis=0)
        direct = sum(winner(q - mean, q - mean, w) for q in stack) / 6
        assert cov.trace() == pytest.approx(direct, rel=1e-12)
        # all n-1 eigenvalues together recover the trace
        assert model.variances.sum() == pytest.approx(cov.trace(), rel=1e-10)

    def test_orthonormal_directions(self):
        model = amplitude_pca(random_stack(9, 2, 48, seed=8), n_components=8)
        w = model.weights
        B = model.B
        gram = np.array([[winner(model.directions[a], model.directions[b], w)
                          for b in range(B)] for a in range(B)])
        np.testing.assert_allclose(gram, np.eye(B), atol=1e-10)

    def test_variances_descending_nonnegative(self):
        model = amplitude_pca(random_stack(10, 1, 40, seed=2), n_components=9)
        assert np.all(model.variances >= 0.0)
        assert np.all(np.diff(model.variances) <= 1e-15)

    def test_dense_covariance_matches_outer_products(self):
        stack = random_stack(5, 1, 16, seed=6)
        cov = amplitude_covariance(stack)
        flat = (stack - stack.mean(0)).reshape(5, -1)
        expect = sum(np.outer(r, r) for r in flat) / 4
        np.testing.assert_allclose(cov.dense(), expect, rtol=1e-12)


class TestScores:
    def test_round_trip_reconstruction(self):
        # with B = n - 1 the span captures everything: scores reconstruct
        stack = random_stack(5, 2, 56, seed=12)
        model = amplitude_pca(stack, n_components=4)
        beta = pc_scores(model, stack)
        assert beta.shape == (5, 4)
        recon = model.mean_srvf[None] + np.einsum(
            "nb,bkt->nkt", beta, model.directions)
        assert np.abs(recon - stack).max() <= 1e-8

    def test_mean_scores_zero(self):
        stack = random_stack(6, 1, 32, seed=3)
        model = amplitude_pca(stack, n_components=3)
        beta = pc_scores(model, stack)
        np.testing.assert_allclose(beta.mean(axis=0), 0.0, atol=1e-12)

    def test_score_variance_matches_eigenvalue(self):
        stack = random_stack(8, 2, 40, seed=5)
        model = amplitude_pca(stack, n_components=3)
        beta = pc_scores(model, stack)
        for b in range(3):
            assert beta[:, b].var(ddof=1) == pytest.approx(
                model.variances[b], rel=1e-8)


class TestPaths:
    def test_zero_multiple_gives_mean(self):
        stack = random_stack(5, 2, 48, seed=9)
        model = amplitude_pca(stack)
        from landskew.fpca import inverse_srvf
        path = pc_path(model, 0, 0.0)
        np.testing.assert_array_equal(
            path.values, inverse_srvf(model.mean_srvf, model.scale_s).values)

    def test_path_linear_in_nu_in_srvf_domain(self):
        stack = random_stack(5, 1, 48, seed=10)
        model = amplitude_pca(stack)
        sd = np.sqrt(model.variances[0])
        q_plus = model.mean_srvf + 2.0 * sd * model.directions[0]
        from landskew.fpca import inverse_srvf
        np.testing.assert_allclose(pc_path(model, 0, 2.0).values,
                                   inverse_srvf(q_plus).values, atol=1e-12)

    def test_component_out_of_range(self):
        model = amplitude_pca(random_stack(4, 1, 32, seed=1))
        with pytest.raises(DataError):
            pc_path(model, 5, 1.0)


class TestIntegration:
    def test_from_alignment_result(self):
        T = 96
        t = np.linspace(0, 1, T)
        base = Landscape(np.vstack((0.5 * np.sin(np.pi * t),
                                    0.3 * np.sin(np.pi * t) ** 2)), 1.0)
        rng = np.random.default_rng(21)
        sample = []
        for i in range(6):
            amp = 1.0 + 0.25 * rng.standard_normal()
            wiggle = Warp(t + 0.05 * np.sin(2 * np.pi * t) * rng.uniform(-1, 1))
            sample.append(warp_landscape(
                Landscape(amp * base.values, 1.0), wiggle))
        res = karcher_mean(sample, tol=1e-5, max_iter=10)
        model = amplitude_pca(res, n_components=3)
        assert model.B == 3
        assert model.scale_s == 1.0
        beta = pc_scores(model, res)
        assert beta.shape == (6, 3)
        assert 0.0 < model.fractions.sum() <= 1.0 + 1e-12
        # amplitude scaling dominates: first component carries most variance
        assert model.fractions[0] > 0.5

    def test_needs_two_curves(self):
        with pytest.raises(DataError):
            amplitude_covariance(np.zeros((1, 2, 16)))

    def test_bad_stack_shape(self):
        with pytest.raises(DataError):
            amplitude_pca(np.zeros((4, 16)))
