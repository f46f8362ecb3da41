"""Diagram transforms, spread statistics, and two-group comparison."""
import numpy as np
import pytest

from landskew.analysis import (
    denoise_sample,
    diagram_spread,
    group_compare,
    transform_diagram,
)
from landskew.elastic import Warp, karcher_mean, warp_landscape
from landskew.errors import DataError
from landskew.landscape import Landscape, landscape_from_diagram
from landskew.persistence import PersistenceDiagram


def diagram(pairs, degree=1, max_scale=2.0):
    return PersistenceDiagram(degree=degree, pairs=np.asarray(pairs, float),
                              convention="radius", max_scale=max_scale)


def smooth_warp(T, amp=0.08, cycles=2):
    t = np.linspace(0, 1, T)
    return Warp(t + amp * np.sin(cycles * np.pi * t))


def base_landscape(T=128):
    t = np.linspace(0, 1, T)
    return Landscape(np.vstack((0.5 * np.sin(np.pi * t) + 0.2 * np.sin(2 * np.pi * t),
                                0.4 * np.sin(np.pi * t) ** 2)), 1.0)


class TestTransformDiagram:
    def test_square_warp_hand_values(self):
        # warp t^2 has inverse sqrt: (0.25, 0.64) -> (0.5, 0.8)
        T = 1025
        t = np.linspace(0, 1, T)
        warp = Warp(t * t)
        out = transform_diagram(diagram([[0.25, 0.64]]), warp, scale_s=1.0)
        np.testing.assert_allclose(out.pairs, [[0.5, 0.8]], atol=1e-6)
        assert out.max_scale == 1.0

    def test_scale_normalisation(self):
        # same pairs in units of s=2 give the same normalised output
        T = 1025
        t = np.linspace(0, 1, T)
        warp = Warp(t * t)
        out = transform_diagram(diagram([[0.5, 1.28]]), warp, scale_s=2.0)
        np.testing.assert_allclose(out.pairs, [[0.5, 0.8]], atol=1e-6)

    def test_identity_warp_divides_by_scale(self):
        dg = diagram([[0.2, 0.9], [0.1, 0.4]])
        out = transform_diagram(dg, Warp.identity(64), scale_s=2.0)
        np.testing.assert_allclose(out.pairs, dg.pairs / 2.0, atol=1e-14)

    def test_order_and_validity_preserved(self):
        rng = np.random.default_rng(3)
        b = np.sort(rng.uniform(0.05, 0.6, 12))
        d = b + rng.uniform(0.05, 0.35, 12)
        dg = diagram(np.c_[b, d], max_scale=1.0)
        out = transform_diagram(dg, smooth_warp(257, 0.07, 2), scale_s=1.0)
        assert np.all(out.pairs[:, 1] > out.pairs[:, 0])

    def test_out_of_domain_rejected(self):
        with pytest.raises(DataError):
            transform_diagram(diagram([[0.2, 1.5]]), Warp.identity(32),
                              scale_s=1.0)


class TestDiagramSpread:
    def test_hand_computed_spread(self):
        dgs = [diagram([[0.0, 1.0]]),
               diagram([[0.3, 1.3]]),
               diagram([[0.0, 0.2], [0.4, 1.4]])]
        res = diagram_spread(dgs, rank=1)
        # top pairs: (0,1), (0.3,1.3), (0.4,1.4)
        d01 = np.hypot(0.3, 0.3)
        d02 = np.hypot(0.4, 0.4)
        d12 = np.hypot(0.1, 0.1)
        assert res.value == pytest.approx((d01 + d02 + d12) / 3, rel=1e-12)
        assert res.skipped == 0
        assert res.points.shape == (3, 2)

    def test_rank_two_with_skips(self):
        dgs = [diagram([[0.0, 1.0]]),                      # no rank-2 pair
               diagram([[0.0, 1.0], [0.1, 0.5]]),
               diagram([[0.0, 1.0], [0.2, 0.6]])]
        res = diagram_spread(dgs, rank=2)
        assert res.skipped == 1
        assert res.points.shape == (2, 2)
        assert res.value == pytest.approx(np.hypot(0.1, 0.1), rel=1e-12)

    def test_tie_breaks_stable(self):
        # equal persistence: the lexicographically first pair wins
        dg = diagram([[0.0, 0.5], [0.2, 0.7]])
        res = diagram_spread([dg, dg], rank=1)
        np.testing.assert_array_equal(res.points[0], [0.0, 0.5])
        assert res.value == 0.0

    def test_all_skipped(self):
        res = diagram_spread([diagram(np.zeros((0, 2)))], rank=1)
        assert res.skipped == 1 and res.value == 0.0


class TestDenoise:
    def test_warped_tents_collapse(self):
        # one tent diagram observed under subject-specific warps: after
        # alignment the transformed pairs concentrate near (b, d)/s
        T = 257
        dg = diagram([[0.2, 0.8]], max_scale=1.0)
        base = landscape_from_diagram(dg, T=T, domain_end=1.0)
        warps = [smooth_warp(T, a, c) for a, c in
                 [(0.06, 2), (-0.05, 2), (0.04, 3), (-0.03, 1), (0.05, 1)]]
        sample = [warp_landscape(base, w) for w in warps]
        # the observed diagram of subject i has pairs gamma_i^{-1}(b, d)
        dgs = []
        for w in warps:
            inv = np.interp(dg.pairs.ravel(), w.values, w.grid)
            dgs.append(diagram(inv.reshape(-1, 2), max_scale=1.0))
        res = karcher_mean(sample, tol=1e-6, max_iter=15)
        den = denoise_sample(dgs, res)
        pts = np.vstack([d.transformed.pairs for d in den])
        before = np.vstack([d.pairs for d in dgs])
        # transformed points scatter less than the observed ones
        assert pts.std(axis=0).max() < 0.6 * before.std(axis=0).max()
        # and sit close to the true normalised pair
        assert np.abs(pts - np.array([0.2, 0.8])).max() < 0.05

    def test_count_mismatch(self):
        res = karcher_mean([base_landscape(), base_landscape()])
        with pytest.raises(DataError):
            denoise_sample([diagram([[0.1, 0.5]])], res)


class TestGroupCompare:
    def _sample(self, amp_b=1.0, n_per=4, T=128, seed=5):
        rng = np.random.default_rng(seed)
        base = base_landscape(T)
        landscapes, labels = [], []
        for lab, amp in (("A", 1.0), ("B", amp_b)):
            for _ in range(n_per):
                w = smooth_warp(T, rng.uniform(-0.06, 0.06),
                                int(rng.integers(1, 4)))
                landscapes.append(
                    warp_landscape(Landscape(amp * base.values, 1.0), w))
                labels.append(lab)
        return landscapes, labels, base

    def test_identical_groups_null_difference(self):
        landscapes, labels, base = self._sample(amp_b=1.0)
        res = group_compare(landscapes, labels, tol=1e-5, max_iter=12)
        amp = np.abs(base.values).max()
        assert res.sup_difference() <= 0.05 * amp
        assert res.labels == ("A", "B")

    def test_amplitude_shift_detected(self):
        landscapes, labels, base = self._sample(amp_b=1.3)
        res = group_compare(landscapes, labels, tol=1e-5, max_iter=12)
        amp = np.abs(base.values).max()
        # the raw cross-sectional contrast carries the 30 percent gap
        assert res.sup_pointwise() == pytest.approx(0.3 * amp, rel=0.15)
        # the aligned contrast is taken between square-root-velocity
        # representatives, where a c-fold amplitude change enters as sqrt(c);
        # mapping the residual back through the squaring integral leaves a
        # (sqrt(c) - 1)^2 footprint, far below the raw contrast
        kappa = np.sqrt(1.3) - 1.0
        assert res.sup_difference() == pytest.approx(kappa ** 2 * amp,
                                                     rel=0.35)
        assert res.sup_difference() < 0.15 * res.sup_pointwise()
        # A - B with B larger: the difference is negative at the peak
        k, t = np.unravel_index(np.argmax(np.abs(res.difference)),
                                res.difference.shape)
        assert res.difference[k, t] < 0

    def test_subject_warps_cover_all(self):
        landscapes, labels, _ = self._sample()
        res = group_compare(landscapes, labels, tol=1e-4, max_iter=8)
        assert len(res.subject_warps["A"]) == 4
        assert len(res.subject_warps["B"]) == 4
        for w in res.subject_warps["A"] + res.subject_warps["B"]:
            assert isinstance(w, Warp)

    def test_label_validation(self):
        ls = [base_landscape() for _ in range(4)]
        with pytest.raises(DataError):
            group_compare(ls, ["A", "B", "C", "A"])
        with pytest.raises(DataError):
            group_compare(ls, ["A", "A", "A", "A"])
        with pytest.raises(DataError):
            group_compare(ls, ["A", "A", "A", "B"])
        with pytest.raises(DataError):
            group_compare(ls, ["A"])
