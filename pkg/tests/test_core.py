import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import avg_oracle, random_closed_model, synthesize_oracle, toeplitz_oracle
from toepcov.core import (
    FrequencyModel,
    PowerIterationResult,
    ToeplitzVector,
    avg,
    densify,
    dtft_grid_slack,
    dtft_norm_bound,
    fourier_matrix,
    low_rank_stats,
    power_iteration,
    spectral_norm,
    sqrt_factor,
    synthesize,
)


class TestToeplitzVector:
    def test_rejects_bad_shapes(self):
        with pytest.raises(ValueError):
            ToeplitzVector(0, np.array([]))
        with pytest.raises(ValueError):
            ToeplitzVector(3, np.array([1.0, 2.0]))
        with pytest.raises(ValueError):
            ToeplitzVector(2, np.array([[1.0, 2.0]]))
        with pytest.raises(ValueError):
            ToeplitzVector(2, np.array([1.0, np.nan]))

    def test_is_immutable(self):
        t = ToeplitzVector(2, np.array([1.0, 0.5]))
        with pytest.raises(ValueError):
            t.a[0] = 7.0

    def test_subtraction(self):
        t = ToeplitzVector(2, np.array([3.0, 1.0])) - ToeplitzVector.identity(2)
        assert np.array_equal(t.a, [2.0, 1.0])
        with pytest.raises(ValueError):
            ToeplitzVector.identity(2) - ToeplitzVector.identity(3)

    def test_identity_and_zero(self):
        assert np.array_equal(densify(ToeplitzVector.identity(3)), np.eye(3))
        assert not densify(ToeplitzVector.zero(3)).any()


class TestDensify:
    def test_small_explicit(self):
        t = ToeplitzVector(3, np.array([2.0, -1.0, 0.5]))
        expect = np.array([[2.0, -1.0, 0.5], [-1.0, 2.0, -1.0], [0.5, -1.0, 2.0]])
        assert np.array_equal(densify(t), expect)

    @given(st.integers(1, 12), st.integers(0, 2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_matches_scipy(self, d, seed):
        a = np.random.default_rng(seed).normal(size=d)
        assert np.array_equal(densify(ToeplitzVector(d, a)), toeplitz_oracle(a))


class TestAvg:
    def test_outer_product_frozen(self):
        # x = [1, 2]: diag mean (1 + 4)/2 = 2.5, off-diag mean (2 + 2)/2 = 2.
        x = np.array([1.0, 2.0])
        assert np.array_equal(avg(np.outer(x, x)).a, [2.5, 2.0])

    def test_asymmetric_frozen(self):
        # [[1, 2], [0, 1]]: both orientations of the off-diagonal are averaged.
        assert np.array_equal(avg(np.array([[1.0, 2.0], [0.0, 1.0]])).a, [1.0, 1.0])

    def test_rejects_complex_and_nonsquare(self):
        with pytest.raises(ValueError):
            avg(np.ones((2, 3)))
        with pytest.raises(ValueError):
            avg(np.ones((2, 2), dtype=complex))

    @given(st.integers(1, 9), st.integers(0, 2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_matches_double_loop(self, d, seed):
        m = np.random.default_rng(seed).normal(size=(d, d))
        assert np.allclose(avg(m).a, avg_oracle(m), rtol=1e-12, atol=1e-12)

    def test_projection_fixes_toeplitz(self):
        a = np.array([3.0, 1.0, -0.5, 0.25])
        assert np.array_equal(avg(densify(ToeplitzVector(4, a))).a, a)


class TestFrequencyModel:
    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            FrequencyModel(4, [1.5], [1.0])
        with pytest.raises(ValueError):
            FrequencyModel(4, [0.25], [-1.0])
        with pytest.raises(ValueError):
            FrequencyModel(4, [], [])

    def test_closure_accepts_pairs_and_self_paired(self):
        FrequencyModel(4, [0.25, 0.75], [1.0, 1.0]).validate_closure()
        FrequencyModel(4, [0.0], [2.0]).validate_closure()
        FrequencyModel(4, [0.5], [2.0]).validate_closure()

    def test_closure_rejects_unpaired(self):
        with pytest.raises(ValueError, match="unpaired"):
            FrequencyModel(4, [0.25], [1.0]).validate_closure()

    def test_closure_rejects_unequal_weights(self):
        with pytest.raises(ValueError, match="unequal weights"):
            FrequencyModel(4, [0.25, 0.75], [1.0, 2.0]).validate_closure()

    def test_closure_rejects_duplicates(self):
        with pytest.raises(ValueError, match="not distinct"):
            FrequencyModel(4, [0.3, 0.3 + 1e-12, 0.7], [1.0, 1.0, 1.0]).validate_closure()

    def test_zero_and_one_coincide_on_circle(self):
        with pytest.raises(ValueError, match="not distinct"):
            FrequencyModel(4, [0.0, 1.0], [1.0, 1.0]).validate_closure()


class TestFourierMatrix:
    def test_explicit_small(self):
        f = fourier_matrix([0.25], 4)
        assert np.allclose(f[:, 0], [1, -1j, -1, 1j])

    def test_column_structure(self):
        f = fourier_matrix([0.1, 0.7], 6)
        assert f.shape == (6, 2)
        assert np.allclose(f[0], 1.0)
        assert np.allclose(f[2], f[1] ** 2)


class TestSynthesize:
    def test_frozen_quarter_pair(self):
        fm = FrequencyModel(3, [0.25, 0.75], [0.5, 0.5])
        assert np.allclose(synthesize(fm).a, [1.0, 0.0, -1.0], atol=1e-15)

    def test_frozen_self_paired(self):
        assert np.allclose(synthesize(FrequencyModel(3, [0.0], [1.0])).a, [1.0, 1.0, 1.0])
        assert np.allclose(synthesize(FrequencyModel(2, [0.5], [1.0])).a, [1.0, -1.0])

    def test_validates_closure(self):
        with pytest.raises(ValueError):
            synthesize(FrequencyModel(3, [0.25], [1.0]))

    @given(st.integers(1, 10), st.integers(1, 4), st.booleans(), st.integers(0, 2**32 - 1))
    @settings(max_examples=40, deadline=None)
    def test_matches_matrix_product(self, d, pairs, self_paired, seed):
        fm = random_closed_model(d, pairs, np.random.default_rng(seed), self_paired)
        assert np.allclose(synthesize(fm).a, synthesize_oracle(fm), atol=1e-10)

    def test_synthesized_matrix_is_psd(self, rng):
        fm = random_closed_model(8, 3, rng)
        w = np.linalg.eigvalsh(densify(synthesize(fm)))
        assert w.min() > -1e-10


class TestSpectralNorm:
    def test_frozen_tridiagonal(self):
        # Toep([2, 1, 0]) has eigenvalues 2 + sqrt(2), 2, 2 - sqrt(2).
        t = ToeplitzVector(3, np.array([2.0, 1.0, 0.0]))
        assert spectral_norm(densify(t)) == pytest.approx(2.0 + math.sqrt(2.0), abs=1e-9)

    def test_zero_matrix(self):
        res = power_iteration(np.zeros((4, 4)))
        assert res == PowerIterationResult(0.0, True, res.iterations)

    def test_negative_dominant_eigenvalue(self):
        w = np.diag([1.0, -5.0, 2.0])
        assert spectral_norm(w) == pytest.approx(5.0, rel=1e-8)

    def test_plus_minus_pair(self):
        # Top eigenvalues +3 and -3: the Rayleigh quotient of M at a mixed
        # iterate would stall below 3; the reported value must not.
        m = np.diag([3.0, -3.0, 1.0])
        assert spectral_norm(m) == pytest.approx(3.0, rel=1e-9)

    @given(st.integers(1, 16), st.integers(0, 2**32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_matches_eigvalsh(self, d, seed):
        g = np.random.default_rng(seed).normal(size=(d, d))
        m = (g + g.T) / 2.0
        exact = np.abs(np.linalg.eigvalsh(m)).max()
        assert spectral_norm(m) == pytest.approx(exact, rel=1e-5, abs=1e-12)

    def test_rejects_nonsquare(self):
        with pytest.raises(ValueError):
            spectral_norm(np.ones((2, 3)))


class TestDtftBound:
    def test_frozen_values(self):
        # a = [1, 1]: L(x) = 1 + 2 cos(2 pi x), max 3 at x = 0.
        t = ToeplitzVector(2, np.array([1.0, 1.0]))
        assert dtft_norm_bound(t, 16) == pytest.approx(3.0, abs=1e-12)
        # a = [1, -1]: max 3 at x = 1/2 (an interior grid point).
        t2 = ToeplitzVector(2, np.array([1.0, -1.0]))
        assert dtft_norm_bound(t2, 17) == pytest.approx(3.0, abs=1e-12)

    def test_requires_dense_grid(self):
        with pytest.raises(ValueError, match="4\\*d\\^2"):
            dtft_norm_bound(ToeplitzVector(4, np.ones(4)), 63)

    def test_slack_shrinks_with_grid(self):
        t = ToeplitzVector(4, np.array([1.0, 0.5, 0.2, 0.1]))
        assert dtft_grid_slack(t, 1000) > dtft_grid_slack(t, 10000)
        # slack formula: 2 pi sum(s |a_s|) / (G - 1)
        assert dtft_grid_slack(t, 65) == pytest.approx(
            2.0 * np.pi * (0.5 + 0.4 + 0.3) / 64.0
        )

    def test_dominates_spectral_norm_with_slack(self, rng):
        for _ in range(20):
            fm = random_closed_model(8, 2, rng)
            t = synthesize(fm)
            g = 4 * t.d * t.d
            bound = dtft_norm_bound(t, g) + dtft_grid_slack(t, g)
            exact = np.abs(np.linalg.eigvalsh(densify(t))).max()
            assert bound >= exact - 1e-9


class TestSqrtFactor:
    def test_factorizes(self, rng):
        fm = random_closed_model(6, 2, rng)
        t = synthesize(fm)
        b = sqrt_factor(t)
        assert np.allclose(b @ b.T, densify(t), atol=1e-10)
        assert np.allclose(b, b.T, atol=1e-10)

    def test_identity(self):
        assert np.allclose(sqrt_factor(ToeplitzVector.identity(4)), np.eye(4))

    def test_rejects_indefinite(self):
        with pytest.raises(ValueError, match="not PSD"):
            sqrt_factor(ToeplitzVector(2, np.array([1.0, 2.0])))

    def test_clamps_tiny_negative_eigenvalues(self):
        # Rank-one Toeplitz: smallest eigenvalue is exactly 0 up to rounding.
        t = synthesize(FrequencyModel(5, [0.0], [1.0]))
        b = sqrt_factor(t)
        assert np.allclose(b @ b.T, densify(t), atol=1e-10)


class TestLowRankStats:
    def test_identity_frozen(self):
        # d=4 identity, k=1: tail norm 1, tail trace 3, total trace 4.
        assert low_rank_stats(ToeplitzVector.identity(4), 1) == (1.0, 3.0, 4.0)

    def test_full_k_leaves_nothing(self):
        t = ToeplitzVector(3, np.array([2.0, 1.0, 0.0]))
        norm_tail, tr_tail, tr = low_rank_stats(t, 3)
        assert norm_tail == 0.0 and tr_tail == 0.0 and tr == pytest.approx(6.0)

    def test_rank_k_model_has_zero_tail(self, rng):
        fm = random_closed_model(8, 2, rng)  # rank 4
        norm_tail, tr_tail, _ = low_rank_stats(synthesize(fm), 4)
        assert norm_tail < 1e-9 and abs(tr_tail) < 1e-9

    def test_rejects_bad_k(self):
        with pytest.raises(ValueError):
            low_rank_stats(ToeplitzVector.identity(3), 4)
