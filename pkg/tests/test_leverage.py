import json

import numpy as np
import pytest

from toepcov.core import fourier_matrix
from toepcov.leverage import (
    LeverageProfile,
    SamplingMatrix,
    draw_sampling_matrix,
    fourier_leverage_bound,
    leverage_scores,
)


def leverage_oracle(a: np.ndarray) -> np.ndarray:
    """tau_j = a_j (A* A)^+ a_j* straight from the pseudoinverse."""
    g_pinv = np.linalg.pinv(a.conj().T @ a, rcond=1e-12)
    return np.einsum("ij,jk,ik->i", a, g_pinv, a.conj()).real


class TestLeverageScores:
    def test_matches_pinv_oracle(self, rng):
        for _ in range(10):
            d, s = int(rng.integers(2, 30)), int(rng.integers(1, 6))
            a = rng.normal(size=(d, s)) + 1j * rng.normal(size=(d, s))
            assert np.allclose(leverage_scores(a), leverage_oracle(a), atol=1e-9)

    def test_orthonormal_columns_give_row_norms(self, rng):
        q, _ = np.linalg.qr(rng.normal(size=(12, 3)))
        assert np.allclose(leverage_scores(q), (q**2).sum(axis=1), atol=1e-12)

    def test_sum_is_rank(self, rng):
        for s in (1, 3, 5):
            f = fourier_matrix(rng.uniform(0, 1, size=s), 40)
            assert leverage_scores(f).sum() == pytest.approx(s, abs=1e-6)

    def test_zero_matrix(self):
        assert not leverage_scores(np.zeros((5, 2))).any()

    def test_rank_deficient(self):
        a = np.ones((6, 3))  # rank 1
        tau = leverage_scores(a)
        assert tau.sum() == pytest.approx(1.0, abs=1e-9)


class TestFourierLeverageBound:
    def test_frozen_d10_s1(self):
        prof = fourier_leverage_bound(10, 1)
        expect = [1, 1 / 2, 1 / 3, 1 / 4, 1 / 5, 1 / 5, 1 / 4, 1 / 3, 1 / 2, 1]
        assert np.allclose(prof.tau_bar, expect, atol=1e-15)
        assert prof.tau_bar.sum() == pytest.approx(2 * (1 + 1 / 2 + 1 / 3 + 1 / 4 + 1 / 5))

    def test_symmetric_in_j(self):
        prof = fourier_leverage_bound(33, 4)
        assert np.allclose(prof.tau_bar, prof.tau_bar[::-1])

    def test_dominates_exact_scores(self, rng):
        # The profile must upper-bound the true leverage scores of F_S for
        # every frequency set of the right size (the acceptance gate runs a
        # larger randomized version of this check).
        d = 64
        for _ in range(25):
            s = int(rng.integers(1, 9))
            f = fourier_matrix(rng.uniform(0, 1, size=s), d)
            tau = leverage_scores(f)
            prof = fourier_leverage_bound(d, s)
            assert np.all(tau <= prof.tau_bar + 1e-8)

    def test_uniform_cap_requires_constant(self):
        with pytest.raises(ValueError, match="uniform_c"):
            fourier_leverage_bound(100, 2, include_uniform=True)

    def test_uniform_cap_applies(self):
        base = fourier_leverage_bound(10_000, 2)
        capped = fourier_leverage_bound(10_000, 2, include_uniform=True, uniform_c=1.0)
        assert capped.tau_bar.max() < base.tau_bar.max()
        assert np.all(capped.tau_bar <= base.tau_bar + 1e-15)

    def test_rejects_bad_s(self):
        with pytest.raises(ValueError):
            fourier_leverage_bound(10, 0)
        with pytest.raises(ValueError):
            fourier_leverage_bound(10, 11)

    def test_json_round_trip(self):
        prof = fourier_leverage_bound(12, 3)
        doc = json.loads(prof.to_json())
        assert doc["d"] == 12 and doc["s"] == 3
        assert np.allclose(doc["tau_bar"], prof.tau_bar)


class TestDrawSamplingMatrix:
    def test_deterministic_per_seed_and_stream(self):
        prof = fourier_leverage_bound(200, 2)
        a = draw_sampling_matrix(prof, 0.5, 0.1, seed=9, stream=1)
        b = draw_sampling_matrix(prof, 0.5, 0.1, seed=9, stream=1)
        assert a.indices == b.indices and np.array_equal(a.probs, b.probs)

    def test_streams_differ(self):
        prof = fourier_leverage_bound(4096, 1)
        a = draw_sampling_matrix(prof, 1.0, 0.9, seed=9, stream=1, oversample=0.5)
        b = draw_sampling_matrix(prof, 1.0, 0.9, seed=9, stream=2, oversample=0.5)
        assert a.indices != b.indices

    def test_saturated_probabilities_select_everything(self):
        prof = fourier_leverage_bound(32, 2)
        s = draw_sampling_matrix(prof, 0.25, 0.01, seed=3)
        # factor = 8 * log(3200) / (1/16) is huge: every p_j = 1.
        assert s.indices == tuple(range(1, 33))
        assert np.array_equal(s.probs, np.ones(32))
        assert np.array_equal(s.scales, np.ones(32))

    def test_apply_scales_rows(self, rng):
        prof = fourier_leverage_bound(16, 2)
        s = draw_sampling_matrix(prof, 1.0, 0.9, seed=5, oversample=0.4)
        x = rng.normal(size=(16, 3))
        out = s.apply(x)
        assert out.shape == (s.n_rows, 3)
        sel = np.asarray(s.indices) - 1
        assert np.allclose(out, x[sel] / np.sqrt(s.probs)[:, None])

    def test_validates_inputs(self):
        prof = fourier_leverage_bound(8, 1)
        with pytest.raises(ValueError):
            draw_sampling_matrix(prof, 0.0, 0.5, seed=0)
        with pytest.raises(ValueError):
            draw_sampling_matrix(prof, 0.5, 0.0, seed=0)
        with pytest.raises(ValueError):
            draw_sampling_matrix(prof, 0.5, 0.5, seed=0, oversample=0.0)

    def test_selection_is_unbiased(self):
        # E[sum_{j in S} e_j e_j^T / p_j] = I: the per-row indicator divided
        # by p_j must average to 1.  Constants are tuned so p_j is well below
        # 1 for most rows (nontrivial selection).
        d = 64
        prof = fourier_leverage_bound(d, 1)
        factor_probs = None
        acc = np.zeros(d)
        draws = 2000
        for seed in range(draws):
            s = draw_sampling_matrix(prof, 1.0, 0.9, seed=seed, oversample=0.5)
            if factor_probs is None:
                full_p = np.minimum(
                    1.0, prof.tau_bar * 0.5 * np.log(d / 0.9)
                )
                factor_probs = np.maximum(full_p, np.finfo(np.float64).tiny)
            sel = np.asarray(s.indices) - 1
            acc[sel] += 1.0 / factor_probs[sel]
        mean = acc / draws
        interior = slice(8, d - 8)  # rows with smallest p -> highest variance
        assert np.abs(mean[interior] - 1.0).max() < 0.35
        assert abs(mean.mean() - 1.0) < 0.05


class TestSamplingMatrixValidation:
    def test_probs_must_align(self):
        with pytest.raises(ValueError):
            SamplingMatrix(4, (1, 2), np.array([0.5]), seed=0, stream=0)

    def test_probs_must_be_positive(self):
        with pytest.raises(ValueError):
            SamplingMatrix(4, (1, 2), np.array([0.5, 0.0]), seed=0, stream=0)
