"""Covariance estimators operating on budgeted observations.

All estimators consume an :class:`~toepcov.sampling.ObservationSet` and
return an :class:`EstimateReport` whose ``t_hat`` always defines a symmetric
Toeplitz matrix:

* :func:`estimate_by_ruler` -- average sample products over the ordered pairs
  of a ruler, one mean per distance;
* :func:`estimate_circulant` -- diagonalize the empirical covariance in the
  on-grid DFT basis and keep the diagonal;
* :func:`estimate_prony_exact` / :func:`estimate_prony_denoise` /
  :func:`estimate_prony_conditioned` -- recover the frequencies of a low-rank
  instance from the first 2k entries of each sample via the annihilating
  polynomial of a k x k Hankel system, then estimate per-frequency weights;
* :func:`estimate_sft` -- grid-search a small frequency multiset against a
  leverage-subsampled sketch of the empirical covariance.
"""

from __future__ import annotations

import dataclasses
import itertools
import math

import numpy as np

from toepcov.core import (
    FREQ_TOL,
    FrequencyModel,
    ToeplitzVector,
    _avg_diagonals,
    fourier_matrix,
    synthesize,
)
from toepcov.leverage import (
    DEFAULT_OVERSAMPLE,
    LeverageProfile,
    SamplingMatrix,
    draw_sampling_matrix,
    fourier_leverage_bound,
)
from toepcov.rulers import Ruler
from toepcov.sampling import ObservationSet

#: Singular-value cutoff (relative to the largest) for numerical rank /
#: regression pseudoinverses.
RANK_CUTOFF = 1e-10
#: Matching tolerance for "the recovered frequency set equals the true set".
ROOT_TOL = 1e-6
#: Default candidate cap for the SFT net loop.
SFT_CANDIDATE_CAP = 10**6


@dataclasses.dataclass(frozen=True)
class EstimateReport:
    """One estimator run: the Toeplitz estimate plus complexity counters.

    ``freq_model`` is populated by the Prony/SFT paths that recover an
    explicit frequency decomposition; ``diagnostics`` carries method-specific
    conditioning/selection details (residuals, net size, root clustering...).
    """

    t_hat: ToeplitzVector
    method: str
    esc: int
    vsc: int
    tsc: int
    freq_model: FrequencyModel | None = None
    diagnostics: dict = dataclasses.field(default_factory=dict)

    def __post_init__(self) -> None:
        for name in ("esc", "vsc", "tsc"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")


def _report(t_hat: ToeplitzVector, method: str, obs: ObservationSet, **kw) -> EstimateReport:
    return EstimateReport(
        t_hat=t_hat, method=method, esc=obs.esc, vsc=obs.vsc, tsc=obs.tsc, **kw
    )


# ---------------------------------------------------------------------------
# Ruler averaging
# ---------------------------------------------------------------------------


def estimate_by_ruler(obs: ObservationSet, ruler: Ruler | None = None) -> EstimateReport:
    """Per-distance averaging over the ordered pairs of a ruler.

    For each distance s, ``a_hat[s]`` is the average of ``x_j x_k`` over all n
    samples and all ordered pairs (j, k) of ruler indices with |j - k| = s.
    With the full ruler this is exactly the diagonal average of the empirical
    covariance (bit-identical, by matching summation order).
    """
    if ruler is None:
        ruler = Ruler(obs.d, obs.pattern)
    elif ruler.indices != obs.pattern:
        raise ValueError("ruler does not match the observation pattern")
    index = ruler.distance_index()
    missing = np.flatnonzero(index.counts == 0)
    if missing.size:
        raise ValueError(
            f"ruler is incomplete: distance {int(missing[0])} is unrealized"
        )
    v = obs.rows(ruler.indices)
    gram = (v @ v.T) / obs.n
    sums = np.bincount(
        index.labels, weights=gram[index.pos_j, index.pos_k], minlength=obs.d
    )
    a_hat = sums / index.counts
    return _report(
        ToeplitzVector(obs.d, a_hat),
        "ruler",
        obs,
        diagnostics={"ruler_kind": ruler.kind, "ruler_size": len(ruler)},
    )


# ---------------------------------------------------------------------------
# Circulant baseline
# ---------------------------------------------------------------------------


def circulant_spectrum_estimate(x: np.ndarray) -> np.ndarray:
    """Eigenvalue estimates diag((1/n) sum F* x x* F) in the unitary DFT basis.

    Accepts a d x n real or complex matrix of sample columns.
    """
    x = np.atleast_2d(np.asarray(x))
    d, n = x.shape
    f = np.fft.fft(np.eye(d)) / math.sqrt(d)  # unitary DFT, F[j,k] = e^{-2pi i jk/d}/sqrt(d)
    proj = f.conj().T @ x
    return (np.abs(proj) ** 2).sum(axis=1).real / n


def estimate_circulant(obs: ObservationSet) -> EstimateReport:
    """Best circulant approximation from fully observed samples.

    The estimate is ``F diag(lambda_hat) F*`` with F the unitary DFT and
    ``lambda_hat`` the per-frequency average power of the samples.  That
    matrix is real, symmetric, and constant along wrapped diagonals; it is
    returned through its first row with a ``circulant`` flag.
    """
    if obs.pattern != tuple(range(1, obs.d + 1)):
        raise ValueError("circulant estimator requires a full observation pattern")
    x = obs.rows(obs.pattern)
    lam = circulant_spectrum_estimate(x)
    freqs = np.arange(obs.d) / obs.d
    first_row = np.cos(2.0 * np.pi * np.outer(np.arange(obs.d), freqs)) @ lam / obs.d
    return _report(
        ToeplitzVector(obs.d, first_row),
        "circulant",
        obs,
        diagnostics={"circulant": True, "spectrum": lam.tolist()},
    )


# ---------------------------------------------------------------------------
# Prony family
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class PronyDecomposition:
    freqs: tuple[float, ...]
    roots: np.ndarray
    coeffs: np.ndarray  # c solving P_k c = -b_k, low-order first
    k_used: int
    retried: bool


def _freq_from_root(z: np.ndarray) -> np.ndarray:
    """Frequency of a root of the annihilator: z = e^{-2 pi i f}, f in [0, 1)."""
    return (-np.angle(z) / (2.0 * np.pi)) % 1.0


def prony_decompose(x, k: int, rank_cutoff: float = RANK_CUTOFF) -> PronyDecomposition:
    """Annihilating-polynomial frequency recovery from 2k sequence values.

    Builds the k x k Hankel system ``P[i, j] = x[i + j - 1]``,
    ``b[i] = x[k + i]`` (1-based), solves ``P c = -b`` (minimum-norm), and
    roots the annihilator ``q(z) = z^k + sum_s c_s z^{s-1}``.  Roots z map to
    frequencies ``f = -arg(z) / 2 pi mod 1``, so an exactly k-sparse input
    ``x = F_S y`` returns exactly the set S.  A rank-deficient P (true
    sparsity below k) triggers a retry at the numerical rank.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] < 2 * k:
        raise ValueError(f"prony_decompose needs at least 2k={2 * k} values, got {x.shape}")
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    retried = False
    k_eff = k
    while True:
        p = np.empty((k_eff, k_eff))
        for i in range(k_eff):
            p[i, :] = x[i : i + k_eff]
        b = x[k_eff : 2 * k_eff]
        svals = np.linalg.svd(p, compute_uv=False)
        rank = int(np.sum(svals > rank_cutoff * svals[0])) if svals[0] > 0 else 0
        if rank < k_eff:
            if rank == 0:
                raise ValueError(
                    "Prony system is identically zero; the signal has no recoverable "
                    "frequency support"
                )
            k_eff = rank
            retried = True
            continue
        c, *_ = np.linalg.lstsq(p, -b, rcond=rank_cutoff)
        # q(z) = z^k + c_k z^{k-1} + ... + c_1, highest order first for rooting
        poly = np.concatenate([[1.0], c[::-1]])
        roots = np.roots(poly)
        freqs = np.sort(_freq_from_root(roots))
        return PronyDecomposition(
            freqs=tuple(freqs.tolist()),
            roots=roots,
            coeffs=c,
            k_used=k_eff,
            retried=retried,
        )


def _conjugate_symmetrize(
    freqs: np.ndarray, weights: np.ndarray, tol: float = 1e-6
) -> tuple[np.ndarray, np.ndarray]:
    """Snap a numerically conjugate-closed frequency set to exact closure.

    Pairs each f with its mirror 1 - f, averages the pair's frequencies and
    weights, and snaps self-paired frequencies to exactly 0 or 1/2, so the
    result passes the synthesis validator's exact-closure check.
    """
    freqs = np.asarray(freqs, dtype=np.float64) % 1.0
    weights = np.asarray(weights, dtype=np.float64)
    order = np.argsort(freqs)
    freqs, weights = freqs[order].copy(), weights[order].copy()
    r = freqs.shape[0]
    used = np.zeros(r, dtype=bool)
    for i in range(r):
        if used[i]:
            continue
        mirror = (1.0 - freqs[i]) % 1.0
        delta = np.abs(freqs - mirror) % 1.0
        delta = np.minimum(delta, 1.0 - delta)
        delta[used] = np.inf
        j = int(np.argmin(delta))
        if j == i or delta[j] > tol:
            # self-paired: snap to the nearest of 0, 1/2
            freqs[i] = 0.0 if min(freqs[i], 1.0 - freqs[i]) < 0.25 else 0.5
            used[i] = True
            continue
        lo, hi = (i, j) if freqs[i] <= freqs[j] else (j, i)
        mid = 0.5 * (freqs[lo] + (1.0 - freqs[hi]))
        freqs[lo], freqs[hi] = mid % 1.0, (1.0 - mid) % 1.0
        w = 0.5 * (weights[lo] + weights[hi])
        weights[lo] = weights[hi] = w
        used[i] = used[j] = True
    return freqs, weights


def _first_rows(obs: ObservationSet, count: int) -> np.ndarray:
    if obs.pattern != tuple(range(1, count + 1)):
        raise ValueError(
            f"this estimator reads exactly the first {count} entries of each sample; "
            f"the observation pattern must be 1..{count}"
        )
    return obs.rows(obs.pattern)


def estimate_prony_exact(obs: ObservationSet, k: int) -> EstimateReport:
    """Low-rank estimation with exact root recovery (first 2k rows observed).

    The shared frequency set comes from the first sample's decomposition; each
    sample's coefficients solve the k x k system ``F_R y = x[1..k]``, and the
    weight estimate for frequency l is the average of |y_l|^2 over samples.
    Exact rank-k inputs give every sample the same root set (up to floating
    point); the maximum cross-sample frequency disagreement is reported, and
    disagreement beyond ``cluster_tol`` raises a conditioning diagnostic flag
    rather than an error.
    """
    x = _first_rows(obs, 2 * k)
    dec = prony_decompose(x[:, 0], k)
    k_eff = dec.k_used
    shared = np.asarray(dec.freqs)
    f_r = fourier_matrix(shared, k_eff)
    disagreement = 0.0
    for j in range(1, obs.n):
        other = prony_decompose(x[:, j], k)
        if other.k_used == k_eff:
            d = np.abs(np.sort(np.asarray(other.freqs)) - np.sort(shared)) % 1.0
            disagreement = max(disagreement, float(np.minimum(d, 1.0 - d).max()))
        else:
            disagreement = math.inf
    y = np.linalg.solve(f_r, x[:k_eff, :].astype(np.complex128))
    d_hat = (np.abs(y) ** 2).mean(axis=1)
    freqs, weights = _conjugate_symmetrize(shared, d_hat)
    fm = FrequencyModel(obs.d, freqs, weights)
    return _report(
        synthesize(fm),
        "prony",
        obs,
        freq_model=fm,
        diagnostics={
            "k": k,
            "k_used": k_eff,
            "rank_retry": dec.retried,
            "freq_disagreement": disagreement,
            "conditioning_flag": bool(disagreement > 1e-6),
        },
    )


def prony_inexact(
    x, k: int, beta: float, rank_cutoff: float = RANK_CUTOFF
) -> tuple[tuple[float, ...], np.ndarray]:
    """Noise-tolerant Prony step: rounded roots plus least-squares coefficients.

    Frequencies from :func:`prony_decompose` are snapped to the grid of
    integer multiples of ``2^(3 - beta/k)`` on the unit circle (duplicates
    merged), then the coefficients solve the 2k-row least-squares problem
    ``min_y ||F_R y - x[1..2k]||``.  Valid for ``beta >= k log k``.
    """
    if beta < k * math.log(max(k, 1)):
        raise ValueError(f"beta must be at least k log k = {k * math.log(max(k, 1)):.3f}")
    x = np.asarray(x, dtype=np.float64)
    dec = prony_decompose(x, k, rank_cutoff)
    step = 2.0 ** (3.0 - beta / k)
    freqs = np.asarray(dec.freqs)
    if step < 1.0:
        freqs = (np.round(freqs / step) * step) % 1.0
    else:
        freqs = np.zeros_like(freqs)  # grid coarser than the circle collapses to 0
    freqs = np.unique(freqs)
    f_r = fourier_matrix(freqs, 2 * dec.k_used)
    y, *_ = np.linalg.lstsq(f_r, x[: 2 * dec.k_used].astype(np.complex128), rcond=RANK_CUTOFF)
    return tuple(freqs.tolist()), y


def estimate_prony_denoise(obs: ObservationSet, k: int, beta: float) -> EstimateReport:
    """Denoise-then-average: reconstruct each sample from its recovered
    frequency decomposition, then run full-ruler averaging on the
    reconstructions.

    Only the first 2k entries of each raw sample are read (esc stays 2k); the
    d-entry reconstructions ``x_hat = F_R y`` are synthetic.
    """
    x = _first_rows(obs, 2 * k)
    recon = np.empty((obs.d, obs.n))
    residual = 0.0
    retries = 0
    for j in range(obs.n):
        freqs, y = prony_inexact(x[:, j], k, beta)
        if len(freqs) < k:
            retries += 1
        col = fourier_matrix(freqs, obs.d) @ y
        recon[:, j] = col.real
        residual = max(residual, float(np.abs(col.imag).max(initial=0.0)))
    gram = (recon @ recon.T) / obs.n
    a_hat = _avg_diagonals(gram)
    return _report(
        ToeplitzVector(obs.d, a_hat),
        "prony-denoise",
        obs,
        diagnostics={
            "k": k,
            "beta": beta,
            "reduced_rank_samples": retries,
            "max_imag_reconstruction": residual,
        },
    )


def default_conditioned_beta(
    k: int, d: int, kappa: float, eps: float, c_dim: float = 4.0, c_cond: float = 4.0
) -> float:
    """beta growing as k log d plus k log(kappa/eps), floored at k log k."""
    beta = c_dim * k * math.log2(max(d, 2)) + c_cond * k * math.log2(max(kappa / eps, 2.0))
    return max(beta, k * math.log(max(k, 1)) + 1.0)


def estimate_prony_conditioned(
    obs: ObservationSet,
    k: int,
    kappa: float,
    eps: float = 0.5,
    beta: float | None = None,
    cluster_tol: float | None = None,
) -> EstimateReport:
    """Low-rank estimation under a condition-number bound (first 2k rows).

    Every sample runs the noise-tolerant Prony step; the per-sample root sets
    are clustered on the unit circle with a tolerance below the minimum root
    separation guaranteed for condition number kappa (chord distance of order
    1/sqrt(d * kappa)).  Weights are the mean of |y_l|^2 over samples within
    each cluster.  Fewer clusters than the numerical rank of the first sample
    raises the ``conditioning_flag`` diagnostic.
    """
    if kappa < 1.0:
        raise ValueError(f"condition number bound must be >= 1, got {kappa}")
    if beta is None:
        beta = default_conditioned_beta(k, obs.d, kappa, eps)
    if cluster_tol is None:
        cluster_tol = 0.5 / math.sqrt(obs.d * kappa)
    x = _first_rows(obs, 2 * k)
    per_sample: list[tuple[np.ndarray, np.ndarray]] = []
    for j in range(obs.n):
        freqs, y = prony_inexact(x[:, j], k, beta)
        per_sample.append((np.asarray(freqs), y))
    # Cluster the union of recovered roots by chord distance on the circle.
    points = np.concatenate([f for f, _ in per_sample])
    order = np.argsort(points)
    centers: list[list[float]] = []
    for f in points[order]:
        if centers and _chord(f, centers[-1][-1]) <= cluster_tol:
            centers[-1].append(float(f))
        elif centers and _chord(f, centers[0][0]) <= cluster_tol:
            centers[0].insert(0, float(f - 1.0))  # wraps past 1 onto the first cluster
        else:
            centers.append([float(f)])
    cluster_freqs = np.asarray([np.mean(c) % 1.0 for c in centers])
    sums = np.zeros(cluster_freqs.shape[0])
    hits = np.zeros(cluster_freqs.shape[0])
    agree = True
    for freqs, y in per_sample:
        if freqs.shape[0] != cluster_freqs.shape[0]:
            agree = False
        for f, coeff in zip(freqs, y):
            cid = int(np.argmin(_chord(f, cluster_freqs)))
            if _chord(f, cluster_freqs[cid]) > 2.0 * cluster_tol:
                agree = False
            sums[cid] += abs(coeff) ** 2
            hits[cid] += 1.0
    d_hat = sums / np.maximum(hits, 1.0)
    expected = prony_decompose(x[:, 0], k).k_used
    merged = cluster_freqs.shape[0] < expected
    freqs_s, weights_s = _conjugate_symmetrize(cluster_freqs, d_hat)
    fm = FrequencyModel(obs.d, freqs_s, weights_s)
    return _report(
        synthesize(fm),
        "prony-cond",
        obs,
        freq_model=fm,
        diagnostics={
            "k": k,
            "kappa": kappa,
            "beta": beta,
            "cluster_tol": cluster_tol,
            "clusters": int(cluster_freqs.shape[0]),
            "conditioning_flag": bool(merged or not agree),
            "uneven_cluster_hits": bool(hits.size and hits.min() != hits.max()),
        },
    )


def _chord(f, g) -> np.ndarray:
    """Chord distance |e^{2 pi i f} - e^{2 pi i g}| on the unit circle."""
    return np.abs(np.exp(2j * np.pi * np.asarray(f)) - np.exp(2j * np.pi * np.asarray(g)))


# ---------------------------------------------------------------------------
# Sparse Fourier transform estimator
# ---------------------------------------------------------------------------


def sft_sampling_patterns(
    d: int,
    m: int,
    net_step: float,
    seed: int,
    c1: float = 4.0,
    c2: float = 10.0,
    oversample: float = DEFAULT_OVERSAMPLE,
) -> tuple[SamplingMatrix, SamplingMatrix, LeverageProfile]:
    """The two row samplers the SFT estimator reads through.

    Both are drawn from the Fourier leverage profile for frequency-set size
    2m, with sketch accuracy eps = 1/c1 and failure budget
    delta = net_step^m / c2, on distinct streams of the same seed.
    """
    if m < 1:
        raise ValueError(f"m must be positive, got {m}")
    if not 0.0 < net_step <= 1.0:
        raise ValueError(f"net_step must lie in (0, 1], got {net_step}")
    profile = fourier_leverage_bound(d, min(2 * m, d))
    eps = min(1.0, 1.0 / c1)
    delta = min(1.0, net_step**m / c2)
    s1 = draw_sampling_matrix(profile, eps, delta, seed, oversample, stream=1)
    s2 = draw_sampling_matrix(profile, eps, delta, seed, oversample, stream=2)
    return s1, s2, profile


def _frequency_net(net_step: float) -> np.ndarray:
    """The grid {0, alpha, 2 alpha, ..., 1} (1 included; duplicates dropped)."""
    count = int(math.floor(1.0 / net_step + 1e-12))
    pts = np.arange(count + 1) * net_step
    if pts[-1] < 1.0 - 1e-12:
        pts = np.append(pts, 1.0)
    return pts


def estimate_sft(
    obs: ObservationSet,
    s1: SamplingMatrix,
    s2: SamplingMatrix,
    m: int,
    net_step: float,
    candidate_cap: int = SFT_CANDIDATE_CAP,
    randomized_fallback: bool = False,
    fallback_draws: int = 20_000,
    seed: int = 0,
) -> EstimateReport:
    """Grid search over frequency multisets against a two-sided sketch.

    For each size-m multiset M from the net, the candidate covariance
    ``F_M W F_M*`` is fitted by sketched least squares
    ``W = (S1 F_M)^+ (S1 X X^T S2^T) (F_M* S2^T-as-columns)^+`` and scored by
    the sketched residual; the best candidate (ties: lexicographically
    smallest sorted tuple) is diagonal-averaged into the estimate.  Samples
    are consumed at 1/sqrt(n) column scale, so the sketched target is the
    empirical covariance.

    The winning ``W`` keeps only its Hermitian part before averaging: the
    population solution is Hermitian, and discarding the anti-Hermitian sketch
    noise is what keeps the imaginary residue of the output at machine scale
    (asserted at 1e-8 relative Frobenius mass).

    Candidate counts beyond ``candidate_cap`` are rejected unless
    ``randomized_fallback`` is set, which scores ``fallback_draws`` uniform
    candidates instead (a labeled heuristic, not the exhaustive contract).
    """
    union = tuple(sorted(set(s1.indices) | set(s2.indices)))
    if obs.pattern != union:
        raise ValueError(
            "observation pattern must be exactly the union of the two sampler "
            "index sets"
        )
    net = _frequency_net(net_step)
    total = math.comb(net.shape[0] + m - 1, m)
    used_fallback = False
    if total > candidate_cap:
        if not randomized_fallback:
            raise ValueError(
                f"net of {net.shape[0]} points with m={m} yields {total} candidates, "
                f"exceeding the cap {candidate_cap}; raise the cap, coarsen the net, "
                f"or set randomized_fallback"
            )
        used_fallback = True
        rng = np.random.default_rng(seed)
        draws = {
            tuple(sorted(net[rng.integers(0, net.shape[0], size=m)].tolist()))
            for _ in range(fallback_draws)
        }
        candidates = sorted(draws)
    else:
        candidates = [
            tuple(np.asarray(c).tolist())
            for c in itertools.combinations_with_replacement(net.tolist(), m)
        ]

    scale = 1.0 / math.sqrt(obs.n)
    x1 = s1.apply(_rows_from_union(obs, s1, union)) * scale
    x2 = s2.apply(_rows_from_union(obs, s2, union)) * scale
    target = x1 @ x2.T  # S1 (X X^T) S2^T at 1/sqrt(n) column scale

    rows1 = np.asarray(s1.indices) - 1
    rows2 = np.asarray(s2.indices) - 1
    sc1 = s1.scales[:, None]
    sc2 = s2.scales[:, None]

    best: tuple[float, tuple[float, ...], np.ndarray] | None = None
    residuals: list[float] = []
    for cand in candidates:
        f_cols = np.exp(-2j * np.pi * np.outer(np.arange(obs.d), np.asarray(cand)))
        a1 = sc1 * f_cols[rows1]  # S1 F_M
        a2 = (sc2 * f_cols[rows2]).conj().T  # F_M* S2^T
        w = np.linalg.pinv(a1, rcond=RANK_CUTOFF) @ target @ np.linalg.pinv(a2, rcond=RANK_CUTOFF)
        resid = float(np.linalg.norm(a1 @ w @ a2 - target))
        residuals.append(resid)
        if best is None or resid < best[0]:
            best = (resid, cand, w)
    assert best is not None
    c_best, m_best, w_best = best

    f_best = fourier_matrix(np.asarray(m_best), obs.d)
    w_herm = 0.5 * (w_best + w_best.conj().T)
    a_bar = _avg_diagonals(f_best @ w_herm @ f_best.conj().T)
    imag_mass = _toeplitz_frobenius(obs.d, a_bar.imag)
    real_mass = _toeplitz_frobenius(obs.d, a_bar.real)
    if imag_mass > 1e-8 * max(real_mass, np.finfo(np.float64).tiny):
        raise ArithmeticError(
            f"imaginary residue of the averaged output is too large "
            f"({imag_mass:.3e} vs real mass {real_mass:.3e})"
        )
    weights = np.abs(np.diag(w_herm))
    fm: FrequencyModel | None
    try:
        freqs_s, weights_s = _conjugate_symmetrize(np.asarray(m_best) % 1.0, weights)
        dedup_f, dedup_w = _dedup_frequencies(freqs_s, weights_s)
        fm = FrequencyModel(obs.d, dedup_f, dedup_w)
        fm.validate_closure()
    except ValueError:
        fm = None  # candidate multisets need not be conjugate-closed
    return _report(
        ToeplitzVector(obs.d, a_bar.real),
        "sft",
        obs,
        freq_model=fm,
        diagnostics={
            "m": m,
            "net_step": net_step,
            "net_size": int(net.shape[0]),
            "candidates_evaluated": len(candidates),
            "m_best": list(m_best),
            "c_best": c_best,
            "residual_max": max(residuals),
            "randomized_fallback": used_fallback,
            "imag_mass_ratio": imag_mass / max(real_mass, np.finfo(np.float64).tiny),
            "s1_rows": s1.n_rows,
            "s2_rows": s2.n_rows,
        },
    )


def _rows_from_union(obs: ObservationSet, s: SamplingMatrix, union: tuple[int, ...]) -> np.ndarray:
    """Reassemble a d x n matrix that is valid on the sampler's rows only."""
    full = np.zeros((obs.d, obs.n))
    full[np.asarray(union) - 1] = obs.rows(union)
    return full


def _dedup_frequencies(freqs: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Merge coinciding frequencies (sum their weights)."""
    out_f: list[float] = []
    out_w: list[float] = []
    for f, w in sorted(zip(freqs.tolist(), weights.tolist())):
        if out_f and (min(abs(f - out_f[-1]), 1.0 - abs(f - out_f[-1])) <= FREQ_TOL):
            out_w[-1] += w
        elif out_f and min(abs(f - out_f[0]), 1.0 - abs(f - out_f[0])) <= FREQ_TOL:
            out_w[0] += w
        else:
            out_f.append(f)
            out_w.append(w)
    return np.asarray(out_f), np.asarray(out_w)


def _toeplitz_frobenius(d: int, a: np.ndarray) -> float:
    """Frobenius norm of Toep(a) from its diagonal values."""
    mult = np.concatenate([[float(d)], 2.0 * np.arange(d - 1, 0, -1, dtype=np.float64)])
    return float(math.sqrt(np.sum(mult * a * a)))
