"""Leverage scores, closed-form Fourier leverage bounds, and row sampling.

The leverage score of row ``a_j`` of a matrix A is ``a_j (A* A)^+ a_j*`` --
how hard that row is to express through the others.  For a d x s Fourier
matrix the scores obey the explicit bound ``tau_j <= s / min(j, d+1-j)``
regardless of where the s frequencies sit, which is what lets the SFT
estimator subsample rows obliviously.  Rows are kept independently with
probability proportional to the bound and rescaled by 1/sqrt(p), preserving
squared Frobenius norms in expectation and subspace geometry with high
probability.
"""

from __future__ import annotations

import dataclasses
import json
import math

import numpy as np

#: Pseudoinverse eigenvalue cutoff for exact leverage scores.
LEVERAGE_EIG_CUTOFF = 1e-12
#: Default oversampling constant in the inclusion probabilities.
DEFAULT_OVERSAMPLE = 8.0


@dataclasses.dataclass(frozen=True)
class LeverageProfile:
    """Row-wise upper bounds tau_bar on the leverage scores of d x s Fourier matrices."""

    d: int
    s: int
    tau_bar: np.ndarray

    def __post_init__(self) -> None:
        tb = np.asarray(self.tau_bar, dtype=np.float64).copy()
        if tb.shape != (self.d,):
            raise ValueError(f"tau_bar must have length d={self.d}, got {tb.shape}")
        if np.any((tb <= 0.0) | (tb > 1.0)):
            raise ValueError("tau_bar values must lie in (0, 1]")
        tb.flags.writeable = False
        object.__setattr__(self, "tau_bar", tb)

    def to_json(self) -> str:
        return json.dumps(
            {"d": self.d, "s": self.s, "tau_bar": self.tau_bar.tolist()}
        )


@dataclasses.dataclass(frozen=True)
class SamplingMatrix:
    """A weighted row-selection operator S.

    Applying S keeps the 1-based ``indices`` rows, each scaled by
    ``1/sqrt(p_j)``; unbiasedness of ``||S C||_F^2`` follows from the scaling.
    """

    d: int
    indices: tuple[int, ...]
    probs: np.ndarray
    seed: int
    stream: int = 0

    def __post_init__(self) -> None:
        p = np.asarray(self.probs, dtype=np.float64).copy()
        if p.shape != (len(self.indices),):
            raise ValueError("probs must align with the selected indices")
        if np.any((p <= 0.0) | (p > 1.0)):
            raise ValueError("selected indices must have p in (0, 1]")
        p.flags.writeable = False
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "indices", tuple(int(j) for j in self.indices))

    @property
    def scales(self) -> np.ndarray:
        return 1.0 / np.sqrt(self.probs)

    @property
    def n_rows(self) -> int:
        return len(self.indices)

    def apply(self, m: np.ndarray) -> np.ndarray:
        """S @ M: the selected rows of M, rescaled."""
        m = np.asarray(m)
        if m.shape[0] != self.d:
            raise ValueError(f"matrix has {m.shape[0]} rows, sampler expects {self.d}")
        sel = np.asarray(self.indices) - 1
        out = m[sel].astype(np.result_type(m.dtype, np.float64), copy=True)
        out *= self.scales[:, None] if m.ndim == 2 else self.scales
        return out


def leverage_scores(a: np.ndarray) -> np.ndarray:
    """Exact leverage scores tau_j = a_j (A* A)^+ a_j* of the rows of A.

    The pseudoinverse is taken through the eigendecomposition of A* A with
    eigenvalues below ``LEVERAGE_EIG_CUTOFF`` times the largest treated as
    zero.  Scores lie in [0, 1] and sum to rank(A).
    """
    a = np.atleast_2d(np.asarray(a))
    gram = a.conj().T @ a
    w, v = np.linalg.eigh(gram)
    top = float(w[-1]) if w.size else 0.0
    if top <= 0.0:
        return np.zeros(a.shape[0])
    keep = w > LEVERAGE_EIG_CUTOFF * top
    vk = v[:, keep]
    proj = a @ vk  # rows expressed in the kept eigenbasis
    tau = (np.abs(proj) ** 2 / w[keep]).sum(axis=1)
    return np.clip(tau.real, 0.0, 1.0)


def fourier_leverage_bound(
    d: int,
    s: int,
    include_uniform: bool = False,
    uniform_c: float | None = None,
) -> LeverageProfile:
    """The closed-form profile tau_bar_j = min(1, s / min(j, d+1-j)).

    ``include_uniform`` additionally caps the profile by the uniform bound
    ``c s^6 log^3(s+1) / d``, whose constant the theory leaves unspecified --
    off by default, and ``uniform_c`` must be supplied to enable it.
    """
    if not 1 <= s <= d:
        raise ValueError(f"frequency-set size must satisfy 1 <= s <= d, got s={s}, d={d}")
    j = np.arange(1, d + 1, dtype=np.float64)
    tau = np.minimum(1.0, s / np.minimum(j, d + 1 - j))
    if include_uniform:
        if uniform_c is None:
            raise ValueError("uniform_c must be given when include_uniform is set")
        cap = uniform_c * s**6 * math.log(s + 1) ** 3 / d
        tau = np.minimum(tau, max(cap, np.finfo(np.float64).tiny))
        tau = np.minimum(1.0, tau)
    return LeverageProfile(d, s, tau)


def draw_sampling_matrix(
    profile: LeverageProfile,
    eps: float,
    delta: float,
    seed: int,
    oversample: float = DEFAULT_OVERSAMPLE,
    stream: int = 0,
) -> SamplingMatrix:
    """Independent row sampling with p_j = min(1, tau_bar_j * c * log(d/delta) / eps^2).

    Deterministic given ``(seed, stream)``; distinct streams give independent
    reproducible draws for concurrent use.  Expected selected-row count is
    ``sum_j p_j``.
    """
    if not 0.0 < eps <= 1.0:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    if oversample <= 0.0:
        raise ValueError(f"oversample must be positive, got {oversample}")
    factor = oversample * math.log(profile.d / delta) / (eps * eps)
    p = np.minimum(1.0, profile.tau_bar * max(factor, 0.0))
    # a zero/negative factor (delta ~ d) would select nothing; keep p positive
    p = np.maximum(p, np.finfo(np.float64).tiny)
    rng = np.random.Generator(np.random.Philox(key=[seed % (1 << 64), stream % (1 << 64)]))
    u = rng.random(profile.d)
    sel = np.flatnonzero(u < p)
    return SamplingMatrix(
        d=profile.d,
        indices=tuple((sel + 1).tolist()),
        probs=p[sel],
        seed=seed,
        stream=stream,
    )
