"""Sparse rulers: constructions, validation, distance indexing, coverage.

A ruler is a subset R of {1, ..., d} realizing every distance 0..d-1 as
|j - k| for some j, k in R.  ``R_s`` denotes the set of *ordered* pairs at
distance s; its size |R_s| controls how many products average into diagonal s
of the ruler estimator, and the coverage coefficient
``Delta(R) = sum_s 1/|R_s|`` governs that estimator's variance.
"""

from __future__ import annotations

import dataclasses
import functools
import math

import numpy as np


@dataclasses.dataclass(frozen=True)
class Ruler:
    """A subset of [1, d] with every pairwise distance 0..d-1 realized.

    ``indices`` are 1-based and strictly increasing.  Completeness is *not*
    checked at construction (``is_ruler`` / ``coverage_coefficient`` check it
    where the contract needs it); ``repair_slack`` counts indices appended by
    ``alpha_ruler`` to repair uncovered distances after integer rounding.
    """

    d: int
    indices: tuple[int, ...]
    kind: str = "custom"
    repair_slack: int = 0

    def __post_init__(self) -> None:
        if self.d < 1:
            raise ValueError(f"dimension must be positive, got d={self.d}")
        idx = tuple(int(j) for j in self.indices)
        if not idx:
            raise ValueError("ruler must contain at least one index")
        if any(j < 1 or j > self.d for j in idx):
            raise ValueError(f"ruler indices must lie in [1, {self.d}]: {idx}")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError(f"ruler indices must be strictly increasing: {idx}")
        object.__setattr__(self, "indices", idx)

    def __len__(self) -> int:
        return len(self.indices)

    def distance_index(self) -> "DistanceIndex":
        return _distance_index(self.d, self.indices)

    def is_complete(self) -> bool:
        return bool(np.all(self.distance_index().counts > 0))


@dataclasses.dataclass(frozen=True)
class DistanceIndex:
    """Ordered-pair index of a ruler: for each distance s, which pairs realize it.

    ``pos_j``/``pos_k`` hold 0-based positions into the ruler's index tuple for
    all |R|^2 ordered pairs in row-major order, ``labels`` the distance of each
    pair, and ``counts[s] = |R_s|``.  Row-major enumeration is deliberate: it
    makes the full-ruler estimator's per-distance sums bit-identical to
    ``avg`` of the dense empirical covariance.
    """

    d: int
    indices: tuple[int, ...]
    counts: np.ndarray
    pos_j: np.ndarray
    pos_k: np.ndarray
    labels: np.ndarray

    def pairs(self, s: int) -> list[tuple[int, int]]:
        """Ordered pairs (j, k) of 1-based ruler indices with |j - k| = s."""
        if not 0 <= s < self.d:
            raise ValueError(f"distance must be in [0, {self.d - 1}], got {s}")
        mask = self.labels == s
        idx = np.asarray(self.indices)
        return list(zip(idx[self.pos_j[mask]].tolist(), idx[self.pos_k[mask]].tolist()))


@functools.lru_cache(maxsize=64)
def _distance_index(d: int, indices: tuple[int, ...]) -> DistanceIndex:
    idx = np.asarray(indices, dtype=np.int64)
    r = idx.shape[0]
    pos_j = np.repeat(np.arange(r), r)
    pos_k = np.tile(np.arange(r), r)
    labels = np.abs(idx[pos_j] - idx[pos_k])
    counts = np.bincount(labels, minlength=d)
    for arr in (counts, pos_j, pos_k, labels):
        arr.flags.writeable = False
    return DistanceIndex(d, indices, counts, pos_j, pos_k, labels)


def full_ruler(d: int) -> Ruler:
    """The trivial ruler R = {1, ..., d}."""
    return Ruler(d, tuple(range(1, d + 1)), kind="full")


def sqrt_ruler(d: int) -> Ruler:
    """The explicit sparse ruler of size at most 2*ceil(sqrt(d)) - 1.

    R = {1, ..., q} together with the arithmetic progression
    {d, d - q, d - 2q, ...} for q = ceil(sqrt(d)); the progression stops at
    the last value exceeding q (the construction's set notation is ambiguous
    there, so completeness is covered by tests over d = 1..400).
    """
    if d < 1:
        raise ValueError(f"dimension must be positive, got d={d}")
    q = math.isqrt(d)
    if q * q < d:
        q += 1
    members = set(range(1, q + 1))
    top = d
    while top > q:
        members.add(top)
        top -= q
    return Ruler(d, tuple(sorted(members)), kind="sqrt")


def _covered(members: set[int], d: int) -> np.ndarray:
    idx = np.asarray(sorted(members), dtype=np.int64)
    dist = np.abs(idx[:, None] - idx[None, :]).ravel()
    out = np.zeros(d, dtype=bool)
    out[dist] = True
    return out


def alpha_ruler(d: int, alpha: float) -> Ruler:
    """The two-block ruler R_alpha interpolating between sqrt and full.

    R^(1) = {1, ..., ceil(d^alpha)} and R^(2) = {d - t * floor(d^(1-alpha))}
    for t = 0 .. ceil(d^alpha) - 1 (values below 1 dropped).  The source
    construction assumes d^alpha and d^(1-alpha) are integers; with the
    ceil/floor rounding some distances can go uncovered, in which case the
    smallest repairing indices are appended greedily and counted in
    ``repair_slack``.
    """
    if d < 1:
        raise ValueError(f"dimension must be positive, got d={d}")
    if not 0.5 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [1/2, 1], got {alpha}")
    a = math.ceil(d**alpha)
    b = max(1, math.floor(d ** (1.0 - alpha)))
    members = set(range(1, a + 1))
    members.update(d - t * b for t in range(a) if d - t * b >= 1)
    slack = 0
    covered = _covered(members, d)
    while not covered.all():
        appended = False
        for j in range(1, d + 1):
            if j in members:
                continue
            new_dists = {abs(j - m) for m in members} | {0}
            if any(not covered[s] for s in new_dists):
                members.add(j)
                slack += 1
                covered = _covered(members, d)
                appended = True
                break
        if not appended:  # pragma: no cover - [1,d] always completes a ruler
            raise RuntimeError("could not repair ruler to completeness")
    return Ruler(d, tuple(sorted(members)), kind="alpha", repair_slack=slack)


def is_ruler(indices, d: int) -> bool:
    """True iff every distance 0..d-1 is realized by the index set."""
    idx = sorted(set(int(j) for j in indices))
    if not idx:
        return False
    if idx[0] < 1 or idx[-1] > d:
        raise ValueError(f"indices must lie in [1, {d}]: {idx}")
    return bool(_covered(set(idx), d).all())


def coverage_coefficient(r: Ruler) -> float:
    """Delta(R) = sum_{s=0}^{d-1} 1/|R_s|, by exact pair enumeration.

    The ordered-pair counts are exact integers; the reciprocals are summed
    with ``math.fsum`` so the float result carries no accumulation error.
    Raises on incomplete rulers (some |R_s| = 0).
    """
    counts = r.distance_index().counts
    missing = np.flatnonzero(counts == 0)
    if missing.size:
        raise ValueError(
            f"ruler is incomplete: distances {missing[:8].tolist()}"
            f"{'...' if missing.size > 8 else ''} are unrealized"
        )
    return math.fsum(1.0 / c for c in counts.tolist())


def alpha_coverage_bound(d: int, alpha: float) -> float:
    """The proven upper bound on Delta(R_alpha): 2 d^{2-2a} + d^{1-a}(1 + log ceil(d^{2a-1}))."""
    return 2.0 * d ** (2.0 - 2.0 * alpha) + d ** (1.0 - alpha) * (
        1.0 + math.log(math.ceil(d ** (2.0 * alpha - 1.0)))
    )


def full_coverage_bound(d: int) -> float:
    """Harmonic-sum bound on Delta of the full ruler: 1 + (1 + ln d)/2."""
    return 1.0 + 0.5 * (1.0 + math.log(d))
