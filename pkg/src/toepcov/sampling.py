"""Seeded Gaussian batches and entry-level observation with budget accounting.

Estimators never see a raw sample matrix: they consume an
:class:`ObservationSet`, which exposes exactly the rows an observation
pattern requested and carries the exact sample-complexity counters

* ESC -- entries read per vector (max over vectors),
* VSC -- vectors touched,
* TSC -- total entries read.

Tests enforce the discipline by poisoning unobserved entries with NaN: an
estimator that peeks outside its pattern produces NaN output.
"""

from __future__ import annotations

import dataclasses
import struct
from typing import Iterable, Sequence

import numpy as np

from toepcov.core import ToeplitzVector, sqrt_factor
from toepcov.leverage import SamplingMatrix
from toepcov.rulers import Ruler

#: Bytes identifying the binary batch dump format.
_DUMP_MAGIC = b"TCVB"
_SCALE_CODES = {"unit": 0, "inv_sqrt_n": 1}
_SCALE_NAMES = {v: k for k, v in _SCALE_CODES.items()}

# Cache of PSD square roots keyed by the diagonal vector's bytes; bench sweeps
# redraw from the same instance thousands of times.
_SQRT_CACHE: dict[tuple[int, bytes], np.ndarray] = {}
_SQRT_CACHE_LIMIT = 16


@dataclasses.dataclass(frozen=True)
class SampleBatch:
    """n Gaussian vectors with covariance Toep(a), as the columns of ``values``.

    ``scale`` records the column normalization: "unit" columns are N(0, T)
    draws; "inv_sqrt_n" columns carry an extra 1/sqrt(n) (the convention the
    SFT estimator applies internally -- :func:`draw_samples` always emits
    "unit").
    """

    d: int
    n: int
    values: np.ndarray
    seed: int
    scale: str = "unit"

    def __post_init__(self) -> None:
        if self.scale not in _SCALE_CODES:
            raise ValueError(f"unknown scale flag {self.scale!r}")
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (self.d, self.n):
            raise ValueError(f"values must be d x n = {(self.d, self.n)}, got {v.shape}")
        object.__setattr__(self, "values", v)

    def dump(self, path) -> None:
        """Binary dump: magic, d, n, seed (two 64-bit words), scale code, then
        the matrix column-major as little-endian float64."""
        seed = self.seed % (1 << 128)
        header = struct.pack(
            "<4sQQQQB",
            _DUMP_MAGIC,
            self.d,
            self.n,
            seed & ((1 << 64) - 1),
            seed >> 64,
            _SCALE_CODES[self.scale],
        )
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(np.asfortranarray(self.values).astype("<f8").tobytes(order="F"))

    @staticmethod
    def load(path) -> "SampleBatch":
        with open(path, "rb") as fh:
            header = fh.read(struct.calcsize("<4sQQQQB"))
            magic, d, n, seed_lo, seed_hi, scale_code = struct.unpack("<4sQQQQB", header)
            if magic != _DUMP_MAGIC:
                raise ValueError(f"not a sample-batch dump (bad magic {magic!r})")
            if scale_code not in _SCALE_NAMES:
                raise ValueError(f"unknown scale code {scale_code}")
            body = np.frombuffer(fh.read(8 * d * n), dtype="<f8")
            if body.size != d * n:
                raise ValueError("truncated sample-batch dump")
        values = body.reshape((d, n), order="F").astype(np.float64)
        return SampleBatch(d, n, values, seed_lo | (seed_hi << 64), _SCALE_NAMES[scale_code])


def _cached_sqrt_factor(t: ToeplitzVector) -> np.ndarray:
    key = (t.d, t.a.tobytes())
    hit = _SQRT_CACHE.get(key)
    if hit is None:
        if len(_SQRT_CACHE) >= _SQRT_CACHE_LIMIT:
            _SQRT_CACHE.clear()
        hit = _SQRT_CACHE[key] = sqrt_factor(t)
    return hit


def standard_normal_columns(d: int, n: int, seed: int, first_col: int = 0) -> np.ndarray:
    """d x n standard-normal matrix from per-column Philox counter blocks.

    Each column owns a fixed budget of uniform words -- 2*ceil(d/2) rounded up
    to a multiple of 4, since Philox's counter advances in 4-word blocks --
    at a counter offset proportional to its column index, mapped through the
    Box-Muller transform.  Columns therefore never depend on n: growing a
    batch, or generating a tail starting at ``first_col``, reproduces earlier
    columns bit-for-bit.
    """
    m = (d + 1) // 2
    blocks_per_col = (2 * m + 3) // 4  # advance() counts 4-word counter blocks
    bitgen = np.random.Philox(key=seed % (1 << 128))
    if first_col:
        bitgen.advance(first_col * blocks_per_col)
    rng = np.random.Generator(bitgen)
    u = rng.random((n, 4 * blocks_per_col))
    u1 = u[:, :m]
    u2 = u[:, m : 2 * m]
    radius = np.sqrt(-2.0 * np.log1p(-u1))
    angle = 2.0 * np.pi * u2
    z = np.concatenate([radius * np.cos(angle), radius * np.sin(angle)], axis=1)
    return z[:, :d].T.copy()


def draw_samples(t: ToeplitzVector, n: int, seed: int, first_col: int = 0) -> SampleBatch:
    """n i.i.d. N(0, Toep(a)) columns, deterministic per (t, n, seed).

    ``first_col`` generates the batch slice that starts at that column index
    of the same stream (for growing n without re-drawing earlier columns).
    """
    if n < 1:
        raise ValueError(f"sample count must be positive, got n={n}")
    if not np.any(t.a):
        return SampleBatch(t.d, n, np.zeros((t.d, n)), seed)
    b = _cached_sqrt_factor(t)  # raises if t is not PSD within PSD_TOL
    g = standard_normal_columns(t.d, n, seed, first_col)
    return SampleBatch(t.d, n, b @ g, seed)


class SealedEntryError(KeyError):
    """An estimator asked for a sample entry outside the observation pattern."""


@dataclasses.dataclass(frozen=True)
class ObservationSet:
    """The entries actually read from each sample, plus exact counters.

    The same 1-based row ``pattern`` applies to every vector (the estimators
    here are non-adaptive), so esc = |pattern|, vsc = n, tsc = n * esc.
    """

    d: int
    n: int
    pattern: tuple[int, ...]
    values: np.ndarray  # |pattern| x n, rows aligned with pattern
    pattern_kind: str
    esc: int
    vsc: int
    tsc: int

    def rows(self, indices: Iterable[int]) -> np.ndarray:
        """Observed rows for the requested 1-based indices (order preserved)."""
        want = [int(j) for j in indices]
        pos = {j: i for i, j in enumerate(self.pattern)}
        missing = [j for j in want if j not in pos]
        if missing:
            raise SealedEntryError(
                f"entries at rows {missing} were not observed (pattern has "
                f"{len(self.pattern)} rows)"
            )
        return self.values[[pos[j] for j in want], :]

    def dense_view(self) -> np.ndarray:
        """d x n view with NaN poison at every unobserved entry (test instrument)."""
        out = np.full((self.d, self.n), np.nan)
        out[np.asarray(self.pattern) - 1, :] = self.values
        return out


def _pattern_indices(pattern) -> tuple[tuple[int, ...], str]:
    if isinstance(pattern, Ruler):
        return pattern.indices, "ruler"
    if isinstance(pattern, SamplingMatrix):
        return pattern.indices, "sampling-matrix"
    if isinstance(pattern, Sequence) or isinstance(pattern, np.ndarray):
        idx = tuple(sorted(set(int(j) for j in pattern)))
        return idx, "indices"
    raise TypeError(f"unsupported observation pattern type: {type(pattern)!r}")


def observe(batch: SampleBatch, pattern) -> ObservationSet:
    """Expose exactly the requested rows of the batch, with counters.

    ``pattern`` may be a Ruler, a SamplingMatrix, or a plain index collection
    (1-based).  Duplicate indices count once (an entry read twice in one
    vector is still one entry).
    """
    indices, kind = _pattern_indices(pattern)
    if not indices:
        raise ValueError("observation pattern is empty")
    if indices[0] < 1 or indices[-1] > batch.d:
        raise ValueError(f"pattern indices must lie in [1, {batch.d}]")
    rows = np.asarray(indices) - 1
    esc = len(indices)
    return ObservationSet(
        d=batch.d,
        n=batch.n,
        pattern=indices,
        values=batch.values[rows, :].copy(),
        pattern_kind=kind,
        esc=esc,
        vsc=batch.n,
        tsc=esc * batch.n,
    )
