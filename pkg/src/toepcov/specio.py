"""Matrix-spec files and instance generators.

A matrix spec is a small JSON document describing a ground-truth covariance:

* ``{"kind": "toeplitz", "d": 4, "a": [1.0, 0.5, 0.0, 0.0]}`` -- explicit
  diagonal values;
* ``{"kind": "frequency", "d": 4, "freqs": [0.25, 0.75], "weights":
  [0.5, 0.5]}`` -- a conjugate-closed frequency model, synthesized on load.

Parse errors carry the file name plus the JSON line/column (for syntax) or
the offending field name (for shape/value problems).
"""

from __future__ import annotations

import dataclasses
import json
import math

import numpy as np

from toepcov.core import FrequencyModel, ToeplitzVector, _circular_distance, synthesize


class SpecError(ValueError):
    """A matrix-spec document failed to parse or validate."""


@dataclasses.dataclass(frozen=True)
class MatrixSpec:
    """A ground-truth covariance plus (when known) its frequency model."""

    kind: str
    t: ToeplitzVector
    model: FrequencyModel | None = None

    @property
    def d(self) -> int:
        return self.t.d

    def to_dict(self) -> dict:
        if self.kind == "frequency":
            assert self.model is not None
            return {
                "kind": "frequency",
                "d": self.d,
                "freqs": self.model.freqs.tolist(),
                "weights": self.model.weights.tolist(),
            }
        return {"kind": "toeplitz", "d": self.d, "a": self.t.a.tolist()}


def _field(doc: dict, name: str, where: str):
    if name not in doc:
        raise SpecError(f"{where}: missing required field {name!r}")
    return doc[name]


def parse_matrix_spec(doc: dict, where: str = "matrix spec") -> MatrixSpec:
    """Validate a parsed spec document into a MatrixSpec."""
    if not isinstance(doc, dict):
        raise SpecError(f"{where}: expected a JSON object, got {type(doc).__name__}")
    kind = _field(doc, "kind", where)
    d = _field(doc, "d", where)
    if not isinstance(d, int) or d < 1:
        raise SpecError(f"{where}: field 'd' must be a positive integer, got {d!r}")
    if kind == "toeplitz":
        a = _field(doc, "a", where)
        try:
            return MatrixSpec("toeplitz", ToeplitzVector(d, np.asarray(a, dtype=np.float64)))
        except (ValueError, TypeError) as exc:
            raise SpecError(f"{where}: field 'a' is invalid: {exc}") from exc
    if kind == "frequency":
        freqs = _field(doc, "freqs", where)
        weights = _field(doc, "weights", where)
        try:
            model = FrequencyModel(d, freqs, weights)
            t = synthesize(model)  # also validates conjugate closure
        except (ValueError, TypeError) as exc:
            raise SpecError(f"{where}: frequency model is invalid: {exc}") from exc
        return MatrixSpec("frequency", t, model)
    raise SpecError(
        f"{where}: field 'kind' must be 'toeplitz' or 'frequency', got {kind!r}"
    )


def load_matrix_spec(path) -> MatrixSpec:
    """Read and validate a matrix-spec JSON file."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return parse_matrix_spec(doc, where=str(path))


def dump_matrix_spec(spec: MatrixSpec, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(spec.to_dict(), fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Instance generators
# ---------------------------------------------------------------------------


def _draw_closed_frequencies(
    rank: int, rng: np.random.Generator, min_sep: float
) -> np.ndarray:
    """rank distinct frequencies in conjugate-closed layout (pairs + optional 0).

    Pairs (f, 1 - f) with f uniform; an odd rank adds the self-paired
    frequency 0.  Rejection keeps every pairwise circular distance (including
    against mirrors) at least ``min_sep``.
    """
    chosen: list[float] = []
    if rank % 2:
        chosen.append(0.0)
    floor_sep = max(min_sep, 1e-9)
    attempts = 0
    while len(chosen) < rank:
        attempts += 1
        if attempts > 1000 * rank:
            raise ValueError(
                f"could not place {rank} frequencies with separation {min_sep}; "
                f"lower min_sep or the rank"
            )
        f = float(rng.uniform(0.0, 1.0))
        pair = (f, (1.0 - f) % 1.0)
        ok = _circular_distance(pair[0], pair[1]) >= floor_sep
        for g in chosen:
            if not ok:
                break
            ok = all(_circular_distance(p, g) >= floor_sep for p in pair)
        if ok:
            chosen.extend(pair)
    return np.asarray(chosen)


def _paired_weights(freqs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Unit-exponential weight per conjugate pair (shared), normalized to sum 1."""
    weights = np.empty_like(freqs)
    done = np.zeros(freqs.shape[0], dtype=bool)
    for i in range(freqs.shape[0]):
        if done[i]:
            continue
        w = float(rng.exponential(1.0))
        mirror = (1.0 - freqs[i]) % 1.0
        dist = _circular_distance(freqs, mirror)
        dist[done] = np.inf
        j = int(np.argmin(dist))
        weights[i] = w
        done[i] = True
        if j != i and math.isfinite(dist[j]) and dist[j] < 1e-9:
            weights[j] = w
            done[j] = True
    return weights / weights.sum()


def generate_instance(
    kind: str, d: int, k: int | None = None, seed: int = 0, min_sep: float = 0.0
) -> MatrixSpec:
    """Reproducible benchmark instances.

    * ``identity`` -- the d x d identity;
    * ``random-full`` -- a rank-d frequency model: d/2 conjugate pairs with
      uniform frequencies (odd d adds the self-paired frequency 0) and
      unit-exponential pair weights normalized to trace d;
    * ``lowrank`` -- the same construction at rank ``k``.
    """
    if d < 1:
        raise ValueError(f"dimension must be positive, got d={d}")
    if kind == "identity":
        return MatrixSpec("toeplitz", ToeplitzVector.identity(d))
    rng = np.random.default_rng(seed)
    if kind == "random-full":
        rank = d
    elif kind == "lowrank":
        if k is None or not 1 <= k <= d:
            raise ValueError(f"lowrank requires k in [1, {d}], got {k!r}")
        rank = k
    else:
        raise ValueError(
            f"unknown instance kind {kind!r}; expected identity, random-full, or lowrank"
        )
    freqs = _draw_closed_frequencies(rank, rng, min_sep)
    weights = _paired_weights(freqs, rng)
    model = FrequencyModel(d, freqs, weights)
    return MatrixSpec("frequency", synthesize(model), model)
