"""Monte Carlo benchmark: run estimators over instances and emit CSV.

The sweep driver covers two modes:

* **grid** -- every (instance, method, n) cell runs a fixed number of trials;
* **target** -- per (instance, method), search for the smallest n whose
  median relative error meets a target (doubling then bisection), and emit
  confirming trials at that n*.

Every trial is reproducible from the config alone: the sample seed is derived
from (base_seed, method fingerprint, d, n, trial) through a SeedSequence, and
the seed column of the CSV records the exact 128-bit value used.

CSV schema (UTF-8, LF, header row, sorted by method, d, n, seed)::

    method,d,k,alpha,n,esc,tsc,rel_err,seed,wall_ms
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
import json
import time
import zlib

import numpy as np

from toepcov.core import ToeplitzVector, densify, spectral_norm
from toepcov.estimators import (
    EstimateReport,
    estimate_by_ruler,
    estimate_circulant,
    estimate_prony_conditioned,
    estimate_prony_denoise,
    estimate_prony_exact,
    estimate_sft,
    sft_sampling_patterns,
)
from toepcov.rulers import alpha_ruler, full_ruler, sqrt_ruler
from toepcov.sampling import draw_samples, observe
from toepcov.specio import MatrixSpec, generate_instance, parse_matrix_spec

#: Hard ceiling for the target-mode sample search.
N_SEARCH_CAP = 1 << 22
#: Relative resolution at which the target-mode bisection stops.
N_SEARCH_RESOLUTION = 0.05

CSV_COLUMNS = ("method", "d", "k", "alpha", "n", "esc", "tsc", "rel_err", "seed", "wall_ms")

METHOD_NAMES = (
    "full",
    "sqrt-ruler",
    "alpha-ruler",
    "circulant",
    "prony",
    "prony-denoise",
    "prony-cond",
    "sft",
)


@dataclasses.dataclass(frozen=True)
class BenchRecord:
    """One estimator trial; one CSV row."""

    method: str
    d: int
    k: int | None
    alpha: float | None
    n: int
    esc: int
    tsc: int
    rel_err: float
    seed: int
    wall_ms: float

    def row(self) -> tuple:
        return (
            self.method,
            self.d,
            "" if self.k is None else self.k,
            "" if self.alpha is None else _fmt(self.alpha),
            self.n,
            self.esc,
            self.tsc,
            _fmt(self.rel_err),
            self.seed,
            _fmt(self.wall_ms),
        )


def _fmt(x: float) -> str:
    return "%.9g" % x


def method_fingerprint(method: dict) -> int:
    """Stable integer fingerprint of a method spec (canonical-JSON CRC)."""
    blob = json.dumps(method, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return zlib.crc32(blob)


def trial_seeds(base_seed: int, method: dict, d: int, n: int, trial: int) -> tuple[int, int, int]:
    """(sample_seed_128, pattern_seed, aux_seed) for one trial."""
    ss = np.random.SeedSequence(
        entropy=(base_seed, method_fingerprint(method), d, n, trial)
    )
    w = ss.generate_state(4, np.uint64)
    sample_seed = int(w[0]) | (int(w[1]) << 64)
    return sample_seed, int(w[2]), int(w[3])


def _run_method(
    t: ToeplitzVector, method: dict, n: int, sample_seed: int, pattern_seed: int, aux_seed: int
) -> EstimateReport:
    name = method["name"]
    d = t.d
    batch = draw_samples(t, n, sample_seed)
    if name == "full":
        r = full_ruler(d)
        return estimate_by_ruler(observe(batch, r), r)
    if name == "sqrt-ruler":
        r = sqrt_ruler(d)
        return estimate_by_ruler(observe(batch, r), r)
    if name == "alpha-ruler":
        r = alpha_ruler(d, float(method["alpha"]))
        return estimate_by_ruler(observe(batch, r), r)
    if name == "circulant":
        return estimate_circulant(observe(batch, full_ruler(d)))
    if name in ("prony", "prony-denoise", "prony-cond"):
        k = int(method["k"])
        obs = observe(batch, tuple(range(1, 2 * k + 1)))
        if name == "prony":
            return estimate_prony_exact(obs, k)
        if name == "prony-denoise":
            return estimate_prony_denoise(obs, k, float(method.get("beta", 16 * k)))
        return estimate_prony_conditioned(
            obs,
            k,
            kappa=float(method["kappa"]),
            eps=float(method.get("eps", 0.5)),
            beta=method.get("beta"),
        )
    if name == "sft":
        m = int(method["m"])
        net_step = float(method.get("net_step", 1.0 / (4 * d)))
        s1, s2, _ = sft_sampling_patterns(d, m, net_step, pattern_seed)
        union = tuple(sorted(set(s1.indices) | set(s2.indices)))
        obs = observe(batch, union)
        return estimate_sft(
            obs,
            s1,
            s2,
            m,
            net_step,
            randomized_fallback=bool(method.get("randomized_fallback", False)),
            seed=aux_seed,
        )
    raise ValueError(f"unknown method name {name!r}; expected one of {METHOD_NAMES}")


def run_trial(
    t: ToeplitzVector,
    method: dict,
    n: int,
    trial: int,
    base_seed: int,
    norm_t: float | None = None,
    instance_k: int | None = None,
) -> BenchRecord:
    """One reproducible estimator trial against ground truth ``t``."""
    if norm_t is None:
        norm_t = spectral_norm(densify(t))
    sample_seed, pattern_seed, aux_seed = trial_seeds(base_seed, method, t.d, n, trial)
    t0 = time.perf_counter()
    rep = _run_method(t, method, n, sample_seed, pattern_seed, aux_seed)
    wall_ms = (time.perf_counter() - t0) * 1e3
    rel_err = spectral_norm(densify(rep.t_hat - t)) / norm_t
    k = method.get("k")
    if k is None:
        k = instance_k
    return BenchRecord(
        method=method["name"],
        d=t.d,
        k=None if k is None else int(k),
        alpha=method.get("alpha"),
        n=n,
        esc=rep.esc,
        tsc=rep.tsc,
        rel_err=rel_err,
        seed=sample_seed,
        wall_ms=wall_ms,
    )


def run_point(
    t: ToeplitzVector,
    method: dict,
    n: int,
    trials: int,
    base_seed: int,
    norm_t: float | None = None,
    instance_k: int | None = None,
) -> list[BenchRecord]:
    """All trials of one (instance, method, n) cell."""
    if norm_t is None:
        norm_t = spectral_norm(densify(t))
    return [
        run_trial(t, method, n, trial, base_seed, norm_t, instance_k)
        for trial in range(trials)
    ]


# ---------------------------------------------------------------------------
# Target-mode search
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class TargetSearchResult:
    """Outcome of the smallest-n search for one (instance, method) pair.

    ``ladder`` lists every (n, median rel_err) probed.  ``unbounded`` means
    the target was still unmet at the n cap; ``flaky`` flags a ladder whose
    medians are not monotone within 20% slack (the reported n* is then the
    first qualifying rung, but treat it with suspicion).
    """

    method: dict
    d: int
    target: float
    n_star: int | None
    esc: int
    tsc_star: int | None
    unbounded: bool
    flaky: bool
    ladder: tuple[tuple[int, float], ...]
    records: tuple[BenchRecord, ...]


def _median_err(
    t: ToeplitzVector, method: dict, n: int, trials: int, base_seed: int, norm_t: float
) -> tuple[float, list[BenchRecord]]:
    recs = run_point(t, method, n, trials, base_seed, norm_t)
    return float(np.median([r.rel_err for r in recs])), recs


def tsc_to_target(
    t: ToeplitzVector,
    method: dict,
    target: float,
    base_seed: int = 0,
    trials_per_n: int = 5,
    n_cap: int = N_SEARCH_CAP,
    resolution: float = N_SEARCH_RESOLUTION,
    confirm_trials: int | None = None,
    instance_k: int | None = None,
) -> TargetSearchResult:
    """Smallest n whose median relative error is at most ``target``.

    Doubles n from 1 until the median over ``trials_per_n`` trials meets the
    target, then bisects between the last failing and first passing n until
    the bracket is within ``resolution`` relatively.  Per-n trials use the
    grid-mode seed derivation (n is part of the entropy), so rungs are
    independent draws and the whole search is reproducible from the inputs.
    Confirming trials at n* (``confirm_trials``, default ``trials_per_n``)
    are re-run and returned as the records.
    """
    if not 0.0 < target:
        raise ValueError(f"target must be positive, got {target}")
    norm_t = spectral_norm(densify(t))
    ladder: list[tuple[int, float]] = []
    n = 1
    passing: int | None = None
    failing: int | None = None
    while True:
        med, _ = _median_err(t, method, n, trials_per_n, base_seed, norm_t)
        ladder.append((n, med))
        if med <= target:
            passing = n
            break
        failing = n
        if n >= n_cap:
            break
        n = min(2 * n, n_cap)
    if passing is not None and failing is not None:
        lo, hi = failing, passing
        while hi - lo > 1 and (hi - lo) > resolution * lo:
            mid = (lo + hi) // 2
            med, _ = _median_err(t, method, mid, trials_per_n, base_seed, norm_t)
            ladder.append((mid, med))
            if med <= target:
                hi = mid
            else:
                lo = mid
        passing = hi
    # Flakiness: after sorting by n, medians should not rise by more than 20%
    # over any forward step.
    by_n = sorted(ladder)
    flaky = any(
        b[1] > 1.2 * a[1] and a[1] > 0 for a, b in zip(by_n, by_n[1:])
    )
    if passing is None:
        return TargetSearchResult(
            method=method,
            d=t.d,
            target=target,
            n_star=None,
            esc=0,
            tsc_star=None,
            unbounded=True,
            flaky=flaky,
            ladder=tuple(ladder),
            records=(),
        )
    recs = run_point(
        t, method, passing, confirm_trials or trials_per_n, base_seed, norm_t, instance_k
    )
    return TargetSearchResult(
        method=method,
        d=t.d,
        target=target,
        n_star=passing,
        esc=recs[0].esc,
        tsc_star=recs[0].tsc,
        unbounded=False,
        flaky=flaky,
        ladder=tuple(ladder),
        records=tuple(recs),
    )


# ---------------------------------------------------------------------------
# Sweep driver
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class SweepConfig:
    """Parsed benchmark configuration.

    JSON shape::

        {
          "base_seed": 0,
          "instances": [{"kind": "identity", "d": 64}, ...],
          "methods": [{"name": "sqrt-ruler"}, ...],
          "trials": 10,
          "n_values": [100, 400, 1600],          # grid mode
          "target": {"rel_err": 0.5,             # or target mode
                     "trials_per_n": 5,
                     "n_cap": 4194304}
        }

    Instance specs accept the matrix-spec kinds (``toeplitz``, ``frequency``)
    plus the generator kinds (``identity``, ``random-full``, ``lowrank`` --
    the latter two take ``seed`` and optional ``min_sep``, ``lowrank`` takes
    ``k``).
    """

    base_seed: int
    instances: tuple[dict, ...]
    methods: tuple[dict, ...]
    trials: int
    n_values: tuple[int, ...] | None
    target: dict | None

    @staticmethod
    def from_dict(doc: dict) -> "SweepConfig":
        for req in ("instances", "methods"):
            if req not in doc or not doc[req]:
                raise ValueError(f"bench config: field {req!r} is required and nonempty")
        n_values = doc.get("n_values")
        target = doc.get("target")
        if (n_values is None) == (target is None):
            raise ValueError(
                "bench config: exactly one of 'n_values' (grid mode) and 'target' "
                "(target mode) must be present"
            )
        for m in doc["methods"]:
            if m.get("name") not in METHOD_NAMES:
                raise ValueError(
                    f"bench config: unknown method {m.get('name')!r}; "
                    f"expected one of {METHOD_NAMES}"
                )
        return SweepConfig(
            base_seed=int(doc.get("base_seed", 0)),
            instances=tuple(doc["instances"]),
            methods=tuple(doc["methods"]),
            trials=int(doc.get("trials", 10)),
            n_values=None if n_values is None else tuple(int(n) for n in n_values),
            target=target,
        )


def resolve_instance(spec: dict) -> MatrixSpec:
    """Instance spec -> ground truth (matrix-spec kinds or generator kinds)."""
    kind = spec.get("kind")
    if kind in ("toeplitz", "frequency"):
        return parse_matrix_spec(spec, where="bench instance")
    return generate_instance(
        kind,
        int(spec["d"]),
        k=spec.get("k"),
        seed=int(spec.get("seed", 0)),
        min_sep=float(spec.get("min_sep", 0.0)),
    )


def _grid_cell(args) -> list[BenchRecord]:
    inst_spec, method, n, trials, base_seed = args
    inst = resolve_instance(inst_spec)
    return run_point(
        inst.t, method, n, trials, base_seed, instance_k=inst_spec.get("k")
    )


def _target_cell(args) -> list[BenchRecord]:
    inst_spec, method, target_cfg, trials, base_seed = args
    inst = resolve_instance(inst_spec)
    res = tsc_to_target(
        inst.t,
        method,
        float(target_cfg["rel_err"]),
        base_seed=base_seed,
        trials_per_n=int(target_cfg.get("trials_per_n", 5)),
        n_cap=int(target_cfg.get("n_cap", N_SEARCH_CAP)),
        confirm_trials=trials,
        instance_k=inst_spec.get("k"),
    )
    return list(res.records)


def run_sweep(config: SweepConfig, workers: int = 1) -> list[BenchRecord]:
    """Execute every cell of the sweep; returns records in CSV sort order."""
    if config.n_values is not None:
        cells = [
            (inst, method, n, config.trials, config.base_seed)
            for inst in config.instances
            for method in config.methods
            for n in config.n_values
        ]
        worker = _grid_cell
    else:
        cells = [
            (inst, method, config.target, config.trials, config.base_seed)
            for inst in config.instances
            for method in config.methods
        ]
        worker = _target_cell
    records: list[BenchRecord] = []
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            for out in pool.map(worker, cells):
                records.extend(out)
    else:
        for cell in cells:
            records.extend(worker(cell))
    records.sort(key=lambda r: (r.method, r.d, r.n, r.seed))
    return records


def write_csv(records, path) -> None:
    """UTF-8, LF-terminated CSV with the fixed column schema."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for rec in records:
            fh.write(",".join(str(v) for v in rec.row()) + "\n")


def read_csv(path) -> list[BenchRecord]:
    """Inverse of :func:`write_csv` (used by tests and downstream tooling)."""
    out: list[BenchRecord] = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header {header!r}")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            f = line.split(",")
            out.append(
                BenchRecord(
                    method=f[0],
                    d=int(f[1]),
                    k=None if f[2] == "" else int(f[2]),
                    alpha=None if f[3] == "" else float(f[3]),
                    n=int(f[4]),
                    esc=int(f[5]),
                    tsc=int(f[6]),
                    rel_err=float(f[7]),
                    seed=int(f[8]),
                    wall_ms=float(f[9]),
                )
            )
    return out
