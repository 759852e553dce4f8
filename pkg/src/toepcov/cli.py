"""Command-line front end.

Subcommands::

    toepcov ruler    --d 64 --kind sqrt [--alpha A] [--json]
    toepcov gen      --kind lowrank --d 256 --k 8 --seed 3 --out inst.json
    toepcov estimate --spec inst.json --method sqrt-ruler --n 2000 --seed 1
    toepcov bench    --config sweep.json --out results.csv [--workers 4]

``estimate`` prints a JSON report (estimate, relative error, entry/vector/
total sample counts, wall time, method diagnostics); ``bench`` writes the
CSV consumed by the plotting front end.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from toepcov.bench import SweepConfig, run_sweep, write_csv
from toepcov.core import densify, spectral_norm
from toepcov.estimators import (
    estimate_by_ruler,
    estimate_circulant,
    estimate_prony_conditioned,
    estimate_prony_denoise,
    estimate_prony_exact,
    estimate_sft,
    sft_sampling_patterns,
)
from toepcov.rulers import (
    Ruler,
    alpha_coverage_bound,
    alpha_ruler,
    coverage_coefficient,
    full_coverage_bound,
    full_ruler,
    sqrt_ruler,
)
from toepcov.sampling import draw_samples, observe
from toepcov.specio import SpecError, dump_matrix_spec, generate_instance, load_matrix_spec


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="toepcov",
        description="Toeplitz covariance estimation under entry-sampling budgets",
    )
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("ruler", help="construct a ruler and report its coverage")
    r.add_argument("--d", type=int, required=True, help="matrix dimension")
    r.add_argument("--kind", choices=("full", "sqrt", "alpha"), required=True)
    r.add_argument("--alpha", type=float, help="exponent for --kind alpha (in [1/2, 1])")
    r.add_argument("--json", action="store_true", help="emit JSON instead of a table")

    g = sub.add_parser("gen", help="write a ground-truth matrix spec")
    g.add_argument("--kind", choices=("identity", "random-full", "lowrank"), required=True)
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--k", type=int, help="rank for --kind lowrank")
    g.add_argument("--min-sep", type=float, default=0.0, help="minimum frequency separation")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, help="output spec path (JSON)")

    e = sub.add_parser("estimate", help="run one estimator against a matrix spec")
    e.add_argument("--spec", required=True, help="ground-truth matrix spec (JSON)")
    e.add_argument(
        "--method",
        required=True,
        choices=(
            "full",
            "sqrt-ruler",
            "alpha-ruler",
            "circulant",
            "prony",
            "prony-denoise",
            "prony-cond",
            "sft",
        ),
    )
    e.add_argument("--n", type=int, required=True, help="number of sample vectors")
    e.add_argument("--seed", type=int, required=True, help="sample seed")
    e.add_argument("--alpha", type=float, help="alpha-ruler exponent")
    e.add_argument("--k", type=int, help="rank parameter (prony family)")
    e.add_argument("--beta", type=float, help="rounding budget (prony-denoise/cond)")
    e.add_argument("--kappa", type=float, help="condition bound (prony-cond)")
    e.add_argument("--eps", type=float, default=0.5, help="accuracy parameter (prony-cond)")
    e.add_argument("--m", type=int, help="frequency multiset size (sft)")
    e.add_argument("--net-step", type=float, help="frequency net step (sft; default 1/(4d))")
    e.add_argument(
        "--dump-leverage",
        metavar="PATH",
        help="write the leverage profile used by sft to PATH (JSON)",
    )
    e.add_argument("--out", help="write the JSON report here instead of stdout")

    b = sub.add_parser("bench", help="run a benchmark sweep to CSV")
    b.add_argument("--config", required=True, help="sweep config (JSON)")
    b.add_argument("--out", required=True, help="output CSV path")
    b.add_argument("--workers", type=int, default=1, help="parallel worker processes")
    return p


def _cmd_ruler(args) -> int:
    if args.kind == "full":
        r = full_ruler(args.d)
        bound = full_coverage_bound(args.d)
    elif args.kind == "sqrt":
        r = sqrt_ruler(args.d)
        bound = alpha_coverage_bound(args.d, 0.5)
    else:
        if args.alpha is None:
            raise SpecError("--kind alpha requires --alpha")
        r = alpha_ruler(args.d, args.alpha)
        bound = alpha_coverage_bound(args.d, args.alpha)
    cov = coverage_coefficient(r)
    if args.json:
        print(
            json.dumps(
                {
                    "d": r.d,
                    "kind": r.kind,
                    "alpha": args.alpha,
                    "size": len(r),
                    "indices": list(r.indices),
                    "coverage": cov,
                    "coverage_bound": bound,
                    "repair_slack": r.repair_slack,
                    "complete": r.is_complete(),
                },
                indent=2,
            )
        )
    else:
        print(f"kind: {r.kind}  d: {r.d}  size: {len(r)}")
        print(f"coverage: {cov:.6g}  (bound {bound:.6g})  repair slack: {r.repair_slack}")
        print("indices:", " ".join(str(j) for j in r.indices))
    return 0


def _cmd_gen(args) -> int:
    spec = generate_instance(
        args.kind, args.d, k=args.k, seed=args.seed, min_sep=args.min_sep
    )
    dump_matrix_spec(spec, args.out)
    print(f"wrote {args.kind} instance (d={args.d}) to {args.out}")
    return 0


def _require(args, names: list[str]) -> None:
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        raise SpecError(
            f"method {args.method!r} requires " + ", ".join("--" + n for n in missing)
        )


def _cmd_estimate(args) -> int:
    spec = load_matrix_spec(args.spec)
    t = spec.t
    d = t.d
    if args.dump_leverage is not None and args.method != "sft":
        raise SpecError("--dump-leverage applies to --method sft only")
    batch = draw_samples(t, args.n, args.seed)
    t0 = time.perf_counter()
    if args.method in ("full", "circulant"):
        r = full_ruler(d)
        obs = observe(batch, r)
        rep = estimate_by_ruler(obs, r) if args.method == "full" else estimate_circulant(obs)
    elif args.method == "sqrt-ruler":
        r = sqrt_ruler(d)
        rep = estimate_by_ruler(observe(batch, r), r)
    elif args.method == "alpha-ruler":
        _require(args, ["alpha"])
        r = alpha_ruler(d, args.alpha)
        rep = estimate_by_ruler(observe(batch, r), r)
    elif args.method in ("prony", "prony-denoise", "prony-cond"):
        _require(args, ["k"])
        obs = observe(batch, tuple(range(1, 2 * args.k + 1)))
        if args.method == "prony":
            rep = estimate_prony_exact(obs, args.k)
        elif args.method == "prony-denoise":
            beta = args.beta if args.beta is not None else 16.0 * args.k
            rep = estimate_prony_denoise(obs, args.k, beta)
        else:
            _require(args, ["kappa"])
            rep = estimate_prony_conditioned(
                obs, args.k, kappa=args.kappa, eps=args.eps, beta=args.beta
            )
    else:  # sft
        _require(args, ["m"])
        net_step = args.net_step if args.net_step is not None else 1.0 / (4 * d)
        s1, s2, profile = sft_sampling_patterns(d, args.m, net_step, args.seed)
        if args.dump_leverage is not None:
            with open(args.dump_leverage, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(profile.to_json())
                fh.write("\n")
        union = tuple(sorted(set(s1.indices) | set(s2.indices)))
        rep = estimate_sft(observe(batch, union), s1, s2, args.m, net_step, seed=args.seed)
    wall_ms = (time.perf_counter() - t0) * 1e3

    norm_t = spectral_norm(densify(t))
    rel_err = spectral_norm(densify(rep.t_hat - t)) / norm_t if norm_t > 0 else float("nan")
    report = {
        "method": args.method,
        "d": d,
        "n": args.n,
        "seed": args.seed,
        "esc": rep.esc,
        "vsc": rep.vsc,
        "tsc": rep.tsc,
        "rel_err": rel_err,
        "wall_ms": wall_ms,
        "t_hat": rep.t_hat.a.tolist(),
        "diagnostics": _json_safe(rep.diagnostics),
    }
    if rep.freq_model is not None:
        report["freqs"] = rep.freq_model.freqs.tolist()
        report["weights"] = rep.freq_model.weights.tolist()
    text = json.dumps(report, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def _cmd_bench(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecError(f"{args.config}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    config = SweepConfig.from_dict(doc)
    records = run_sweep(config, workers=args.workers)
    write_csv(records, args.out)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "ruler":
            return _cmd_ruler(args)
        if args.command == "gen":
            return _cmd_gen(args)
        if args.command == "estimate":
            return _cmd_estimate(args)
        return _cmd_bench(args)
    except (SpecError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
