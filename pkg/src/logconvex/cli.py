"""Command-line entry point.

Exit codes: 0 every non-vacuous check passed, 1 a check failed, 2 bad
configuration, 3 a numerical guard tripped.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import frequency as fq
from .errors import ConfigError, NumericalGuardError
from .gaussian_calculus import ChirpedGaussian, gaussian, propagate
from .runner import Scenario, bundled_scenario_path, log, parse_axis, run, sweep
from .spectral import GridSpec, fft_propagate, field_error, sample

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_GUARD = 0, 1, 2, 3


def _load(args) -> Scenario:
    path = args.scenario or bundled_scenario_path()
    return Scenario.load(path, seed=args.seed)


def cmd_verify(args) -> int:
    sc = _load(args)
    summary, _ = run(sc, args.out_dir, jobs=args.jobs, tolerance_scale=args.tolerance_scale)
    for check, counts in summary.counts.items():
        log(f"{check}: " + " ".join(f"{k}={v}" for k, v in counts.items())
            + f" min_margin={summary.min_margins[check]}")
    log(f"{summary.total} tuples in {summary.wall_clock:.2f}s (seed {summary.seed})")
    return summary.exit_code


def cmd_sweep(args) -> int:
    sc = _load(args)
    axes = dict(parse_axis(a) for a in args.axis) if args.axis else None
    results = sweep(sc, axes, args.out_dir, jobs=args.jobs, tolerance_scale=args.tolerance_scale)
    failed = 0
    for res in results:
        n_fail = int(np.sum(res.statuses == "fail"))
        failed += n_fail
        if args.out_dir is None:
            sys.stdout.write(f"# {res.check} ({res.source})\n{res.matrix_csv()}")
        log(f"{res.check} ({res.source}): "
            + " ".join(f"{s}={int(np.sum(res.statuses == s))}" for s in ("pass", "fail", "vacuous", "skipped")))
    return EXIT_FAIL if failed else EXIT_OK


def _freq_config(args) -> dict:
    cfg = {"pairs": 20, "m": 8, "times": [0.0, 1.0, 11],
           "surrogate": {"lam": 1.0, "alpha": 1.0, "beta": 1.0}}
    if args.scenario:
        try:
            cfg.update(json.loads(Path(args.scenario).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read frequency scenario: {exc}") from None
    if args.pairs is not None:
        cfg["pairs"] = args.pairs
    if args.m is not None:
        cfg["m"] = args.m
    return cfg


def cmd_freq(args) -> int:
    cfg = _freq_config(args)
    seed = 0 if args.seed is None else args.seed
    rng = np.random.default_rng(seed)
    t0, t1, count = cfg["times"]
    times = np.linspace(float(t0), float(t1), int(count))
    scale = args.tolerance_scale or 1.0
    out = Path(args.out_dir) if args.out_dir else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    worst = {"hdot": 0.0, "identity_2_2a": 0.0, "ndot_margin": math.inf, "carleman": 0.0}
    for k in range(int(cfg["pairs"])):
        ops = fq.OperatorPair.random_constant(rng, int(cfg["m"]))
        f0 = rng.standard_normal(ops.dim) + 1j * rng.standard_normal(ops.dim)
        trace = fq.evolve(f0, ops, times)
        hd = fq.check_hdot(trace, ops)
        nd = fq.check_ndot_lower_bound(trace, ops)
        f, fdot = fq.constant_flow(ops, f0)
        ident = fq.check_identity_2_2a(f, fdot, ops, times)
        bf, bfdot = fq.polynomial_bump(rng, ops.dim, float(t0), float(t1))
        carl = fq.check_carleman_expansion(bf, bfdot, ops, float(t0), float(t1))
        worst["hdot"] = max(worst["hdot"], hd.worst)
        worst["identity_2_2a"] = max(worst["identity_2_2a"], ident.worst)
        worst["ndot_margin"] = min(worst["ndot_margin"], nd.worst)
        worst["carleman"] = max(worst["carleman"], carl.residual)
        if out is not None:
            margin = np.full(times.shape, math.nan)
            margin[1:-1] = nd.values
            trace = trace.with_residual("hdot", hd.values).with_residual("ndot_margin", margin)
            trace.to_csv(out / f"pair_{k:03d}_trace.csv")
    s = cfg["surrogate"]
    sur = fq.gaussian_surrogate_check(gaussian(1.0), float(s["lam"]), float(s["alpha"]), float(s["beta"]))
    checks = {
        "hdot_equals_2d": bool(worst["hdot"] <= 1e-7 * scale),
        "identity_2_2a": bool(worst["identity_2_2a"] <= 1e-7 * scale),
        "ndot_lower_bound": bool(worst["ndot_margin"] >= -1e-7 * scale),
        "carleman_expansion": bool(worst["carleman"] <= 1e-8 * scale),
        "gaussian_surrogate": bool(sur.passed(1e-6 * scale, 1e-8 * scale)),
    }
    summary = {
        "seed": seed,
        "pairs": int(cfg["pairs"]),
        "m": int(cfg["m"]),
        "worst": {**{k: float(v) for k, v in worst.items()},
                  "surrogate_commutator": float(sur.commutator_residual),
                  "surrogate_margin": float(sur.min_margin)},
        "pass": checks,
    }
    text = json.dumps(summary, indent=2) + "\n"
    if out is not None:
        (out / "freq_summary.json").write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if all(checks.values()) else EXIT_FAIL


def cmd_propagate(args) -> int:
    if args.gaussian:
        src = Path(args.gaussian)
        text = src.read_text() if src.exists() else args.gaussian
        try:
            g = ChirpedGaussian.from_json(text)
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"bad Gaussian: {exc}") from None
    else:
        g = gaussian(args.rate)
    spec = GridSpec(g.dim, args.points, args.length)
    field = fft_propagate(sample(g, spec), args.time)
    exact = propagate(g, args.time)
    err = field_error(field, exact)
    out = Path(args.out_dir) if args.out_dir else None
    result = {"time": args.time, "points": args.points, "length": args.length, "relative_l2_error": err}
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        field.to_csv(out / "fft_field.csv")
        sample(exact, spec, guard=None).to_csv(out / "exact_field.csv")
        (out / "propagate_summary.json").write_text(json.dumps(result, indent=2) + "\n")
    else:
        sys.stdout.write(json.dumps(result, indent=2) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="logconvex", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, scenario_help="scenario JSON (default: bundled theorem_1_2_gaussian.json)"):
        sp.add_argument("--scenario", help=scenario_help)
        sp.add_argument("--out-dir", help="directory for CSV/JSON output")
        sp.add_argument("--seed", type=int, default=None, help="overrides the scenario seed")
        sp.add_argument("--tolerance-scale", type=float, default=None)
        sp.add_argument("--jobs", type=int, default=1, help="worker processes")

    v = sub.add_parser("verify", help="run every check of a scenario")
    common(v)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="min-margin matrices over one or two parameters")
    common(s)
    s.add_argument("--axis", action="append",
                   help="name=start:stop:count or name=v1,v2 (repeat for a second axis)")
    s.set_defaults(func=cmd_sweep)

    f = sub.add_parser("freq", help="frequency-function identities on random matrix pairs")
    common(f, "optional JSON with pairs, m, times and surrogate settings")
    f.add_argument("--pairs", type=int, default=None)
    f.add_argument("--m", type=int, default=None)
    f.set_defaults(func=cmd_freq)

    g = sub.add_parser("propagate", help="FFT-propagate a Gaussian and dump the fields")
    g.add_argument("--gaussian", help="Gaussian as JSON text or a path to a JSON file")
    g.add_argument("--rate", type=float, default=1.0, help="shorthand for exp(-rate x^2)")
    g.add_argument("--time", type=float, required=True)
    g.add_argument("--points", type=int, default=1024)
    g.add_argument("--length", type=float, default=40.0)
    g.add_argument("--out-dir")
    g.set_defaults(func=cmd_propagate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        log(f"configuration error: {exc}")
        return EXIT_CONFIG
    except NumericalGuardError as exc:
        log(f"numerical guard: {exc}")
        return EXIT_GUARD
    except ValueError as exc:
        log(f"configuration error: {exc}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
