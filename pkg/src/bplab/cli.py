"""Command-line front end.

Every subcommand reads flags (optionally seeded from a flat key=value config
file; explicit flags win), runs the corresponding estimator, and emits
records as CSV or JSON.  Exit codes: 0 success, 1 validation failure,
2 configuration error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from .estimators import (DensityMode, EstimateRecord, ResourceCapError,
                         ac_scan, density_for, mc_probability, phi_estimate,
                         rate_fit, sandwich_check, trial_rng,
                         two_scale_density)
from .geometry import Boundary, BoxGeometry
from .hamming import (PlaneConfig, plane_fixpoint, plane_fixpoint_sweep,
                      sample_plane)
from .hetero import (HeteroGrid, Rule, grid_to_text, hetero_fixpoint,
                     hetero_step, zero_clusters)
from .initializers import LimitParams, LimitVariant, init_limit_grid, nz
from .product import Fiber, sample_product
from .records import records_to_csv, write_records

OUTPUT_DIR_ENV = "BPLAB_OUTPUT_DIR"

_BOUNDARIES = {b.value: b for b in Boundary}
_RULES = {r.value: r for r in Rule}
_VARIANTS = {v.value: v for v in LimitVariant}
_MODES = {m.value: m for m in DensityMode}


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok]


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok]


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="bplab",
        description="simulation laboratory for threshold growth on "
                    "lattice-fiber products and heterogeneous automata")
    top.add_argument("--config", help="flat key=value file; flags override")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--output", help="output file path")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("plane-stats", help="single-plane event probabilities")
    p.add_argument("--event", default="not-is",
                   choices=("is", "not-is", "ii", "not-ii",
                            "inert", "not-inert"))
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--theta", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, help="explicit density override")
    p.add_argument("--trials", type=int, required=True)
    common(p)

    p = sub.add_parser("density", help="two-scale density estimate")
    p.add_argument("--theta", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--mode", choices=sorted(_MODES), default="lower-is")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--plane-trials", type=int, default=10_000)
    common(p)

    p = sub.add_parser("phase-curve", help="density across an a-grid")
    p.add_argument("--theta", type=int, required=True)
    p.add_argument("--a-grid", type=_float_list, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--mode", choices=sorted(_MODES), default="lower-is")
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--plane-trials", type=int, default=10_000)
    common(p)

    p = sub.add_parser("sandwich-check", help="exact inclusion verification")
    p.add_argument("--fiber", choices=("hamming-square", "clique"),
                   default="hamming-square")
    p.add_argument("--theta", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--boundary", choices=sorted(_BOUNDARIES),
                   default="empty-wall")
    common(p)

    p = sub.add_parser("hetero-run", help="one grid to its fixpoint")
    p.add_argument("--variant", choices=sorted(_VARIANTS), required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--ell", type=int, default=1)
    p.add_argument("--theta", type=int)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--boundary", choices=sorted(_BOUNDARIES),
                   default="empty-wall")
    p.add_argument("--dump", help="write the final grid snapshot here")
    common(p)

    p = sub.add_parser("ac-scan", help="critical-a scan of the plain rule")
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--eps-list", type=_float_list, required=True)
    p.add_argument("--a-grid", type=_float_list, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--threshold", type=float, default=0.05)
    common(p)

    p = sub.add_parser("phi-curve", help="Poisson-rule zero-density brackets")
    p.add_argument("--theta", type=int, required=True)
    p.add_argument("--a", type=_float_list, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    common(p)

    p = sub.add_parser("rate-fit", help="log-log exponent across an n-grid")
    p.add_argument("--event", default="not-is",
                   choices=("is", "not-is", "ii", "not-ii"))
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--theta", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--n-grid", type=_int_list, required=True)
    p.add_argument("--trials", type=int, required=True)
    common(p)

    p = sub.add_parser("validate", help="run the built-in property suite")
    p.add_argument("--quick", action="store_true")
    common(p)

    return top


def _inject_config(argv: list[str]) -> list[str]:
    """Expand --config FILE into flags placed before the explicit ones."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise ValueError("--config needs a file path")
    path = argv[i + 1]
    rest = argv[:i] + argv[i + 2:]
    if not rest:
        raise ValueError("config file cannot supply the command name")
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ValueError(f"cannot read config file: {exc}") from None
    flags: list[str] = []
    for raw in lines:
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"bad config line (expected key=value): {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        flags.append(f"--{key}")
        if value:
            flags.append(value)
    # explicit flags come later, so they win for ordinary store actions
    return [rest[0]] + flags + rest[1:]


def _write_or_print(records: list[EstimateRecord], args) -> None:
    if args.output:
        path = args.output
        base = os.environ.get(OUTPUT_DIR_ENV)
        if base and not os.path.isabs(path):
            path = os.path.join(base, path)
        write_records(records, path, args.format)
    else:
        sys.stdout.write(records_to_csv(records))


def _cmd_plane_stats(args) -> int:
    p = args.p if args.p is not None else density_for(args.theta, args.a,
                                                      args.n)
    ell = (args.theta - 2) // 2 if args.theta % 2 == 0 else \
        (args.theta - 1) // 2
    rec = mc_probability(f"plane-{args.event}",
                         dict(n=args.n, p=p, r=args.r, theta=args.theta,
                              ell=ell, a=args.a),
                         args.trials, args.seed)
    _write_or_print([rec], args)
    return 0


def _cmd_density(args) -> int:
    rec = two_scale_density(args.theta, args.a, args.n, args.L,
                            _MODES[args.mode], args.trials, args.seed,
                            plane_trials=args.plane_trials)
    _write_or_print([rec], args)
    return 0


def _cmd_phase_curve(args) -> int:
    recs = [two_scale_density(args.theta, a, args.n, args.L,
                              _MODES[args.mode], args.trials, args.seed,
                              plane_trials=args.plane_trials)
            for a in args.a_grid]
    _write_or_print(recs, args)
    return 0


def _cmd_sandwich(args) -> int:
    fiber = Fiber(args.fiber)
    geom = BoxGeometry(args.L, args.L, _BOUNDARIES[args.boundary])
    p = (density_for(args.theta, args.a, args.n)
         if fiber is Fiber.HAMMING_SQUARE else args.a / args.n)
    failures = 0
    for i in range(args.count):
        cfg = sample_product(geom, fiber, args.n, p, args.theta,
                             trial_rng(args.seed, i))
        report = sandwich_check(cfg)
        if not report.ok:
            failures += 1
            print(f"violation at instance {i}, site {report.site}: "
                  f"{report.detail}", file=sys.stderr)
    rec = EstimateRecord.from_counts(
        "sandwich-check", args.count, args.count - failures, args.seed,
        theta=args.theta, a=args.a, n=args.n, L=args.L, rule=args.fiber,
        boundary=args.boundary)
    _write_or_print([rec], args)
    return 0 if failures == 0 else 1


def _cmd_hetero_run(args) -> int:
    geom = BoxGeometry(args.L, args.L, _BOUNDARIES[args.boundary])
    lp = LimitParams(args.a, args.eps, args.ell, args.theta)
    grid = init_limit_grid(lp, _VARIANTS[args.variant], geom,
                           trial_rng(args.seed, 0))
    final = hetero_fixpoint(grid)
    if args.dump:
        with open(args.dump, "w", encoding="utf-8") as fh:
            fh.write(grid_to_text(final))
    stats = zero_clusters(final)
    zero_frac = float((final.states == 0).mean())
    rec = EstimateRecord(
        "hetero-run", args.theta, args.ell, args.a, None, args.L,
        final.rule.value, args.variant, args.boundary,
        1, int((final.states == 0).sum()), zero_frac, 0.0, args.seed)
    _write_or_print([rec], args)
    print(f"clusters={len(stats.clusters)} max_diameter={stats.max_diameter}")
    return 0


def _cmd_ac_scan(args) -> int:
    result = ac_scan(args.ell, args.eps_list, args.a_grid, args.L,
                     args.trials, args.seed, args.threshold)
    _write_or_print(result.records, args)
    if result.crossing is not None:
        print(f"crossing={result.crossing:.6g} threshold={result.threshold}")
    else:
        print("crossing=none")
    return 0


def _cmd_phi_curve(args) -> int:
    recs = []
    for a in args.a:
        recs.extend(phi_estimate(a, args.theta, args.L, args.trials,
                                 args.seed))
    _write_or_print(recs, args)
    return 0


def _cmd_rate_fit(args) -> int:
    ell = (args.theta - 2) // 2 if args.theta % 2 == 0 else \
        (args.theta - 1) // 2
    recs = []
    for n in args.n_grid:
        p = density_for(args.theta, args.a, n)
        recs.append(mc_probability(
            f"plane-{args.event}",
            dict(n=n, p=p, r=args.r, theta=args.theta, ell=ell, a=args.a),
            args.trials, args.seed))
    _write_or_print(recs, args)
    points = [(rec.n, rec.estimate) for rec in recs]
    try:
        fit = rate_fit(points)
    except ValueError as exc:
        print(f"fit failed: {exc}", file=sys.stderr)
        return 1
    print(f"exponent={fit.exponent:.6g} prefactor={fit.prefactor:.6g}")
    return 0


def _cmd_validate(args) -> int:
    """Small self-contained property checks, a fast subset of the test suite."""
    rng = trial_rng(args.seed, 0)
    failures = []

    trials = 20 if args.quick else 100
    for i in range(trials):
        cfg = sample_plane(8, rng.uniform(0.05, 0.5), rng)
        r = int(rng.integers(1, 5))
        if not np.array_equal(plane_fixpoint(cfg, r).occ,
                              plane_fixpoint_sweep(cfg, r).occ):
            failures.append(f"plane engines disagree (trial {i}, r={r})")

    for i in range(trials):
        L = 8
        rule = [Rule.PLAIN, Rule.HELPED3, Rule.HELPED][i % 3]
        hi = 4 if rule is Rule.HELPED3 else 6
        states = rng.integers(0, hi, size=(L, L))
        theta = 4 if rule is Rule.HELPED else None
        grid = HeteroGrid(BoxGeometry(L, L, Boundary.EMPTY_WALL), states,
                          rule, theta)
        cur = grid
        while True:
            nxt = hetero_step(cur)
            if np.array_equal(nxt.states, cur.states):
                break
            cur = nxt
        if not np.array_equal(hetero_fixpoint(grid).states, cur.states):
            failures.append(f"hetero queue != synchronous (trial {i}, {rule})")

    if nz(0, 5) != 9 or nz(7, 5) != 0 or nz(1, 3) != 2:
        failures.append("nz spot checks")

    for msg in failures:
        print(f"FAIL {msg}", file=sys.stderr)
    print(f"validate: {'ok' if not failures else 'FAILED'} "
          f"({trials} trials/property)")
    return 0 if not failures else 1


_COMMANDS = {
    "plane-stats": _cmd_plane_stats,
    "density": _cmd_density,
    "phase-curve": _cmd_phase_curve,
    "sandwich-check": _cmd_sandwich,
    "hetero-run": _cmd_hetero_run,
    "ac-scan": _cmd_ac_scan,
    "phi-curve": _cmd_phi_curve,
    "rate-fit": _cmd_rate_fit,
    "validate": _cmd_validate,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    try:
        argv = _inject_config(argv)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, ResourceCapError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
