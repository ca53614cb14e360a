"""Command-line entry point.

Subcommands: moments, classify, solve, solve-sparse, sweep, synth,
report. A config file of KEY=VALUE lines can pre-set any long flag
(dashes become underscores); explicit flags win. Exit codes: 0 success,
1 usage or I/O error, 2 sweep completed with per-point failures.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .convexity import RegionLabel, certificate_conditions, classify_lambda
from .errors import DomainError, MvskError
from .moments import (Bounds, build_moment_model, domain_bounds, centralize,
                      load_model, load_returns, model_fingerprint,
                      prices_to_returns, save_model)
from .projection import Domain
from .solver import SolveResult, SolverOptions, solve
from .sparse import SparseOptions, solve_forbidden_pairs, solve_sparse
from .sweep import (build_grid, non_domination_check, run_sweep, scale_values,
                    superior_set, support_histogram, sweep_to_dict,
                    write_sweep_csv, write_sweep_json, write_trade_off_table)
from .synth import synthetic_returns, write_returns_csv


def _parse_lambda(text: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != 4:
        raise DomainError(f"--lambda needs four comma-separated values, got {text!r}")
    try:
        arr = np.array([float(p) for p in parts])
    except ValueError:
        raise DomainError(f"--lambda values must be numeric, got {text!r}") from None
    if arr.min() < 0:
        raise DomainError("--lambda values must be nonnegative")
    return arr


def _domain_from_args(args) -> Domain:
    if getattr(args, "cube", None) is not None:
        return Domain.cube(args.cube)
    return Domain.simplex()


def _load_model_or_data(args):
    if getattr(args, "model", None):
        return load_model(args.model)
    if getattr(args, "data", None):
        raw = load_returns(args.data)
        if getattr(args, "prices", False):
            raw = prices_to_returns(raw)
        return build_moment_model(raw)
    raise DomainError("provide --model or --data")


def _solver_options(args) -> SolverOptions:
    return SolverOptions(max_iterations=args.max_iter,
                         record_trace=getattr(args, "record_trace", False))


def _result_dict(result: SolveResult, lam, domain: Domain) -> dict:
    out = {
        "lambda": [float(v) for v in lam],
        "domain": {"kind": domain.kind, "bound": domain.bound},
        "w": result.w.tolist(),
        "f": result.objectives.as_array().tolist(),
        "scalarized_value": result.scalarized_value,
        "iterations_used": result.iterations_used,
        "projected_gradient_norm": result.projected_gradient_norm,
        "support": list(result.support),
    }
    if result.trace is not None:
        out["trace"] = list(result.trace)
    return out


def _print_json(payload) -> None:
    print(json.dumps(payload, sort_keys=True, indent=2))


def cmd_moments(args) -> int:
    raw = load_returns(args.data)
    if args.prices:
        raw = prices_to_returns(raw)
    model = build_moment_model(raw)
    save_model(model, args.out)
    centered = centralize(raw)
    cube = domain_bounds(centered, Domain.cube(1.0))
    _print_json({
        "n": model.n,
        "m": model.m,
        "model_path": str(args.out),
        "bounds": {
            "simplex": {"lower": model.simplex_bounds.lower,
                        "upper": model.simplex_bounds.upper},
            "cube": {"lower": cube.lower, "upper": cube.upper},
        },
    })
    return 0


def cmd_classify(args) -> int:
    lam = _parse_lambda(args.lam)
    if args.bounds:
        lo, hi = (float(v) for v in args.bounds.split(","))
        bounds = Bounds(lower=lo, upper=hi)
    elif args.model:
        bounds = load_model(args.model).bounds_for(_domain_from_args(args))
    else:
        raise DomainError("provide --bounds lower,upper or --model with a domain flag")
    label = classify_lambda(lam, bounds)
    _print_json({
        "label": label.value,
        "conditions": certificate_conditions(lam, bounds),
        "bounds": {"lower": bounds.lower, "upper": bounds.upper},
    })
    return 0


def cmd_solve(args) -> int:
    model = _load_model_or_data(args)
    lam = _parse_lambda(args.lam)
    domain = _domain_from_args(args)
    result = solve(model, lam, domain, _solver_options(args))
    payload = _result_dict(result, lam, domain)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, sort_keys=True, indent=2)
            fh.write("\n")
    _print_json(payload)
    return 0


def cmd_solve_sparse(args) -> int:
    model = _load_model_or_data(args)
    lam = _parse_lambda(args.lam)
    domain = _domain_from_args(args)
    opts = _solver_options(args)
    dense = solve(model, lam, domain, opts)
    if args.forbidden_pairs:
        pairs = _read_pairs(args.forbidden_pairs)
        result = solve_forbidden_pairs(model, lam, domain, pairs, dense, opts)
    else:
        sparse_opts = SparseOptions(
            k=args.max_support,
            use_support_heuristic=not args.no_support_heuristic,
            proximity_count=args.proximity_count,
        )
        result = solve_sparse(model, lam, domain, sparse_opts, dense, opts)
    payload = _result_dict(result, lam, domain)
    payload["dense_scalarized_value"] = dense.scalarized_value
    _print_json(payload)
    return 0


def _read_pairs(path) -> list[tuple[int, int]]:
    pairs = []
    with open(path, "r", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            cells = [c.strip() for c in row if c.strip()]
            if not cells:
                continue
            if len(cells) != 2:
                raise DomainError(f"forbidden-pairs rows need two indices, got {row}")
            pairs.append((int(cells[0]), int(cells[1])))
    return pairs


def cmd_sweep(args) -> int:
    model = _load_model_or_data(args)
    domain = _domain_from_args(args)
    grid = build_grid(args.grid_s, require_positive_mean_weight=not args.no_lambda1_filter)
    opts = SolverOptions(max_iterations=args.max_iter)
    sparse = SparseOptions(k=args.sparse_k) if args.sparse_k else None
    sweep = run_sweep(model, domain, grid, opts, sparse, jobs=args.jobs)
    scale_values(sweep)
    superior = superior_set(sweep, args.eta)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    fingerprint = model_fingerprint(model)
    write_sweep_json(sweep, out_dir / "sweep.json", eta=args.eta,
                     data_fingerprint=fingerprint)
    write_sweep_csv(sweep, out_dir / "sweep.csv")
    table_rows = sorted(superior, key=lambda p: (-p[1], p[0]))
    write_trade_off_table(sweep, [i for i, _ in table_rows],
                          out_dir / "trade_off_table.csv")

    violations = []
    if sweep.region_labels is not None:
        violations = non_domination_check(sweep)
    _print_json({
        "grid_points": len(grid.points),
        "failures": len(sweep.failures),
        "max_aggregate": float(np.nanmax(sweep.aggregate)),
        "superior_count": len(superior),
        "non_domination_violations": len(violations),
        "support_histogram": {str(k): v for k, v in support_histogram(sweep).items()},
        "out_dir": str(out_dir),
    })
    return 2 if sweep.failures else 0


def cmd_synth(args) -> int:
    returns = synthetic_returns(n=args.n, m=args.m, seed=args.seed)
    write_returns_csv(returns, args.out)
    _print_json({"n": args.n, "m": args.m, "seed": args.seed, "path": str(args.out)})
    return 0


def cmd_report(args) -> int:
    with open(args.sweep, "r", encoding="utf-8") as fh:
        payload = json.load(fh)
    rows = [r for r in payload["results"] if "aggregate" in r]
    rows.sort(key=lambda r: -r["aggregate"])
    if args.eta is not None:
        best = rows[0]["aggregate"] if rows else 0.0
        rows = [r for r in rows if r["aggregate"] >= (1.0 - args.eta) * best]
    if args.top is not None:
        rows = rows[: args.top]
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lambda", "f1_scaled", "f2_scaled", "f3_scaled",
                         "f4_scaled", "support_size"])
        for r in rows:
            lam = "[" + ", ".join(repr(v) for v in r["lambda"]) + "]"
            writer.writerow([lam] + [repr(v) for v in r["scaled"]]
                            + [str(r["support_size"])])
    _print_json({"rows": len(rows), "path": str(args.out)})
    return 0


def _add_model_data_flags(sub, with_prices=True):
    sub.add_argument("--model", help="moment model JSON produced by the moments command")
    sub.add_argument("--data", help="returns CSV (header of labels, one row per asset)")
    if with_prices:
        sub.add_argument("--prices", action="store_true",
                         help="treat --data as prices and convert to relative returns")


def _add_domain_flags(sub):
    group = sub.add_mutually_exclusive_group()
    group.add_argument("--simplex", action="store_true",
                       help="long-only domain (default)")
    group.add_argument("--cube", type=float, metavar="B",
                       help="shorting/leverage domain [-B, B]^n")


def _add_solver_flags(sub):
    sub.add_argument("--max-iter", type=int, default=2000)
    sub.add_argument("--record-trace", action="store_true")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mvsk",
        description="Mean-variance-skewness-kurtosis portfolio sweeps",
    )
    parser.add_argument("--config", help="KEY=VALUE file of flag defaults")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("moments", help="build and save a moment model from returns")
    p.add_argument("--data", required=True)
    p.add_argument("--prices", action="store_true")
    p.add_argument("--out", default="model.json")
    p.set_defaults(func=cmd_moments)

    p = commands.add_parser("classify", help="convexity region of a weight vector")
    p.add_argument("--lambda", dest="lam", required=True, metavar="L1,L2,L3,L4")
    p.add_argument("--bounds", metavar="LOWER,UPPER")
    p.add_argument("--model")
    _add_domain_flags(p)
    p.set_defaults(func=cmd_classify)

    p = commands.add_parser("solve", help="solve one scalarized problem")
    _add_model_data_flags(p)
    p.add_argument("--lambda", dest="lam", required=True, metavar="L1,L2,L3,L4")
    _add_domain_flags(p)
    _add_solver_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = commands.add_parser("solve-sparse", help="solve with a support-size bound")
    _add_model_data_flags(p)
    p.add_argument("--lambda", dest="lam", required=True, metavar="L1,L2,L3,L4")
    _add_domain_flags(p)
    _add_solver_flags(p)
    p.add_argument("--max-support", type=int, default=5)
    p.add_argument("--no-support-heuristic", action="store_true")
    p.add_argument("--proximity-count", type=int)
    p.add_argument("--forbidden-pairs", help="CSV of index pairs that may not co-occur")
    p.set_defaults(func=cmd_solve_sparse)

    p = commands.add_parser("sweep", help="solve a whole weight grid and export results")
    _add_model_data_flags(p)
    _add_domain_flags(p)
    p.add_argument("--grid-s", type=int, default=10)
    p.add_argument("--eta", type=float, default=0.01)
    p.add_argument("--sparse-k", type=int)
    p.add_argument("--max-iter", type=int, default=2000)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--no-lambda1-filter", action="store_true",
                   help="keep grid points with zero mean weight")
    p.set_defaults(func=cmd_sweep)

    p = commands.add_parser("synth", help="write a seeded synthetic returns CSV")
    p.add_argument("--n", type=int, default=20)
    p.add_argument("--m", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="synthetic_returns.csv")
    p.set_defaults(func=cmd_synth)

    p = commands.add_parser("report", help="trade-off table from a sweep JSON")
    p.add_argument("--sweep", required=True)
    p.add_argument("--top", type=int)
    p.add_argument("--eta", type=float)
    p.add_argument("--out", default="trade_off_table.csv")
    p.set_defaults(func=cmd_report)

    return parser


def _load_config(path) -> dict:
    values = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DomainError(f"config line {line_no} is not KEY=VALUE: {line!r}")
            key, value = line.split("=", 1)
            values[key.strip().replace("-", "_")] = _coerce(value.strip())
    return values


def _coerce(text: str):
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = _build_parser()
    if "--config" in argv:
        try:
            config_path = argv[argv.index("--config") + 1]
            parser.set_defaults(**_load_config(config_path))
        except (IndexError, OSError, MvskError) as exc:
            print(f"error: bad --config: {exc}", file=sys.stderr)
            return 1
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (MvskError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
