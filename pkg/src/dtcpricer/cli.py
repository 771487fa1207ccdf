"""Command-line entry point: price, greeks, mc, reproduce, check."""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys

from .checks import run_checks
from .config import RunConfig, build_model, load_config
from .errors import ContourError, DomainError, ParameterError
from .mc_oracle import McConfig, mc_price, mc_price_many
from .models import STATE_NAMES
from .pricer import activity_vega, bump_state, delta, gamma, price
from .tables import (AV_TOLERANCE, MODEL_PARAMS, PAYOFFS, REFERENCE_AV, TABLE_MODELS, TABLES,
                     table_mapping)

CSV_HEADER = ("table", "model", "payoff", "av", "mc", "stderr", "relerr")


def _fmt(x):
    if isinstance(x, float):
        return "nan" if math.isnan(x) else repr(x)
    return str(x)


def _emit(args, command, cfg, records, header):
    """Write records (list of dicts with keys in header) in the chosen format."""
    out = sys.stdout
    if args.output == "json":
        for r in records:
            rec = {"command": command, "result": r}
            if cfg is not None:
                rec["config"] = cfg.to_mapping()
            out.write(json.dumps(rec, sort_keys=True) + "\n")
    elif args.output == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        for r in records:
            w.writerow([_fmt(r[k]) for k in header])
    else:
        for r in records:
            out.write("  ".join(f"{k}={_fmt(r[k])}" for k in header) + "\n")


def _config(args, need_contract=True) -> RunConfig:
    """RunConfig from --config or --table/--model/--payoff, with overrides."""
    if args.config:
        m = load_config(args.config).to_mapping()
    elif args.table is not None:
        if args.model is None:
            raise ParameterError("--table needs --model")
        if args.table not in TABLES:
            raise ParameterError(f"no table {args.table}; expected one of {sorted(TABLES)}")
        m = table_mapping(args.table, args.model, args.payoff or "vanilla")
    else:
        raise ParameterError("give --config PATH or --table N --model NAME [--payoff P]")
    for item in args.set or []:
        if "=" not in item:
            raise ParameterError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        m[k.strip()] = v.strip()
    if args.seed is not None:
        m["seed"] = args.seed
    if args.threads is not None:
        m["threads"] = args.threads
    if getattr(args, "paths", None) is not None:
        m["n_paths"] = args.paths
    if getattr(args, "steps", None) is not None:
        m["n_steps"] = args.steps
    m["output"] = args.output
    cfg = RunConfig.from_mapping(m)
    if need_contract and cfg.payoff is None:
        raise ParameterError("config has no payoff")
    return cfg


def cmd_price(args) -> int:
    cfg = _config(args)
    r = price(cfg.model, cfg.market, cfg.contract, cfg.quad)
    rec = {"model": cfg.model_name, "payoff": cfg.payoff, "price": r.price,
           "err_estimate": r.err_estimate, "evals": r.evals, "k1": r.contour[0],
           "k2": r.contour[1], "flagged": r.flagged}
    _emit(args, "price", cfg, [rec], tuple(rec))
    return 0


def cmd_greeks(args) -> int:
    cfg = _config(args)
    model, mkt, c, q = cfg.model, cfg.market, cfg.contract, cfg.quad
    rec = {"model": cfg.model_name, "payoff": cfg.payoff,
           "delta": delta(model, mkt, c, q).price, "gamma": gamma(model, mkt, c, q).price}
    for s in STATE_NAMES:
        if bump_state(model, s, 0.0) is not None:
            rec[f"vega_{s}"] = activity_vega(model, mkt, c, q, which=s).price
    _emit(args, "greeks", cfg, [rec], tuple(rec))
    return 0


def cmd_mc(args) -> int:
    cfg = _config(args)
    r = mc_price(cfg.model, cfg.market, cfg.contract, cfg.mc)
    rec = {"model": cfg.model_name, "payoff": cfg.payoff, "price": r.price,
           "std_err": r.std_err, "n_degenerate": r.n_degenerate, "n_used": r.n_used,
           "insufficient": r.insufficient}
    _emit(args, "mc", cfg, [rec], tuple(rec))
    return 0


def reproduce_table(table: int, with_mc: bool = True, mc: McConfig = McConfig(),
                    models=TABLE_MODELS, log=None):
    """Rows (dicts keyed by CSV_HEADER plus 'paper_av', 'av_err', 'av_ok',
    'mc_ok', 'error') for one table.  A simulation agrees when it lies within
    3 standard errors plus the quadrature error estimate of the analytic
    value; the latter only matters for zero-variance payoffs."""
    rows = []
    for name in models:
        cfgs = [RunConfig.from_mapping(table_mapping(table, name, p)) for p in PAYOFFS]
        contracts = [c.contract for c in cfgs]
        sims = [None] * len(PAYOFFS)
        if with_mc:
            try:
                sims = mc_price_many(cfgs[0].model, cfgs[0].market, contracts, mc)
            except (ParameterError, DomainError) as e:
                if log:
                    log(f"table {table} {name}: simulation failed: {e}")
        for cfg, payoff, sim in zip(cfgs, PAYOFFS, sims):
            ref = REFERENCE_AV[table][name][PAYOFFS.index(payoff)]
            row = {"table": table, "model": name, "payoff": payoff, "paper_av": ref,
                   "av": float("nan"), "mc": float("nan"), "stderr": float("nan"),
                   "relerr": float("nan"), "av_err": float("nan"), "av_ok": False,
                   "mc_ok": False, "error": ""}
            try:
                res = price(cfg.model, cfg.market, cfg.contract, cfg.quad)
                av = res.price
                row["av"], row["av_err"] = av, res.err_estimate
                row["av_ok"] = abs(av - ref) <= AV_TOLERANCE[payoff] * abs(ref)
            except (ParameterError, ContourError, DomainError) as e:
                row["error"] = str(e)
                if log:
                    log(f"table {table} {name} {payoff}: {e}")
            if sim is not None:
                row["mc"], row["stderr"] = sim.price, sim.std_err
                if not math.isnan(row["av"]):
                    row["relerr"] = abs(row["av"] - sim.price) / abs(sim.price)
                    row["mc_ok"] = (abs(row["av"] - sim.price)
                                    <= 3 * sim.std_err + row["av_err"])
            rows.append(row)
    return rows


def summary_line(table, rows, with_mc=True) -> str:
    av = sum(r["av_ok"] for r in rows)
    s = f"summary table={table} av_within_tol={av}/{len(rows)}"
    if with_mc:
        s += f" mc_within_3se={sum(r['mc_ok'] for r in rows)}/{len(rows)}"
    return s


def cmd_reproduce(args) -> int:
    if args.table not in TABLES:
        raise ParameterError(f"no table {args.table}; expected one of {sorted(TABLES)}")
    mc = McConfig(n_paths=args.paths or 100_000, n_steps=args.steps or 1_000,
                  seed=args.seed if args.seed is not None else 0, threads=args.threads)
    rows = reproduce_table(args.table, not args.no_mc, mc,
                           log=lambda msg: print(msg, file=sys.stderr))
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for r in rows:
                w.writerow([_fmt(r[k]) for k in CSV_HEADER])
    header = CSV_HEADER + ("paper_av", "av_ok") + (() if args.no_mc else ("mc_ok",))
    _emit(args, "reproduce", None, rows, header if args.output != "csv" else CSV_HEADER)
    line = summary_line(args.table, rows, not args.no_mc)
    print(line, file=sys.stderr if args.output != "human" else sys.stdout)
    return 0


def cmd_check(args) -> int:
    if args.config:
        cfg = load_config(args.config)
        targets = [(cfg.model_name, cfg.model)]
    else:
        names = args.models or ["all"]
        if "all" in names:
            names = list(MODEL_PARAMS)
        targets = []
        for n in names:
            if n not in MODEL_PARAMS:
                raise ParameterError(f"unknown model {n!r}; expected one of {sorted(MODEL_PARAMS)}")
            targets.append((n, build_model(n, MODEL_PARAMS[n])))
    results = []
    for name, model in targets:
        results.extend(run_checks(name, model))
    recs = [{"model": r.model, "check": r.name, "passed": r.passed, "value": r.value,
             "tol": r.tol} for r in results]
    if args.output == "human":
        for r in results:
            print(r.line())
    else:
        _emit(args, "check", None, recs, ("model", "check", "passed", "value", "tol"))
    failed = sum(not r.passed for r in results)
    print(f"checks passed {len(results) - failed}/{len(results)}",
          file=sys.stdout if args.output == "human" else sys.stderr)
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value run configuration file")
    common.add_argument("--output", choices=("human", "csv", "json"), default="human")
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int, help="worker cap (default: all cores)")

    cell = argparse.ArgumentParser(add_help=False)
    cell.add_argument("--table", type=int, help="take market and contract from a shipped table")
    cell.add_argument("--model", choices=sorted(MODEL_PARAMS))
    cell.add_argument("--payoff", choices=PAYOFFS)
    cell.add_argument("--set", action="append", metavar="KEY=VALUE",
                      help="override a config entry (repeatable)")

    p = argparse.ArgumentParser(prog="dtcpricer",
                                description="Fourier pricing of joint price/variance claims")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("price", parents=[common, cell], help="analytic price")
    sub.add_parser("greeks", parents=[common, cell], help="delta, gamma, activity vegas")
    m = sub.add_parser("mc", parents=[common, cell], help="Monte Carlo price")
    m.add_argument("--paths", type=int)
    m.add_argument("--steps", type=int)
    r = sub.add_parser("reproduce", parents=[common], help="reproduce a table as CSV")
    r.add_argument("--table", type=int, required=True)
    r.add_argument("--out", help="CSV output path")
    r.add_argument("--no-mc", action="store_true", help="skip the simulation columns")
    r.add_argument("--paths", type=int)
    r.add_argument("--steps", type=int)
    c = sub.add_parser("check", parents=[common], help="run the invariant suite")
    c.add_argument("models", nargs="*", help="model names or 'all' (default)")
    return p


COMMANDS = {"price": cmd_price, "greeks": cmd_greeks, "mc": cmd_mc,
            "reproduce": cmd_reproduce, "check": cmd_check}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ParameterError, ContourError, DomainError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
