"""Command-line pipeline: ingest -> signs -> estimators -> curve files.

Every subcommand writes its outputs under ``--out`` and prints a JSON run
manifest (also saved as ``manifest.json``).  ``--config FILE`` reads flat
``key = value`` lines whose keys are long option names; explicit flags win.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .curve import _jsonable
from .lag_decomposition import decompose_response, shuffled_sign_baseline
from .market_data import MarketWindow, atomic_write_text, parse_quotes, parse_trades, write_quotes, write_trades
from .midpoint import LOGARITHMIC, RELATIVE, midpoint_sampling_diagnostic
from .response import EstimatorConfig, estimate
from .spread import DEFAULT_THRESHOLDS, assign_groups, average_spread, group_average_response
from .store import classify_symbol, ingest_files, ingest_tables, list_days, load_midpoints, load_signs
from .synth import SynthParams, generate
from .time_shift import parse_grid, run_shift_scan

OUT_ENV = "PRICERESPONSE_OUT"


class DataError(Exception):
    pass


def _bool(text: str) -> bool:
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected true/false, got {text!r}")


def _kernel(text: str) -> tuple:
    if text == "permanent":
        return ("permanent",)
    name, _, arg = text.partition(":")
    if name != "transient" or not arg:
        raise argparse.ArgumentTypeError("kernel is 'permanent' or 'transient:<decay seconds>'")
    return ("transient", float(arg))


def _trade_law(text: str) -> tuple:
    name, _, arg = text.partition(":")
    if name == "fixed":
        return ("fixed", int(arg or 1))
    if name == "geometric" and arg:
        return ("geometric", float(arg))
    raise argparse.ArgumentTypeError("trades law is 'fixed:<k>' or 'geometric:<mean>'")


def _thresholds(text: str) -> tuple:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _common(p: argparse.ArgumentParser, data=True):
    p.add_argument("--config", help="flat key=value file of option defaults")
    p.add_argument("--out", default=os.environ.get(OUT_ENV, "out"), help="output directory")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    if data:
        p.add_argument("--data", default=None, help="ingested data root (defaults to --out)")


def _estimator_opts(p: argparse.ArgumentParser, kind_default=RELATIVE):
    p.add_argument("--tau-max", type=int, default=1000)
    p.add_argument("--exclude-zero", type=_bool, default=True)
    p.add_argument("--return-kind", choices=(RELATIVE, LOGARITHMIC), default=kind_default)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="priceresponse", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse, validate and window quote/trade files")
    _common(p, data=False)
    p.add_argument("--quotes", required=True)
    p.add_argument("--trades", required=True)
    p.add_argument("--symbol", help="defaults to the quotes file stem")
    p.add_argument("--window", type=MarketWindow.parse, default=MarketWindow())
    p.add_argument("--delimiter", default=",")

    p = sub.add_parser("synth", help="generate a synthetic market and ingest it")
    _common(p, data=False)
    p.add_argument("--symbol", default="SYN")
    p.add_argument("--days", type=int, default=4)
    p.add_argument("--seconds", type=int, default=22200)
    p.add_argument("--p", type=float, default=0.7, help="sign persistence probability")
    p.add_argument("--lambda", dest="impact", type=float, default=1e-4, help="impact per trade")
    p.add_argument("--noise", type=float, default=1e-4)
    p.add_argument("--trades", dest="trades_law", type=_trade_law, default=("fixed", 1))
    p.add_argument("--kernel", type=_kernel, default=("permanent",))
    p.add_argument("--tick", type=float, default=0.01)
    p.add_argument("--spread", type=float, default=0.02)
    p.add_argument("--price", type=float, default=100.0)
    p.add_argument("--seed", type=int, default=42)

    p = sub.add_parser("signs", help="classify trade signs of an ingested symbol")
    _common(p)
    p.add_argument("--symbol", required=True)
    p.add_argument("--carry-over", type=_bool, default=False)

    p = sub.add_parser("response", help="self-/cross-response curve")
    _common(p)
    p.add_argument("--scale", choices=("trade", "physical", "activity"), default="physical")
    p.add_argument("--i", required=True, help="stock whose returns are used")
    p.add_argument("--j", help="stock whose signs are used (default: --i)")
    _estimator_opts(p)

    p = sub.add_parser("shift-scan", help="responses over a grid of shifts or lags")
    _common(p)
    p.add_argument("--mode", choices=("fixed-tau", "fixed-shift"), required=True)
    p.add_argument("--value", type=int, required=True)
    p.add_argument("--grid", required=True, help="start:stop:step (stop included) or a comma list")
    p.add_argument("--scale", choices=("trade", "physical", "activity"), default="physical")
    p.add_argument("--i", required=True)
    p.add_argument("--j")
    _estimator_opts(p)

    p = sub.add_parser("decompose", help="short/long split with shuffled baseline")
    _common(p)
    p.add_argument("--tau-prime", type=int, default=40)
    p.add_argument("--i", required=True)
    p.add_argument("--j")
    p.add_argument("--seed", type=int, default=0)
    _estimator_opts(p, kind_default=LOGARITHMIC)

    p = sub.add_parser("spread-groups", help="group stocks by average spread")
    _common(p)
    p.add_argument("--universe", required=True, help="file with one SYMBOL or SYMBOL,spread per line")
    p.add_argument("--thresholds", type=_thresholds, default=DEFAULT_THRESHOLDS)
    _estimator_opts(p)

    p = sub.add_parser("diagnose", help="sampling and classification diagnostics")
    _common(p, data=False)
    p.add_argument("--quotes", required=True)
    p.add_argument("--trades")
    p.add_argument("--window", type=MarketWindow.parse, default=MarketWindow())
    p.add_argument("--delimiter", default=",")
    return parser


def _read_config(path) -> dict:
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError(f"{path}:{lineno}: expected key = value")
        key, value = (x.strip() for x in line.split("=", 1))
        out[key.lstrip("-")] = value
    return out


def parse_args(argv) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        cfg = _read_config(args.config)
        # config values come first so that explicit flags override them
        prefix = []
        for key, value in cfg.items():
            prefix += [f"--{key}", value]
        args = parser.parse_args([args.command] + prefix + list(argv[1:]))
    return args


def _config(args) -> EstimatorConfig:
    return EstimatorConfig(tau_max=args.tau_max, exclude_zero_sign=args.exclude_zero,
                           return_kind=args.return_kind, workers=max(1, args.workers))


def _data_root(args) -> Path:
    return Path(args.data or args.out)


def _pair_inputs(args):
    root = _data_root(args)
    j = args.j or args.i
    return load_midpoints(root, args.i), load_signs(root, j), j


def _write_curve(curve, path: Path) -> list:
    curve.to_csv(path.with_suffix(".csv"))
    curve.to_json(path.with_suffix(".json"))
    return [str(path.with_suffix(".csv")), str(path.with_suffix(".json"))]


def cmd_ingest(args, man):
    symbol = args.symbol or Path(args.quotes).stem.split("_")[0]
    stats = ingest_files(args.quotes, args.trades, args.out, symbol, args.window, args.delimiter)
    man["inputs"] = {"quotes": args.quotes, "trades": args.trades}
    man["row_counts"] = {"quotes": stats["quotes"], "trades": stats["trades"], "days": len(stats["days"])}
    man["reject_counts"] = {"quotes": stats["quote_rejects"], "trades": stats["trade_rejects"]}
    man["rejected_rows"] = stats["reject_rows"]
    man["outputs"] = [str(Path(args.out) / symbol)]


def cmd_synth(args, man):
    params = SynthParams(days=args.days, seconds_per_day=args.seconds, p_persist=args.p, impact=args.impact,
                         noise=args.noise, trades_per_second=args.trades_law, kernel=args.kernel, tick=args.tick,
                         base_spread=args.spread, base_price=args.price, seed=args.seed)
    market = generate(params)
    out = Path(args.out)
    qpath, tpath = out / "raw" / f"{args.symbol}_quotes.csv", out / "raw" / f"{args.symbol}_trades.csv"
    write_quotes(market.quotes, qpath)
    write_trades(market.trades, tpath)
    sign_path = out / "raw" / f"{args.symbol}_true_signs.csv"
    atomic_write_text(sign_path, "sign\n" + "\n".join(str(int(s)) for s in market.true_signs) + "\n")
    # the ingest path re-parses the written text so the store matches the files exactly
    stats = ingest_files(qpath, tpath, out, args.symbol, params.window)
    sstats = classify_symbol(out, args.symbol)
    man["seed"] = args.seed
    man["row_counts"] = {"quotes": stats["quotes"], "trades": stats["trades"], "days": len(stats["days"])}
    man["reject_counts"] = {"quotes": stats["quote_rejects"], "trades": stats["trade_rejects"]}
    man["unresolved_signs"] = sstats["unresolved"]
    man["outputs"] = [str(qpath), str(tpath), str(sign_path), str(out / args.symbol)]


def cmd_signs(args, man):
    stats = classify_symbol(_data_root(args), args.symbol, args.carry_over)
    man["row_counts"] = {"days": stats["days"], "trades": stats["trades"]}
    man["unresolved_signs"] = stats["unresolved"]
    man["outputs"] = [str(_data_root(args) / args.symbol)]


def cmd_response(args, man):
    mids, signs, j = _pair_inputs(args)
    curve = estimate(mids, signs, args.scale, _config(args))
    curve.meta.update(i=args.i, j=j)
    man["row_counts"] = {"lags": len(curve), "days": len(curve.meta["days"])}
    man["outputs"] = _write_curve(curve, Path(args.out) / f"response_{args.scale}_{args.i}_{j}")


def cmd_shift_scan(args, man):
    mids, signs, j = _pair_inputs(args)
    mode = {"fixed-tau": "fixed_tau_vary_shift", "fixed-shift": "fixed_shift_vary_tau"}[args.mode]
    scan = run_shift_scan(mids, signs, mode, args.value, parse_grid(args.grid), args.scale, _config(args))
    outputs = []
    base = Path(args.out) / f"shift_{args.mode}_{args.scale}_{args.i}_{j}"
    if mode == "fixed_tau_vary_shift":
        for t_s, curve in zip(scan.grid, scan.curves):
            outputs += _write_curve(curve, base / f"ts_{int(t_s)}")
        cols = zip(scan.grid, scan.values(), scan.counts(), scan.stderrs())
        rows = ["t_s,value,count,stderr"] + [f"{int(t)},{float(v)!r},{int(c)},{float(s)!r}" for t, v, c, s in cols]
        atomic_write_text(base / "scan.csv", "\n".join(rows) + "\n")
        outputs.append(str(base / "scan.csv"))
    else:
        outputs += _write_curve(scan.curves[0], base / f"ts_{args.value}")
    man["row_counts"] = {"grid_points": int(len(scan.grid))}
    man["outputs"] = outputs


def cmd_decompose(args, man):
    mids, signs, j = _pair_inputs(args)
    cfg = _config(args)
    dec = decompose_response(mids, signs, args.tau_prime, cfg)
    base = shuffled_sign_baseline(mids, signs, cfg, seed=args.seed)
    total = dec.total
    lines = ["tau,short,long,sum,original,baseline"]
    for k, tau in enumerate(dec.original.lags):
        cells = (dec.short.values[k], dec.long.values[k], total.values[k], dec.original.values[k], base.values[k])
        lines.append(f"{int(tau)}," + ",".join("" if not np.isfinite(v) else repr(float(v)) for v in cells))
    path = Path(args.out) / f"decompose_{args.i}_{j}.csv"
    atomic_write_text(path, "\n".join(lines) + "\n")
    man["seed"] = args.seed
    man["row_counts"] = {"lags": len(dec.original)}
    man["max_abs_residual"] = float(np.nanmax(np.abs(dec.residual))) if len(dec.original) else 0.0
    man["outputs"] = [str(path)]


def cmd_spread_groups(args, man):
    root = _data_root(args)
    table, curves = {}, {}
    cfg = _config(args)
    for line in Path(args.universe).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip()
        if not line or line.lower().startswith("symbol"):
            continue
        parts = [x.strip() for x in line.split(",")]
        sym = parts[0]
        has_data = (root / sym).is_dir()
        if len(parts) > 1 and parts[1]:
            table[sym] = float(parts[1])
        elif has_data:
            table[sym] = average_spread(load_midpoints(root, sym))
        else:
            raise DataError(f"{sym}: no spread given and no ingested data under {root}")
        if has_data:
            curves[sym] = estimate(load_midpoints(root, sym), load_signs(root, sym), "physical", cfg)
    grouping = assign_groups(table, args.thresholds)
    out = Path(args.out)
    rows = ["symbol,spread,group"] + [f"{s},{v!r},{'' if b is None else b}" for s, v, b in grouping.to_rows()]
    atomic_write_text(out / "spread_groups.csv", "\n".join(rows) + "\n")
    outputs = [str(out / "spread_groups.csv")]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        groups = group_average_response(curves, grouping) if curves else {}
    for band, curve in groups.items():
        outputs += _write_curve(curve, out / f"group_{band}")
    man["warnings"] = [str(w.message) for w in caught]
    man["row_counts"] = {"stocks": len(table), "out_of_range": grouping.out_of_range}
    man["outputs"] = outputs


def cmd_diagnose(args, man):
    from .market_data import FormatConfig, filter_market_time

    cfg = FormatConfig(delimiter=args.delimiter)
    quotes = filter_market_time(parse_quotes(args.quotes, cfg), args.window)
    report = {"midpoint_last_vs_mean": {}}
    for day in quotes.days():
        report["midpoint_last_vs_mean"][day.isoformat()] = midpoint_sampling_diagnostic(quotes.for_day(day))
    man["reject_counts"] = {"quotes": quotes.rejects.count}
    if args.trades:
        from .signs import sign_series_for_day

        trades = filter_market_time(parse_trades(args.trades, cfg), args.window)
        man["reject_counts"]["trades"] = trades.rejects.count
        report["unresolved_signs"] = {
            d.isoformat(): sign_series_for_day(trades.for_day(d), args.window).unresolved for d in trades.days()}
    path = Path(args.out) / "diagnostics.json"
    atomic_write_text(path, json.dumps(report, indent=1, sort_keys=True) + "\n")
    man["diagnostics"] = report
    man["outputs"] = [str(path)]


COMMANDS = {
    "ingest": cmd_ingest,
    "synth": cmd_synth,
    "signs": cmd_signs,
    "response": cmd_response,
    "shift-scan": cmd_shift_scan,
    "decompose": cmd_decompose,
    "spread-groups": cmd_spread_groups,
    "diagnose": cmd_diagnose,
}


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = parse_args(argv)
    params = {k: v for k, v in vars(args).items() if k != "command"}
    manifest = {
        "tool": "priceresponse",
        "version": __version__,
        "command": args.command,
        "argv": argv,
        "parameters": _jsonable(params),
        "started": dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
    }
    try:
        COMMANDS[args.command](args, manifest)
    except (DataError, ValueError, OSError, KeyError) as exc:
        print(f"priceresponse {args.command}: {exc}", file=sys.stderr)
        return 1
    out = Path(args.out)
    atomic_write_text(out / "manifest.json", json.dumps(_jsonable(manifest), indent=1, sort_keys=True) + "\n")
    print(json.dumps(_jsonable(manifest), sort_keys=True))
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
