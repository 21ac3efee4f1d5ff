"""Command-line entry point: run the grid, regenerate reports, check data."""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from .config import ConfigError, load_config
from .evaluation import ConfusionCounts, metrics_from_counts
from .market_data import MarketDataError, compute_returns, load_price_csv, return_sigma
from .runner import CellResult, CellSpec, ResultsTable, emit_report, run_grid, write_results

__all__ = ["main"]


def _build_parser():
    ap = argparse.ArgumentParser(prog="sigfx",
                                 description="Significant FX return forecasting grid")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute the experiment grid")
    run.add_argument("--config", required=True, help="TOML experiment file")
    run.add_argument("--out-dir", help="override output directory")
    run.add_argument("--seed", type=int, help="override master seed")
    run.add_argument("--workers", type=int, help="override worker count")
    run.add_argument("--pairs", help="comma-separated pair subset")
    run.add_argument("--methods", help="comma-separated method subset")
    run.add_argument("--lookbacks", help="comma-separated lookback subset")
    run.add_argument("--thresholds", help="comma-separated threshold subset")
    run.add_argument("--dump-scores", action="store_true", default=None,
                     help="write per-cell detector score CSVs")
    run.add_argument("--svg", action="store_true", help="also emit SVG charts")

    rep = sub.add_parser("report", help="regenerate report files from results.csv")
    rep.add_argument("--results", required=True, help="directory holding results.csv")
    rep.add_argument("--out-dir", help="report target directory (default: same)")
    rep.add_argument("--svg", action="store_true", help="also emit SVG charts")

    val = sub.add_parser("validate-data", help="check a price CSV")
    val.add_argument("csv", help="price file with date,close rows")
    val.add_argument("--pair", help="pair label (default: file stem)")
    return ap


def _overridden(cfg, args):
    fields = {}
    if args.out_dir is not None:
        fields["out_dir"] = args.out_dir
    if args.seed is not None:
        fields["seed"] = args.seed
    elif "SIGFX_SEED" in os.environ:
        try:
            fields["seed"] = int(os.environ["SIGFX_SEED"])
        except ValueError:
            raise ConfigError("SIGFX_SEED must be an integer, got %r"
                              % os.environ["SIGFX_SEED"])
    if args.workers is not None:
        fields["workers"] = args.workers
    if args.pairs is not None:
        fields["pairs"] = tuple(s.strip() for s in args.pairs.split(","))
    if args.methods is not None:
        fields["methods"] = tuple(s.strip().upper() for s in args.methods.split(","))
    if args.lookbacks is not None:
        fields["lookbacks"] = tuple(int(s) for s in args.lookbacks.split(","))
    if args.thresholds is not None:
        fields["thresholds"] = tuple(float(s) for s in args.thresholds.split(","))
    if args.dump_scores is not None:
        fields["dump_scores"] = True
    return dataclasses.replace(cfg, **fields) if fields else cfg


def _cmd_run(args):
    cfg = _overridden(load_config(args.config), args)
    for pair in cfg.pairs:
        path = cfg.path_for(pair)
        if not os.path.exists(path):
            raise ConfigError("data file for %s not found: %s" % (pair, path))
    table = run_grid(cfg)
    write_results(table, cfg.out_dir, cfg)
    emit_report(table, cfg.out_dir)
    if args.svg:
        from .svg_charts import emit_charts
        emit_charts(table, cfg.out_dir)
    print("ran %d cells, %d failed -> %s"
          % (len(table.results), table.n_failed, cfg.out_dir))
    for res in table.results:
        if not res.ok:
            c = res.cell
            print("  failed %s/%s p=%d k=%g: %s"
                  % (c.pair, c.method, c.lookback, c.threshold_k, res.error),
                  file=sys.stderr)
    return 1 if table.n_failed else 0


def _read_results_csv(path):
    results = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        for i, line in enumerate(fh):
            parts = line.rstrip("\n").split(",")
            if len(parts) != 12:
                raise ConfigError("%s line %d: expected 12 fields" % (path, i + 2))
            pair, method, p, k = parts[0], parts[1], int(parts[2]), float(parts[3])
            cell = CellSpec(index=i, pair=pair, method=method, lookback=p,
                            threshold_k=k, seed=0)
            if parts[11] == "ok":
                counts = ConfusionCounts(tp=int(parts[4]), fp=int(parts[5]),
                                         fn=int(parts[6]), tn=int(parts[7]))
                rec = metrics_from_counts(counts, pair=pair, method=method,
                                          lookback=p, threshold_k=k)
                results.append(CellResult(cell=cell, metrics=rec, error=None))
            else:
                err = parts[11]
                err = err[6:] if err.startswith("error:") else err
                results.append(CellResult(cell=cell, metrics=None, error=err))
    return ResultsTable(results=tuple(results), seed=0, digest="")


def _cmd_report(args):
    path = os.path.join(args.results, "results.csv")
    if not os.path.exists(path):
        raise ConfigError("no results.csv under %s" % args.results)
    table = _read_results_csv(path)
    out = args.out_dir or args.results
    paths = emit_report(table, out)
    if args.svg:
        from .svg_charts import emit_charts
        paths += emit_charts(table, out)
    print("wrote %d report files -> %s" % (len(paths), out))
    return 0


def _cmd_validate(args):
    pair = args.pair or os.path.splitext(os.path.basename(args.csv))[0]
    prices = load_price_csv(args.csv, pair)
    returns = compute_returns(prices)
    sigma = return_sigma(returns)
    print("%s: %d rows, %s .. %s" % (pair, len(prices),
                                     prices.dates[0], prices.dates[-1]))
    print("returns: %d, sigma %.6g, significant at 1.5 sigma: %.2f%%"
          % (len(returns), sigma,
             100.0 * float((abs(returns.returns) > 1.5 * sigma).mean())))
    return 0


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "report":
            return _cmd_report(args)
        return _cmd_validate(args)
    except (ConfigError, MarketDataError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
