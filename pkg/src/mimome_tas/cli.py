"""Command-line front end: ``gen``, ``select``, ``sweep`` and ``bench``.

All SNR flags are *normalized* SNRs in dB: the per-receive-antenna SNR
already divided by the number of selected antennas L.

Exit codes: 0 success, 2 usage/config/input error, 3 numerical error,
4 exhaustive-search budget refusal.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import DEFAULT_ES_CAP, exhaustive_select, norm_based_select
from .capacity import db_to_linear, link_capacity
from .channel import generate_rayleigh, load_matrix, store_matrix
from .csie import select_csie
from .errors import ConfigError, DimensionError, MimomeError
from .experiments import (
    SweepConfig,
    aggregate,
    derive_seed,
    records_to_csv,
    records_to_json,
    sweep_outcomes,
    write_plot_series,
)
from .ncsie import select_ncsie
from .tree import BabOptions

log = logging.getLogger("mimome_tas")


def _split_list(values, cast):
    out = []
    for v in values:
        out.extend(cast(x) for x in str(v).split(",") if x != "")
    return out


def _add_sweep_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON sweep config; flags override its keys")
    p.add_argument("--scenario", choices=("ncsie", "csie"))
    p.add_argument("--nt", nargs="+", help="transmit antennas (grid)")
    p.add_argument("--nr", type=int)
    p.add_argument("--ne", type=int)
    p.add_argument("-L", dest="L", type=int)
    p.add_argument("--rho-m-db", nargs="+", help="legitimate normalized SNR grid, dB")
    p.add_argument("--rho-e-db", nargs="+", help="eavesdropper normalized SNR grid, dB")
    p.add_argument("--trials", type=int)
    p.add_argument("--methods", nargs="+", help="subset of bab,norm,es")
    p.add_argument("--seed", type=int)
    p.add_argument("--es-cap", type=int)
    p.add_argument("--warm-start", action="store_true", default=None)
    p.add_argument("--workers", type=int, help="worker processes for trials")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mimome-tas",
        description="Branch-and-bound transmit antenna selection for MIMO wiretap channels.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a reproducible Rayleigh channel file")
    g.add_argument("--nr", type=int, required=True, help="rows (receive antennas)")
    g.add_argument("--nt", type=int, required=True, help="columns (transmit antennas)")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", type=Path, required=True)
    g.add_argument("--binary", action="store_true", help="write the binary variant")

    s = sub.add_parser("select", help="select antennas for one channel instance")
    s.add_argument("--scenario", choices=("ncsie", "csie"), default="ncsie")
    s.add_argument("--method", choices=("bab", "es", "norm"), default="bab")
    s.add_argument("--hm", type=Path)
    s.add_argument("--he", type=Path)
    s.add_argument("--nt", type=int, default=64)
    s.add_argument("--nr", type=int, default=4)
    s.add_argument("--ne", type=int, default=8)
    s.add_argument("-L", dest="L", type=int, required=True)
    s.add_argument("--rho-m-db", type=float, required=True)
    s.add_argument("--rho-e-db", type=float, default=5.0)
    s.add_argument("--seed", type=int, help="generate channels instead of reading files")
    s.add_argument("--warm-start", action="store_true")
    s.add_argument("--es-cap", type=int, default=DEFAULT_ES_CAP)

    w = sub.add_parser("sweep", help="Monte Carlo sweep, written as CSV or JSON records")
    _add_sweep_flags(w)
    w.add_argument("--out", type=Path, help="output path (default: stdout)")
    w.add_argument("--format", choices=("csv", "json"), default="csv")
    w.add_argument("--emit-plot", action="store_true",
                   help="also write per-method x,y series next to --out")

    b = sub.add_parser("bench", help="compare node counts and wall time across methods")
    _add_sweep_flags(b)
    return parser


def _sweep_config(args, defaults: dict) -> SweepConfig:
    data = dict(defaults)
    if args.config is not None:
        try:
            data.update(json.loads(args.config.read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    try:
        flags = {
            "scenario": args.scenario,
            "nt": _split_list(args.nt, int) if args.nt else None,
            "nr": args.nr,
            "ne": args.ne,
            "L": args.L,
            "rho_m_db": _split_list(args.rho_m_db, float) if args.rho_m_db else None,
            "rho_e_db": _split_list(args.rho_e_db, float) if args.rho_e_db else None,
            "n_trials": args.trials,
            "methods": _split_list(args.methods, str) if args.methods else None,
            "seed": args.seed,
            "es_cap": args.es_cap,
            "warm_start": args.warm_start,
            "workers": args.workers,
        }
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    data.update({k: v for k, v in flags.items() if v is not None})
    config = SweepConfig.from_dict(data)
    config.validate()
    return config


def cmd_gen(args) -> int:
    H = generate_rayleigh(args.nr, args.nt, args.seed)
    store_matrix(H, args.out, binary=args.binary)
    return 0


def _load(path: Path, what: str):
    try:
        return load_matrix(path)
    except OSError as exc:
        raise ConfigError(f"cannot read {what} {path}: {exc.strerror}") from exc


def cmd_select(args) -> int:
    if args.hm is not None:
        Hm = _load(args.hm, "Hm")
        He = _load(args.he, "He") if args.he is not None else None
    elif args.seed is not None:
        Hm = generate_rayleigh(args.nr, args.nt, derive_seed(args.seed, 0, 0, 0))
        He = generate_rayleigh(args.ne, args.nt, derive_seed(args.seed, 0, 0, 1))
    else:
        raise ConfigError("provide --hm (and --he) or --seed")
    if He is not None and He.shape[1] != Hm.shape[1]:
        raise DimensionError(
            f"dimension mismatch: Hm has {Hm.shape[1]} columns, He has {He.shape[1]}"
        )
    if args.scenario == "csie" and He is None:
        raise ConfigError("csie needs --he or --seed")

    rho_m, rho_e = db_to_linear(args.rho_m_db), db_to_linear(args.rho_e_db)
    options = BabOptions(warm_start=args.warm_start)
    start = time.perf_counter()
    if args.method == "bab":
        if args.scenario == "ncsie":
            res = select_ncsie(Hm, args.L, rho_m, options)
        else:
            res = select_csie(Hm, He, args.L, rho_m, rho_e, options)
        indices, objective, nodes = res.indices, res.objective, res.visited_nodes
    elif args.method == "es":
        res = exhaustive_select(Hm, args.L, rho_m, He, rho_e, args.scenario, args.es_cap)
        indices, objective, nodes = res.indices, res.objective, res.visited_nodes
    else:
        indices = norm_based_select(Hm, args.L)
        cols = [i - 1 for i in indices]
        objective = link_capacity(Hm[:, cols], rho_m)
        if args.scenario == "csie":
            objective -= link_capacity(He[:, cols], rho_e)
        nodes = Hm.shape[1]
    elapsed = time.perf_counter() - start

    cs = None
    if He is not None:
        cols = [i - 1 for i in indices]
        cs = max(0.0, link_capacity(Hm[:, cols], rho_m) - link_capacity(He[:, cols], rho_e))
    report = {
        "scenario": args.scenario,
        "method": args.method,
        "L": args.L,
        "indices": list(indices),
        "objective_bits": objective,
        "secrecy_capacity_bits": cs,
        "visited_nodes": nodes,
        "wall_time_s": elapsed,
    }
    print(json.dumps(report))
    return 0


def cmd_sweep(args) -> int:
    config = _sweep_config(args, {})
    log.info("sweep: %d grid points x %d trials", len(config.points()), config.n_trials)
    records = aggregate(config, sweep_outcomes(config))
    text = records_to_csv(records) if args.format == "csv" else records_to_json(records)
    if args.out is None:
        if args.emit_plot:
            raise ConfigError("--emit-plot needs --out")
        sys.stdout.write(text)
        return 0
    args.out.write_text(text, encoding="utf-8")
    if args.emit_plot:
        for path in write_plot_series(records, args.out.with_suffix("")):
            log.info("wrote %s", path)
    return 0


def cmd_bench(args) -> int:
    config = _sweep_config(args, {"n_trials": 20, "methods": ["bab", "norm", "es"], "nt": [16],
                                  "rho_m_db": [9.0], "rho_e_db": [1.0], "ne": 4})
    # compile the search kernel before anything is timed
    select_ncsie(generate_rayleigh(2, 4, 0), 2, 1.0)
    select_csie(generate_rayleigh(2, 4, 0), generate_rayleigh(2, 4, 1), 2, 1.0, 1.0)
    outcomes = sweep_outcomes(config)
    rows = {}
    for m in config.methods:
        nodes = np.concatenate([o.methods[m].nodes for o in outcomes])
        secs = np.concatenate([o.methods[m].seconds for o in outcomes])
        rows[m] = (float(nodes.mean()), float(secs.mean()))
    es = rows.get("es")
    print(f"{'method':<8}{'mean_nodes':>14}{'mean_ms':>12}{'nodes/ES':>10}{'speedup':>10}")
    for m, (nodes, secs) in rows.items():
        ratio = f"{nodes / es[0]:.4f}" if es else "-"
        speed = f"{es[1] / secs:.2f}" if es and secs > 0 else "-"
        print(f"{m:<8}{nodes:>14.2f}{secs * 1e3:>12.3f}{ratio:>10}{speed:>10}")
    return 0


COMMANDS = {"gen": cmd_gen, "select": cmd_select, "sweep": cmd_sweep, "bench": cmd_bench}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except MimomeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
