"""Command line entry point: ``afdm-plim {rate,ber,af,range} --config FILE [overrides]``."""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

from ..errors import ConfigError, DomainError
from ..sensing import write_surface_csv
from .config import ExperimentConfig, load_config, parse_sweep, worker_count
from .experiments import run_af, run_ber_sweep, run_range_sweep, run_rate_table
from .io import format_rows

log = logging.getLogger("afdm_plim")


def _group_size(text: str):
    return None if text.lower() in ("none", "ungrouped", "0") else int(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="afdm-plim", description="AFDM-PLIM simulation experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "rate": "data-rate table over block sizes and PSK orders",
        "ber": "bit error rate versus SNR",
        "af": "delay / Doppler ambiguity functions",
        "range": "range-estimation NMAE versus transmit power",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", type=Path, help="INI experiment file")
        p.add_argument("--seed", type=int)
        p.add_argument("--snr-db", dest="sweep", help="sweep grid, start:stop:step or comma list")
        p.add_argument("--trials", type=int)
        p.add_argument("--out", type=Path, help="output file (stdout if omitted)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--waveform", choices=("AFDM", "AFDM-IM", "AFDM-PLIM", "FMCW"))
        p.add_argument("--detector", choices=("ml", "lc"))
        p.add_argument("--group-size", type=_group_size, default=argparse.SUPPRESS,
                       help="block size U, or 'none' for ungrouped")
        p.add_argument("--beta", type=float)
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    kw = {}
    for key in ("seed", "trials", "waveform", "detector", "beta"):
        value = getattr(args, key)
        if value is not None:
            kw[key] = value
    if hasattr(args, "group_size"):
        kw["group_size"] = args.group_size
    if args.sweep is not None:
        kw["sweep"] = parse_sweep(args.sweep)
    return cfg.with_overrides(**kw)


def _emit(text: str, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _write_af_extras(result, out: Path):
    """Grid and cut CSVs next to the summary file."""
    stem = out.with_suffix("")
    for name, surf in result.surfaces.items():
        write_surface_csv(surf, f"{stem}_{name.lower()}_grid.csv", label=name)
    with open(f"{stem}_cuts.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["waveform", "cut", "axis", "magnitude_db"])
        for cut_name, cuts in (("delay", result.delay_cuts), ("doppler", result.doppler_cuts)):
            for name, cut in cuts.items():
                for a, v in zip(cut.axis, cut.values_db):
                    w.writerow([name, cut_name, repr(float(a)), f"{v:.6f}"])


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
        workers = worker_count()
        log.info("running %s with seed %d on %d worker(s)", args.command, cfg.seed, workers)
        if args.command == "rate":
            rows = run_rate_table(cfg)
        elif args.command == "ber":
            rows = run_ber_sweep(cfg, workers)
        elif args.command == "range":
            rows = run_range_sweep(cfg, workers)
        else:
            result = run_af(cfg, workers)
            rows = result.rows
            if args.out is not None:
                _write_af_extras(result, args.out)
        _emit(format_rows(rows, args.command, cfg.to_dict(), args.format), args.out)
    except (ConfigError, DomainError) as exc:
        print(f"afdm-plim: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"afdm-plim: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
