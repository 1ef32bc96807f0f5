"""Command-line front end.

Usage:
    photonflow --scenario master-equation --config run.json --seed 7 --out-dir out

Flags override config-file fields, which override defaults. Exit codes:
0 success, 2 configuration error, 3 numerical divergence or instability.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import (
    ConfigError,
    ConsistencyError,
    GridCoverageError,
    IntegrationDivergedError,
    PhotonflowError,
    StabilityError,
    WellPosednessError,
)
from .scenarios import SCENARIOS, ScenarioConfig, run, validate

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_NUMERICAL_FAILURES = (
    IntegrationDivergedError,
    StabilityError,
    WellPosednessError,
    GridCoverageError,
    ConsistencyError,
)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="photonflow",
        description="Single-photon pulse shaping and filtering scenarios",
    )
    p.add_argument("--scenario", choices=SCENARIOS, help="scenario to run")
    p.add_argument("--config", help="path to a JSON configuration document")
    p.add_argument("--seed", type=int, help="RNG seed (required by every scenario)")
    p.add_argument("--out-dir", dest="out_dir", help="output directory (default: .)")
    p.add_argument("--format", choices=("csv", "json", "both"), help="output files to write")
    p.add_argument(
        "--validate",
        action="store_true",
        help="validate the configuration and report, without running",
    )
    return p


def _load_config(args: argparse.Namespace) -> ScenarioConfig:
    file_doc = None
    if args.config:
        try:
            with open(args.config) as fh:
                file_doc = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}")
    overrides = {
        "scenario": args.scenario,
        "seed": args.seed,
        "out_dir": args.out_dir,
        "format": args.format,
    }
    return ScenarioConfig.from_sources(file_doc, overrides)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.validate:
        report = validate(cfg)
        for err in report.errors:
            print(f"error: {err}")
        for warning in report.warnings:
            print(f"note: {warning}")
        if report.numerics:
            print("effective numerics:")
            for key, value in report.numerics.items():
                print(f"  {key}: {value}")
        if report.ok:
            print("configuration OK")
        return EXIT_OK

    try:
        result = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _NUMERICAL_FAILURES as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except PhotonflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    for path in (result.csv_path, result.json_path):
        if path is not None:
            print(f"wrote {path}")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
