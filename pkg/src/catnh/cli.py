"""Command-line front end.

One binary with subcommands fig2 | fig3 | fig4 | sweep | validate.  Each
reads built-in defaults, optionally merged with a YAML config file, then
with individual --set key=value flags (flags win).  Exit codes: 0 success,
2 config error, 3 numeric failure, 4 validation failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import yaml

from .errors import CatnhError, ConfigError
from .experiments import (
    load_config_file,
    resolve_config,
    run_fig2,
    run_fig3,
    run_fig4,
    run_sweep,
    run_validate,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_VALIDATION = 4


def _add_common(sub):
    sub.add_argument("--config", help="YAML config file (keys per experiment)")
    sub.add_argument("--out", help="output directory (default $CATNH_OUT or ./catnh_out)")
    sub.add_argument("--set", dest="overrides", action="append", default=[],
                     metavar="KEY=VALUE", help="override a single config key")
    sub.add_argument("--dim", type=int, help="Fock truncation override")
    sub.add_argument("--tol", type=float, help="integrator relative tolerance")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="catnh",
        description="Dephasing-induced non-Hermitian dynamics of Kerr-cat qubits",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p2 = sub.add_parser("fig2", help="full vs effective cat dynamics + discrepancy map")
    _add_common(p2)
    p2.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                    help="worker processes for the discrepancy map")
    p2.add_argument("--skip-map", action="store_true",
                    help="only run the single-amplitude dynamics")

    p3 = sub.add_parser("fig3", help="PT transition sweep of a single cat qubit")
    _add_common(p3)

    p4 = sub.add_parser("fig4", help="entanglement transition of two coupled cat qubits")
    _add_common(p4)

    ps = sub.add_parser("sweep", help="custom one-parameter sweep")
    _add_common(ps)

    pv = sub.add_parser("validate", help="run the invariant/validation suites")
    _add_common(pv)
    return parser


def _parse_overrides(pairs: list[str]) -> dict:
    out = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"--set expects KEY=VALUE, got {pair!r}")
        key, _, raw = pair.partition("=")
        out[key.strip()] = yaml.safe_load(raw)
    return out


def _resolve(args) -> tuple:
    overrides = {}
    if args.config:
        overrides.update(load_config_file(args.config))
    overrides.update(_parse_overrides(args.overrides))
    if args.dim is not None:
        overrides["dim"] = args.dim
    if args.tol is not None:
        overrides["tolerance"] = args.tol
    if getattr(args, "skip_map", False):
        overrides["include_map"] = False
    config = resolve_config(args.command, overrides)
    out_dir = args.out or os.environ.get("CATNH_OUT") or "catnh_out"
    return config, out_dir


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config, out_dir = _resolve(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        if args.command == "fig2":
            results = run_fig2(config, out_dir, jobs=args.jobs)
            for res in results:
                print(f"wrote {res.experiment}: {res.n_rows} rows -> {out_dir}")
                if "max_discrepancy" in res.provenance:
                    print(f"  max |p+ full - p+ eff| = "
                          f"{res.provenance['max_discrepancy']:.3e}")
                if "per_alpha_max_discrepancy" in res.provenance:
                    for alpha, dmax in res.provenance["per_alpha_max_discrepancy"]:
                        print(f"  alpha={alpha:.3f}: max discrepancy {dmax:.3e}")
        elif args.command == "fig3":
            res = run_fig3(config, out_dir)
            print(f"wrote {res.experiment}: {res.n_rows} rows -> {out_dir}")
            print(f"  exceptional point at alpha = {res.provenance['ep_alpha']}")
        elif args.command == "fig4":
            res = run_fig4(config, out_dir)
            print(f"wrote {res.experiment}: {res.n_rows} rows -> {out_dir}")
            print(f"  sector EPs: beta_f = {res.provenance['ep_beta_f']}, "
                  f"beta_s = {res.provenance['ep_beta_s']}")
        elif args.command == "sweep":
            res = run_sweep(config, out_dir)
            print(f"wrote {res.experiment}: {res.n_rows} rows -> {out_dir}")
        elif args.command == "validate":
            report, all_passed = run_validate(config, out_dir)
            n_req = sum(1 for c in report["checks"] if c["required"])
            n_ok = sum(1 for c in report["checks"] if c["required"] and c["passed"])
            print(f"validation: {n_ok}/{n_req} required checks passed "
                  f"-> {out_dir}/validate_report.txt")
            for c in report["checks"]:
                if not c["passed"]:
                    kind = "FAIL" if c["required"] else "below threshold (informational)"
                    print(f"  {kind}: {c['name']} measured {c['measured']:.3e}")
            if not all_passed:
                return EXIT_VALIDATION
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CatnhError as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        if args.command == "validate":
            return EXIT_VALIDATION
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
