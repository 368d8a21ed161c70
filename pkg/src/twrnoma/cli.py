"""Command-line interface.

Subcommands: ``outage`` (single operating point), ``sweep`` (SNR grid),
``throughput`` (delay-limited, composed from the four outage curves),
``diversity`` (high-SNR slope), ``validate`` (closed-form vs quadrature
agreement suite), ``figure`` (reference-scenario presets). Exit codes:
0 success, 1 configuration error, 2 numeric/oracle failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import analysis, experiments
from .errors import ConfigError, NumericError
from .model import RunSettings, SystemConfig, load_config_file

_SIC_CHOICES = {"ip": ("ipSIC",), "p": ("pSIC",), "both": ("ipSIC", "pSIC")}


class _Parser(argparse.ArgumentParser):
    # usage errors must exit with the config-error code, not argparse's default
    def error(self, message):
        raise ConfigError(message)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="key=value scenario file")
    parser.add_argument("--varpi1", type=float, help="relay-side interference level override")
    parser.add_argument("--varpi2", type=float, help="user-side interference level override")
    parser.add_argument("--omega-i-db", type=float, help="residual-interference variance override (dB)")
    parser.add_argument("--trials", type=int, help="Monte Carlo trials")
    parser.add_argument("--seed", type=int, help="Monte Carlo seed")
    parser.add_argument("--out", help="output file path")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_grid(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--rho-min-db", type=float, default=0.0)
    parser.add_argument("--rho-max-db", type=float, default=45.0)
    parser.add_argument("--rho-step-db", type=float, default=2.5)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="twrnoma", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_outage = sub.add_parser("outage", parents=[], help="outage at one operating point")
    p_outage.add_argument("--rho-db", type=float, help="transmit SNR in dB (default: config value)")
    p_outage.add_argument("--sic", choices=sorted(_SIC_CHOICES), default="both")
    p_outage.add_argument("--signals", default="x1,x2,x3,x4")
    p_outage.add_argument("--methods", default="closed")
    _add_common(p_outage)

    p_sweep = sub.add_parser("sweep", help="outage curves over an SNR grid")
    _add_grid(p_sweep)
    p_sweep.add_argument("--sic", choices=sorted(_SIC_CHOICES), default="both")
    p_sweep.add_argument("--signals", default="x1,x2")
    p_sweep.add_argument("--methods", default="closed")
    _add_common(p_sweep)

    p_tp = sub.add_parser("throughput", help="delay-limited throughput over an SNR grid")
    _add_grid(p_tp)
    p_tp.add_argument("--sic", choices=sorted(_SIC_CHOICES), default="both")
    p_tp.add_argument("--methods", default="closed")
    _add_common(p_tp)

    p_div = sub.add_parser("diversity", help="high-SNR outage slope")
    p_div.add_argument("--signal", choices=experiments.SIGNALS, default="x1")
    p_div.add_argument("--sic", choices=("ip", "p"), default="ip")
    p_div.add_argument("--rho-lo-db", type=float, default=50.0)
    p_div.add_argument("--rho-hi-db", type=float, default=60.0)
    _add_common(p_div)

    p_val = sub.add_parser("validate", help="closed-form vs quadrature agreement suite")
    p_val.add_argument("--configs", type=int, default=200)
    p_val.add_argument("--rel-tol", type=float, default=1e-6)
    p_val.add_argument("--rel-tol-degenerate", type=float, default=1e-5)
    _add_common(p_val)

    p_fig = sub.add_parser("figure", help="reference-scenario presets (ids 1-4)")
    p_fig.add_argument("--id", type=int, required=True, choices=(1, 2, 3, 4))
    _add_common(p_fig)

    return parser


def _load_scenario(args: argparse.Namespace) -> tuple[SystemConfig, RunSettings]:
    if getattr(args, "config", None):
        config, settings = load_config_file(args.config)
    else:
        config, settings = SystemConfig(), RunSettings()
    overrides = {}
    if getattr(args, "varpi1", None) is not None:
        overrides["varpi1"] = args.varpi1
    if getattr(args, "varpi2", None) is not None:
        overrides["varpi2"] = args.varpi2
    if getattr(args, "omega_i_db", None) is not None:
        overrides["omega_i_db"] = args.omega_i_db
    if getattr(args, "rho_db", None) is not None:
        overrides["rho_db"] = args.rho_db
    if overrides:
        config = replace(config, **overrides)
    if getattr(args, "trials", None) is not None:
        settings = replace(settings, trials=args.trials)
    if getattr(args, "seed", None) is not None:
        settings = replace(settings, seed=args.seed)
    return config, settings


def _split(csv_list: str, allowed: tuple[str, ...], what: str) -> tuple[str, ...]:
    items = tuple(item.strip() for item in csv_list.split(",") if item.strip())
    for item in items:
        if item not in allowed:
            raise ConfigError(f"unknown {what} {item!r}; expected one of {allowed}")
    if not items:
        raise ConfigError(f"no {what} selected")
    return items


def _emit(rows, args) -> None:
    if args.out:
        experiments.write_rows(rows, args.out, args.format)
        print(f"wrote {len(rows)} rows to {args.out}")
    else:
        text = experiments.rows_to_csv(rows) if args.format == "csv" else experiments.rows_to_json(rows)
        sys.stdout.write(text)


def _cmd_outage(args) -> int:
    config, settings = _load_scenario(args)
    signals = _split(args.signals, experiments.SIGNALS, "signal")
    methods = _split(args.methods, experiments.METHODS, "method")
    spec = experiments.SweepSpec(
        config=config, rho_min_db=config.rho_db, rho_max_db=config.rho_db, rho_step_db=1.0,
        methods=methods, signals=signals, sic_modes=_SIC_CHOICES[args.sic],
        trials=settings.trials, seed=settings.seed,
    )
    _emit(experiments.run_sweep(spec), args)
    return 0


def _cmd_sweep(args) -> int:
    config, settings = _load_scenario(args)
    spec = experiments.SweepSpec(
        config=config, rho_min_db=args.rho_min_db, rho_max_db=args.rho_max_db,
        rho_step_db=args.rho_step_db,
        methods=_split(args.methods, experiments.METHODS, "method"),
        signals=_split(args.signals, experiments.SIGNALS, "signal"),
        sic_modes=_SIC_CHOICES[args.sic],
        trials=settings.trials, seed=settings.seed,
    )
    _emit(experiments.run_sweep(spec), args)
    return 0


def _cmd_throughput(args) -> int:
    config, settings = _load_scenario(args)
    spec = experiments.SweepSpec(
        config=config, rho_min_db=args.rho_min_db, rho_max_db=args.rho_max_db,
        rho_step_db=args.rho_step_db, sic_modes=_SIC_CHOICES[args.sic],
        trials=settings.trials, seed=settings.seed,
    )
    methods = _split(args.methods, ("closed", "mc", "oma"), "method")
    _emit(experiments.throughput_rows(spec, methods), args)
    return 0


def _cmd_diversity(args) -> int:
    config, _ = _load_scenario(args)
    roles, kind = experiments.SIGNAL_ROLES[args.signal]
    mode = _SIC_CHOICES[args.sic][0]
    fn = analysis.outage_xl if kind == "l" else analysis.outage_xt

    def outage_at(rho_db: float) -> float:
        return fn(replace(config, rho_db=rho_db, sic_mode=mode), roles).probability

    estimate = analysis.diversity_order_estimate(outage_at, args.rho_lo_db, args.rho_hi_db)
    print(f"diversity order of {args.signal} ({mode}) between "
          f"{args.rho_lo_db:g} and {args.rho_hi_db:g} dB: {estimate:.6f}")
    return 0


def _cmd_validate(args) -> int:
    _, settings = _load_scenario(args)
    report = experiments.oracle_agreement(n_configs=args.configs, seed=settings.seed)
    print(f"checked {report.checked} random scenarios (both signals, both SIC modes)")
    print(f"max relative error, distinct rates:        {report.max_rel_err_distinct:.3e} "
          f"(tolerance {args.rel_tol:.1e})")
    print(f"max relative error, near-coincident rates: {report.max_rel_err_degenerate:.3e} "
          f"(tolerance {args.rel_tol_degenerate:.1e})")
    ok = (report.max_rel_err_distinct <= args.rel_tol
          and report.max_rel_err_degenerate <= args.rel_tol_degenerate)
    print("agreement: PASS" if ok else "agreement: FAIL")
    if not ok:
        raise NumericError("closed-form vs quadrature agreement outside tolerance")
    return 0


def _cmd_figure(args) -> int:
    _, settings = _load_scenario(args)
    variants = experiments.figure_preset(args.id, trials=settings.trials, seed=settings.seed)
    for label, rows in variants.items():
        if args.out:
            path = Path(args.out)
            target = path if not label else path.with_name(f"{path.stem}_{label}{path.suffix}")
            experiments.write_rows(rows, str(target), args.format)
            print(f"wrote {len(rows)} rows to {target}")
        else:
            if label:
                print(f"# variant: {label}")
            text = experiments.rows_to_csv(rows) if args.format == "csv" else experiments.rows_to_json(rows)
            sys.stdout.write(text)
    if args.id == 1:
        for signal in ("x1", "x2"):
            for mode in ("ipSIC", "pSIC"):
                cross = experiments.crossover_snr_db(
                    replace(SystemConfig(), sic_mode=mode), signal=signal
                )
                shown = "none on [0, 45] dB" if cross is None else f"{cross:.2f} dB"
                print(f"crossover vs TDMA baseline, {signal} {mode}: {shown}")
    return 0


_COMMANDS = {
    "outage": _cmd_outage,
    "sweep": _cmd_sweep,
    "throughput": _cmd_throughput,
    "diversity": _cmd_diversity,
    "validate": _cmd_validate,
    "figure": _cmd_figure,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
