"""Parameter sweeps, figure-reproduction presets, the orthogonal baseline,
and CSV/JSON emission.

The orthogonal baseline is a plain TDMA reference for the four-message
exchange without any relay-side combining: every message occupies its own
uplink phase and its own downlink phase (eight phases per round), each hop
transmits at full power with no inter-group interference, and decode-and-
forward succeeds only if both hops do. No such scheme is pinned down by the
system under study itself; this definition is a build choice, documented in
the README.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, replace

import numpy as np

from . import analysis
from .errors import ConfigError, NumericError
from .model import GROUP_ONE, GROUP_TWO, PairRoles, SystemConfig
from .montecarlo import DEFAULT_TRIALS, mc_outage_xl, mc_outage_xt
from .oracle import QuadSpec, quad_outage_xl, quad_outage_xt

OMA_PHASES = 8

METHODS = ("closed", "asymptotic", "mc", "quad", "oma")
SIGNALS = ("x1", "x2", "x3", "x4")
SIC_MODES = ("ipSIC", "pSIC")

# signal -> (role view, whether it is the pair's stronger-decoded or weaker signal)
SIGNAL_ROLES: dict[str, tuple[PairRoles, str]] = {
    "x1": (GROUP_ONE, "l"),
    "x2": (GROUP_ONE, "t"),
    "x3": (GROUP_TWO, "l"),
    "x4": (GROUP_TWO, "t"),
}

CURVE_FIELDS = ("rho_db", "signal", "sic_mode", "method", "value", "ci_low", "ci_high", "trials", "seed")


@dataclass(frozen=True)
class CurveRow:
    """One evaluated point of a sweep; CI and trial fields apply to MC rows only."""

    rho_db: float
    signal: str
    sic_mode: str
    method: str
    value: float
    ci_low: float | None = None
    ci_high: float | None = None
    trials: int | None = None
    seed: int | None = None


@dataclass(frozen=True)
class SweepSpec:
    """Grid and method selection for one sweep over transmit SNR."""

    config: SystemConfig
    rho_min_db: float
    rho_max_db: float
    rho_step_db: float
    methods: tuple[str, ...] = ("closed",)
    signals: tuple[str, ...] = ("x1", "x2")
    sic_modes: tuple[str, ...] = SIC_MODES
    trials: int = DEFAULT_TRIALS
    seed: int = 1

    def __post_init__(self) -> None:
        if self.rho_step_db <= 0.0:
            raise ConfigError("rho_step_db must be positive")
        if self.rho_max_db < self.rho_min_db:
            raise ConfigError("empty SNR grid: rho_max_db < rho_min_db")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(f"unknown method {m!r}; expected one of {METHODS}")
        for s in self.signals:
            if s not in SIGNALS:
                raise ConfigError(f"unknown signal {s!r}; expected one of {SIGNALS}")
        for mode in self.sic_modes:
            if mode not in SIC_MODES:
                raise ConfigError(f"unknown SIC mode {mode!r}")
        if not self.methods or not self.signals or not self.sic_modes:
            raise ConfigError("methods, signals and sic_modes must be non-empty")

    def rho_grid_db(self) -> list[float]:
        count = int(math.floor((self.rho_max_db - self.rho_min_db) / self.rho_step_db + 1e-9)) + 1
        return [self.rho_min_db + i * self.rho_step_db for i in range(count)]


def oma_outage(config: SystemConfig, roles: PairRoles, signal: str) -> float:
    """Outage of one signal under the eight-phase TDMA relaying reference.

    The per-hop SINR target compresses the message rate into its single
    phase of the eight-phase round; source and destination hops use the
    full transmit power and fail independently.
    """
    view, kind = SIGNAL_ROLES[signal]
    if view != roles:
        raise ConfigError(f"signal {signal!r} does not belong to roles {roles!r}")
    if kind == "l":
        src, dst = view.l, view.k
        rate = config.rates[view.l - 1]
    else:
        src, dst = view.t, view.r
        rate = config.rates[view.t - 1]
    gamma = 2.0 ** (OMA_PHASES * rate) - 1.0
    rho = config.rho
    hop_src = math.exp(-gamma / (rho * config.omega[src - 1]))
    hop_dst = math.exp(-gamma / (rho * config.omega[dst - 1]))
    return 1.0 - hop_src * hop_dst


def _outage_point(
    config: SystemConfig, signal: str, method: str, trials: int, seed: int
) -> CurveRow:
    roles, kind = SIGNAL_ROLES[signal]
    if method == "closed":
        fn = analysis.outage_xl if kind == "l" else analysis.outage_xt
        value = fn(config, roles).probability
    elif method == "asymptotic":
        fn = analysis.outage_xl_asymptotic if kind == "l" else analysis.outage_xt_asymptotic
        value = fn(config, roles).probability
    elif method == "quad":
        qfn = quad_outage_xl if kind == "l" else quad_outage_xt
        value = qfn(config, roles)
    elif method == "oma":
        value = oma_outage(config, roles, signal)
    elif method == "mc":
        mfn = mc_outage_xl if kind == "l" else mc_outage_xt
        est = mfn(config, roles, trials=trials, seed=seed)
        return CurveRow(config.rho_db, signal, config.sic_mode, method, est.p_hat,
                        est.ci_low, est.ci_high, est.trials, est.seed)
    else:  # pragma: no cover - guarded by SweepSpec validation
        raise ConfigError(f"unknown method {method!r}")
    return CurveRow(config.rho_db, signal, config.sic_mode, method, value)


def run_sweep(spec: SweepSpec) -> list[CurveRow]:
    """Evaluate the grid; one row per (SNR point, signal, mode, method).

    Rows are produced in deterministic grid order, and every outage value is
    range-checked before emission.
    """
    rows: list[CurveRow] = []
    for rho_db in spec.rho_grid_db():
        for signal in spec.signals:
            for mode in spec.sic_modes:
                config = replace(spec.config, rho_db=rho_db, sic_mode=mode)
                for method in spec.methods:
                    row = _outage_point(config, signal, method, spec.trials, spec.seed)
                    if not (0.0 <= row.value <= 1.0) or not math.isfinite(row.value):
                        raise NumericError(
                            f"outage row out of range: {row.signal} {row.method} at {rho_db} dB -> {row.value!r}"
                        )
                    rows.append(row)
    return rows


def all_signal_outages(config: SystemConfig, method: str = "closed") -> tuple[float, float, float, float]:
    """Outage of x1..x4 at the config's operating point, by the given method."""
    values = []
    for signal in SIGNALS:
        row = _outage_point(config, signal, method, DEFAULT_TRIALS, 1)
        values.append(row.value)
    return tuple(values)


def throughput_rows(
    spec: SweepSpec, methods: tuple[str, ...] = ("closed",)
) -> list[CurveRow]:
    """Delay-limited throughput over the grid, composed from the four outage curves.

    Rows carry signal tag ``"sum"``; MC rows reuse the spec's trial count and
    seed for each of the four per-signal estimates.
    """
    rows: list[CurveRow] = []
    for rho_db in spec.rho_grid_db():
        for mode in spec.sic_modes:
            config = replace(spec.config, rho_db=rho_db, sic_mode=mode)
            for method in methods:
                if method not in ("closed", "mc", "oma"):
                    raise ConfigError(f"throughput supports closed, mc or oma, not {method!r}")
                outages = [
                    _outage_point(config, signal, method, spec.trials, spec.seed).value
                    for signal in SIGNALS
                ]
                value = analysis.throughput_delay_limited(config, outages)
                rows.append(CurveRow(rho_db, "sum", mode, method, value,
                                     trials=spec.trials if method == "mc" else None,
                                     seed=spec.seed if method == "mc" else None))
    return rows


def crossover_snr_db(
    config: SystemConfig,
    signal: str = "x1",
    rho_min_db: float = 0.0,
    rho_max_db: float = 45.0,
    scan_step_db: float = 0.25,
    tol_db: float = 1e-6,
) -> float | None:
    """SNR (dB) where the closed-form outage curve crosses the TDMA baseline.

    Scans for the first sign change of (superposed - orthogonal) from below
    and refines it by bisection; returns ``None`` when the curves do not
    cross on the window. Deterministic: no randomness is involved.
    """
    roles, kind = SIGNAL_ROLES[signal]
    closed = analysis.outage_xl if kind == "l" else analysis.outage_xt

    def diff(rho_db: float) -> float:
        at = replace(config, rho_db=rho_db)
        return closed(at, roles).probability - oma_outage(at, roles, signal)

    steps = int(math.floor((rho_max_db - rho_min_db) / scan_step_db)) + 1
    grid = [rho_min_db + i * scan_step_db for i in range(steps)]
    if grid[-1] < rho_max_db:
        grid.append(rho_max_db)
    previous = diff(grid[0])
    if previous > 0.0:
        return None  # already above the baseline at the low end
    for x in grid[1:]:
        current = diff(x)
        if previous <= 0.0 < current:
            lo, hi = x - scan_step_db, x
            while hi - lo > tol_db:
                mid = 0.5 * (lo + hi)
                if diff(mid) > 0.0:
                    hi = mid
                else:
                    lo = mid
            return 0.5 * (lo + hi)
        previous = current
    return None


def figure_preset(
    fig_id: int,
    trials: int = DEFAULT_TRIALS,
    seed: int = 1,
    methods: tuple[str, ...] | None = None,
) -> dict[str, list[CurveRow]]:
    """Reference-scenario sweeps behind the four numerical-result figures.

    Returns a mapping from variant label (one per parameter level, empty for
    single-variant figures) to its row table. Presets 1-3 emit outage curves,
    preset 4 delay-limited throughput.
    """
    base = SystemConfig(rho_db=0.0)
    if fig_id == 1:
        spec = SweepSpec(
            config=base, rho_min_db=0.0, rho_max_db=45.0, rho_step_db=2.5,
            methods=methods or ("closed", "asymptotic", "mc", "oma"),
            signals=("x1", "x2"), trials=trials, seed=seed,
        )
        return {"": run_sweep(spec)}
    if fig_id == 2:
        out = {}
        for level in (0.0, 0.01, 0.1):
            cfg = replace(base, varpi1=level, varpi2=level)
            spec = SweepSpec(
                config=cfg, rho_min_db=0.0, rho_max_db=45.0, rho_step_db=2.5,
                methods=methods or ("closed", "mc"),
                signals=("x1", "x2"), trials=trials, seed=seed,
            )
            out[f"varpi_{level:g}"] = run_sweep(spec)
        return out
    if fig_id == 3:
        out = {}
        for omega_i_db in (-20.0, -10.0, 0.0):
            cfg = replace(base, varpi1=0.0, varpi2=0.0, omega_i_db=omega_i_db)
            spec = SweepSpec(
                config=cfg, rho_min_db=0.0, rho_max_db=45.0, rho_step_db=2.5,
                methods=methods or ("closed", "mc"),
                signals=("x1", "x2"), trials=trials, seed=seed,
            )
            out[f"omega_i_{omega_i_db:g}dB"] = run_sweep(spec)
        return out
    if fig_id == 4:
        out = {}
        for omega_i_db in (-20.0, -10.0):
            cfg = replace(base, omega_i_db=omega_i_db)
            spec = SweepSpec(
                config=cfg, rho_min_db=0.0, rho_max_db=45.0, rho_step_db=2.5,
                trials=trials, seed=seed,
            )
            out[f"omega_i_{omega_i_db:g}dB"] = throughput_rows(spec, methods or ("closed", "oma"))
        return out
    raise ConfigError(f"unknown figure id {fig_id}; expected 1-4")


def rows_to_csv(rows: list[CurveRow]) -> str:
    """Fixed-schema CSV: header row, '.' decimals, LF line endings."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CURVE_FIELDS)
    for row in rows:
        writer.writerow([
            repr(float(row.rho_db)),
            row.signal,
            row.sic_mode,
            row.method,
            repr(float(row.value)),
            "" if row.ci_low is None else repr(float(row.ci_low)),
            "" if row.ci_high is None else repr(float(row.ci_high)),
            "" if row.trials is None else row.trials,
            "" if row.seed is None else row.seed,
        ])
    return buffer.getvalue()


def rows_to_json(rows: list[CurveRow]) -> str:
    payload = [
        {
            "rho_db": row.rho_db,
            "signal": row.signal,
            "sic_mode": row.sic_mode,
            "method": row.method,
            "value": row.value,
            "ci_low": row.ci_low,
            "ci_high": row.ci_high,
            "trials": row.trials,
            "seed": row.seed,
        }
        for row in rows
    ]
    return json.dumps(payload, indent=2) + "\n"


def write_rows(rows: list[CurveRow], path: str, fmt: str = "csv") -> None:
    text = rows_to_csv(rows) if fmt == "csv" else rows_to_json(rows)
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write output file {path!r}: {exc}") from exc


def random_valid_config(rng: np.random.Generator, force_degenerate: bool = False) -> SystemConfig:
    """Draw a random scenario satisfying every configuration invariant.

    Ranges keep both feasibility conditions satisfied and outage floors well
    above quadrature precision so that relative comparisons stay meaningful.
    With ``force_degenerate`` the cross-pair leakage level is tuned so two
    relay-side interference rates nearly coincide.
    """
    a1 = float(rng.uniform(0.55, 0.9))
    a3 = float(rng.uniform(0.55, 0.9))
    b1 = float(rng.uniform(0.1, 0.45))
    b3 = float(rng.uniform(0.1, 0.45))
    omega = (
        float(10.0 ** rng.uniform(-1.3, 0.0)),
        float(10.0 ** rng.uniform(-2.7, -1.3)),
        float(10.0 ** rng.uniform(-1.3, 0.0)),
        float(10.0 ** rng.uniform(-2.7, -1.3)),
    )
    varpi1 = float(10.0 ** rng.uniform(-2.3, -0.5))
    if force_degenerate:
        # align the in-pair rate with the first cross-pair rate: a_t*om_t ~ varpi1*a_k*om_k
        varpi1 = (1.0 - a1) * omega[1] / (a3 * omega[2]) * (1.0 + float(rng.uniform(-1e-7, 1e-7)))
    mode = "ipSIC" if rng.uniform() < 0.5 else "pSIC"
    return SystemConfig(
        rho_db=float(rng.uniform(0.0, 60.0)),
        a=(a1, 1.0 - a1, a3, 1.0 - a3),
        b=(b1, 1.0 - b1, b3, 1.0 - b3),
        omega=omega,
        omega_i_db=float(rng.uniform(-25.0, -5.0)),
        varpi1=varpi1,
        varpi2=float(10.0 ** rng.uniform(-2.3, -0.5)),
        rates=(
            float(rng.uniform(0.05, 0.2)),
            float(rng.uniform(0.01, 0.1)),
            float(rng.uniform(0.05, 0.2)),
            float(rng.uniform(0.01, 0.1)),
        ),
        sic_mode=mode,
    )


@dataclass(frozen=True)
class AgreementReport:
    """Worst-case closed-form vs quadrature deviations over random scenarios."""

    checked: int
    max_rel_err_distinct: float
    max_rel_err_degenerate: float


def oracle_agreement(
    n_configs: int = 200,
    seed: int = 20240,
    spec: QuadSpec = QuadSpec(abs_tol=1e-13, rel_tol=1e-11),
    degenerate_fraction: float = 0.2,
) -> AgreementReport:
    """Compare closed forms against the quadrature oracle on random scenarios.

    Every config is evaluated for both signals and both cancellation modes.
    Scenarios whose active interference rates nearly coincide are tracked
    separately (the partial-fraction route would be ill-conditioned there).
    """
    rng = np.random.default_rng(seed)
    worst_distinct = 0.0
    worst_degenerate = 0.0
    for i in range(n_configs):
        degenerate = i < int(n_configs * degenerate_fraction)
        config = random_valid_config(rng, force_degenerate=degenerate)
        for mode in SIC_MODES:
            cfg = replace(config, sic_mode=mode)
            for kind in ("l", "t"):
                if kind == "l":
                    closed = analysis.outage_xl(cfg, GROUP_ONE).probability
                    quad = quad_outage_xl(cfg, GROUP_ONE, spec)
                else:
                    closed = analysis.outage_xt(cfg, GROUP_ONE).probability
                    quad = quad_outage_xt(cfg, GROUP_ONE, spec)
                rel = abs(closed - quad) / max(quad, 1e-300)
                if degenerate:
                    worst_degenerate = max(worst_degenerate, rel)
                else:
                    worst_distinct = max(worst_distinct, rel)
    return AgreementReport(n_configs, worst_distinct, worst_degenerate)
