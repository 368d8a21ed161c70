"""Scenario configuration, user-pair roles, derived constants, and channel sampling.

All dB-valued inputs (transmit SNR, residual-interference variance) are converted
to linear units in exactly one place (:func:`db_to_linear`, via the ``SystemConfig``
properties); everything downstream works in linear units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np

from .errors import ConfigError

# Two active rates closer than this (relative) are treated as coincident when
# deciding whether the partial-fraction coefficients are well defined.
DEGENERATE_RTOL = 1e-9

_B_SUM_TOL = 1e-9


def db_to_linear(value_db: float) -> float:
    """Single conversion point for dB-valued inputs."""
    return 10.0 ** (value_db / 10.0)


@dataclass(frozen=True)
class PairRoles:
    """Index map selecting which user plays which role.

    ``l``/``t`` are the pair whose uplink the relay decodes (strong first, then
    weak); ``k``/``r`` are the opposite pair that receives the relayed signals
    (``k`` runs interference cancellation, ``r`` only decodes the stronger
    signal). Only ``(1, 2, 3, 4)`` and ``(3, 4, 1, 2)`` are valid assignments.
    """

    l: int
    t: int
    k: int
    r: int

    def __post_init__(self) -> None:
        if (self.l, self.t, self.k, self.r) not in ((1, 2, 3, 4), (3, 4, 1, 2)):
            raise ConfigError(
                f"invalid role tuple (l={self.l}, t={self.t}, k={self.k}, r={self.r}); "
                "expected (1, 2, 3, 4) or (3, 4, 1, 2)"
            )


GROUP_ONE = PairRoles(1, 2, 3, 4)
GROUP_TWO = PairRoles(3, 4, 1, 2)


def omega_from_distances(d1: float, d2: float, alpha: float) -> tuple[float, float, float, float]:
    """Channel variances from relay distances: near users (1, 3) at ``d1``, far (2, 4) at ``d2``."""
    if d1 <= 0 or d2 <= 0:
        raise ConfigError("distances must be positive")
    near = d1 ** (-alpha)
    far = d2 ** (-alpha)
    return (near, far, near, far)


@dataclass(frozen=True)
class SystemConfig:
    """Full scenario parameterization.

    Defaults reproduce the reference operating point used throughout the test
    presets: symmetric pairs at distances 2 m / 10 m with path-loss exponent 2,
    uplink splits 0.8/0.2, downlink splits 0.2/0.8, target rates 0.1/0.01 BPCU.

    ``rho_db`` is the transmit SNR (one value serves both hops) and
    ``omega_i_db`` the residual-cancellation variance; both are stored in dB
    and exposed in linear units through :attr:`rho` and :attr:`omega_i`.
    """

    rho_db: float = 30.0
    a: tuple[float, float, float, float] = (0.8, 0.2, 0.8, 0.2)
    b: tuple[float, float, float, float] = (0.2, 0.8, 0.2, 0.8)
    omega: tuple[float, float, float, float] = (0.25, 0.01, 0.25, 0.01)
    omega_i_db: float = -20.0
    varpi1: float = 0.01
    varpi2: float = 0.01
    rates: tuple[float, float, float, float] = (0.1, 0.01, 0.1, 0.01)
    sic_mode: str = "ipSIC"

    def __post_init__(self) -> None:
        for name, values in (("a", self.a), ("b", self.b), ("omega", self.omega), ("rates", self.rates)):
            if len(values) != 4:
                raise ConfigError(f"{name} must have exactly 4 entries, got {len(values)}")
            if not all(math.isfinite(v) for v in values):
                raise ConfigError(f"{name} entries must be finite")
        if not all(0.0 < v < 1.0 for v in self.a):
            raise ConfigError("uplink power coefficients a must lie in (0, 1)")
        if not all(0.0 < v < 1.0 for v in self.b):
            raise ConfigError("downlink power coefficients b must lie in (0, 1)")
        if abs(self.b[0] + self.b[1] - 1.0) > _B_SUM_TOL or abs(self.b[2] + self.b[3] - 1.0) > _B_SUM_TOL:
            raise ConfigError("downlink splits must satisfy b1+b2 = 1 and b3+b4 = 1")
        if not (self.b[1] > self.b[0] and self.b[3] > self.b[2]):
            raise ConfigError("far users must get the larger downlink share (b2 > b1, b4 > b3)")
        if not all(v > 0.0 for v in self.omega):
            raise ConfigError("channel variances must be positive")
        if not (0.0 <= self.varpi1 <= 1.0 and 0.0 <= self.varpi2 <= 1.0):
            raise ConfigError("interference impact levels varpi1, varpi2 must lie in [0, 1]")
        if not all(v >= 0.0 for v in self.rates):
            raise ConfigError("target rates must be non-negative")
        if self.sic_mode not in ("ipSIC", "pSIC"):
            raise ConfigError(f"sic_mode must be 'ipSIC' or 'pSIC', got {self.sic_mode!r}")
        if not (math.isfinite(self.rho_db) and math.isfinite(self.omega_i_db)):
            raise ConfigError("rho_db and omega_i_db must be finite")

    @property
    def rho(self) -> float:
        """Transmit SNR in linear units."""
        return db_to_linear(self.rho_db)

    @property
    def omega_i(self) -> float:
        """Residual-cancellation variance in linear units."""
        return db_to_linear(self.omega_i_db)

    @property
    def epsilon(self) -> float:
        """Residual-interference switch: 1 under ipSIC, 0 under pSIC."""
        return 1.0 if self.sic_mode == "ipSIC" else 0.0


Gain = Union[float, np.ndarray]


@dataclass(frozen=True)
class ChannelSample:
    """One fading realization: four channel power gains plus the residual gain.

    Fields may hold scalars or equally shaped arrays (one entry per draw);
    ``gI`` is identically zero under perfect cancellation.
    """

    g1: Gain
    g2: Gain
    g3: Gain
    g4: Gain
    gI: Gain

    def gain(self, user: int) -> Gain:
        return (self.g1, self.g2, self.g3, self.g4)[user - 1]


@dataclass(frozen=True)
class DerivedConstants:
    """Scalar constants feeding the outage evaluators, with feasibility flags.

    ``lam`` holds the exponential rates of the active relay-side interference
    terms (the in-pair term always, the two cross-pair terms only when
    ``varpi1 > 0``); ``lam_p`` the rates of the cross-pair-only sum. ``phi``
    carries the partial-fraction coefficients of the three-term case and is
    ``None`` whenever fewer than three terms are active or two rates coincide
    within ``DEGENERATE_RTOL`` (the expansion divides by rate differences).

    When a power split cannot support its target rate the corresponding
    feasibility flag is ``False`` and the dependent thresholds (``tau_l``,
    ``xi_t``, ``theta_l``) are ``None`` instead of negative numbers.
    """

    gamma_th: tuple[float, float, float, float]
    lam: tuple[float, ...]
    lam_p: tuple[float, ...]
    phi: tuple[float, float, float] | None
    beta_l: float
    beta_t: float
    tau_l: float | None
    xi_t: float | None
    theta_l: float | None
    varphi_t: float
    feasible_l: bool
    feasible_t: bool


def sinr_threshold(rate: float) -> float:
    """Target SINR for a rate delivered over the two-slot exchange."""
    return 2.0 ** (2.0 * rate) - 1.0


def _pairwise_distinct(rates: tuple[float, ...]) -> bool:
    for i in range(len(rates)):
        for j in range(i + 1, len(rates)):
            if abs(rates[i] - rates[j]) <= DEGENERATE_RTOL * max(rates[i], rates[j]):
                return False
    return True


def build_derived_constants(config: SystemConfig, roles: PairRoles) -> DerivedConstants:
    """Assemble every outage-evaluator constant in linear units."""
    rho = config.rho
    a_l, a_t = config.a[roles.l - 1], config.a[roles.t - 1]
    a_k, a_r = config.a[roles.k - 1], config.a[roles.r - 1]
    b_l, b_t = config.b[roles.l - 1], config.b[roles.t - 1]
    om_t, om_k, om_r = config.omega[roles.t - 1], config.omega[roles.k - 1], config.omega[roles.r - 1]
    om_l = config.omega[roles.l - 1]

    gamma_th = tuple(sinr_threshold(r) for r in config.rates)
    g_l, g_t = gamma_th[roles.l - 1], gamma_th[roles.t - 1]

    lam: tuple[float, ...] = (1.0 / (rho * a_t * om_t),)
    lam_p: tuple[float, ...] = ()
    if config.varpi1 > 0.0:
        cross = (1.0 / (rho * config.varpi1 * a_k * om_k), 1.0 / (rho * config.varpi1 * a_r * om_r))
        lam = lam + cross
        lam_p = cross

    phi = None
    if len(lam) == 3 and _pairwise_distinct(lam):
        l1, l2, l3 = lam
        phi = (
            1.0 / ((l2 - l1) * (l3 - l1)),
            1.0 / ((l3 - l2) * (l2 - l1)),
            1.0 / ((l3 - l1) * (l3 - l2)),
        )

    beta_l = g_l / (rho * a_l)
    beta_t = g_t / (rho * a_t)

    feasible_l = b_l > config.varpi2 * g_l
    feasible_t = b_t > (b_l + config.varpi2) * g_t
    tau_l = g_l / (rho * (b_l - config.varpi2 * g_l)) if feasible_l else None
    xi_t = g_t / (rho * (b_t - (b_l + config.varpi2) * g_t)) if feasible_t else None
    theta_l = max(tau_l, xi_t) if (feasible_l and feasible_t) else None

    varphi_t = (om_l + rho * beta_l * a_t * om_t) / (om_l * om_t)

    return DerivedConstants(
        gamma_th=gamma_th,
        lam=lam,
        lam_p=lam_p,
        phi=phi,
        beta_l=beta_l,
        beta_t=beta_t,
        tau_l=tau_l,
        xi_t=xi_t,
        theta_l=theta_l,
        varphi_t=varphi_t,
        feasible_l=feasible_l,
        feasible_t=feasible_t,
    )


class RandomStream:
    """Counter-based random stream that splits into independent substreams.

    A stream is fully determined by ``(seed, spawn path)``, so any substream
    can be reconstructed without drawing from its parent; Monte Carlo chunks
    built on disjoint substreams give results independent of worker count.
    Instances are single-owner: share substreams, not the stream itself.
    """

    def __init__(self, seed: int, _spawn_key: tuple[int, ...] = ()):
        self.seed = int(seed)
        self._spawn_key = _spawn_key
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=_spawn_key)
        self.generator = np.random.Generator(np.random.Philox(seq))

    def substream(self, index: int) -> "RandomStream":
        return RandomStream(self.seed, self._spawn_key + (int(index),))

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"RandomStream(seed={self.seed}, path={self._spawn_key})"


def sample_channels(stream: RandomStream, config: SystemConfig) -> ChannelSample:
    """Draw one fading realization: four exponential power gains plus the residual gain.

    Draw order is fixed (g1..g4, then gI), so identical seed and stream
    position reproduce identical samples. Under pSIC the residual gain is not
    drawn and is fixed at zero.
    """
    rng = stream.generator
    g = [rng.exponential(om) for om in config.omega]
    gi = rng.exponential(config.omega_i) if config.sic_mode == "ipSIC" else 0.0
    return ChannelSample(g[0], g[1], g[2], g[3], gi)


def sample_channel_block(stream: RandomStream, config: SystemConfig, count: int) -> ChannelSample:
    """Vectorized variant of :func:`sample_channels`: each field is a ``count``-long array."""
    rng = stream.generator
    g = [rng.exponential(om, size=count) for om in config.omega]
    if config.sic_mode == "ipSIC":
        gi = rng.exponential(config.omega_i, size=count)
    else:
        gi = np.zeros(count)
    return ChannelSample(g[0], g[1], g[2], g[3], gi)


@dataclass(frozen=True)
class RunSettings:
    """Simulation controls carried by config files next to the physics."""

    trials: int = 10**6
    seed: int = 1


_SCALAR_KEYS = {
    "rho_db", "omega_i_db", "varpi1", "varpi2",
    "a1", "a2", "a3", "a4", "b1", "b2", "b3", "b4",
    "omega1", "omega2", "omega3", "omega4",
    "d1", "d2", "alpha", "r1", "r2", "r3", "r4",
}
_KNOWN_KEYS = _SCALAR_KEYS | {"sic_mode", "trials", "seed"}

_SIC_ALIASES = {"ipsic": "ipSIC", "ip": "ipSIC", "psic": "pSIC", "p": "pSIC"}


def load_config_file(path: str | Path) -> tuple[SystemConfig, RunSettings]:
    """Parse a flat ``key=value`` config file (UTF-8, ``#`` comments allowed).

    Channel variances come either from ``omega1..omega4`` or from distances
    ``d1, d2`` with path-loss exponent ``alpha`` (never both). Unknown keys
    are an error; missing keys fall back to the defaults of
    :class:`SystemConfig` / :class:`RunSettings`.
    """
    raw: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line.strip()!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        raw[key] = value

    def number(key: str) -> float:
        try:
            return float(raw[key])
        except ValueError as exc:
            raise ConfigError(f"{path}: key {key!r} is not a number: {raw[key]!r}") from exc

    values: dict[str, object] = {}
    omega_keys = [k for k in ("omega1", "omega2", "omega3", "omega4") if k in raw]
    distance_keys = [k for k in ("d1", "d2", "alpha") if k in raw]
    if omega_keys and distance_keys:
        raise ConfigError(f"{path}: give either omega1..omega4 or d1,d2,alpha, not both")
    if omega_keys:
        if len(omega_keys) != 4:
            raise ConfigError(f"{path}: all four of omega1..omega4 are required")
        values["omega"] = tuple(number(f"omega{i}") for i in range(1, 5))
    elif distance_keys:
        if len(distance_keys) != 3:
            raise ConfigError(f"{path}: d1, d2 and alpha must be given together")
        values["omega"] = omega_from_distances(number("d1"), number("d2"), number("alpha"))

    for group, keys in (("a", ("a1", "a2", "a3", "a4")),
                        ("b", ("b1", "b2", "b3", "b4")),
                        ("rates", ("r1", "r2", "r3", "r4"))):
        present = [k for k in keys if k in raw]
        if present and len(present) != 4:
            raise ConfigError(f"{path}: all four of {', '.join(keys)} are required")
        if present:
            values[group] = tuple(number(k) for k in keys)

    for key in ("rho_db", "omega_i_db", "varpi1", "varpi2"):
        if key in raw:
            values[key] = number(key)
    if "sic_mode" in raw:
        mode = _SIC_ALIASES.get(raw["sic_mode"].lower())
        if mode is None:
            raise ConfigError(f"{path}: sic_mode must be ipSIC or pSIC, got {raw['sic_mode']!r}")
        values["sic_mode"] = mode

    settings_kwargs = {}
    for key in ("trials", "seed"):
        if key in raw:
            try:
                settings_kwargs[key] = int(raw[key])
            except ValueError as exc:
                raise ConfigError(f"{path}: key {key!r} is not an integer: {raw[key]!r}") from exc

    return SystemConfig(**values), RunSettings(**settings_kwargs)
