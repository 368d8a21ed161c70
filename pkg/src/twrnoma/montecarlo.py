"""Seeded Monte Carlo estimation of outage probabilities and ergodic rates.

Estimates are built from the raw decoding events, never from the derived
formulas, so they validate the analysis module independently. Each trial
realizes the two transmission slots as independent fading blocks: the relay
decode events are evaluated on the multiple-access block, the user decode
events on the broadcast block. Trials are partitioned into fixed-size chunks
on disjoint substreams with integer event counts merged at the end, so a
given seed yields identical results for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .model import PairRoles, RandomStream, SystemConfig, build_derived_constants, sample_channel_block
from .sinr import compute_sinrs

CHUNK_SIZE = 1 << 17
DEFAULT_TRIALS = 10**6  # reference iteration count for the numerical presets
_MIN_TRIALS = 1000
_WILSON_Z = 1.959963984540054  # 95% two-sided normal quantile


def wilson_interval(successes: int, trials: int, z: float = _WILSON_Z) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion; valid near 0 and 1."""
    if trials <= 0:
        return (0.0, 1.0)
    p_hat = successes / trials
    denom = 1.0 + z * z / trials
    center = (p_hat + z * z / (2.0 * trials)) / denom
    margin = (z / denom) * math.sqrt(p_hat * (1.0 - p_hat) / trials + z * z / (4.0 * trials * trials))
    # the interval must contain the point estimate despite rounding at 0 and 1
    low = min(max(0.0, center - margin), p_hat)
    high = max(min(1.0, center + margin), p_hat)
    return (low, high)


@dataclass(frozen=True)
class OutageEstimate:
    """A simulated outage probability with its 95% confidence interval."""

    p_hat: float
    trials: int
    ci_low: float
    ci_high: float
    seed: int
    signal: str
    mode: str
    roles: PairRoles


@dataclass(frozen=True)
class ErgodicRateEstimate:
    """Mean end-to-end achievable rates (BPCU) for the pair's two signals."""

    rates: dict[str, float]
    trials: int
    seed: int


def _chunks(trials: int) -> list[tuple[int, int]]:
    bounds = []
    index = 0
    done = 0
    while done < trials:
        size = min(CHUNK_SIZE, trials - done)
        bounds.append((index, size))
        done += size
        index += 1
    return bounds


def _count_chunk(config: SystemConfig, roles: PairRoles, stream: RandomStream, size: int) -> tuple[int, int]:
    """Failure counts for both signals over one chunk of two-slot realizations."""
    dc = build_derived_constants(config, roles)
    g_l = dc.gamma_th[roles.l - 1]
    g_t = dc.gamma_th[roles.t - 1]
    uplink = compute_sinrs(config, roles, sample_channel_block(stream, config, size))
    downlink = compute_sinrs(config, roles, sample_channel_block(stream, config, size))
    ok_l = (uplink.relay_strong > g_l) & (downlink.user_cross > g_t) & (downlink.user_own > g_l)
    ok_t = (
        (uplink.relay_weak > g_t)
        & (uplink.relay_strong > g_l)
        & (downlink.user_cross > g_t)
        & (downlink.far_user > g_t)
    )
    return size - int(ok_l.sum()), size - int(ok_t.sum())


def _count_failures(
    config: SystemConfig, roles: PairRoles, trials: int, seed: int, workers: int
) -> tuple[int, int]:
    if trials < _MIN_TRIALS:
        raise ConfigError(f"at least {_MIN_TRIALS} trials are required, got {trials}")
    root = RandomStream(seed)
    bounds = _chunks(trials)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(
                pool.map(lambda ib: _count_chunk(config, roles, root.substream(ib[0]), ib[1]), bounds)
            )
    else:
        counts = [_count_chunk(config, roles, root.substream(i), n) for i, n in bounds]
    fail_l = sum(c[0] for c in counts)
    fail_t = sum(c[1] for c in counts)
    return fail_l, fail_t


def _estimate(fails: int, trials: int, seed: int, signal: str, config: SystemConfig, roles: PairRoles) -> OutageEstimate:
    lo, hi = wilson_interval(fails, trials)
    return OutageEstimate(fails / trials, trials, lo, hi, seed, signal, config.sic_mode, roles)


def mc_outage_xl(
    config: SystemConfig,
    roles: PairRoles,
    trials: int = DEFAULT_TRIALS,
    seed: int = 1,
    workers: int = 1,
) -> OutageEstimate:
    """Simulated outage of the stronger signal from its complementary decode events."""
    fail_l, _ = _count_failures(config, roles, trials, seed, workers)
    return _estimate(fail_l, trials, seed, f"x{roles.l}", config, roles)


def mc_outage_xt(
    config: SystemConfig,
    roles: PairRoles,
    trials: int = DEFAULT_TRIALS,
    seed: int = 1,
    workers: int = 1,
) -> OutageEstimate:
    """Simulated outage of the weaker signal from its complementary decode events."""
    _, fail_t = _count_failures(config, roles, trials, seed, workers)
    return _estimate(fail_t, trials, seed, f"x{roles.t}", config, roles)


def mc_ergodic_rates(
    config: SystemConfig, roles: PairRoles, trials: int = DEFAULT_TRIALS, seed: int = 1
) -> ErgodicRateEstimate:
    """Mean end-to-end achievable rates of the pair's signals.

    Each signal's rate per draw is 0.5 * log2(1 + min of its two decode
    stages), the relay stage on the multiple-access block and its destination
    stage on the broadcast block; the half accounts for the two-slot
    exchange. The relay-side interference makes these rates saturate at high
    SNR, which is the ceiling the delay-limited throughput runs into.
    """
    if trials < _MIN_TRIALS:
        raise ConfigError(f"at least {_MIN_TRIALS} trials are required, got {trials}")
    root = RandomStream(seed)
    sum_l = []
    sum_t = []
    for index, size in _chunks(trials):
        stream = root.substream(index)
        uplink = compute_sinrs(config, roles, sample_channel_block(stream, config, size))
        downlink = compute_sinrs(config, roles, sample_channel_block(stream, config, size))
        chain_l = np.minimum(uplink.relay_strong, downlink.user_own)
        chain_t = np.minimum(uplink.relay_weak, downlink.far_user)
        sum_l.append(float(np.log2(1.0 + chain_l).sum()))
        sum_t.append(float(np.log2(1.0 + chain_t).sum()))
    rates = {
        f"x{roles.l}": 0.5 * math.fsum(sum_l) / trials,
        f"x{roles.t}": 0.5 * math.fsum(sum_t) / trials,
    }
    return ErgodicRateEstimate(rates, trials, seed)
