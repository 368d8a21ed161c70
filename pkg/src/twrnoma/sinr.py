"""Instantaneous SINR evaluation for one fading realization.

Pure arithmetic on the sample's power gains; every formula broadcasts, so a
:class:`~twrnoma.model.ChannelSample` holding arrays yields arrays of SINRs.
All denominators contain the unit noise term, so they are bounded below by 1
and no division guards are needed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import ChannelSample, Gain, PairRoles, SystemConfig


@dataclass(frozen=True)
class SinrSet:
    """The five decode-stage SINRs of one realization.

    ``relay_strong``: relay decoding the stronger uplink signal against the
    weaker one plus cross-pair leakage. ``relay_weak``: relay decoding the
    weaker uplink signal after cancelling the stronger (residual gain applies
    under ipSIC). ``user_cross``: near receiver decoding the far user's signal
    before cancellation. ``user_own``: near receiver decoding its own signal
    after cancellation. ``far_user``: far receiver decoding its signal with
    the near user's share as interference.
    """

    relay_strong: Gain
    relay_weak: Gain
    user_cross: Gain
    user_own: Gain
    far_user: Gain


def compute_sinrs(config: SystemConfig, roles: PairRoles, sample: ChannelSample) -> SinrSet:
    """Evaluate all five SINRs for ``sample`` under the given role assignment."""
    rho = config.rho
    eps = config.epsilon
    a_l, a_t = config.a[roles.l - 1], config.a[roles.t - 1]
    a_k, a_r = config.a[roles.k - 1], config.a[roles.r - 1]
    b_l, b_t = config.b[roles.l - 1], config.b[roles.t - 1]
    g_l, g_t = sample.gain(roles.l), sample.gain(roles.t)
    g_k, g_r = sample.gain(roles.k), sample.gain(roles.r)

    cross = rho * config.varpi1 * (g_k * a_k + g_r * a_r)
    residual = eps * rho * sample.gI

    relay_strong = rho * g_l * a_l / (rho * g_t * a_t + cross + 1.0)
    relay_weak = rho * g_t * a_t / (residual + cross + 1.0)
    user_cross = rho * g_k * b_t / (rho * g_k * b_l + rho * config.varpi2 * g_k + 1.0)
    user_own = rho * g_k * b_l / (residual + rho * config.varpi2 * g_k + 1.0)
    far_user = rho * g_r * b_t / (rho * g_r * b_l + rho * config.varpi2 * g_r + 1.0)
    return SinrSet(relay_strong, relay_weak, user_cross, user_own, far_user)
