"""Independent numerical-quadrature evaluation of the outage integrals.

Arbiter between the closed forms and the underlying probability integrals:
the survival stages that the closed forms express through Laplace-transform
products are recomputed here by adaptive Simpson quadrature of the integral
representations, sharing only the hypoexponential density (which is
unit-tested against analytic cases on its own). Semi-infinite domains are
mapped to (0, 1] via ``z = scale * (1 - u) / u``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .analysis import HypoexpSpec, hypoexp_pdf
from .errors import ConfigError, OracleError
from .model import PairRoles, SystemConfig, build_derived_constants

_INITIAL_PANELS = 16
_MAX_DEPTH = 60


@dataclass(frozen=True)
class QuadSpec:
    """Quadrature tolerances and the subdivision budget."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    max_subdivisions: int = 200_000

    def __post_init__(self) -> None:
        if self.abs_tol <= 0.0 or self.rel_tol <= 0.0:
            raise ConfigError("quadrature tolerances must be positive")
        if self.max_subdivisions < _INITIAL_PANELS:
            raise ConfigError("subdivision budget too small")


class _Budget:
    __slots__ = ("remaining",)

    def __init__(self, limit: int):
        self.remaining = limit

    def spend(self) -> None:
        self.remaining -= 1
        if self.remaining < 0:
            raise OracleError("quadrature did not converge within the subdivision budget")


def _adaptive(
    g: Callable[[float], float],
    a: float,
    fa: float,
    fm: float,
    fb: float,
    b: float,
    whole: float,
    tol: float,
    depth: int,
    budget: _Budget,
) -> float:
    if depth > _MAX_DEPTH:
        raise OracleError("quadrature exceeded maximum bisection depth without converging")
    budget.spend()
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = g(lm), g(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    refined = left + right
    err = refined - whole
    if abs(err) <= 15.0 * tol:
        return refined + err / 15.0
    half = 0.5 * tol
    return _adaptive(g, a, fa, flm, fm, m, left, half, depth + 1, budget) + _adaptive(
        g, m, fm, frm, fb, b, right, half, depth + 1, budget
    )


def _integrate_unit(g: Callable[[float], float], spec: QuadSpec) -> float:
    """Adaptive Simpson on [0, 1] with an initial uniform panelling.

    The initial panels both seed the adaptive pass and provide the coarse
    estimate that anchors the relative tolerance.
    """
    xs = [i / _INITIAL_PANELS for i in range(_INITIAL_PANELS + 1)]
    fs = [g(x) for x in xs]
    mids = [g(0.5 * (xs[i] + xs[i + 1])) for i in range(_INITIAL_PANELS)]
    panel = [
        (xs[i + 1] - xs[i]) / 6.0 * (fs[i] + 4.0 * mids[i] + fs[i + 1])
        for i in range(_INITIAL_PANELS)
    ]
    coarse = math.fsum(panel)
    tol = max(spec.abs_tol, spec.rel_tol * abs(coarse)) / _INITIAL_PANELS
    budget = _Budget(spec.max_subdivisions)
    total = 0.0
    for i in range(_INITIAL_PANELS):
        total += _adaptive(g, xs[i], fs[i], mids[i], fs[i + 1], xs[i + 1], panel[i], tol, 0, budget)
    return total


def integrate_semi_infinite(
    fn: Callable[[float], float], lower: float = 0.0, scale: float = 1.0, spec: QuadSpec = QuadSpec()
) -> float:
    """Integrate ``fn`` over [lower, infinity) for exponentially decaying integrands.

    ``scale`` should match the integrand's decay length so the transformed
    mass sits mid-interval; the endpoint u = 0 (z = infinity) evaluates to 0.
    """
    if scale <= 0.0 or not math.isfinite(scale):
        raise ConfigError("integration scale must be positive and finite")

    def g(u: float) -> float:
        if u <= 0.0:
            return 0.0
        z = lower + scale * (1.0 - u) / u
        return fn(z) * scale / (u * u)

    return _integrate_unit(g, spec)


def _decay_scale(rates: tuple[float, ...], s: float) -> float:
    # harmonic blend of the sum's mean and the weight's decay length
    mean = math.fsum(1.0 / r for r in rates) if rates else 0.0
    if mean == 0.0:
        return 1.0 / s if s > 0.0 else 1.0
    inv = 1.0 / mean + s
    return 1.0 / inv


def quad_outage_xl(config: SystemConfig, roles: PairRoles, spec: QuadSpec = QuadSpec()) -> float:
    """Outage of the stronger signal via quadrature of its two survival integrals.

    The relay stage integrates the hypoexponential interference density
    against the conditional decode probability; the near-user stage
    integrates the joint tail over the decode threshold. Degenerate and
    reduced interference-term sets are handled natively by the density.
    """
    dc = build_derived_constants(config, roles)
    if not (dc.feasible_l and dc.feasible_t):
        return 1.0
    g_l = dc.gamma_th[roles.l - 1]
    g_t = dc.gamma_th[roles.t - 1]
    if g_l == 0.0 and g_t == 0.0:
        return 0.0
    om_l, om_k = config.omega[roles.l - 1], config.omega[roles.k - 1]

    pdf_spec = HypoexpSpec(dc.lam)
    s = dc.beta_l / om_l

    def relay_integrand(z: float) -> float:
        return hypoexp_pdf(pdf_spec, z) * math.exp(-(z + 1.0) * s)

    relay = integrate_semi_infinite(relay_integrand, 0.0, _decay_scale(dc.lam, s), spec)

    tau = dc.tau_l
    theta = dc.theta_l
    if config.epsilon == 0.0 or tau == 0.0:

        def user_integrand(y: float) -> float:
            return math.exp(-y / om_k) / om_k

    else:
        residual_scale = tau * config.rho * config.omega_i

        def user_integrand(y: float) -> float:
            survive_residual = 1.0 - math.exp(-(y - tau) / residual_scale)
            return survive_residual * math.exp(-y / om_k) / om_k

    user = integrate_semi_infinite(user_integrand, theta, om_k, spec)
    return _finish(1.0 - relay * user)


def quad_outage_xt(config: SystemConfig, roles: PairRoles, spec: QuadSpec = QuadSpec()) -> float:
    """Outage of the weaker signal via quadrature of the relay-pair integral.

    The two-term cross-interference density is integrated against the joint
    relay decode probability; the two user-side stages are plain exponential
    tails and are evaluated exactly.
    """
    dc = build_derived_constants(config, roles)
    if not dc.feasible_t:
        return 1.0
    g_l = dc.gamma_th[roles.l - 1]
    g_t = dc.gamma_th[roles.t - 1]
    if g_l == 0.0 and g_t == 0.0:
        return 0.0
    om_l, om_t = config.omega[roles.l - 1], config.omega[roles.t - 1]
    om_k, om_r = config.omega[roles.k - 1], config.omega[roles.r - 1]

    s = dc.beta_l / om_l + dc.beta_t * dc.varphi_t
    prefactor = math.exp(-dc.beta_l / om_l - dc.beta_t * dc.varphi_t) / (
        dc.varphi_t * om_t * (1.0 + config.epsilon * config.rho * dc.beta_t * dc.varphi_t * config.omega_i)
    )
    if dc.lam_p:
        pdf_spec = HypoexpSpec(dc.lam_p)

        def pair_integrand(z: float) -> float:
            return hypoexp_pdf(pdf_spec, z) * math.exp(-s * z)

        integral = integrate_semi_infinite(pair_integrand, 0.0, _decay_scale(dc.lam_p, s), spec)
    else:
        # no cross-pair leakage: the interference sum is identically zero
        integral = 1.0
    relay_pair = prefactor * integral
    users = math.exp(-dc.xi_t / om_k) * math.exp(-dc.xi_t / om_r)
    return _finish(1.0 - relay_pair * users)


def _finish(raw: float) -> float:
    if not math.isfinite(raw):
        raise OracleError(f"quadrature produced a non-finite outage value: {raw!r}")
    return min(max(raw, 0.0), 1.0)
