"""Runtime monitors for the a priori estimate chain.

Every quantity the analysis bounds is computed here as a plain function of a
flow snapshot: the relative-entropy energy, its effective-velocity (BD)
variant, both dissipation rates, weighted sup norms, density moments of v
with their Gronwall envelope, and the residuals of the two derived
identities (the reciprocal-density equation and the pressure identity).

Cumulative-in-time quantities are accumulated by the caller through
RunAccumulators using trapezoid quadrature over the output cadence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .constitutive import Params, phi, pressure, relative_pressure, viscosity
from .errors import ConfigurationError
from .mesh import Mesh, BackgroundProfile, diffuse, grad_c, integrate, norm

__all__ = [
    "DiagnosticsRecord",
    "RunAccumulators",
    "energy_functional",
    "bd_functional",
    "dissipation_u_rate",
    "bd_dissipation_integrand",
    "dissipation_bd_rate",
    "weighted_sup",
    "v_moment",
    "gronwall_bound_v",
    "reciprocal_residual",
    "pressure_identity_residual",
    "density_report",
    "collect",
]


@dataclass(frozen=True)
class DiagnosticsRecord:
    """One output frame's worth of monitored quantities.

    diss_u / diss_bd are cumulative time integrals up to t; the *_rate
    fields are the instantaneous integrands of those time integrals.
    moments maps p to the density-weighted L^{p+2} norm of v; gron_bound
    maps p to the Gronwall envelope (None when the parameter point sits
    outside the theorem region) and gron_pass to the slack-adjusted
    comparison outcome (None when the bound is unavailable).
    """

    t: float
    mass: float
    energy: float
    bd_entropy: float
    diss_u: float
    diss_bd: float
    diss_u_rate: float
    diss_bd_rate: float
    bd_integrand_min: float
    min_rho: float
    max_rho: float
    inv_rho_max: float
    rho_h1: float
    v_inf: float
    wvel_inf: float
    sqrt_rho_u_l2: float
    resid_recip: float
    resid_pident: float
    moments: dict
    gron_bound: dict
    gron_pass: dict


@dataclass(eq=False)
class RunAccumulators:
    """Carries cumulative state between output frames of one run."""

    times: list = dc_field(default_factory=list)
    wvel_hist: list = dc_field(default_factory=list)
    sql2_hist: list = dc_field(default_factory=list)
    rho_linf_hist: list = dc_field(default_factory=list)
    cum_diss_u: float = 0.0
    cum_diss_bd: float = 0.0
    prev_du_rate: float = 0.0
    prev_dbd_rate: float = 0.0
    initial_moments: dict | None = None


def _velocities(state, mesh: Mesh, params: Params) -> tuple[np.ndarray, np.ndarray]:
    """Return (u, v) regardless of which form the snapshot carries."""
    correction = grad_c(phi(state.rho, params), mesh)
    if state.form == "V":
        return state.vel - correction, state.vel
    return state.vel, state.vel + correction


def energy_functional(state, mesh: Mesh, params: Params, profile: BackgroundProfile) -> float:
    """Relative entropy: integral of rho*u^2/2 + p(rho/rho_bar)."""
    u, _ = _velocities(state, mesh, params)
    dens = 0.5 * state.rho * u * u + relative_pressure(state.rho, profile.values, params)
    return integrate(dens, mesh)


def bd_functional(state, mesh: Mesh, params: Params, profile: BackgroundProfile) -> float:
    """The energy functional evaluated on the effective velocity v."""
    _, v = _velocities(state, mesh, params)
    dens = 0.5 * state.rho * v * v + relative_pressure(state.rho, profile.values, params)
    return integrate(dens, mesh)


def dissipation_u_rate(state, mesh: Mesh, params: Params) -> float:
    """Instantaneous viscous dissipation: integral of mu(rho)*(du/dx)^2 >= 0."""
    u, _ = _velocities(state, mesh, params)
    g = grad_c(u, mesh)
    return integrate(viscosity(state.rho, params) * g * g, mesh)


def bd_dissipation_integrand(state, mesh: Mesh, params: Params) -> np.ndarray:
    """Pointwise d/dx(phi(rho)) * d/dx(rho^gamma).

    Analytically this equals gamma*mu(rho)*rho^(gamma-3)*(drho/dx)^2 >= 0;
    discretely both centered gradients share the sign of the same density
    difference, so negativity can only come from round-off.
    """
    return grad_c(phi(state.rho, params), mesh) * grad_c(state.rho ** params.gamma, mesh)


def dissipation_bd_rate(state, mesh: Mesh, params: Params) -> float:
    return integrate(bd_dissipation_integrand(state, mesh, params), mesh)


def weighted_sup(state, mesh: Mesh, params: Params) -> float:
    """max |rho^beta * u| with beta the configured weight exponent."""
    u, _ = _velocities(state, mesh, params)
    return float(np.max(np.abs(state.rho ** params.beta_eff * u)))


def v_moment(state, mesh: Mesh, params: Params, p: int) -> float:
    """Density-weighted moment (integral rho*|v|^(p+2))^(1/(p+2))."""
    if int(p) != p or p < 0:
        raise ConfigurationError(f"moment order p must be a non-negative integer, got {p!r}")
    _, v = _velocities(state, mesh, params)
    q = p + 2
    return integrate(state.rho * np.abs(v) ** q, mesh) ** (1.0 / q)


def _trapezoid(values, times) -> float:
    total = 0.0
    for k in range(1, len(times)):
        total += 0.5 * (values[k] + values[k - 1]) * (times[k] - times[k - 1])
    return total


def gronwall_bound_v(times, wvel_hist, sql2_hist, rho_linf_hist,
                     initial_moment: float, params: Params, p: int) -> float | None:
    """Gronwall envelope for the p-th v-moment from measured history.

    bound = (m0^(p+2) + gamma*(p+2)*I)^(1/(p+2)) * exp(gamma*I) with
    I = integral of A(s) = wvel^(p/(p+2)) * sql2^(2/(p+2)) *
    rho_linf^(gamma - alpha - p*beta/(p+2)).

    Requires gamma - alpha - beta >= 0; outside that region the envelope has
    no closed form (the missing ingredient is a bound on 1/rho) and None is
    returned as the unavailable marker.
    """
    beta = params.beta_eff
    if params.gamma - params.alpha - beta < 0.0:
        return None
    q = p + 2
    ew = p / q
    es = 2.0 / q
    er = params.gamma - params.alpha - p * beta / q
    a_vals = [
        (w ** ew) * (s ** es) * (r ** er)
        for w, s, r in zip(wvel_hist, sql2_hist, rho_linf_hist)
    ]
    integral = _trapezoid(a_vals, times)
    base = initial_moment ** q + params.gamma * q * integral
    return base ** (1.0 / q) * math.exp(params.gamma * integral)


def reciprocal_residual(state_t, state_next, mesh: Mesh, params: Params) -> float:
    """Residual of the evolution equation satisfied by 1/rho.

    Because w = 1/rho obeys
        dw/dt - d/dx(mu0*rho^(alpha-1)*dw/dx) + 2*mu0*rho^alpha*(dw/dx)^2
              + 2*v*dw/dx - d/dx(v*w) = 0
    identically whenever (rho, v) solves the mass equation, the discrete
    residual (forward difference in time, centered operators in space at the
    earlier time, nominal un-floored viscosity) must vanish under refinement.
    Measured over interior cells only; the clamped boundary cells do not
    follow the PDE.
    """
    dt = state_next.t - state_t.t
    if dt <= 0.0:
        raise ConfigurationError(f"state pair must be forward in time, got dt={dt!r}")
    rho = state_t.rho
    _, v = _velocities(state_t, mesh, params)
    w0 = 1.0 / rho
    w1 = 1.0 / state_next.rho
    gw = grad_c(w0, mesh)
    resid = (
        (w1 - w0) / dt
        - diffuse(params.mu0 * rho ** (params.alpha - 1.0), w0, mesh)
        + 2.0 * params.mu0 * rho ** params.alpha * gw * gw
        + 2.0 * v * gw
        - grad_c(v * w0, mesh)
    )
    core = resid[2:-2]
    return math.sqrt(float(np.sum(core * core)) * mesh.dx)


def pressure_identity_residual(state, mesh: Mesh, params: Params) -> float:
    """L2 norm of grad P(rho) - a*gamma*rho^(gamma+1)/mu(rho) * (v - u).

    v - u is the discrete gradient of phi(rho), and phi'(rho) = mu(rho)/rho^2
    makes the two sides agree analytically; the discrete mismatch is pure
    centered-difference truncation, O(dx^2). Uses the nominal viscosity (the
    identity is an exact consequence of the power law, not of the floor).
    """
    rho = state.rho
    u, v = _velocities(state, mesh, params)
    lhs = grad_c(pressure(rho, params), mesh)
    mu_nominal = params.mu0 * rho ** params.alpha
    rhs = params.a * params.gamma * rho ** (params.gamma + 1.0) / mu_nominal * (v - u)
    # the two end cells use one-sided gradients whose round-off does not
    # cancel between the sides even on constant states; measure the identity
    # where both gradients are centered
    core = (lhs - rhs)[1:-1]
    return math.sqrt(float(np.sum(core * core)) * mesh.dx)


def density_report(state, mesh: Mesh, profile: BackgroundProfile,
                   params: Params | None = None) -> dict:
    """Density extrema, the max of 1/rho, and the H1 distance to the background."""
    min_rho = float(np.min(state.rho))
    max_rho = float(np.max(state.rho))
    return {
        "min_rho": min_rho,
        "max_rho": max_rho,
        "inv_rho_max": 1.0 / min_rho,
        "rho_h1": norm(state.rho - profile.values, mesh, "h1"),
    }


def collect(state_u, state_v, mesh: Mesh, params: Params, profile: BackgroundProfile,
            acc: RunAccumulators, *, moment_ps=(0, 2, 8, 30), gronwall_slack: float = 0.10,
            resid_recip: float = math.nan) -> DiagnosticsRecord:
    """Assemble one DiagnosticsRecord and advance the cumulative integrals."""
    t = state_u.t
    rho = state_u.rho
    u = state_u.vel
    v = state_v.vel

    du_rate = dissipation_u_rate(state_u, mesh, params)
    integrand = bd_dissipation_integrand(state_u, mesh, params)
    dbd_rate = integrate(integrand, mesh)
    dbd_rate_clamped = max(0.0, dbd_rate)
    if acc.times:
        h = t - acc.times[-1]
        acc.cum_diss_u += 0.5 * (acc.prev_du_rate + du_rate) * h
        acc.cum_diss_bd += 0.5 * (acc.prev_dbd_rate + dbd_rate_clamped) * h
    acc.prev_du_rate = du_rate
    acc.prev_dbd_rate = dbd_rate_clamped

    wvel = weighted_sup(state_u, mesh, params)
    sql2 = math.sqrt(integrate(rho * u * u, mesh))
    dens = density_report(state_u, mesh, profile, params)
    acc.times.append(t)
    acc.wvel_hist.append(wvel)
    acc.sql2_hist.append(sql2)
    acc.rho_linf_hist.append(dens["max_rho"])

    moments = {int(p): v_moment(state_v, mesh, params, int(p)) for p in moment_ps}
    if acc.initial_moments is None:
        acc.initial_moments = dict(moments)

    gron_bound: dict = {}
    gron_pass: dict = {}
    for p, measured in moments.items():
        bound = gronwall_bound_v(
            acc.times, acc.wvel_hist, acc.sql2_hist, acc.rho_linf_hist,
            acc.initial_moments[p], params, p,
        )
        gron_bound[p] = bound
        gron_pass[p] = None if bound is None else bool(measured <= bound * (1.0 + gronwall_slack))

    return DiagnosticsRecord(
        t=t,
        mass=integrate(rho, mesh),
        energy=energy_functional(state_u, mesh, params, profile),
        bd_entropy=bd_functional(state_u, mesh, params, profile),
        diss_u=acc.cum_diss_u,
        diss_bd=acc.cum_diss_bd,
        diss_u_rate=du_rate,
        diss_bd_rate=dbd_rate,
        bd_integrand_min=float(np.min(integrand)),
        min_rho=dens["min_rho"],
        max_rho=dens["max_rho"],
        inv_rho_max=dens["inv_rho_max"],
        rho_h1=dens["rho_h1"],
        v_inf=float(np.max(np.abs(v))),
        wvel_inf=wvel,
        sqrt_rho_u_l2=sql2,
        resid_recip=resid_recip,
        resid_pident=pressure_identity_residual(state_v, mesh, params),
        moments=moments,
        gron_bound=gron_bound,
        gron_pass=gron_pass,
    )
