"""Time integration of the compressible system in its two formulations.

U-form evolves (rho, rho*u) conservatively: mass and momentum fluxes are
upwinded at faces, pressure enters through the centered gradient and the
velocity diffusion through the three-point flux form.  V-form evolves
(rho, v) where v = u + d/dx phi(rho): the density equation gains an explicit
diffusion term and v obeys a non-conservative transport equation divided
through by rho.

Both steppers use an explicit two-stage midpoint update, clamp the two
outermost cells on each side to the incoming boundary values (the far field
is constant by construction), and treat a non-positive density as a recorded
vacuum-breach event rather than a numerical accident.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .constitutive import Params, phi
from .errors import ConfigurationError, DomainError, VacuumBreach
from .mesh import Mesh, BackgroundProfile, grad_c

__all__ = [
    "FlowState",
    "StepReport",
    "Trajectory",
    "U_FORM",
    "V_FORM",
    "effective_velocity",
    "recover_u",
    "cfl_dt",
    "step_u",
    "step_v",
    "run",
]

U_FORM = "U"
V_FORM = "V"

# number of cells frozen to far-field values at each end
_CLAMP = 2


@dataclass(eq=False)
class FlowState:
    """Density plus one velocity field; `form` says whether vel is u or v."""

    rho: np.ndarray
    vel: np.ndarray
    form: str
    t: float = 0.0

    def copy(self) -> "FlowState":
        return FlowState(self.rho.copy(), self.vel.copy(), self.form, self.t)


@dataclass(frozen=True)
class StepReport:
    dt_used: float
    min_rho: float
    max_rho: float
    cfl_ratio: float


@dataclass(eq=False)
class Trajectory:
    """Output frames of one run plus its termination metadata."""

    form: str
    times: list = field(default_factory=list)
    frames: list = field(default_factory=list)
    records: list = field(default_factory=list)
    status: str = "completed"
    breach_time: float | None = None
    breach_cell: int | None = None
    steps: int = 0
    min_rho_ever: float = math.inf


def _field_like(arr, mesh: Mesh) -> np.ndarray:
    out = np.ascontiguousarray(arr, dtype=np.float64)
    if out.shape != (mesh.N,):
        raise ConfigurationError(f"field shape {out.shape} does not match mesh N={mesh.N}")
    return out


def make_state(rho, vel, form: str, mesh: Mesh, t: float = 0.0) -> FlowState:
    if form not in (U_FORM, V_FORM):
        raise ConfigurationError(f"form must be 'U' or 'V', got {form!r}")
    rho_arr = _field_like(rho, mesh)
    _require_positive(rho_arr, float(t))
    return FlowState(rho_arr, _field_like(vel, mesh), form, float(t))


def _require_positive(rho: np.ndarray, t: float) -> None:
    i = int(np.argmin(rho))
    if rho[i] <= 0.0:
        raise DomainError(f"non-positive density {rho[i]!r} in cell {i} at t={t:g}")


def effective_velocity(state: FlowState, mesh: Mesh, params: Params) -> FlowState:
    """Map (rho, u) to (rho, v) with v = u + d/dx phi(rho)."""
    if state.form != U_FORM:
        raise ConfigurationError("effective_velocity expects a U-form state")
    _require_positive(state.rho, state.t)
    v = state.vel + grad_c(phi(state.rho, params), mesh)
    return FlowState(state.rho.copy(), v, V_FORM, state.t)


def recover_u(state: FlowState, mesh: Mesh, params: Params) -> FlowState:
    """Exact discrete inverse of effective_velocity (same gradient operator)."""
    if state.form != V_FORM:
        raise ConfigurationError("recover_u expects a V-form state")
    _require_positive(state.rho, state.t)
    u = state.vel - grad_c(phi(state.rho, params), mesh)
    return FlowState(state.rho.copy(), u, U_FORM, state.t)


def cfl_dt(state: FlowState, mesh: Mesh, params: Params, safety: float = 0.4) -> float:
    """Explicit stability limit: min of the acoustic and diffusive restrictions.

    dt = safety * min( dx / max(|vel| + c), dx^2 / (2 max nu) ) with
    c = sqrt(a*gamma*rho^(gamma-1)) and nu the kinematic diffusivity that the
    stepper actually applies, max(mu_floor, mu(rho)) / rho.
    """
    if not (0.0 < safety <= 1.0):
        raise ConfigurationError(f"safety must lie in (0, 1], got {safety!r}")
    if not (np.all(np.isfinite(state.rho)) and np.all(np.isfinite(state.vel))):
        raise DomainError(f"non-finite field at t={state.t:g}")
    _require_positive(state.rho, state.t)
    wave, nu = kernels.stability_terms(
        state.rho, state.vel, params.alpha, params.gamma, params.a, params.mu0, params.visc_floor
    )
    return safety * min(mesh.dx / wave, mesh.dx * mesh.dx / (2.0 * nu))


def _clamp_ends(arr: np.ndarray, ref: np.ndarray) -> None:
    arr[:_CLAMP] = ref[:_CLAMP]
    arr[-_CLAMP:] = ref[-_CLAMP:]


def _check_vacuum(rho: np.ndarray, t: float) -> None:
    i = int(np.argmin(rho))
    if rho[i] <= 0.0:
        raise VacuumBreach(t, i, float(rho[i]))


def _report(state: FlowState, dt: float, dt_max: float) -> StepReport:
    return StepReport(
        dt_used=dt,
        min_rho=float(np.min(state.rho)),
        max_rho=float(np.max(state.rho)),
        cfl_ratio=dt / dt_max,
    )


def step_u(state: FlowState, mesh: Mesh, params: Params, dt: float) -> tuple[FlowState, StepReport]:
    """One two-stage midpoint step of the conservative (rho, rho*u) system."""
    if state.form != U_FORM:
        raise ConfigurationError("step_u expects a U-form state")
    dt_max = cfl_dt(state, mesh, params, safety=1.0)
    if dt > dt_max * (1.0 + 1e-6):
        raise DomainError(f"dt={dt:g} exceeds the stability limit {dt_max:g}")
    rho0, u0 = state.rho, state.vel
    m0 = rho0 * u0
    args = (mesh.dx, params.alpha, params.gamma, params.a, params.mu0, params.visc_floor)

    # blow-ups surface as non-finite fields and become a "numerics" status;
    # the intermediate overflow itself is expected, not worth a warning
    with np.errstate(over="ignore", invalid="ignore", divide="ignore", under="ignore"):
        drho, dm = kernels.rhs_u(rho0, u0, *args)
        rho_h = rho0 + 0.5 * dt * drho
        m_h = m0 + 0.5 * dt * dm
        _clamp_ends(rho_h, rho0)
        _clamp_ends(m_h, m0)
        _check_vacuum(rho_h, state.t + 0.5 * dt)

        drho, dm = kernels.rhs_u(rho_h, m_h / rho_h, *args)
        rho1 = rho0 + dt * drho
        m1 = m0 + dt * dm
        _clamp_ends(rho1, rho0)
        _clamp_ends(m1, m0)
        _check_vacuum(rho1, state.t + dt)

        out = FlowState(rho1, m1 / rho1, U_FORM, state.t + dt)
    return out, _report(out, dt, dt_max)


def step_v(state: FlowState, mesh: Mesh, params: Params, dt: float) -> tuple[FlowState, StepReport]:
    """One two-stage midpoint step of the (rho, v) system.

    Density: d/dt rho = d/dx(mu(rho)/rho * d/dx rho) - d/dx(rho v).
    Velocity: d/dt v = -u * (upwind d/dx v) - grad P / rho with
    u = v - d/dx phi(rho) recomputed at each stage.
    """
    if state.form != V_FORM:
        raise ConfigurationError("step_v expects a V-form state")
    dt_max = cfl_dt(state, mesh, params, safety=1.0)
    if dt > dt_max * (1.0 + 1e-6):
        raise DomainError(f"dt={dt:g} exceeds the stability limit {dt_max:g}")
    rho0, v0 = state.rho, state.vel
    args = (mesh.dx, params.alpha, params.gamma, params.a, params.mu0, params.visc_floor)

    with np.errstate(over="ignore", invalid="ignore", divide="ignore", under="ignore"):
        drho, dv = kernels.rhs_v(rho0, v0, *args)
        rho_h = rho0 + 0.5 * dt * drho
        v_h = v0 + 0.5 * dt * dv
        _clamp_ends(rho_h, rho0)
        _clamp_ends(v_h, v0)
        _check_vacuum(rho_h, state.t + 0.5 * dt)

        drho, dv = kernels.rhs_v(rho_h, v_h, *args)
        rho1 = rho0 + dt * drho
        v1 = v0 + dt * dv
        _clamp_ends(rho1, rho0)
        _clamp_ends(v1, v0)
        _check_vacuum(rho1, state.t + dt)

        out = FlowState(rho1, v1, V_FORM, state.t + dt)
    return out, _report(out, dt, dt_max)


def _emit(traj: Trajectory, state: FlowState, mesh: Mesh, profile: BackgroundProfile,
          params: Params, acc, moment_ps, gronwall_slack: float, probe_safety: float) -> None:
    # local import: diagnostics consumes solver states but only through duck
    # typing, keeping the module dependency one-directional at import time
    from . import diagnostics

    if state.form == U_FORM:
        su = state
        sv = effective_velocity(state, mesh, params)
    else:
        sv = state
        su = recover_u(state, mesh, params)

    # forward-time probe for the reciprocal-equation residual: one extra
    # V-form step whose pair (t, t+dt) feeds the finite-difference residual
    try:
        probe_dt = cfl_dt(sv, mesh, params, probe_safety)
        sv_next, _ = step_v(sv, mesh, params, probe_dt)
        resid_recip = diagnostics.reciprocal_residual(sv, sv_next, mesh, params)
    except (VacuumBreach, DomainError):
        resid_recip = math.nan

    rec = diagnostics.collect(
        su, sv, mesh, params, profile, acc,
        moment_ps=moment_ps, gronwall_slack=gronwall_slack, resid_recip=resid_recip,
    )
    traj.times.append(state.t)
    traj.frames.append(state.copy())
    traj.records.append(rec)


def run(state0: FlowState, mesh: Mesh, profile: BackgroundProfile, params: Params, *,
        T: float, output_dt: float, safety: float = 0.4,
        moment_ps: tuple = (0, 2, 8, 30), gronwall_slack: float = 0.10) -> Trajectory:
    """Integrate from t=0 to T, emitting diagnostics every output_dt.

    A vacuum breach or a loss of finiteness terminates the run and is
    recorded on the trajectory (status "vacuum" / "numerics"); only
    configuration mistakes raise.
    """
    from . import diagnostics

    if T < 0.0:
        raise ConfigurationError(f"T must be non-negative, got {T!r}")
    if output_dt <= 0.0:
        raise ConfigurationError(f"output_dt must be positive, got {output_dt!r}")
    stepper = step_u if state0.form == U_FORM else step_v

    state = state0.copy()
    state.t = 0.0
    traj = Trajectory(form=state0.form)
    acc = diagnostics.RunAccumulators()
    traj.min_rho_ever = float(np.min(state.rho))
    _emit(traj, state, mesh, profile, params, acc, moment_ps, gronwall_slack, safety)

    tiny = 1e-12 * max(T, 1.0)
    frame = 1
    while state.t < T - tiny:
        try:
            dt = cfl_dt(state, mesh, params, safety)
            target = min(frame * output_dt, T)
            remaining = target - state.t
            hit = remaining <= dt * (1.0 + 1e-6)
            if hit:
                dt = remaining
            state, report = stepper(state, mesh, params, dt)
            if hit:
                state.t = target  # land output frames on exact times
        except VacuumBreach as breach:
            traj.status = "vacuum"
            traj.breach_time = breach.time
            traj.breach_cell = breach.cell
            traj.min_rho_ever = min(traj.min_rho_ever, breach.value)
            break
        except DomainError:
            traj.status = "numerics"
            traj.breach_time = state.t
            break
        traj.steps += 1
        traj.min_rho_ever = min(traj.min_rho_ever, report.min_rho)
        if not math.isfinite(report.min_rho) or not math.isfinite(report.max_rho):
            traj.status = "numerics"
            traj.breach_time = state.t
            break
        if hit:
            _emit(traj, state, mesh, profile, params, acc, moment_ps, gronwall_slack, safety)
            if state.t >= frame * output_dt - tiny:
                frame += 1
    return traj
