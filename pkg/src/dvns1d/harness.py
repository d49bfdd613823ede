"""Scenario configuration and run orchestration.

A Scenario is loaded from a flat INI config, validated (including the
admissibility check on (alpha, gamma)), turned into initial data from one of
the built-in families, integrated, and written out as CSV artifacts:

  timeseries.csv       one row per output time, every diagnostic column
  fields_<t>.csv       x, rho, u, v snapshots at each output time
  summary.csv          per-form run verdicts
  formdiff.csv         sup |rho_U - rho_V| per frame (solver_form = both)
  sweep.csv            one row per (alpha, gamma) point
  orders.csv           self-convergence orders from a refinement study
  regularization.csv   floor/mollifier convergence table

All numeric cells are written with repr() so identical runs produce
byte-identical files; non-finite values appear as the explicit marker
"undefined" and unavailable verdicts as "unavailable".
"""

from __future__ import annotations

import configparser
import dataclasses
import math
import os
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import solver
from .constitutive import Params, TheoremReport, validate_params
from .errors import ConfigurationError
from .mesh import Mesh, BackgroundProfile, background_profile, build_mesh, mollify
from .solver import FlowState, Trajectory, U_FORM, V_FORM, effective_velocity

__all__ = [
    "Scenario",
    "load_config",
    "build_initial",
    "run_scenario",
    "sweep",
    "refinement_study",
    "regularization_study",
    "OUTDIR_ENV",
]

OUTDIR_ENV = "DVNS1D_OUTDIR"

_FAMILIES = ("hoff-step", "gaussian-bump", "near-vacuum", "custom-table")
_FORMS = ("U", "V", "both")


@dataclass(eq=False)
class Scenario:
    """Everything needed to reproduce one run."""

    name: str
    params: Params
    theorem: TheoremReport
    L: float = 10.0
    N: int = 1024
    rho_minus: float = 1.0
    rho_plus: float = 1.0
    init_family: str = "gaussian-bump"
    amplitude: float = 0.5
    sigma: float = 1.0
    u_amplitude: float = 0.0
    u_sigma: float = 1.0
    T: float = 1.0
    output_dt: float = 0.05
    solver_form: str = "U"
    mollify_n: int | None = None
    table: str | None = None
    safety: float = 0.4
    moment_ps: tuple = (0, 2, 8, 30)
    gronwall_slack: float = 0.10

    @property
    def inside_theorem(self) -> bool:
        return self.theorem.inside_theorem


def _get(cfg, section: str, key: str, conv, default):
    if not cfg.has_option(section, key):
        return default
    raw = cfg.get(section, key).strip()
    if raw == "":
        return default
    try:
        return conv(raw)
    except ValueError as exc:
        raise ConfigurationError(f"field '{key}' in [{section}]: {exc}") from exc


def _require(cfg, section: str, key: str, conv):
    if not cfg.has_option(section, key) or cfg.get(section, key).strip() == "":
        raise ConfigurationError(f"missing required field '{key}' in [{section}]")
    return _get(cfg, section, key, conv, None)


def _parse_int_tuple(raw: str) -> tuple:
    return tuple(int(tok) for tok in raw.replace(",", " ").split())


def load_config(path) -> Scenario:
    """Parse and fully validate a scenario config file."""
    text = Path(path).read_text()  # missing/unreadable file surfaces as OSError
    cfg = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        cfg.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigurationError(f"config parse failure: {exc}") from exc

    params = Params(
        alpha=_require(cfg, "params", "alpha", float),
        gamma=_require(cfg, "params", "gamma", float),
        a=_get(cfg, "params", "a", float, 1.0),
        mu0=_get(cfg, "params", "mu0", float, 1.0),
        eps=_get(cfg, "params", "eps", float, 0.125),
        reg_n=_get(cfg, "params", "reg_n", int, None),
        beta=_get(cfg, "params", "beta", float, None),
    )
    theorem = validate_params(params)
    if not theorem.inside_theorem:
        warnings.warn(
            f"(alpha={params.alpha:g}, gamma={params.gamma:g}) lies outside the "
            f"admissible region; running in exploration mode",
            stacklevel=2,
        )

    scenario = Scenario(
        name=_get(cfg, "run", "name", str, "run"),
        params=params,
        theorem=theorem,
        L=_get(cfg, "grid", "L", float, 10.0),
        N=_get(cfg, "grid", "N", int, 1024),
        rho_minus=_get(cfg, "initial", "rho_minus", float, 1.0),
        rho_plus=_get(cfg, "initial", "rho_plus", float, 1.0),
        init_family=_get(cfg, "initial", "family", str, "gaussian-bump"),
        amplitude=_get(cfg, "initial", "amplitude", float, 0.5),
        sigma=_get(cfg, "initial", "sigma", float, 1.0),
        u_amplitude=_get(cfg, "initial", "u_amplitude", float, 0.0),
        u_sigma=_get(cfg, "initial", "u_sigma", float, 1.0),
        T=_get(cfg, "run", "T", float, 1.0),
        output_dt=_get(cfg, "run", "output_dt", float, 0.05),
        solver_form=_get(cfg, "run", "solver_form", str, "U"),
        mollify_n=_get(cfg, "initial", "mollify_n", int, None),
        table=_get(cfg, "initial", "table", str, None),
        safety=_get(cfg, "run", "safety", float, 0.4),
        moment_ps=_get(cfg, "run", "moment_ps", _parse_int_tuple, (0, 2, 8, 30)),
        gronwall_slack=_get(cfg, "run", "gronwall_slack", float, 0.10),
    )
    validate_scenario(scenario)
    return scenario


def validate_scenario(s: Scenario) -> None:
    if s.init_family not in _FAMILIES:
        raise ConfigurationError(f"unknown init family {s.init_family!r}; choose one of {_FAMILIES}")
    form = s.solver_form.upper() if s.solver_form.lower() != "both" else "both"
    if form not in _FORMS:
        raise ConfigurationError(f"solver_form must be U, V or both, got {s.solver_form!r}")
    s.solver_form = form
    if s.T < 0.0:
        raise ConfigurationError(f"T must be non-negative, got {s.T!r}")
    if s.output_dt <= 0.0:
        raise ConfigurationError(f"output_dt must be positive, got {s.output_dt!r}")
    if not (0.0 < s.safety <= 1.0):
        raise ConfigurationError(f"safety must lie in (0, 1], got {s.safety!r}")
    if any(int(p) != p or p < 0 for p in s.moment_ps):
        raise ConfigurationError(f"moment_ps must be non-negative integers, got {s.moment_ps!r}")
    if s.init_family == "custom-table" and not s.table:
        raise ConfigurationError("custom-table family requires the 'table' field")
    # the initial data itself must satisfy the positivity hypothesis;
    # building it performs that check
    mesh = build_mesh(s.L, s.N)
    profile = background_profile(mesh, s.rho_minus, s.rho_plus)
    build_initial(s, mesh, profile)


def _compact_bump(x: np.ndarray, width: float) -> np.ndarray:
    """Smooth bump supported on |x| < width, peak value 1 at the origin."""
    t = x / width
    out = np.zeros_like(x)
    inside = np.abs(t) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - t[inside] ** 2))
    return out


def build_initial(s: Scenario, mesh: Mesh, profile: BackgroundProfile,
                  mollify_override: int | None = None) -> FlowState:
    """Sample the scenario's initial data family as a U-form state."""
    if s.init_family in ("gaussian-bump", "near-vacuum"):
        rho = profile.values + s.amplitude * np.exp(-((mesh.x / s.sigma) ** 2))
        u = s.u_amplitude * np.exp(-((mesh.x / s.u_sigma) ** 2))
    elif s.init_family == "hoff-step":
        rho = profile.values.copy()
        u = s.u_amplitude * _compact_bump(mesh.x, s.u_sigma)
    elif s.init_family == "custom-table":
        data = np.loadtxt(s.table, delimiter=",", skiprows=1, ndmin=2)
        if data.shape[1] < 3:
            raise ConfigurationError(f"custom table {s.table!r} needs columns x,rho,u")
        rho = np.interp(mesh.x, data[:, 0], data[:, 1])
        u = np.interp(mesh.x, data[:, 0], data[:, 2])
    else:
        raise ConfigurationError(f"unknown init family {s.init_family!r}")

    n = mollify_override if mollify_override is not None else s.mollify_n
    if n is not None:
        rho = profile.values + mollify(rho - profile.values, mesh, n)
        u = mollify(u, mesh, n)
    if np.min(rho) <= 0.0:
        raise ConfigurationError(
            f"initial density must stay positive; amplitude {s.amplitude!r} drives "
            f"min rho0 to {float(np.min(rho)):g}"
        )
    return solver.make_state(rho, u, U_FORM, mesh, t=0.0)


# ---------------------------------------------------------------------------
# CSV plumbing


def _fmt(value) -> str:
    if value is None:
        return "unavailable"
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    f = float(value)
    return repr(f) if math.isfinite(f) else "undefined"


def _verdict(flag) -> str:
    if flag is None:
        return "unavailable"
    return "pass" if flag else "fail"


def _write_csv(path: Path, header: list, rows: list) -> None:
    tmp = path.with_name(path.name + ".tmp")
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(cell) for cell in row) for row in rows)
    tmp.write_text("\n".join(lines) + "\n")
    os.replace(tmp, path)


def _timeseries_header(moment_ps) -> list:
    head = [
        "t", "mass", "energy", "bd_entropy", "diss_u", "diss_bd",
        "diss_u_rate", "diss_bd_rate", "bd_integrand_min",
        "min_rho", "max_rho", "inv_rho_max", "rho_h1",
        "v_inf", "wvel_inf", "sqrt_rho_u_l2", "resid_recip", "resid_pident",
    ]
    head += [f"v_moment_p{p}" for p in moment_ps]
    head += [f"gron_bound_p{p}" for p in moment_ps]
    head += [f"gron_pass_p{p}" for p in moment_ps]
    return head


def _timeseries_row(rec, moment_ps) -> list:
    row = [
        rec.t, rec.mass, rec.energy, rec.bd_entropy, rec.diss_u, rec.diss_bd,
        rec.diss_u_rate, rec.diss_bd_rate, rec.bd_integrand_min,
        rec.min_rho, rec.max_rho, rec.inv_rho_max, rec.rho_h1,
        rec.v_inf, rec.wvel_inf, rec.sqrt_rho_u_l2, rec.resid_recip, rec.resid_pident,
    ]
    row += [rec.moments[p] for p in moment_ps]
    row += [rec.gron_bound[p] for p in moment_ps]
    row += [_verdict(rec.gron_pass[p]) for p in moment_ps]
    return row


def _sup(values) -> float:
    finite = [x for x in values if x is not None and math.isfinite(x)]
    return max(finite) if finite else math.nan


def _overall_gronwall(records) -> str:
    flags = [flag for rec in records for flag in rec.gron_pass.values()]
    if any(flag is False for flag in flags):
        return "fail"
    if any(flag is True for flag in flags):
        return "pass"
    return "unavailable"


_SUMMARY_HEADER = [
    "name", "form", "status", "vacuum", "breach_time", "breach_cell", "steps",
    "min_rho_run", "sup_energy", "sup_bd_entropy", "total_diss_u", "total_diss_bd",
    "sup_v_inf", "sup_wvel_inf", "sup_inv_rho_max", "sup_rho_h1",
    "sup_resid_recip", "sup_resid_pident", "gronwall", "inside_theorem",
]


def _summary_row(name: str, traj: Trajectory, inside: bool) -> list:
    recs = traj.records
    breached = traj.status == "vacuum"
    return [
        name, traj.form, traj.status,
        "yes" if breached else "no",
        traj.breach_time if traj.breach_time is not None else "none",
        traj.breach_cell if traj.breach_cell is not None else "none",
        traj.steps, traj.min_rho_ever,
        _sup(r.energy for r in recs), _sup(r.bd_entropy for r in recs),
        recs[-1].diss_u if recs else math.nan, recs[-1].diss_bd if recs else math.nan,
        _sup(r.v_inf for r in recs), _sup(r.wvel_inf for r in recs),
        _sup(r.inv_rho_max for r in recs), _sup(r.rho_h1 for r in recs),
        _sup(r.resid_recip for r in recs), _sup(r.resid_pident for r in recs),
        _overall_gronwall(recs), "yes" if inside else "no",
    ]


def _fields_rows(state: FlowState, mesh: Mesh, params: Params) -> list:
    if state.form == U_FORM:
        su = state
        sv = effective_velocity(state, mesh, params)
    else:
        sv = state
        su = solver.recover_u(state, mesh, params)
    return [
        [mesh.x[i], su.rho[i], su.vel[i], sv.vel[i]]
        for i in range(mesh.N)
    ]


def _resolve_outdir(outdir) -> Path:
    path = Path(outdir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _integrate_scenario(s: Scenario, mesh: Mesh, profile: BackgroundProfile,
                        state0: FlowState, form: str) -> Trajectory:
    st0 = state0 if form == U_FORM else effective_velocity(state0, mesh, s.params)
    return solver.run(
        st0, mesh, profile, s.params,
        T=s.T, output_dt=s.output_dt, safety=s.safety,
        moment_ps=s.moment_ps, gronwall_slack=s.gronwall_slack,
    )


def run_scenario(s: Scenario, outdir) -> int:
    """Integrate the scenario and write its artifact set. Returns exit status."""
    out = _resolve_outdir(outdir)
    mesh = build_mesh(s.L, s.N)
    profile = background_profile(mesh, s.rho_minus, s.rho_plus)
    state0 = build_initial(s, mesh, profile)

    forms = [U_FORM, V_FORM] if s.solver_form == "both" else [s.solver_form]
    trajs = {form: _integrate_scenario(s, mesh, profile, state0, form) for form in forms}

    primary = trajs[forms[0]]
    _write_csv(
        out / "timeseries.csv",
        _timeseries_header(s.moment_ps),
        [_timeseries_row(r, s.moment_ps) for r in primary.records],
    )
    if len(forms) == 2:
        _write_csv(
            out / "timeseries_v.csv",
            _timeseries_header(s.moment_ps),
            [_timeseries_row(r, s.moment_ps) for r in trajs[V_FORM].records],
        )
    for t, frame in zip(primary.times, primary.frames):
        _write_csv(
            out / f"fields_{t:.6f}.csv",
            ["x", "rho", "u", "v"],
            _fields_rows(frame, mesh, s.params),
        )
    _write_csv(
        out / "summary.csv",
        _SUMMARY_HEADER,
        [_summary_row(s.name, trajs[form], s.inside_theorem) for form in forms],
    )
    if len(forms) == 2:
        tu, tv = trajs[U_FORM], trajs[V_FORM]
        nshared = min(len(tu.frames), len(tv.frames))
        rows = [
            [tu.times[k], float(np.max(np.abs(tu.frames[k].rho - tv.frames[k].rho)))]
            for k in range(nshared)
        ]
        _write_csv(out / "formdiff.csv", ["t", "rho_diff_linf"], rows)
    return 0


def sweep(base: Scenario, alpha_grid, gamma_grid, outdir) -> int:
    """Run the (alpha, gamma) grid and tabulate vacuum/bound behavior per point."""
    if not alpha_grid or not gamma_grid:
        raise ConfigurationError("sweep grids must be non-empty")
    out = _resolve_outdir(outdir)
    mesh = build_mesh(base.L, base.N)
    profile = background_profile(mesh, base.rho_minus, base.rho_plus)
    state0 = build_initial(base, mesh, profile)
    form = U_FORM if base.solver_form in (U_FORM, "both") else V_FORM

    rows = []
    for alpha in alpha_grid:
        for gamma in gamma_grid:
            try:
                params = dataclasses.replace(base.params, alpha=alpha, gamma=gamma)
                report = validate_params(params)
                s = dataclasses.replace(base, params=params, theorem=report)
                traj = _integrate_scenario(s, mesh, profile, state0, form)
                rows.append([
                    alpha, gamma, "yes" if report.inside_theorem else "no", traj.status,
                    traj.min_rho_ever,
                    "yes" if traj.status == "vacuum" else "no",
                    traj.breach_time if traj.breach_time is not None else "none",
                    _sup(r.v_inf for r in traj.records),
                    _overall_gronwall(traj.records),
                ])
            except (ConfigurationError, ValueError) as exc:
                rows.append([alpha, gamma, "no", f"error: {exc}".replace(",", ";"),
                             math.nan, "no", "none", math.nan, "unavailable"])
    _write_csv(
        out / "sweep.csv",
        ["alpha", "gamma", "inside_theorem", "status", "min_rho_run",
         "vacuum", "breach_time", "sup_v_inf", "gronwall"],
        rows,
    )
    return 0


def _restrict(fine: np.ndarray, n_coarse: int, x_fine: np.ndarray, x_coarse: np.ndarray) -> np.ndarray:
    """Project a fine-grid field onto a coarser grid.

    Nested grids (ratio an integer) use block averaging, the exact adjoint of
    piecewise-constant refinement for cell-centered data; otherwise fall back
    to linear interpolation.
    """
    ratio, rem = divmod(len(fine), n_coarse)
    if rem == 0:
        return fine.reshape(n_coarse, ratio).mean(axis=1)
    return np.interp(x_coarse, x_fine, fine)


def _order_rows(quantity: str, ns: list, values: list, scale: float) -> list:
    """Turn a per-resolution value series into (quantity, N, value, order, flag) rows."""
    rows = []
    for j, (n, val) in enumerate(zip(ns, values)):
        order: float | None = None
        flag = "ok"
        if val < 1e-13 * max(scale, 1.0):
            flag = "roundoff"
        if j > 0:
            prev = values[j - 1]
            if prev <= val or val <= 0.0 or flag == "roundoff":
                flag = "undefined" if flag == "ok" else flag
                order = None
            else:
                order = math.log(prev / val) / math.log(ns[j] / ns[j - 1])
        rows.append([quantity, n, val, order if order is not None else "undefined", flag])
    return rows


def refinement_study(s: Scenario, n_list, outdir) -> int:
    """Self-convergence study over a strictly increasing resolution list."""
    n_list = [int(n) for n in n_list]
    if len(n_list) < 3 or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ConfigurationError(f"refinement needs >= 3 strictly increasing resolutions, got {n_list!r}")
    out = _resolve_outdir(outdir)

    both = s.solver_form == "both"
    finals = {}
    for n in n_list:
        mesh = build_mesh(s.L, n)
        profile = background_profile(mesh, s.rho_minus, s.rho_plus)
        state0 = build_initial(s, mesh, profile)
        form = V_FORM if s.solver_form == V_FORM else U_FORM
        traj = _integrate_scenario(s, mesh, profile, state0, form)
        if traj.status != "completed" or not traj.frames:
            raise ConfigurationError(f"refinement run at N={n} ended with status {traj.status!r}")
        entry = {
            "mesh": mesh,
            "rho": traj.frames[-1].rho,
            "vel": traj.frames[-1].vel,
            "resid_recip": traj.records[-1].resid_recip,
            "resid_pident": traj.records[-1].resid_pident,
        }
        if both:
            traj_v = _integrate_scenario(s, mesh, profile, state0, V_FORM)
            if traj_v.status != "completed" or not traj_v.frames:
                raise ConfigurationError(f"V-form refinement run at N={n} ended with status {traj_v.status!r}")
            entry["formdiff"] = float(np.max(np.abs(traj.frames[-1].rho - traj_v.frames[-1].rho)))
        finals[n] = entry

    rows = []
    rho_scale = max(s.rho_minus, s.rho_plus)
    for field_name, scale in (("rho", rho_scale), ("vel", max(abs(s.u_amplitude), 1.0))):
        errs = []
        for a, b in zip(n_list, n_list[1:]):
            coarse, fine = finals[a], finals[b]
            restricted = _restrict(fine[field_name], a, fine["mesh"].x, coarse["mesh"].x)
            errs.append(float(np.sum(np.abs(restricted - coarse[field_name])) * coarse["mesh"].dx))
        rows += _order_rows(field_name, n_list[1:], errs, scale)
    for resid in ("resid_recip", "resid_pident"):
        rows += _order_rows(resid, n_list, [finals[n][resid] for n in n_list], 1.0)
    if both:
        rows += _order_rows("formdiff_rho", n_list, [finals[n]["formdiff"] for n in n_list], rho_scale)

    _write_csv(out / "orders.csv", ["quantity", "N", "value", "order", "flag"], rows)
    return 0


def regularization_study(s: Scenario, n_list, outdir) -> int:
    """Run the floor/mollifier approximation ladder and its convergence table."""
    n_list = [int(n) for n in n_list]
    if not n_list or any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ConfigurationError(f"regularization needs an increasing n list, got {n_list!r}")
    out = _resolve_outdir(outdir)
    mesh = build_mesh(s.L, s.N)
    profile = background_profile(mesh, s.rho_minus, s.rho_plus)
    form = V_FORM if s.solver_form == V_FORM else U_FORM

    results = {}
    for n in n_list:
        params_n = dataclasses.replace(s.params, reg_n=n)
        s_n = dataclasses.replace(s, params=params_n)
        state0 = build_initial(s_n, mesh, profile, mollify_override=n)
        traj = _integrate_scenario(s_n, mesh, profile, state0, form)
        min_visc = (
            params_n.mu0 * traj.min_rho_ever ** params_n.alpha
            if math.isfinite(traj.min_rho_ever) and traj.min_rho_ever > 0.0
            else math.nan
        )
        results[n] = {
            "status": traj.status,
            "min_rho": traj.min_rho_ever,
            "min_visc": min_visc,
            "floor_active": not (min_visc > 1.0 / n),
            "rho_final": traj.frames[-1].rho if traj.frames else None,
        }

    ref = results[n_list[-1]]["rho_final"]
    rows = []
    for n in n_list:
        r = results[n]
        diff = (
            float(np.max(np.abs(r["rho_final"] - ref)))
            if r["rho_final"] is not None and ref is not None
            else math.nan
        )
        rows.append([
            n, r["status"], "yes" if r["floor_active"] else "no",
            r["min_rho"], r["min_visc"], diff,
        ])
    _write_csv(
        out / "regularization.csv",
        ["n", "status", "floor_active", "min_rho_run", "min_visc_run", "diff_to_reference"],
        rows,
    )
    return 0
