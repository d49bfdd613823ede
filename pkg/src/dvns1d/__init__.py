"""1D compressible Navier-Stokes with density-degenerate viscosity.

The viscosity law mu(rho) = mu0 * rho^alpha couples the momentum diffusion to
the density, and the change of unknown v = u + d/dx phi(rho) (with
phi'(rho) = mu(rho)/rho^2) moves that diffusion into the mass equation.  The
package integrates both formulations side by side and monitors the full
entropy/moment/bound structure of the underlying estimates at runtime.
"""

from .constitutive import (
    Params,
    TheoremReport,
    dphi,
    phi,
    pressure,
    relative_pressure,
    sound_speed,
    validate_params,
    viscosity,
)
from .errors import ConfigurationError, DomainError, NumericsError, VacuumBreach
from .kernels import active_backend, use_backend
from .mesh import (
    BackgroundProfile,
    Mesh,
    background_profile,
    build_mesh,
    div_flux,
    diffuse,
    grad_c,
    integrate,
    mollify,
    norm,
)
from .solver import (
    FlowState,
    StepReport,
    Trajectory,
    U_FORM,
    V_FORM,
    cfl_dt,
    effective_velocity,
    make_state,
    recover_u,
    run,
    step_u,
    step_v,
)
from .diagnostics import (
    DiagnosticsRecord,
    RunAccumulators,
    bd_dissipation_integrand,
    bd_functional,
    collect,
    density_report,
    dissipation_bd_rate,
    dissipation_u_rate,
    energy_functional,
    gronwall_bound_v,
    pressure_identity_residual,
    reciprocal_residual,
    v_moment,
    weighted_sup,
)
from .harness import (
    Scenario,
    build_initial,
    load_config,
    refinement_study,
    regularization_study,
    run_scenario,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "Params", "TheoremReport", "viscosity", "pressure", "sound_speed", "phi",
    "dphi", "relative_pressure", "validate_params",
    "ConfigurationError", "DomainError", "NumericsError", "VacuumBreach",
    "use_backend", "active_backend",
    "Mesh", "BackgroundProfile", "build_mesh", "background_profile", "mollify",
    "grad_c", "div_flux", "diffuse", "integrate", "norm",
    "FlowState", "StepReport", "Trajectory", "U_FORM", "V_FORM", "make_state",
    "effective_velocity", "recover_u", "cfl_dt", "step_u", "step_v", "run",
    "DiagnosticsRecord", "RunAccumulators", "energy_functional", "bd_functional",
    "dissipation_u_rate", "dissipation_bd_rate", "bd_dissipation_integrand",
    "weighted_sup", "v_moment", "gronwall_bound_v", "reciprocal_residual",
    "pressure_identity_residual", "density_report", "collect",
    "Scenario", "load_config", "build_initial", "run_scenario", "sweep",
    "refinement_study", "regularization_study",
    "__version__",
]
