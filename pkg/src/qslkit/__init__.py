"""Quantumness witness, open-system dynamics, and speed-limit timescales.

Quantifies the incompatibility generated between an initial and a
time-evolved quantum state, propagates unitary / dephasing / dissipative
dynamics with and without environmental memory, and evaluates the
speed-limit timescale for quantumness generation against exact evolution
times and the weaker fidelity-decay bound.
"""

from .bounds import (
    BoundReport,
    CrossingResult,
    conservative_bound_diagnostics,
    first_crossing_time,
    quantumness_dephasing,
    quantumness_dissipation,
    quarter_theta_unitary_report,
    speed_dissipation,
    tau_b_fidelity,
    tau_q_at_crossing,
    tau_q_dephasing,
    tau_q_from_trajectory,
    tau_q_unitary,
    unitary_speed_squared,
)
from .generators import (
    Dephasing,
    Dissipation,
    PositivityLossError,
    Schedule,
    Stirap,
    Trajectory,
    UnitaryControl,
    UnitaryTwoLevel,
    apply_generator,
    dephasing_closed_state,
    dissipation_closed_state,
    ghz_dephased_state,
    hamiltonian_2l,
    hamiltonian_stirap,
    propagate,
    unitary_state,
)
from .harness import (
    GhzScalingReport,
    ScenarioConfig,
    ScenarioResult,
    ValidationReport,
    fig1,
    fig2,
    fig3,
    ghz_scaling,
    run_scenario,
    validate,
)
from .matcore import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    DensityDiagnostics,
    commutator,
    dagger,
    from_pure,
    hs_norm,
    identity,
    min_eigenvalue,
    purity,
    validate_density,
)
from .memory import (
    DissipationMemory,
    MarkovLimits,
    MemoryFunctions,
    OUParams,
    RiccatiBlowupError,
    beta_integral,
    default_riccati_step,
    f_rate,
    gbar,
    markov_dissipation,
    markov_limits,
    ou_kernel,
    riccati_p,
)
from .witness import (
    QuantumnessSample,
    generation_speed,
    pure_state_quantumness,
    quantumness,
    quantumness_rate,
    random_density_matrix,
    random_pure_state,
)

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "CrossingResult",
    "DensityDiagnostics",
    "Dephasing",
    "Dissipation",
    "DissipationMemory",
    "GhzScalingReport",
    "MarkovLimits",
    "MemoryFunctions",
    "OUParams",
    "PositivityLossError",
    "QuantumnessSample",
    "RiccatiBlowupError",
    "SIGMA_MINUS",
    "SIGMA_PLUS",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "ScenarioConfig",
    "ScenarioResult",
    "Schedule",
    "Stirap",
    "Trajectory",
    "UnitaryControl",
    "UnitaryTwoLevel",
    "ValidationReport",
    "apply_generator",
    "beta_integral",
    "commutator",
    "conservative_bound_diagnostics",
    "dagger",
    "default_riccati_step",
    "dephasing_closed_state",
    "dissipation_closed_state",
    "f_rate",
    "fig1",
    "fig2",
    "fig3",
    "first_crossing_time",
    "from_pure",
    "gbar",
    "generation_speed",
    "ghz_dephased_state",
    "ghz_scaling",
    "hamiltonian_2l",
    "hamiltonian_stirap",
    "hs_norm",
    "identity",
    "markov_dissipation",
    "markov_limits",
    "min_eigenvalue",
    "ou_kernel",
    "propagate",
    "pure_state_quantumness",
    "purity",
    "quantumness",
    "quantumness_dephasing",
    "quantumness_dissipation",
    "quantumness_rate",
    "quarter_theta_unitary_report",
    "random_density_matrix",
    "random_pure_state",
    "riccati_p",
    "run_scenario",
    "speed_dissipation",
    "tau_b_fidelity",
    "tau_q_at_crossing",
    "tau_q_dephasing",
    "tau_q_from_trajectory",
    "tau_q_unitary",
    "unitary_speed_squared",
    "unitary_state",
    "validate",
    "validate_density",
]
